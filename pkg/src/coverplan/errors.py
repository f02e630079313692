"""Exception hierarchy shared by every planner stage."""


class CoverplanError(Exception):
    """Base class for domain errors raised by the library."""


class InvalidParameter(CoverplanError, ValueError):
    pass


class InstanceTooSmall(CoverplanError):
    pass


class SideUncoverable(CoverplanError):
    def __init__(self, side_ids, message=None):
        self.side_ids = sorted(side_ids)
        super().__init__(message or f"no observation point covers sides {self.side_ids}")


class GraphDisconnected(CoverplanError):
    pass


class StructuralError(CoverplanError):
    """A tree or graph violated an invariant the pipeline relies on."""


class InstanceTooLarge(CoverplanError):
    pass


class ModelTooLarge(CoverplanError):
    def __init__(self, n_variables, limit):
        self.n_variables = n_variables
        self.limit = limit
        super().__init__(f"model would have {n_variables} binary variables (limit {limit})")


class NonTerminating(CoverplanError):
    pass


class GenerationFailed(CoverplanError):
    pass


class ParseError(CoverplanError):
    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
