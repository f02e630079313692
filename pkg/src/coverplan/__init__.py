"""Coverage path planning for observing every side of rectangular objects from a UAV."""

from .errors import CoverplanError
from .geometry import ObservationParams, Point2D, RectObject
from .instance import Instance
from .offline import OfflinePlan, plan_offline

__all__ = ["CoverplanError", "Instance", "ObservationParams", "OfflinePlan", "Point2D",
           "RectObject", "plan_offline"]
__version__ = "0.1.0"
