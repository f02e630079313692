"""Versioned JSON documents for instances, plans and traces, plus an SVG renderer."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ParseError
from .instance import Instance

VERSION = 1
KINDS = ("instance", "plan", "trace")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_doc(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def loads(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1)
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}", _line_of(text, "version"))
    if doc.get("kind") not in KINDS:
        raise ParseError(f"unknown kind {doc.get('kind')!r}", _line_of(text, "kind"))
    return doc


def read_doc(path) -> dict:
    return loads(Path(path).read_text())


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 1


def load_instance(path) -> Instance:
    text = Path(path).read_text()
    doc = loads(text)
    if doc["kind"] == "instance":
        body = doc
    elif isinstance(doc.get("instance"), dict):
        body = doc["instance"]
    else:
        raise ParseError("document carries no instance", _line_of(text, "kind"))
    try:
        return Instance.from_dict(body)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad instance field: {exc}", _line_of(text, str(exc).strip("'"))) from None


def _xy(points) -> list[list[float]]:
    return [[float(p[0]), float(p[1])] for p in points]


def plan_doc(instance: Instance, algorithm: str, epsilon: float, waypoints, length: float,
             lb: float | None, runtime_s: float, viewpoints=()) -> dict:
    """A closed tour; ``waypoints`` starts at the start point and omits the closing return."""
    return {
        "version": VERSION,
        "kind": "plan",
        "algorithm": algorithm,
        "epsilon": epsilon,
        "instance_hash": instance.digest(),
        "instance": instance.to_dict(),
        "waypoints": _xy(waypoints),
        "viewpoints": _xy(viewpoints),
        "length": length,
        "lb": lb,
        "ratio": length / lb if lb else None,
        "runtime_s": runtime_s,
    }


def trace_doc(instance: Instance, result, epsilon: float, lb: float | None = None) -> dict:
    return {
        "version": VERSION,
        "kind": "trace",
        "algorithm": result.policy,
        "epsilon": epsilon,
        "instance_hash": instance.digest(),
        "instance": instance.to_dict(),
        "positions": _xy(result.trace),
        "events": [{"step": i, "side": s} for i, s in result.events],
        "length": result.length,
        "lb": lb,
        "ratio": result.length / lb if lb else None,
        "steps": result.steps,
        "runtime_s": result.runtime_s,
    }


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def render_svg(doc: dict, px_per_m: float = 5.0) -> str:
    """SVG of the objects, viewpoints and the path held in a plan or trace document."""
    if doc.get("kind") == "plan":
        pts = doc.get("waypoints") or []
        if not pts:
            raise ParseError("plan has no waypoints")
        path = pts + [pts[0]]
    elif doc.get("kind") == "trace":
        path = doc.get("positions") or []
        if len(path) < 2:
            raise ParseError("trace is empty")
    else:
        raise ParseError("only plan and trace documents can be rendered")
    inst = Instance.from_dict(doc["instance"])
    x0, y0, x1, y1 = inst.bounds
    w, h = (x1 - x0) * px_per_m, (y1 - y0) * px_per_m

    def X(x):
        return _fmt((x - x0) * px_per_m)

    def Y(y):  # y axis up
        return _fmt((y1 - y) * px_per_m)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" fill="white"/>',
    ]
    for o in inst.objects:
        bx0, by0, bx1, by1 = o.bounds
        out.append(f'<rect x="{X(bx0)}" y="{Y(by1)}" width="{_fmt((bx1 - bx0) * px_per_m)}" '
                   f'height="{_fmt((by1 - by0) * px_per_m)}" fill="#777" data-id="{o.id}"/>')
    for p in doc.get("viewpoints") or []:
        out.append(f'<circle cx="{X(p[0])}" cy="{Y(p[1])}" r="2" fill="#c33"/>')
    coords = " ".join(f"{X(p[0])},{Y(p[1])}" for p in path)
    out.append(f'<polyline points="{coords}" fill="none" stroke="#136" stroke-width="1.5"/>')
    s = inst.start
    out.append(f'<circle cx="{X(s.x)}" cy="{Y(s.y)}" r="4" fill="#2a2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"

