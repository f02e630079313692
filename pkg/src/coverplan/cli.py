"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 a size cap was hit.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import io
from .bench import ALGORITHMS, GenSpec, generate_instance, run_suite
from .errors import CoverplanError, InstanceTooLarge, ModelTooLarge
from .offline import plan_offline
from .online import POLICIES, run_policy
from .oracle import Caps, exact_optimum, ilp_export

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CAPS = 0, 2, 3, 4
PLAN_ALGORITHMS = ("offline",) + POLICIES + ("oracle",)


class UsageError(Exception):
    pass


def parse_caps(text: str | None) -> Caps:
    if not text:
        return Caps()
    known = {f.name: f.type for f in fields(Caps)}
    values = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in known:
            raise UsageError(f"bad cap {item!r}; expected key=value with key in {sorted(known)}")
        try:
            values[key] = float(val) if key == "max_dp_work" else int(val)
        except ValueError:
            raise UsageError(f"bad cap value {val!r}") from None
    return Caps(**values)


def _epsilon(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("epsilon must lie in (0, 1]")
    return v


def cmd_generate(args) -> int:
    inst = generate_instance(GenSpec(args.n, args.seed))
    out = Path(args.out or f"instance_n{args.n}_s{args.seed}.json")
    io.write_doc(inst.to_dict(), out)
    print(out)
    return EXIT_OK


def cmd_plan(args) -> int:
    caps = parse_caps(args.caps)
    inst = io.load_instance(args.instance)
    eps = args.epsilon
    alg = args.algorithm
    if alg == "offline":
        plan = plan_offline(inst, eps)
        doc = io.plan_doc(inst, alg, eps, plan.tour.waypoints, plan.tour.length, plan.lb,
                          plan.runtime_s, plan.tour.waypoints[1:])
    elif alg == "oracle":
        import time
        t0 = time.perf_counter()
        tour = exact_optimum(inst, eps, caps)
        dt = time.perf_counter() - t0
        doc = io.plan_doc(inst, alg, eps, tour.waypoints, tour.length, None, dt, tour.waypoints[1:])
    else:
        res = run_policy(alg, inst, eps)
        lb = plan_offline(inst, eps).lb
        doc = io.trace_doc(inst, res, eps, lb)
    out = Path(args.out or f"{Path(args.instance).stem}_{alg}.json")
    io.write_doc(doc, out)
    ratio = f"{doc['ratio']:.4f}" if doc["ratio"] is not None else "-"
    lb = f"{doc['lb']:.4f}" if doc["lb"] is not None else "-"
    print(f"algorithm={alg} length={doc['length']:.4f} lb={lb} ratio={ratio} "
          f"runtime_s={doc['runtime_s']:.4f} out={out}")
    if args.render:
        Path(args.render).write_text(io.render_svg(doc))
    return EXIT_OK


def cmd_render(args) -> int:
    doc = io.read_doc(args.file)
    out = Path(args.out or Path(args.file).with_suffix(".svg"))
    out.write_text(io.render_svg(doc))
    print(out)
    return EXIT_OK


def cmd_bench(args) -> int:
    rows = run_suite(args.n, args.epsilon, args.seeds, tuple(args.algorithm),
                     args.out or sys.stdout, with_oracle=args.oracle)
    failed = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} rows, {failed} failed", file=sys.stderr)
    return EXIT_OK


def cmd_export_lp(args) -> int:
    inst = io.load_instance(args.instance)
    out = Path(args.out or f"{Path(args.instance).stem}.lp")
    with open(out, "w", newline="\n") as fh:
        s = ilp_export(inst, args.epsilon, fh, parse_caps(args.caps))
    print(f"zones={s.n_zones} binaries={s.n_binary} continuous={s.n_continuous} "
          f"constraints={s.n_constraints} out={out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coverplan", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("plan", help="plan or simulate on an instance file")
    p.add_argument("instance")
    p.add_argument("--epsilon", type=_epsilon, default=0.5)
    p.add_argument("--algorithm", choices=PLAN_ALGORITHMS, default="offline")
    p.add_argument("--caps", help="oracle limits, e.g. max_zones=13,max_combinations=100000")
    p.add_argument("--out")
    p.add_argument("--render", metavar="SVG", help="also write an SVG of the result")
    p.set_defaults(func=cmd_plan)

    r = sub.add_parser("render", help="SVG of a plan or trace file")
    r.add_argument("file")
    r.add_argument("--out")
    r.set_defaults(func=cmd_render)

    b = sub.add_parser("bench", help="run the experiment grid and write CSV")
    b.add_argument("--n", type=int, nargs="+", default=[2, 3, 5, 10])
    b.add_argument("--epsilon", type=_epsilon, nargs="+", default=[0.3, 0.5])
    b.add_argument("--seeds", type=int, default=5)
    b.add_argument("--algorithm", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    b.add_argument("--oracle", action="store_true", help="add exact-optimum ratios where feasible")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    e = sub.add_parser("export-lp", help="write the zone ILP in CPLEX LP format")
    e.add_argument("instance")
    e.add_argument("--epsilon", type=_epsilon, default=0.5)
    e.add_argument("--caps")
    e.add_argument("--out")
    e.set_defaults(func=cmd_export_lp)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InstanceTooLarge, ModelTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPS
    except CoverplanError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
