"""Command-line driver: scans, crossings, boundaries, MC verification.

Exit status: 0 on success, 1 on configuration errors, 2 on computation
errors.  The thread count can also be set with BELLFRINGE_THREADS.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .analytics import bell_thresholds, semiclassical_ab
from .fringe_mc import FringeParams, verify_sensitivity
from .scan import (
    ScanSpec,
    emit_outputs,
    extract_region_boundary,
    find_zero_crossings,
    make_evaluator,
    run_scan,
)

CONFIG_ERROR = 1
COMPUTE_ERROR = 2


def _load_spec(path: str, no_rotation: bool, seed) -> ScanSpec:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if no_rotation:
        data["rotation"] = "off"
    if seed is not None:
        data["seed"] = seed
    return ScanSpec.from_dict(data)


def _thread_count(args) -> int:
    env = os.environ.get("BELLFRINGE_THREADS")
    if env is not None:
        return int(env)
    return args.threads


def _add_common(parser):
    parser.add_argument("--config", required=True, help="JSON scan specification")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override spec seed")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--cache", default=None, help="spectrum cache directory")
    parser.add_argument(
        "--no-rotation",
        action="store_true",
        help="disable the automatic pi/2 pre-rotation for repulsive interactions",
    )


def cmd_scan(args) -> int:
    spec = _load_spec(args.config, args.no_rotation, args.seed)
    rows = run_scan(spec, threads=_thread_count(args), cache_dir=args.cache)
    paths = emit_outputs(rows, spec, args.out)
    for path in paths:
        print(path)
    return 0


def cmd_crossings(args) -> int:
    spec = _load_spec(args.config, args.no_rotation, args.seed)
    rows = run_scan(spec, threads=_thread_count(args), cache_dir=args.cache)
    evaluate = make_evaluator(spec, column=args.column)
    crossings = find_zero_crossings(rows, args.column, evaluate)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "crossings.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"column": args.column, "crossings": crossings}, fh, indent=2)
        fh.write("\n")
    print(path)
    for lam in crossings:
        print(f"{args.column} = 0 at lambda = {lam:.6f}")
    return 0


def cmd_boundary(args) -> int:
    spec = _load_spec(args.config, args.no_rotation, args.seed)
    rows = run_scan(spec, threads=_thread_count(args), cache_dir=args.cache)
    boundary = extract_region_boundary(rows)
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "boundary.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("lambda,noise_value\n")
        for lam, noise in boundary:
            fh.write(f"{lam:.17g},{noise:.17g}\n")
    print(path)
    return 0


def cmd_mc_verify(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            mc = json.load(fh).get("mc") or {}
    else:
        mc = {}
    nu = mc.get("nu", args.nu)
    xi2 = mc.get("xi2", args.xi2)
    params = FringeParams(
        nu=nu,
        phi=mc.get("phi", args.phi),
        k=mc.get("k", 1.0),
        n_atoms=mc.get("n_atoms", args.n_atoms),
        n_periods=mc.get("n_periods", 8),
    )
    seed = args.seed if args.seed is not None else mc.get("seed", 0)
    result = verify_sensitivity(params, xi2, mc.get("n_shots", args.n_shots), seed)
    ratio = result.empirical_variance / result.predicted_variance
    print(f"empirical variance : {result.empirical_variance:.6e}")
    print(f"predicted variance : {result.predicted_variance:.6e}")
    print(f"ratio              : {ratio:.4f}")
    print(f"mean deviation     : {result.mean_deviation:.3e} "
          f"(std err {result.std_error:.3e})")
    print(f"failed fits        : {result.n_failed}/{result.n_shots}")
    return 0


def cmd_analytics(args) -> int:
    t1, t2, t3 = bell_thresholds()
    print(f"witness thresholds: lambda = {t1}, {t2:.6f}, {t3}")
    for lam in args.lam:
        pred = semiclassical_ab(lam)
        print(
            f"lambda={lam:g} [{pred.regime}]: xi2={pred.xi2:.6f} nu={pred.nu:.6f} "
            f"a={pred.a_param:.6f} b={pred.b_param:.6f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellfringe",
        description="Bell-correlation witness scans for a double-well Bose gas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scan", help="run a parameter scan and emit CSV/JSON")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("crossings", help="zero crossings of a column along lambda")
    _add_common(p)
    p.add_argument("--column", choices=("a_param", "b_param"), default="b_param")
    p.set_defaults(func=cmd_crossings)

    p = sub.add_parser("boundary", help="witness-region boundary over a noise grid")
    _add_common(p)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("mc-verify", help="Monte-Carlo check of the sensitivity formula")
    p.add_argument("--config", default=None, help="JSON file with an 'mc' block")
    p.add_argument("--nu", type=float, default=0.9)
    p.add_argument("--xi2", type=float, default=1.0)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--n-atoms", type=int, default=1000)
    p.add_argument("--n-shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_mc_verify)

    p = sub.add_parser("analytics", help="semiclassical predictions and thresholds")
    p.add_argument("--lam", type=float, action="append", default=[])
    p.set_defaults(func=cmd_analytics)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"computation error: {exc}", file=sys.stderr)
        return COMPUTE_ERROR


if __name__ == "__main__":
    sys.exit(main())
