"""Command-line driver.

Commands: ``catalog list``, ``verify``, ``curvature``, ``grassmann sample``.
Exit codes: 0 all checks pass, 1 a check failed, 2 some rows were skipped
(incomplete coverage), 64 usage or input-file errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import List, Optional

from . import catalog
from .curvature import lk_measure_detailed
from .errors import ChiUnknownError, LkError, SetValidationError, UnsupportedSection
from .geomconst import ball_volume
from .grassmann import STREAM_GRASSMANN, haar_sample, substream
from .limits import DEFAULT_RADII
from .report import report_to_csv_rows, report_to_json
from .spherical import conic_lk_measure_detailed
from .verify import DEFAULT_SAMPLES, THEOREM_IDS, run_theorem

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCOMPLETE = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; the contract is 64
        raise UsageError(message)


def _default_seed() -> int:
    env = os.environ.get("LK_DEFAULT_SEED")
    if env is None:
        return 42
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"LK_DEFAULT_SEED must be an integer, got {env!r}") from exc


def build_parser() -> _Parser:
    parser = _Parser(prog="lkcurv", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_catalog = sub.add_parser("catalog", help="catalog management")
    catalog_sub = p_catalog.add_subparsers(dest="subcommand", required=True)
    catalog_sub.add_parser("list", help="list built-in sets")

    p_verify = sub.add_parser("verify", help="run an identity check")
    p_verify.add_argument("--set", required=True, dest="set_ref",
                          help="builtin set name or set-definition file path")
    p_verify.add_argument("--theorem", required=True, choices=sorted(THEOREM_IDS))
    p_verify.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--radii", type=str, default=None,
                          help="comma-separated geometric schedule, e.g. 8,16,32,64")
    p_verify.add_argument("--out", type=str, default=None)
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.add_argument("--workers", type=int, default=1)
    p_verify.add_argument("--base-point", type=str, default=None,
                          help="comma-separated coordinates, e.g. 1,2")

    p_curv = sub.add_parser("curvature", help="curvature measure of a set in a ball")
    p_curv.add_argument("--set", required=True, dest="set_ref")
    p_curv.add_argument("--k", required=True, type=int)
    p_curv.add_argument("--radius", required=True, type=float)
    p_curv.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p_curv.add_argument("--seed", type=int, default=None)

    p_grass = sub.add_parser("grassmann", help="random subspace utilities")
    grass_sub = p_grass.add_subparsers(dest="subcommand", required=True)
    p_sample = grass_sub.add_parser("sample", help="draw Haar-uniform subspaces")
    p_sample.add_argument("--n", required=True, type=int)
    p_sample.add_argument("--k", required=True, type=int)
    p_sample.add_argument("--samples", type=int, default=1)
    p_sample.add_argument("--seed", type=int, default=None)
    return parser


def _parse_floats(text: str, flag: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise UsageError(f"{flag} expects comma-separated numbers, got {text!r}") from exc


def _resolve(set_ref: str):
    try:
        return catalog.resolve_set(set_ref)
    except FileNotFoundError as exc:
        raise UsageError(f"no builtin set or readable file named {set_ref!r}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"set file {set_ref!r} is not valid JSON: {exc}") from exc
    except SetValidationError as exc:
        raise UsageError(f"set file {set_ref!r} is malformed at {exc}") from exc


def _cmd_catalog_list(out) -> int:
    sets = catalog.builtin_sets()
    for name in sorted(sets):
        info = catalog.describe(sets[name])
        tag = "compact" if info["compact"] else info["kind"].replace("conic_graph", "conic")
        chi = info["chi"] if info["chi"] is not None else "?"
        print(f"{name}  n={info['ambient_dim']} d={info['dim']} chi={chi} {tag}", file=out)
    return EXIT_PASS


def _cmd_verify(args, out) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    radii = tuple(_parse_floats(args.radii, "--radii")) if args.radii else DEFAULT_RADII
    if args.samples < 100:
        raise UsageError("--samples must be at least 100")
    base_point = (
        _parse_floats(args.base_point, "--base-point") if args.base_point else None
    )
    name, descriptor = _resolve(args.set_ref)
    try:
        report = run_theorem(
            args.theorem,
            descriptor,
            set_name=name,
            n_samples=args.samples,
            seed=seed,
            radii=radii,
            workers=args.workers,
            base_point=base_point,
        )
    except (ValueError, UnsupportedSection, ChiUnknownError) as exc:
        raise UsageError(str(exc)) from exc
    except LkError as exc:
        # numerical failure (genericity budget, coverage gap, chart defects)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.format == "json":
        payload = report_to_json(report)
    else:
        buffer = io.StringIO()
        writer = csv.writer(buffer)
        writer.writerows(report_to_csv_rows(report))
        payload = buffer.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(payload)
    print(payload, file=out)
    _print_summary(report, out)
    if report.status == "pass":
        return EXIT_PASS
    if report.status == "incomplete":
        return EXIT_INCOMPLETE
    return EXIT_FAIL


def _print_summary(report, out) -> None:
    for row in report.rows:
        if row.skipped:
            print(f"# k={row.k} skipped: {row.reason}", file=out)
        else:
            mark = "ok" if row.passed else "FAIL"
            print(
                f"# k={row.k} lhs={row.lhs:.6g} rhs={row.rhs:.6g} "
                f"+-{row.uncertainty:.2g} [{mark}]",
                file=out,
            )
    print(f"# overall: {report.status} ({report.elapsed_seconds:.2f}s)", file=out)


def _cmd_curvature(args, out) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    name, descriptor = _resolve(args.set_ref)
    k, radius = args.k, args.radius
    if radius <= 0:
        raise UsageError("--radius must be positive")
    if not 0 <= k <= descriptor.ambient_dim:
        raise UsageError(f"--k must lie in [0, {descriptor.ambient_dim}]")
    try:
        if isinstance(descriptor, catalog.SmoothSet):
            value, err = lk_measure_detailed(descriptor, k, radius, seed=seed)
        elif isinstance(descriptor, catalog.ConicGraph):
            if k == 0:
                raise UsageError("order 0 needs the verify du_lambda0 route for cones")
            value, err = conic_lk_measure_detailed(
                descriptor, k, radius, n_samples=args.samples, seed=seed
            )
        else:  # linear subspace
            value = ball_volume(k) * radius**k if k == descriptor.dim else 0.0
            err = 0.0
    except LkError as exc:
        raise UsageError(str(exc)) from exc
    normalized = value / (ball_volume(k) * radius**k) if k >= 1 else value
    print(
        f"{name} k={k} R={radius:g} measure={value!r} normalized={normalized!r} "
        f"error_bound={err:.3g}",
        file=out,
    )
    return EXIT_PASS


def _cmd_grassmann_sample(args, out) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if not 1 <= args.k <= args.n:
        raise UsageError("need 1 <= k <= n")
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    for i in range(args.samples):
        rng = substream(seed, STREAM_GRASSMANN, i, 0)
        subspace = haar_sample(args.n, args.k, rng)
        doc = {"sample": i, "n": args.n, "k": args.k, "frame": subspace.frame.tolist()}
        print(json.dumps(doc), file=out)
    return EXIT_PASS


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "catalog":
            return _cmd_catalog_list(out)
        if args.command == "verify":
            return _cmd_verify(args, out)
        if args.command == "curvature":
            return _cmd_curvature(args, out)
        if args.command == "grassmann":
            return _cmd_grassmann_sample(args, out)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
