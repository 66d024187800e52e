"""Command line interface: ``otsuki <command> --n N [options]``.

Commands
--------
scan      period map, area density and ratios on a geometric grid of moduli
solve     the closing modulus and summary for one ``(p, s)``
catalog   every compact member with ``s <= --max-s``, by area
verify    theorem certificates; exit status 1 if any fails
entropy   cone entropies with the round sphere and Clifford references
profile   profile curve (CSV) or, for ``n = 2``, a surface mesh (OBJ)

Exit status is 2 for invalid input, 3 for numerical failure, 1 for a failed
certificate and 0 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import bounds, geometry, profile, shrinker
from .errors import InputError, NumericalError
from .geometry import RotationSpec, ShapeParameter

COMMANDS = ("scan", "solve", "catalog", "verify", "entropy", "profile")
SCAN_COLUMNS = ("a", "T", "K", "w", "area", "entropy", "clifford_ratio")
SUMMARY_COLUMNS = ("p", "s") + SCAN_COLUMNS
CERTIFICATE_COLUMNS = ("claim", "passed", "margin", "samples", "detail")
ENTROPY_COLUMNS = ("source", "area", "entropy", "threshold_margin")
DEFAULT_MAX_S = {"catalog": 10, "entropy": 10, "verify": 50}

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: int
    p: Optional[int] = None
    s: Optional[int] = None
    a_min: Optional[float] = None
    a_max: Optional[float] = None
    grid_steps: int = 200
    quad_nodes: int = geometry.DEFAULT_NODES
    ode_steps: int = profile.DEFAULT_STEPS
    tol: float = geometry.DEFAULT_TOL
    format: str = "csv"
    output_path: Optional[str] = None
    theorem: Optional[str] = None
    max_s: Optional[int] = None
    export: str = "csv"
    circle_samples: int = 32
    precision: Optional[int] = None


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (value > 0 and math.isfinite(value)):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return value


def _int_at_least(minimum: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otsuki",
        description="Minimal rotational hypersurfaces M^n(s,p) of S^(n+1): period map, areas and bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=_int_at_least(2), required=True, help="hypersurface dimension (>= 2)")
    common.add_argument("--quad-nodes", type=_int_at_least(8), default=geometry.DEFAULT_NODES,
                        help="Gauss-Legendre points per quadrature panel (default 128)")
    common.add_argument("--tol", type=_positive_float, default=geometry.DEFAULT_TOL,
                        help="residual tolerance for K(a) = 2 pi p/s (default 1e-10)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", dest="output_path", help="write to this file instead of stdout")
    common.add_argument("--precision", type=_int_at_least(1),
                        help="significant digits in the output (default: shortest round trip)")

    def rotation(p: argparse.ArgumentParser, required: bool) -> None:
        p.add_argument("--p", type=_int_at_least(1), required=required, help="rotation number")
        p.add_argument("--s", type=_int_at_least(1), required=required, help="symmetry order")

    def moduli(p: argparse.ArgumentParser) -> None:
        p.add_argument("--a-min", type=_positive_float, help="default a0 * 1e-6")
        p.add_argument("--a-max", type=_positive_float, help="default a0 * (1 - 1e-6)")
        p.add_argument("--grid-steps", type=_int_at_least(2), default=200, help="grid points (default 200)")

    def max_s(p: argparse.ArgumentParser, default: str) -> None:
        p.add_argument("--max-s", type=_int_at_least(3), help=f"largest symmetry order (default {default})")

    moduli(sub.add_parser("scan", parents=[common], help="tabulate the period map on a grid of moduli"))
    rotation(sub.add_parser("solve", parents=[common], help="solve K(a) = 2 pi p/s"), required=True)
    max_s(sub.add_parser("catalog", parents=[common], help="all compact members up to --max-s"), "10")
    verify = sub.add_parser("verify", parents=[common], help="run theorem certificates")
    verify.add_argument("--theorem", choices=("1", "3", "4", "bounds"), required=True)
    moduli(verify)
    max_s(verify, "10 for theorem 1, 50 for theorem 3")
    max_s(sub.add_parser("entropy", parents=[common], help="cone entropies"), "10")
    prof = sub.add_parser("profile", parents=[common], help="export the profile curve or a mesh")
    rotation(prof, required=True)
    prof.add_argument("--ode-steps", type=_int_at_least(1000), default=profile.DEFAULT_STEPS,
                      help="RK4 steps per period (default 4096)")
    prof.add_argument("--export", choices=("csv", "obj"), default="csv")
    prof.add_argument("--circle-samples", type=_int_at_least(16), default=32,
                      help="points on the rotation circle for OBJ export (default 32)")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """Parse and validate; exits with status 2 and a usage message on error."""
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__}
    config = RunConfig(**values)
    if config.command == "profile" and config.export == "obj" and config.n != 2:
        parser.error("--export obj is only available for --n 2")
    if config.a_min is not None and config.a_max is not None and not config.a_min < config.a_max:
        parser.error("--a-min must be smaller than --a-max")
    return config


# --------------------------------------------------------------------------
# Output
# --------------------------------------------------------------------------


def _threads() -> int:
    raw = os.environ.get("OTSUKI_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"OTSUKI_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"OTSUKI_THREADS must be a positive integer, got {raw!r}")
    return value


def _format_float(value: float, precision: Optional[int]) -> str:
    if precision is None:
        return repr(float(value))
    return format(float(value), f".{precision}g")


def _json_value(value, precision: Optional[int]):
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    value = float(value)
    if not math.isfinite(value):
        return None
    return value if precision is None else float(format(value, f".{precision}g"))


def _csv_value(value, precision: Optional[int]) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    return _format_float(value, precision)


def emit(rows: List[Dict], columns: Sequence[str], config: RunConfig, out: IO[str]) -> None:
    """Write ``rows`` as CSV (header, LF endings) or as the JSON envelope."""
    if config.format == "json":
        payload = {
            "n": config.n,
            "command": config.command,
            "rows": [{c: _json_value(r[c], config.precision) for c in columns} for r in rows],
        }
        out.write(json.dumps(payload, indent=2) + "\n")
        return
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_value(r[c], config.precision) for c in columns])


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _grid(config: RunConfig) -> np.ndarray:
    a0 = geometry.critical_parameter(config.n)
    lo = config.a_min if config.a_min is not None else a0 * 1e-6
    hi = config.a_max if config.a_max is not None else a0 * (1.0 - 1e-6)
    if not (0 < lo < hi < a0):
        raise InputError(f"need 0 < a-min < a-max < a0 = {a0!r}, got [{lo!r}, {hi!r}]")
    return np.geomspace(lo, hi, config.grid_steps)


def _scan_row(n: int, a: float, nodes: int) -> Dict:
    # For a modulus that need not close up, ``area`` is the area per unit
    # rotation number w(a); the compact M(s, p) has area p * w.
    shape = ShapeParameter(n, float(a))
    period = geometry.period_T(shape, nodes)
    angle = geometry.rotation_angle(shape, nodes)
    w = geometry.area_density(shape, nodes)
    return {
        "a": shape.a,
        "T": period,
        "K": angle,
        "w": w,
        "area": w,
        "entropy": w / geometry.sphere_area(n),
        "clifford_ratio": w / geometry.clifford_area(n, 1),
    }


def _run_scan(config: RunConfig, out: IO[str]) -> int:
    grid = _grid(config)
    threads = _threads()
    task = lambda a: _scan_row(config.n, a, config.quad_nodes)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(task, grid))
    else:
        rows = [task(a) for a in grid]
    emit(rows, SCAN_COLUMNS, config, out)
    return EXIT_OK


def _run_solve(config: RunConfig, out: IO[str]) -> int:
    summary = geometry.summarize(config.n, RotationSpec(config.p, config.s), config.tol, config.quad_nodes)
    emit([summary.as_dict()], SUMMARY_COLUMNS, config, out)
    return EXIT_OK


def _run_catalog(config: RunConfig, out: IO[str]) -> int:
    max_s = config.max_s or DEFAULT_MAX_S["catalog"]
    rows = geometry.catalog(config.n, max_s, config.tol, config.quad_nodes, workers=_threads())
    emit([r.as_dict() for r in rows], SUMMARY_COLUMNS, config, out)
    return EXIT_OK


def _run_verify(config: RunConfig, out: IO[str]) -> int:
    n, nodes, tol = config.n, config.quad_nodes, config.tol
    if config.theorem == "1":
        reports = [
            bounds.certify_theorem1(n, _grid(config), nodes),
            bounds.certify_corollary2(n, config.max_s or 10, tol, nodes),
        ]
    elif config.theorem == "3":
        reports = [bounds.certify_theorem3(n, config.max_s or DEFAULT_MAX_S["verify"], tol, nodes)]
    elif config.theorem == "4":
        reports = [bounds.certify_theorem4(n, tol, nodes)]
    else:
        a0 = geometry.critical_parameter(n)
        reports = bounds.certify_envelopes(n, [0.25 * a0, 0.5 * a0, 0.75 * a0], nodes=nodes)
    emit([r.as_dict() for r in reports], CERTIFICATE_COLUMNS, config, out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAILED


def _run_entropy(config: RunConfig, out: IO[str]) -> int:
    max_s = config.max_s or DEFAULT_MAX_S["entropy"]
    rows = shrinker.entropy_table(config.n, max_s, config.tol, config.quad_nodes)
    emit([r.as_dict() for r in rows], ENTROPY_COLUMNS, config, out)
    return EXIT_OK if all(not r.threshold_margin <= 0 for r in rows) else EXIT_FAILED


def _run_profile(config: RunConfig, out: IO[str]) -> int:
    if config.export == "obj" and config.n != 2:
        raise InputError("--export obj is only available for --n 2")
    spec = RotationSpec(config.p, config.s)
    path = profile.profile_for_spec(config.n, spec, config.ode_steps, tol=config.tol, nodes=config.quad_nodes)
    if config.export == "obj":
        profile.export_mesh_s3(path, config.circle_samples).write_obj(out)
        return EXIT_OK
    rows = profile.export_profile_curve(path)
    if config.format == "json":
        emit([dict(zip(profile.CURVE_HEADER, row)) for row in rows], profile.CURVE_HEADER, config, out)
    else:
        profile.write_curve_csv(rows, out)
    return EXIT_OK


HANDLERS = {
    "scan": _run_scan,
    "solve": _run_solve,
    "catalog": _run_catalog,
    "verify": _run_verify,
    "entropy": _run_entropy,
    "profile": _run_profile,
}


def run(config: RunConfig, stdout: Optional[IO[str]] = None, stderr: Optional[IO[str]] = None) -> int:
    """Execute ``config`` and return the exit status.

    Output is assembled in memory and only written once the command has
    succeeded, so a failing run never leaves a partial file behind.
    """
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    buffer = io.StringIO()
    try:
        status = HANDLERS[config.command](config, buffer)
    except InputError as exc:
        print(f"otsuki: error: {exc}", file=stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"otsuki: numerical failure: {exc}", file=stderr)
        return EXIT_NUMERICAL
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(buffer.getvalue())
    else:
        stdout.write(buffer.getvalue())
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return run(config)
    except BrokenPipeError:
        # downstream closed early (e.g. ``| head``); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
