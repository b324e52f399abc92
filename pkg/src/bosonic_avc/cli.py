"""Command-line front end: ``bosonic-avc {bounds,quadrants,simulate,verify}``.

Single results are written as JSON and sweeps as CSV. Every file written
with ``--out`` gets a ``<out>.manifest.json`` companion recording the exact
invocation, so rerunning the recorded argv reproduces the output bytes.

Exit codes: 0 on success, 2 for bad or infeasible input, 3 when a built-in
check or lemma verification fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .bounds import CSV_COLUMNS, DEFAULT_RESOLUTION, bound_report
from .channel import JammerStrategy, PowerBudget
from .errors import InvalidParameter
from .protocol import decompose_on_triangle, lambda_c_values, quadrant_distribution
from .simulation import (
    DEFAULT_CHUNK,
    REPLAY_MODES,
    SIMULATORS,
    THREADS_ENV,
    SimulationConfig,
    default_workers,
)
from .special import verify_lemma_l1_det, verify_lemma_plackett

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CHECK = 3
CSV_DIGITS = 12


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    outputs: List[str]
    seed: Optional[int]
    version: str = __version__
    timestamp: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    argv: List[str] = field(default_factory=list)

    def write(self, out: Path) -> Path:
        path = out.with_name(out.name + ".manifest.json")
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")
        return path


def parse_range(text: str) -> np.ndarray:
    """``"start:stop:step"`` with ``stop`` included; a bare number is one point."""
    parts = text.split(":")
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"bad range {text!r}") from exc
    if len(values) == 1:
        return np.array(values)
    if len(values) != 3:
        raise UsageError(f"range must be start:stop:step, got {text!r}")
    start, stop, step = values
    if step <= 0:
        raise UsageError("range step must be positive")
    if stop < start:
        return np.array([])
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def format_number(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, float, np.floating, np.integer)):
        return f"{float(value):.{CSV_DIGITS}g}"
    return str(value)


def rows_to_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row[c]) for c in columns])
    return buf.getvalue()


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _budget(e: float, p: float) -> PowerBudget:
    try:
        return PowerBudget(e, p)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from exc


def _emit(text: str, args, parameters: dict, seed: Optional[int] = None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.write_text(text)
    RunManifest(
        subcommand=args.command,
        parameters=parameters,
        outputs=[str(out)],
        seed=seed,
        argv=list(args.argv),
    ).write(out)


def cmd_bounds(args) -> int:
    sweep = args.e_range is not None or args.p_range is not None
    if not sweep:
        if args.e is None or args.p is None:
            raise UsageError("bounds needs --e and --p, or --e-range/--p-range")
        report = bound_report(_budget(args.e, args.p), args.resolution).to_dict()
        fmt = args.format or "json"
        text = to_json(report) if fmt == "json" else rows_to_csv(CSV_COLUMNS, [report])
        _emit(text, args, {"e": args.e, "p": args.p, "resolution": args.resolution, "format": fmt})
        return EXIT_OK

    es = parse_range(args.e_range) if args.e_range is not None else np.array([args.e or np.nan])
    ps = parse_range(args.p_range) if args.p_range is not None else np.array([args.p or np.nan])
    if es.size == 0 or ps.size == 0 or np.isnan(es).any() or np.isnan(ps).any():
        raise UsageError("the sweep has no rows")
    reports = [bound_report(_budget(float(e), float(p)), args.resolution).to_dict() for e in es for p in ps]
    fmt = args.format or "csv"
    text = rows_to_csv(CSV_COLUMNS, reports) if fmt == "csv" else to_json(reports)
    params = {"e_range": args.e_range, "p_range": args.p_range, "resolution": args.resolution, "format": fmt}
    _emit(text, args, params)
    return EXIT_OK


def cmd_quadrants(args) -> int:
    budget = _budget(args.e, args.p)
    jammer = JammerStrategy(args.beta, args.njam)
    try:
        jammer.validate(budget)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from exc
    q = quadrant_distribution(args.e, jammer, args.resource)
    out = {
        "quadrants": q.to_dict(),
        "decomposition": decompose_on_triangle(q).to_dict(),
        "lambda_c": float(lambda_c_values(args.e, jammer.beta, jammer.N, args.resource)),
        "det": q.det,
    }
    params = {"e": args.e, "p": args.p, "beta": args.beta, "njam": args.njam, "resource": args.resource}
    _emit(to_json(out), args, params)
    return EXIT_OK


def _simulation_config(args) -> SimulationConfig:
    budget = _budget(args.e, args.p)
    policy = args.jammer
    jammer = None
    if args.beta is not None or args.njam is not None:
        jammer = JammerStrategy(args.beta or 0.0, args.njam or 0.0)
        policy = "fixed"
    if policy is None:
        policy = "replay_code" if args.protocol == "attack" else "worst_grid"
    if policy == "fixed" and jammer is None:
        raise UsageError("--jammer fixed needs --beta and/or --njam")
    if jammer is not None:
        try:
            jammer.validate(budget)
        except InvalidParameter as exc:
            raise UsageError(str(exc)) from exc
    return SimulationConfig(
        budget=budget,
        n=args.n,
        M=args.m,
        trials=args.trials,
        seed=args.seed,
        jammer_policy=policy,
        jammer=jammer,
        replay_mode=args.replay_mode,
        resource_energy=args.resource_energy,
        chunk_size=args.chunk_size,
        workers=args.threads,
        grid_resolution=args.resolution,
    )


def cmd_simulate(args) -> int:
    try:
        config = _simulation_config(args)
        report = SIMULATORS[args.protocol](config)
    except InvalidParameter as exc:
        raise UsageError(str(exc)) from exc
    _emit(report.to_json() + "\n", args, {"protocol": args.protocol, **config.to_dict()}, seed=config.seed)
    if args.trials_csv is not None:
        errors = report.trial_errors
        rows = [{"trial": i, "error": float(v)} for i, v in enumerate(errors)]
        Path(args.trials_csv).write_text(rows_to_csv(("trial", "error"), rows))
    if not report.passed:
        failed = [name for name, ok in report.checks.items() if not ok]
        print(f"check failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = []
    if args.lemma in ("l1det", "all"):
        rng = np.random.default_rng(args.seed)
        reports.append(verify_lemma_l1_det(args.trials, rng))
    if args.lemma in ("plackett", "all"):
        reports.append(verify_lemma_plackett())
    payload = [r.to_dict() for r in reports]
    _emit(to_json(payload), args, {"lemma": args.lemma, "trials": args.trials}, seed=args.seed)
    for r in reports:
        print(f"{r.name}: violations={r.violations} min_slack={r.min_slack:.3e}", file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosonic-avc",
        description="Capacity bounds and simulations for the jammed bosonic channel.",
        epilog=f"Exit codes: 0 ok, 2 bad/infeasible input, 3 failed check. "
        f"{THREADS_ENV} sets the default simulation thread count.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the result here (plus a .manifest.json)")

    b = sub.add_parser("bounds", help="closed-form lower bounds for one (E, P) or a sweep")
    b.add_argument("--e", type=float, help="sender energy per symbol")
    b.add_argument("--p", type=float, help="jammer energy per symbol")
    b.add_argument("--e-range", help="sweep E over start:stop:step (stop included)")
    b.add_argument("--p-range", help="sweep P over start:stop:step (stop included)")
    b.add_argument("--format", choices=("json", "csv"), help="json for one point, csv for sweeps by default")
    b.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION, help="worst-jammer grid size")
    common(b)
    b.set_defaults(func=cmd_bounds)

    q = sub.add_parser("quadrants", help="quadrant law of the shared sign bits")
    q.add_argument("--e", type=float, required=True)
    q.add_argument("--p", type=float, required=True)
    q.add_argument("--beta", type=float, default=0.0, help="jammer displacement (real)")
    q.add_argument("--njam", type=float, default=0.0, help="jammer thermal photons")
    q.add_argument("--resource", choices=("tmsv", "classical"), default="tmsv")
    common(q)
    q.set_defaults(func=cmd_quadrants)

    s = sub.add_parser("simulate", help="Monte Carlo simulation of one scheme")
    s.add_argument("protocol", choices=sorted(SIMULATORS))
    s.add_argument("--e", type=float, default=1.0)
    s.add_argument("--p", type=float, default=1.0)
    s.add_argument("--n", type=int, default=32, help="block length")
    s.add_argument("--m", type=int, default=2, help="message count (attack)")
    s.add_argument("--trials", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--beta", type=float, help="fixed jammer displacement (implies --jammer fixed)")
    s.add_argument("--njam", type=float, help="fixed jammer thermal photons (implies --jammer fixed)")
    s.add_argument("--jammer", choices=("none", "fixed", "worst_grid", "replay_code"))
    s.add_argument("--replay-mode", choices=REPLAY_MODES, default="uniform")
    s.add_argument("--resource-energy", type=float, help="photon number of the correlation resource")
    s.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK)
    s.add_argument("--threads", type=int, default=default_workers())
    s.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION)
    s.add_argument("--trials-csv", help="also write per-trial error indicators as CSV")
    common(s)
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="numerically check the two inequalities")
    v.add_argument("lemma", choices=("l1det", "plackett", "all"))
    v.add_argument("--trials", type=int, default=100_000)
    v.add_argument("--seed", type=int, default=0)
    common(v)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    try:
        return args.func(args)
    except (UsageError, InvalidParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
