"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 bad input data,
4 numerical failure (non-convergence or a degenerate estimator).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
import time
from enum import Enum
from pathlib import Path
from typing import List, Optional

from tailix import baselines
from tailix.errors import DegenerateEstimateError, DomainError
from tailix.experiments import PRESETS, emit_table, preset_config, run_preset
from tailix.inference import Hypothesis, Z_95, baseline_test_stat, decide, truncated_test_stat
from tailix.sample import Sample
from tailix.truncated import (INIT_RULES, Branch, SolverConfig, TruncationSchedule, admissible,
                              estimate)

EXIT_OK, EXIT_IO, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3, 4
ESTIMATOR_CHOICES = ("truncated", "hill", "qq", "moment", "thill", "tlghill")
BRANCH_FLAGS = {"auto": None, "lower": Branch.LOWER, "upper": Branch.UPPER,
                "one": Branch.BOUNDARY_ONE, "two": Branch.BOUNDARY_TWO}


class DataFormatError(Exception):
    pass


class InputReadError(Exception):
    pass


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _parse_float(text: str, where: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise DataFormatError(f"{where}: cannot parse {text.strip()!r} as a number") from None
    if not math.isfinite(v):
        raise DataFormatError(f"{where}: value {text.strip()!r} is not finite")
    if v < 0:
        raise DataFormatError(f"{where}: negative observation {v!r}; only nonnegative data are supported")
    return v


def read_observations(path: Path, column: Optional[str] = None) -> Sample:
    """One value per line (``#`` starts a comment), or a named column of a CSV file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputReadError(f"cannot read {path}: {exc.strerror}") from None
    values: List[float] = []
    if column is None:
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if line:
                values.append(_parse_float(line, f"line {lineno}"))
    else:
        reader = csv.DictReader(text.splitlines())
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise DataFormatError(f"column {column!r} not found in {path}")
        for lineno, rec in enumerate(reader, start=2):
            cell = (rec.get(column) or "").strip()
            if cell:
                values.append(_parse_float(cell, f"line {lineno}"))
    if not values:
        raise DataFormatError(f"{path} contains no observations")
    return Sample(values)


def _solver(args) -> SolverConfig:
    try:
        return SolverConfig(epsilon=args.epsilon, max_iter=args.max_iter, n0=args.n0)
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def _warn_admissibility(n: int, alpha_hat: float, b_n: float, beta: float) -> None:
    if 0 < alpha_hat < 2 and alpha_hat != 1 and not admissible(n, alpha_hat, b_n, beta):
        print(f"warning: b_n={b_n:.4g} violates b^a ln b <= a n^(1-2beta)/ln n "
              f"at a={alpha_hat:.4g}; convergence guarantees may not hold", file=sys.stderr)


def cmd_estimate(args) -> int:
    sample = read_observations(args.input, args.column)
    try:
        out = estimate(sample, TruncationSchedule(args.q), _solver(args),
                       BRANCH_FLAGS[args.branch], args.x0, args.init_rule)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    print(f"alpha_hat: {out.alpha_hat:.6f}")
    print(f"branch: {out.branch.value}")
    print(f"iterations: {out.iterations}")
    print(f"converged: {str(out.converged).lower()}")
    if out.degenerate_pilot:
        print("warning: pilot subsample was entirely truncated; started from the default value",
              file=sys.stderr)
    if out.branch in (Branch.LOWER, Branch.UPPER):
        _warn_admissibility(out.n, out.alpha_hat, out.b_n, args.beta)
    if not out.converged:
        raise NumericalFailure("fixed-point iteration did not converge")
    return EXIT_OK


def _truncated_branch(alpha0: float) -> Branch:
    if alpha0 == 1.0:
        return Branch.BOUNDARY_ONE
    if alpha0 == 2.0:
        return Branch.BOUNDARY_TWO
    return Branch.LOWER if alpha0 < 1.0 else Branch.UPPER


def cmd_test(args) -> int:
    if not 0.0 < args.alpha0 <= 2.0:
        raise UsageError(f"--alpha0 must lie in (0, 2], got {args.alpha0}")
    sample = read_observations(args.input, args.column)
    hyp = Hypothesis(args.alpha0, args.z)
    n = len(sample)
    if args.estimator == "truncated":
        try:
            out = estimate(sample, TruncationSchedule(args.q), _solver(args),
                           _truncated_branch(args.alpha0), args.x0)
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        if not out.converged:
            raise NumericalFailure("fixed-point iteration did not converge")
        alpha_hat = out.alpha_hat
        stat = truncated_test_stat(alpha_hat, hyp, out.n, out.b_n)
    else:
        m = args.m if args.m is not None else (n // 2 if args.estimator == "tlghill" else int(math.isqrt(n)))
        try:
            alpha_hat = baselines.BASELINES[args.estimator](sample.order_stats, m)
            stat = baseline_test_stat(args.estimator, alpha_hat, hyp, m)
        except DegenerateEstimateError as exc:
            raise NumericalFailure(str(exc)) from None
        except DomainError as exc:
            raise UsageError(str(exc)) from None
    d = decide(stat, hyp, args.estimator)
    print(f"estimator: {d.estimator_id}")
    print(f"alpha_hat: {alpha_hat:.6f}")
    print(f"statistic: {d.statistic:.6f}")
    print(f"threshold: {d.threshold}")
    print(f"decision: {'reject' if d.reject else 'accept'}")
    return EXIT_OK


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {k: _jsonable(v) for k, v in dataclasses.asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    return obj


def git_blob_hash(data: bytes) -> str:
    """SHA-1 of ``data`` as git would hash a blob."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def cmd_replicate(args) -> int:
    preset = preset_config(args.preset, args.reps, args.seed, args.workers)
    config = _jsonable(preset.config)
    config.pop("workers")  # no effect on results
    resolved = {"preset": args.preset, "kind": preset.kind, "alpha0": preset.alpha0, "config": config}
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {out_dir}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    start = time.perf_counter()
    table = run_preset(args.preset, args.reps, args.seed, args.workers)
    duration = time.perf_counter() - start
    formats = ("csv", "json") if args.format == "both" else (args.format,)
    outputs = []
    try:
        for fmt in formats:
            path = out_dir / f"{args.preset}.{fmt}"
            path.write_text(emit_table(table, fmt))
            outputs.append(str(path))
        manifest_path = out_dir / f"{args.preset}.manifest.json"
        canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode()
        manifest = {
            "resolved_config": resolved,
            "input_hash": git_blob_hash(canonical),
            "outputs": outputs,
            "duration_seconds": round(duration, 3),
        }
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        print(f"error: cannot write to {out_dir}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO
    for path in outputs:
        print(path)
    print(manifest_path)
    return EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--q", type=float, default=None, help="truncation exponent, b_n = n**q")
    p.add_argument("--x0", type=float, default=None, help="solver starting value")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--n0", type=int, default=50, help="pilot size for automatic branch choice")
    p.add_argument("--beta", type=float, default=0.0, help="exponent in the admissibility check")
    p.add_argument("--column", default=None, help="read this column of a CSV file instead of plain text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tailix", description="Tail-index estimation for heavy-tailed data.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the tail index of a data file")
    p.add_argument("input", type=Path)
    _add_solver_flags(p)
    p.add_argument("--branch", choices=tuple(BRANCH_FLAGS), default="auto")
    p.add_argument("--init-rule", choices=INIT_RULES, default="tail-growth")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("test", help="test H0: alpha = alpha0 on a data file")
    p.add_argument("input", type=Path)
    _add_solver_flags(p)
    p.add_argument("--alpha0", type=float, required=True)
    p.add_argument("--estimator", choices=ESTIMATOR_CHOICES, default="truncated")
    p.add_argument("--m", type=int, default=None, help="upper order statistics for the baselines")
    p.add_argument("--z", type=float, default=Z_95)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("replicate", help="run a built-in experiment preset")
    p.add_argument("preset", choices=tuple(PRESETS))
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=".")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_replicate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("estimate", "test") and args.q is None:
        if args.command == "estimate" or args.estimator == "truncated":
            parser.error("--q is required for the truncated estimator")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputReadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DataFormatError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
