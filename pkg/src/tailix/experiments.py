"""Seeded Monte Carlo experiments: estimation error, Type I error and power.

Trial ``t`` of grid row ``r`` draws its sample from the stream
``SeedSpec(base_seed, t, r)``. Results are collected in trial order and
summed with :func:`math.fsum`. Tables therefore do not depend on how many
worker threads ran the trials, and raising ``reps`` leaves the first trials
unchanged.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from tailix.baselines import BASELINES
from tailix.distributions import ParetoLaw, SeedSpec, sample_pareto
from tailix.errors import DomainError
from tailix.inference import Hypothesis, Z_95, baseline_test_stat, truncated_test_stat
from tailix.truncated import Branch, SolverConfig, TruncationSchedule, estimate

ESTIMATOR_ORDER = ("truncated", "hill", "qq", "moment", "thill", "tlghill")
METRIC_KINDS = ("AE", "AT", "AP")
DEFAULT_SEED = 20240607
THREADS_ENV = "TAILIX_THREADS"


@dataclass(frozen=True)
class GridRow:
    """One table row: true (or hypothesised) tail index and estimator tuning."""

    alpha: float
    q: float
    branch: Branch = Branch.LOWER
    x0: Optional[float] = None
    m: int = 100
    m_tlghill: int = 5000


@dataclass(frozen=True)
class ExperimentConfig:
    grid: Tuple[GridRow, ...] = ()
    n: int = 10000
    reps: int = 1000
    base_seed: int = DEFAULT_SEED
    estimators: Tuple[str, ...] = ESTIMATOR_ORDER
    solver: SolverConfig = SolverConfig()
    z: float = Z_95
    workers: Optional[int] = None

    def validate(self) -> None:
        if self.reps < 1:
            raise DomainError("reps must be at least 1")
        if self.n < 2:
            raise DomainError("per-trial sample size must be at least 2")
        unknown = set(self.estimators) - set(ESTIMATOR_ORDER)
        if unknown:
            raise DomainError(f"unknown estimators: {sorted(unknown)}")
        for row in self.grid:
            if not row.alpha * row.q > 0:
                raise DomainError(f"row alpha={row.alpha}, q={row.q}: alpha*q must be positive")
            if row.alpha * row.q >= 1:
                warnings.warn(f"row alpha={row.alpha}, q={row.q}: alpha*q >= 1", stacklevel=3)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)


@dataclass
class MetricsRow:
    alpha: float
    q: float
    k: Optional[int]
    trials: int
    values: Dict[str, Optional[float]]
    excluded: Dict[str, int]


@dataclass
class MetricsTable:
    kind: str
    estimators: Tuple[str, ...]
    rows: List[MetricsRow] = field(default_factory=list)
    aggregate: Dict[str, Optional[float]] = field(default_factory=dict)
    alpha0: Optional[float] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["estimators"] = list(self.estimators)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsTable":
        return cls(
            kind=d["kind"],
            estimators=tuple(d["estimators"]),
            rows=[MetricsRow(**r) for r in d["rows"]],
            aggregate=dict(d["aggregate"]),
            alpha0=d.get("alpha0"),
        )


@dataclass(frozen=True)
class NormalityReport:
    alpha: float
    q: float
    trials: int
    excluded: int
    mean: Optional[float]
    sd: Optional[float]
    tail_frequency: Optional[float]


# -- trial engine -----------------------------------------------------------

def resolve_workers(requested: Optional[int] = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    workers = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            workers = min(workers, int(cap))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, workers)


def _ordered_map(fn, items, workers: int) -> list:
    if workers == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _trial(cfg: ExperimentConfig, row_index: int, row: GridRow, alpha0: Optional[float], t: int):
    sample = sample_pareto(ParetoLaw(row.alpha), cfg.n, SeedSpec(cfg.base_seed, t, row_index))
    hyp = Hypothesis(alpha0, cfg.z) if alpha0 is not None else None
    values: Dict[str, Optional[float]] = {}
    rejects: Dict[str, Optional[bool]] = {}
    iterations = None
    for name in cfg.estimators:
        try:
            if name == "truncated":
                out = estimate(sample, TruncationSchedule(row.q), cfg.solver, row.branch, row.x0)
                if not out.converged:
                    raise DomainError("solver did not converge")
                value = out.alpha_hat
                iterations = out.iterations
                stat = truncated_test_stat(value, hyp, out.n, out.b_n) if hyp else None
            else:
                m = row.m_tlghill if name == "tlghill" else row.m
                value = BASELINES[name](sample.order_stats, m)
                stat = baseline_test_stat(name, value, hyp, m) if hyp else None
        except DomainError:
            values[name] = None
            rejects[name] = None
            continue
        values[name] = value
        rejects[name] = None if stat is None else stat > cfg.z
    return values, rejects, iterations


def _run_row(cfg, row_index, row, alpha0, workers):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return _ordered_map(lambda t: _trial(cfg, row_index, row, alpha0, t), range(cfg.reps), workers)


def _mean(xs) -> Optional[float]:
    return math.fsum(xs) / len(xs) if xs else None


def _summarise(cfg, row, trials, use_rejections: bool) -> MetricsRow:
    values, excluded = {}, {}
    for name in cfg.estimators:
        if use_rejections:
            col = [float(rej[name]) for _, rej, _ in trials if rej[name] is not None]
        else:
            col = [v[name] for v, _, _ in trials if v[name] is not None]
        values[name] = _mean(col)
        excluded[name] = len(trials) - len(col)
    ks = [k for _, rej, k in trials if k is not None]
    k = int(round(math.fsum(ks) / len(ks))) if ks else None
    return MetricsRow(row.alpha, row.q, k, len(trials), values, excluded)


def _aggregate(kind: str, estimators, rows: List[MetricsRow]) -> Dict[str, Optional[float]]:
    agg: Dict[str, Optional[float]] = {}
    if not rows:
        return agg
    for name in estimators:
        col = [r.values[name] for r in rows]
        if any(v is None for v in col):
            agg[name] = None
        elif kind == "AE":
            agg[name] = math.fsum(abs(v - r.alpha) for v, r in zip(col, rows)) / len(rows)
        else:
            agg[name] = math.fsum(col) / len(rows)
    return agg


def _ordered_estimators(cfg) -> Tuple[str, ...]:
    return tuple(e for e in ESTIMATOR_ORDER if e in cfg.estimators)


def _run(cfg: ExperimentConfig, kind: str, alpha0_for_row) -> MetricsTable:
    cfg.validate()
    cfg = cfg.with_(estimators=_ordered_estimators(cfg))
    workers = resolve_workers(cfg.workers)
    rows = []
    for r, row in enumerate(cfg.grid):
        trials = _run_row(cfg, r, row, alpha0_for_row(row), workers)
        rows.append(_summarise(cfg, row, trials, use_rejections=kind != "AE"))
    return MetricsTable(kind, cfg.estimators, rows, _aggregate(kind, cfg.estimators, rows))


def run_estimation_experiment(cfg: ExperimentConfig) -> MetricsTable:
    """Average point estimate per row and estimator; aggregate is the mean absolute error."""
    return _run(cfg, "AE", lambda row: None)


def run_type1_experiment(cfg: ExperimentConfig) -> MetricsTable:
    """Rejection frequency of ``H0: alpha = row.alpha`` on data drawn at ``row.alpha``."""
    return _run(cfg, "AT", lambda row: row.alpha)


def run_power_experiment(cfg: ExperimentConfig, alpha0: float) -> MetricsTable:
    """Rejection frequency of ``H0: alpha = alpha0`` on data drawn at each ``row.alpha``."""
    table = _run(cfg, "AP", lambda row: alpha0)
    table.alpha0 = alpha0
    return table


# -- serialisation ---------------------------------------------------------

def _fmt(v) -> str:
    return "nan" if v is None else f"{v:.3f}"


def emit_table(table: MetricsTable, format: str = "csv") -> str:
    """Serialise a table. CSV rounds to 3 decimals; JSON keeps full precision."""
    if format == "json":
        return json.dumps(table.to_dict(), indent=2) + "\n"
    if format != "csv":
        raise DomainError(f"unknown output format {format!r}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["alpha", "q", "k", *table.estimators])
    for row in table.rows:
        k = "" if row.k is None else str(row.k)
        w.writerow([_fmt(row.alpha), _fmt(row.q), k, *(_fmt(row.values[e]) for e in table.estimators)])
    if table.rows:
        w.writerow([table.kind, "", "", *(_fmt(table.aggregate[e]) for e in table.estimators)])
    return buf.getvalue()


def load_table(text: str) -> MetricsTable:
    return MetricsTable.from_dict(json.loads(text))


# -- limit-law diagnostics ---------------------------------------------------

def _standardised(alpha_hat: float, alpha: float, n: int, b_n: float) -> float:
    log_b = math.log(b_n)
    if alpha == 1.0:
        return math.sqrt(n) * (alpha_hat - 1.0) * log_b / math.sqrt(b_n)
    if alpha == 2.0:
        return math.sqrt(n) * (alpha_hat - 2.0) * log_b / b_n
    if 0 < alpha < 1:
        sd = (1.0 - alpha) / math.sqrt(alpha * (2.0 - alpha))
    else:
        sd = (2.0 - alpha) / math.sqrt(alpha * (4.0 - alpha))
    return math.sqrt(n) * (alpha_hat - alpha) * log_b / (b_n ** (alpha / 2.0) * sd)


def _branch_for(alpha: float) -> Branch:
    if alpha == 1.0:
        return Branch.BOUNDARY_ONE
    if alpha == 2.0:
        return Branch.BOUNDARY_TWO
    return Branch.LOWER if alpha < 1.0 else Branch.UPPER


def normality_diagnostic(cfg: ExperimentConfig, alpha: float, q: float, row_index: int = 0) -> NormalityReport:
    """Empirical mean, SD and two-sided tail frequency of the standardized truncated estimate.

    Under the limit law these are close to 0, 1 and ``2 * (1 - Phi(z))``.
    """
    ParetoLaw(alpha)
    if cfg.reps < 1:
        raise DomainError("reps must be at least 1")
    sched = TruncationSchedule(q)
    branch = _branch_for(alpha)

    def one(t):
        sample = sample_pareto(ParetoLaw(alpha), cfg.n, SeedSpec(cfg.base_seed, t, row_index))
        out = estimate(sample, sched, cfg.solver, branch)
        if not out.converged:
            return None
        return _standardised(out.alpha_hat, alpha, out.n, out.b_n)

    zs = [z for z in _ordered_map(one, range(cfg.reps), resolve_workers(cfg.workers)) if z is not None]
    excluded = cfg.reps - len(zs)
    if not zs:
        return NormalityReport(alpha, q, 0, excluded, None, None, None)
    arr = np.asarray(zs)
    mean = math.fsum(zs) / len(zs)
    sd = float(np.std(arr, ddof=1)) if len(zs) > 1 else None
    tail = float(np.mean(np.abs(arr) > cfg.z))
    return NormalityReport(alpha, q, len(zs), excluded, mean, sd, tail)


# -- presets ---------------------------------------------------------------

def _rows(pairs, branch: Branch, x0: float) -> Tuple[GridRow, ...]:
    return tuple(GridRow(a, q, branch, x0) for a, q in pairs)


_LOWER_GRID = ((0.10, 2.00), (0.20, 2.00), (0.30, 2.00), (0.40, 1.80), (0.50, 1.70),
               (0.60, 1.50), (0.70, 1.30), (0.80, 1.20), (0.90, 1.10))
_UPPER_GRID = ((1.10, 0.80), (1.20, 0.70), (1.30, 0.65), (1.40, 0.63), (1.50, 0.61),
               (1.60, 0.60), (1.70, 0.60), (1.80, 0.58), (1.90, 0.45))
_POWER_LOWER = tuple((a, 1.5) for a in (0.60, 0.64, 0.68, 0.72, 0.76, 0.80, 0.84, 0.88, 0.92))
_POWER_UPPER = tuple((a, 0.63) for a in (1.40, 1.48, 1.56, 1.64, 1.72, 1.80, 1.88, 1.96))


@dataclass(frozen=True)
class Preset:
    kind: str
    config: ExperimentConfig
    alpha0: Optional[float] = None


PRESETS: Dict[str, Preset] = {
    "table1": Preset("AE", ExperimentConfig(_rows(_LOWER_GRID, Branch.LOWER, 0.5))),
    "table2": Preset("AE", ExperimentConfig(_rows(_UPPER_GRID, Branch.UPPER, 1.5))),
    "table3": Preset("AT", ExperimentConfig(_rows(_LOWER_GRID, Branch.LOWER, 0.5))),
    "table4": Preset("AT", ExperimentConfig(_rows(_UPPER_GRID, Branch.UPPER, 1.5))),
    "table5": Preset("AP", ExperimentConfig(_rows(_POWER_LOWER, Branch.LOWER, 0.5)), alpha0=0.60),
    "table6": Preset("AP", ExperimentConfig(_rows(_POWER_UPPER, Branch.UPPER, 1.5)), alpha0=1.40),
}


def preset_config(name: str, reps: Optional[int] = None, seed: Optional[int] = None,
                  workers: Optional[int] = None) -> Preset:
    try:
        p = PRESETS[name]
    except KeyError:
        raise DomainError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    changes = {k: v for k, v in (("reps", reps), ("base_seed", seed), ("workers", workers)) if v is not None}
    return replace(p, config=p.config.with_(**changes))


def run_preset(name: str, reps: Optional[int] = None, seed: Optional[int] = None,
               workers: Optional[int] = None) -> MetricsTable:
    p = preset_config(name, reps, seed, workers)
    if p.kind == "AE":
        return run_estimation_experiment(p.config)
    if p.kind == "AT":
        return run_type1_experiment(p.config)
    return run_power_experiment(p.config, p.alpha0)
