"""Tail-index estimation from truncated sample moments.

For ``F(x) = 1 - x**(-alpha)`` the moments of ``X * 1{X <= b}`` have closed
forms in ``alpha`` and ``b``. Inverting them gives two fixed-point
equations, one on ``(0, 1)`` from the truncated mean and one on ``(1, 2)``
from the truncated second moment. :func:`solve_lower` and
:func:`solve_upper` find each fixed point by plain iteration. The two
boundary estimators cover ``alpha = 1`` and ``alpha = 2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from tailix.errors import DomainError
from tailix.sample import Sample, as_values

log = logging.getLogger(__name__)

CLAMP_MARGIN = 1e-6
DEFAULT_X0 = 0.5
DEFAULT_Y0 = 1.5


class Branch(str, Enum):
    LOWER = "lower"
    UPPER = "upper"
    BOUNDARY_ONE = "boundary-one"
    BOUNDARY_TWO = "boundary-two"


@dataclass(frozen=True)
class TruncationSchedule:
    """Truncation level ``b_n = n**q``."""

    q: float

    def __post_init__(self):
        if not self.q > 0:
            raise DomainError(f"truncation exponent must be positive, got {self.q!r}")

    def level(self, n: int) -> float:
        return truncation_level(n, self)


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-3
    max_iter: int = 200
    n0: int = 50

    def __post_init__(self):
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if self.max_iter < 1 or self.n0 < 1:
            raise DomainError("max_iter and n0 must be at least 1")


@dataclass(frozen=True)
class TruncatedMoments:
    mu_hat: float
    nu2_hat: float
    n: int
    b_n: float


@dataclass(frozen=True)
class EstimatorOutcome:
    """Result of one truncated estimation.

    ``trace`` holds every iterate from the starting value on, so
    ``len(trace) == iterations + 1``. Boundary estimators have a single-entry
    trace.
    """

    alpha_hat: float
    branch: Branch
    iterations: int
    trace: Tuple[float, ...]
    converged: bool
    n: int = 0
    b_n: float = float("nan")
    degenerate_pilot: bool = False


@dataclass(frozen=True)
class InitialValue:
    branch: Branch
    x0: float
    degenerate: bool = False


def truncation_level(n: int, sched: TruncationSchedule) -> float:
    if n < 2:
        raise DomainError("truncation level needs n >= 2 so that ln b_n > 0")
    return float(n) ** sched.q


def _log_level(b_n: float) -> float:
    if not b_n > 1.0:
        raise DomainError(f"truncation level must exceed 1, got {b_n!r}")
    return math.log(b_n)


def truncated_mean(sample, b_n: float) -> float:
    """Mean of ``X_k * 1{X_k <= b_n}``: observations above the level count as zero."""
    x = as_values(sample)
    if not b_n > 0:
        raise DomainError("truncation level must be positive")
    return float(np.where(x <= b_n, x, 0.0).mean())


def truncated_second_moment(sample, b_n: float) -> float:
    x = as_values(sample)
    if not b_n > 0:
        raise DomainError("truncation level must be positive")
    return float(np.where(x <= b_n, x * x, 0.0).mean())


def truncated_moments(sample, b_n: float) -> TruncatedMoments:
    x = as_values(sample)
    kept = np.where(x <= b_n, x, 0.0)
    return TruncatedMoments(float(kept.mean()), float((kept * kept).mean()), x.size, float(b_n))


def _g1(x: float, mu_hat: float, log_b: float) -> float:
    return 1.0 - math.log((1.0 - x) / x * mu_hat + 1.0) / log_b


def _g2(y: float, nu2_hat: float, log_b: float) -> float:
    return 2.0 - math.log((2.0 - y) / y * nu2_hat + 1.0) / log_b


def g1(x: float, mu_hat: float, b_n: float) -> float:
    """Fixed-point map on ``(0, 1)`` driven by the truncated mean."""
    if not 0.0 < x < 1.0:
        raise DomainError("g1 is defined for 0 < x < 1")
    if mu_hat < 0:
        raise DomainError("truncated mean must be nonnegative")
    return _g1(x, mu_hat, _log_level(b_n))


def g2(y: float, nu2_hat: float, b_n: float) -> float:
    """Fixed-point map on ``(1, 2)`` driven by the truncated second moment."""
    if not 1.0 < y < 2.0:
        raise DomainError("g2 is defined for 1 < y < 2")
    if nu2_hat < 0:
        raise DomainError("truncated second moment must be nonnegative")
    return _g2(y, nu2_hat, _log_level(b_n))


def _iterate(step, x0: float, lo: float, hi: float, cfg: SolverConfig, branch: Branch, b_n: float):
    # An iterate outside (lo, hi) is pulled back inside by CLAMP_MARGIN.
    # Two clamps in a row end the run as non-converged.
    trace = [x0]
    x = x0
    consecutive_clamps = 0
    converged = False
    for _ in range(cfg.max_iter):
        y = step(x)
        if not math.isfinite(y):
            break
        if not lo < y < hi:
            y = min(max(y, lo + CLAMP_MARGIN), hi - CLAMP_MARGIN)
            consecutive_clamps += 1
        else:
            consecutive_clamps = 0
        trace.append(y)
        if consecutive_clamps >= 2:
            break
        if abs(y - x) <= cfg.epsilon:
            converged = True
            break
        x = y
    return EstimatorOutcome(
        alpha_hat=trace[-1],
        branch=branch,
        iterations=len(trace) - 1,
        trace=tuple(trace),
        converged=converged,
        b_n=b_n,
    )


def solve_lower(mu_hat: float, b_n: float, x0: float = DEFAULT_X0,
                cfg: SolverConfig = SolverConfig()) -> EstimatorOutcome:
    """Iterate ``x_k = g1(x_{k-1})`` from ``x0`` until successive iterates differ by at most epsilon."""
    if not 0.0 < x0 < 1.0:
        raise DomainError("lower-branch start must lie in (0, 1)")
    if mu_hat < 0:
        raise DomainError("truncated mean must be nonnegative")
    log_b = _log_level(b_n)
    return _iterate(lambda x: _g1(x, mu_hat, log_b), x0, 0.0, 1.0, cfg, Branch.LOWER, b_n)


def solve_upper(nu2_hat: float, b_n: float, y0: float = DEFAULT_Y0,
                cfg: SolverConfig = SolverConfig()) -> EstimatorOutcome:
    """Iterate ``y_k = g2(y_{k-1})`` on ``(1, 2)``; mirror of :func:`solve_lower`."""
    if not 1.0 < y0 < 2.0:
        raise DomainError("upper-branch start must lie in (1, 2)")
    if nu2_hat < 0:
        raise DomainError("truncated second moment must be nonnegative")
    log_b = _log_level(b_n)
    return _iterate(lambda y: _g2(y, nu2_hat, log_b), y0, 1.0, 2.0, cfg, Branch.UPPER, b_n)


def boundary_lower(mu_hat: float, b_n: float) -> float:
    """Estimator for ``alpha = 1``: the truncated mean over ``ln b_n``."""
    return mu_hat / _log_level(b_n)


def boundary_upper(nu2_hat: float, b_n: float) -> float:
    """Estimator for ``alpha = 2``: the truncated second moment over ``ln b_n``."""
    return nu2_hat / _log_level(b_n)


INIT_RULES = ("tail-growth", "as-printed")


def initial_value(pilot, b_n0: float, rule: str = "tail-growth") -> InitialValue:
    """Pick the solver branch and starting value from a pilot subsample.

    Both rules look at ``r = truncated_mean(pilot, b_n0) / ln b_n0``.

    ``"as-printed"`` sends ``r <= 1`` to the lower solver started at ``r``
    and ``r > 1`` to the upper solver started at 1.5.

    ``"tail-growth"`` (the default) swaps the two sides. For ``alpha < 1``
    the truncated mean grows like ``b**(1 - alpha)``, which outpaces
    ``ln b``. For ``alpha > 1`` it stays bounded. So ``r > 1`` points to the
    lower branch (started at 0.5) and ``r <= 1`` to the upper one (1.5).

    A pilot whose observations all exceed ``b_n0`` gives ``r = 0``. Both
    rules then return the lower branch at 0.5 with ``degenerate=True``.
    """
    if rule not in INIT_RULES:
        raise DomainError(f"unknown initialisation rule {rule!r}")
    r = truncated_mean(pilot, b_n0) / _log_level(b_n0)
    if r == 0.0:
        return InitialValue(Branch.LOWER, DEFAULT_X0, degenerate=True)
    if rule == "as-printed":
        if r <= 1.0:
            x0 = r if r < 1.0 else DEFAULT_X0
            return InitialValue(Branch.LOWER, x0)
        return InitialValue(Branch.UPPER, DEFAULT_Y0)
    if r > 1.0:
        return InitialValue(Branch.LOWER, DEFAULT_X0)
    return InitialValue(Branch.UPPER, DEFAULT_Y0)


def estimate(sample, sched: TruncationSchedule, cfg: SolverConfig = SolverConfig(),
             branch_override: Optional[Branch] = None, x0: Optional[float] = None,
             init_rule: str = "tail-growth") -> EstimatorOutcome:
    """Run the truncated estimator on ``sample`` with ``b_n = n**q``.

    With ``branch_override`` the named solver starts at ``x0``, or 0.5 / 1.5
    when ``x0`` is omitted. The boundary branches evaluate the closed-form
    estimators. Without an override, the branch and start come from
    :func:`initial_value` on the first ``cfg.n0`` observations.
    """
    if not isinstance(sample, Sample):
        sample = Sample(sample)
    n = len(sample)
    if n < max(cfg.n0, 2):
        raise DomainError(f"sample of size {n} is smaller than the pilot size {cfg.n0}")
    b_n = truncation_level(n, sched)
    degenerate = False
    branch = Branch(branch_override) if branch_override is not None else None
    if branch is None:
        init = initial_value(sample.head(cfg.n0), truncation_level(cfg.n0, sched), init_rule)
        branch, x0, degenerate = init.branch, init.x0, init.degenerate
    m = truncated_moments(sample, b_n)
    if branch is Branch.LOWER:
        out = solve_lower(m.mu_hat, b_n, DEFAULT_X0 if x0 is None else x0, cfg)
    elif branch is Branch.UPPER:
        out = solve_upper(m.nu2_hat, b_n, DEFAULT_Y0 if x0 is None else x0, cfg)
    else:
        value = (boundary_lower(m.mu_hat, b_n) if branch is Branch.BOUNDARY_ONE
                 else boundary_upper(m.nu2_hat, b_n))
        out = EstimatorOutcome(value, branch, 0, (value,), True, b_n=b_n)
    return EstimatorOutcome(
        alpha_hat=out.alpha_hat, branch=out.branch, iterations=out.iterations,
        trace=out.trace, converged=out.converged, n=n, b_n=b_n,
        degenerate_pilot=degenerate,
    )


def contraction_base(alpha_ref: float, alpha_0: float, b_n: float, branch: Branch) -> float:
    """``A`` (lower) or ``B`` (upper): the bound shrinks like ``base**(-k)``."""
    log_b = _log_level(b_n)
    star = min(alpha_ref, alpha_0)
    branch = Branch(branch)
    if branch is Branch.LOWER:
        if not (0.0 < alpha_ref < 1.0 and 0.0 < alpha_0 < 1.0):
            raise DomainError("lower-branch bound needs alpha_ref and alpha_0 in (0, 1)")
        return star * (1.0 - alpha_ref) * log_b
    if branch is Branch.UPPER:
        if not (1.0 < alpha_ref < 2.0 and 1.0 < alpha_0 < 2.0):
            raise DomainError("upper-branch bound needs alpha_ref and alpha_0 in (1, 2)")
        return star * (2.0 - alpha_ref) * log_b / 2.0
    raise DomainError("convergence bound applies to the lower and upper solvers only")


def convergence_bound(k: int, alpha_ref: float, alpha_0: float, b_n: float, branch: Branch) -> float:
    """Exponential bound on ``|fixed point - k-th iterate|``.

    Returns ``inf`` for ``k >= 1`` when the contraction base is at most 1,
    i.e. the sample is too small for the bound to say anything.
    """
    if k < 0:
        raise DomainError("iteration count must be nonnegative")
    gap = abs(alpha_ref - alpha_0)
    base = contraction_base(alpha_ref, alpha_0, b_n, branch)
    if k == 0 or gap == 0.0:
        return gap
    if base <= 1.0:
        log.debug("contraction base %.4g <= 1; bound is vacuous", base)
        return math.inf
    return base ** (-k) * gap


def admissible(n: int, alpha: float, b_n: float, beta: float = 0.0) -> bool:
    """Check ``b_n**alpha * ln b_n <= alpha * n**(1 - 2 beta) / ln n``."""
    return b_n ** alpha * math.log(b_n) <= alpha * n ** (1.0 - 2.0 * beta) / math.log(n)
