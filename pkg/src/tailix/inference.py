"""Two-sided asymptotic tests of ``H0: alpha = alpha0``.

Each estimator has a standardized statistic that is approximately ``|N(0, 1)|``
under the null. :func:`decide` rejects when the statistic exceeds the
critical value (1.96 for a 0.95 level).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from tailix.errors import AdmissibilityWarning, DomainError

Z_95 = 1.96


@dataclass(frozen=True)
class Hypothesis:
    alpha0: float
    z: float = Z_95

    def __post_init__(self):
        if not 0.0 < self.alpha0 <= 2.0:
            raise DomainError(f"hypothesised tail index must lie in (0, 2], got {self.alpha0!r}")
        if not self.z > 0:
            raise DomainError("critical value must be positive")


@dataclass(frozen=True)
class TestDecision:
    statistic: float
    threshold: float
    reject: bool
    estimator_id: str = ""

    __test__ = False  # keep pytest from collecting this class


def asymptotic_variance(alpha: float) -> float:
    """Limit variance of ``sqrt(n) (alpha_hat - alpha) ln b_n / b_n**(alpha/2)``."""
    if 0.0 < alpha < 1.0:
        return (1.0 - alpha) ** 2 / (alpha * (2.0 - alpha))
    if 1.0 < alpha < 2.0:
        return (2.0 - alpha) ** 2 / (alpha * (4.0 - alpha))
    raise DomainError("asymptotic variance is defined on (0, 1) and (1, 2) only")


def truncated_test_stat(alpha_hat: float, hyp: Hypothesis, n: int, b_n: float) -> float:
    """Standardized deviation of a truncated estimate from ``hyp.alpha0``.

    ``alpha0`` equal to 1 or 2 is handed to :func:`boundary_test_stat`,
    because the interior variance is zero there.
    """
    a0 = hyp.alpha0
    if a0 in (1.0, 2.0):
        return boundary_test_stat(alpha_hat, int(a0), n, b_n)
    if n < 2:
        raise DomainError("test statistic needs n >= 2")
    if not b_n > 1:
        raise DomainError("truncation level must exceed 1")
    sd = math.sqrt(asymptotic_variance(a0))
    return math.sqrt(n) * abs(alpha_hat - a0) * math.log(b_n) / (b_n ** (a0 / 2.0) * sd)


def boundary_test_stat(alpha_hat: float, target: int, n: int, b_n: float) -> float:
    """Standardized deviation of a boundary estimate from ``target`` (1 or 2)."""
    if target not in (1, 2):
        raise DomainError("boundary target must be 1 or 2")
    if not b_n > 1:
        raise DomainError("truncation level must exceed 1")
    limit = n / math.log(n)
    if (b_n if target == 1 else b_n * b_n) > limit:
        warnings.warn(
            f"truncation level {b_n:.4g} exceeds the growth limit for the alpha={target} law",
            AdmissibilityWarning, stacklevel=2)
    scale = math.sqrt(b_n) if target == 1 else b_n
    return math.sqrt(n) * abs(alpha_hat - target) * math.log(b_n) / scale


def _baseline_scale(estimator_id: str, a0: float, m: int) -> float:
    rm = math.sqrt(m)
    if estimator_id == "hill":
        return a0 * rm
    if estimator_id == "qq":
        return a0 * math.sqrt(m / 2.0)
    if estimator_id == "moment":
        return a0 * rm / math.sqrt(1.0 + a0 * a0)
    if estimator_id == "thill":
        return a0 * math.sqrt(a0 * (a0 + 2.0)) * rm / (1.0 + a0)
    if estimator_id == "tlghill":
        return a0 * rm / (2.0 * math.sqrt(2.0))
    raise DomainError(f"unknown baseline estimator {estimator_id!r}")


def baseline_test_stat(estimator_id: str, alpha_hat: float, hyp: Hypothesis, m: int) -> float:
    """``scale(alpha0, m) * |1/alpha_hat - 1/alpha0|`` for the named baseline."""
    if m < 1:
        raise DomainError("tail size must be at least 1")
    if not (alpha_hat > 0 and math.isfinite(alpha_hat)):
        raise DomainError("baseline statistic needs a finite positive estimate")
    scale = _baseline_scale(estimator_id, hyp.alpha0, m)
    return scale * abs(1.0 / alpha_hat - 1.0 / hyp.alpha0)


def decide(statistic: float, hyp: Hypothesis, estimator_id: str = "") -> TestDecision:
    if not statistic >= 0:
        raise DomainError("statistic must be nonnegative")
    return TestDecision(statistic, hyp.z, statistic > hyp.z, estimator_id)
