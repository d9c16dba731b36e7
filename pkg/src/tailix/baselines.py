"""Order-statistics tail-index estimators used as comparison baselines.

All functions take an :class:`~tailix.sample.OrderStatView`, a
:class:`~tailix.sample.Sample`, or any array of positive observations, plus
the number ``m`` of upper order statistics to use. Index conventions follow
the usual ``X_(1) <= ... <= X_(n)`` subscripts. In 0-based numpy terms
``X_(j)`` is ``s[j - 1]``.
"""

from __future__ import annotations

import math

import numpy as np

from tailix.errors import DegenerateEstimateError, DomainError
from tailix.sample import as_view

MOMENT_INDEXINGS = ("printed", "conventional")


def _tail_setup(data, m: int, need: int = 1):
    s = as_view(data).values
    n = s.size
    if not need <= m < n:
        raise DomainError(f"tail size m={m} must satisfy {need} <= m < n={n}")
    if s[n - m - 1] <= 0:
        raise DomainError("upper order statistics must be positive")
    return s, n


def hill(view, m: int) -> float:
    """Hill estimator: reciprocal mean of ``log(X_(n-i+1) / X_(n-m))`` for ``i = 1..m``."""
    s, n = _tail_setup(view, m)
    mean_log = float(np.mean(np.log(s[n - m:] / s[n - m - 1])))
    if mean_log <= 0.0:
        raise DegenerateEstimateError("top order statistics are tied; Hill estimate is infinite")
    return 1.0 / mean_log


def qq(view, m: int) -> float:
    """QQ estimator: inverse least-squares slope of ``log X_(n-j+1)`` on ``log((m+1)/j)``."""
    s, n = _tail_setup(view, m, need=2)
    j = np.arange(1, m + 1, dtype=float)
    t = np.log((m + 1) / j)
    y = np.log(s[n - m:][::-1])  # y[j-1] = log X_(n-j+1)
    num = np.sum(t * y) - np.sum(t) * np.sum(y) / m
    den = np.sum(t * t) - np.sum(t) ** 2 / m
    slope = num / den
    if slope <= 0.0:
        raise DegenerateEstimateError("QQ slope is not positive")
    return 1.0 / float(slope)


def m_stat(view, m: int, l: int, indexing: str = "printed") -> float:
    """Mean of ``l``-th powers of log-excesses over ``X_(n-m)``.

    ``indexing="printed"`` averages over ``X_(n-i)`` for ``i = 1..m``. That
    range leaves out the sample maximum and ends with the zero term
    ``log(X_(n-m)/X_(n-m))``. ``"conventional"`` averages over
    ``X_(n-i+1)``, the same terms the Hill estimator uses.
    """
    if l not in (1, 2):
        raise DomainError("moment order l must be 1 or 2")
    if indexing not in MOMENT_INDEXINGS:
        raise DomainError(f"unknown indexing {indexing!r}")
    s, n = _tail_setup(view, m)
    top = s[n - m - 1:n - 1] if indexing == "printed" else s[n - m:]
    return float(np.mean(np.log(top / s[n - m - 1]) ** l))


def moment(view, m: int, indexing: str = "printed") -> float:
    """Moment estimator ``1 / (M1 + 1 - 1/2 * (1 - M1**2 / M2)**-1)``."""
    view = as_view(view)
    m1 = m_stat(view, m, 1, indexing)
    m2 = m_stat(view, m, 2, indexing)
    if m2 <= 0.0:
        raise DomainError("second log-moment is zero")
    resid = 1.0 - m1 * m1 / m2
    if resid == 0.0:
        raise DomainError("log-excesses are constant; moment correction is singular")
    inv = m1 + 1.0 - 0.5 / resid
    if inv == 0.0:
        raise DegenerateEstimateError("moment estimate is infinite")
    return 1.0 / inv


def t_hill(view, m: int) -> float:
    """t-Hill estimator built from ratios ``X_(m+1,n) / X_(i,n)`` of the i-th largest values."""
    s, n = _tail_setup(view, m)
    mean_ratio = float(np.mean(s[n - m - 1] / s[n - m:]))
    inv = 1.0 / mean_ratio - 1.0
    if inv <= 0.0:
        raise DegenerateEstimateError("top order statistics are tied; t-Hill estimate is infinite")
    return 1.0 / inv


def t_lg_hill(view, m: int, indexing: str = "printed") -> float:
    """Variance-to-mean ratio of log-excesses, inverted: ``M1 / (M2 - M1**2)``."""
    view = as_view(view)
    m1 = m_stat(view, m, 1, indexing)
    if m1 <= 0.0:
        raise DomainError("first log-moment is zero")
    m2 = m_stat(view, m, 2, indexing)
    spread = m2 - m1 * m1
    if spread <= 0.0 or not math.isfinite(spread):
        raise DegenerateEstimateError("log-excesses have no spread; t-lgHill estimate is infinite")
    return m1 / spread


BASELINES = {
    "hill": hill,
    "qq": qq,
    "moment": moment,
    "thill": t_hill,
    "tlghill": t_lg_hill,
}
