"""Unit-scale Pareto laws and reproducible sampling from them.

Every draw goes through inverse-transform sampling on uniforms from a
counter-based Philox generator. Its key is derived from
``(base_seed, row_index, trial_index)``, so any trial's stream can be
rebuilt without replaying the ones before it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from tailix.errors import DomainError
from tailix.sample import Sample


@dataclass(frozen=True)
class ParetoLaw:
    """``F(x) = 1 - x**(-alpha)`` on ``[1, inf)`` with ``0 < alpha <= 2``."""

    alpha: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise DomainError(f"tail index must lie in (0, 2], got {self.alpha!r}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 1.0, 0.0, 1.0 - np.power(np.maximum(x, 1.0), -self.alpha))

    def quantile(self, u):
        return pareto_quantile(self, u)


@dataclass(frozen=True)
class SeedSpec:
    """Identifies one independent random stream.

    ``row_index`` separates experiment grid rows. Leave it at 0 for
    stand-alone draws.
    """

    base_seed: int
    trial_index: int = 0
    row_index: int = 0

    def __post_init__(self):
        if not 0 <= self.base_seed < 2**64:
            raise DomainError("base_seed must be a 64-bit unsigned integer")
        if self.trial_index < 0 or self.row_index < 0:
            raise DomainError("trial and row indices must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.base_seed, spawn_key=(self.row_index, self.trial_index))
        return np.random.Generator(np.random.Philox(ss))


def pareto_quantile(law: ParetoLaw, u):
    """Inverse CDF ``(1 - u)**(-1/alpha)``; accepts scalars or arrays in ``[0, 1)``."""
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr >= 0.0) & (arr < 1.0))):
        raise DomainError("quantile level must lie in [0, 1)")
    out = np.power(1.0 - arr, -1.0 / law.alpha)
    return float(out) if out.ndim == 0 else out


def sample_pareto(law: ParetoLaw, n: int, seed: SeedSpec) -> Sample:
    """Draw ``n`` i.i.d. observations from ``law``."""
    if n < 1:
        raise DomainError("sample size must be at least 1")
    u = seed.generator().random(n)  # in [0, 1), never 1
    return Sample(np.power(1.0 - u, -1.0 / law.alpha))
