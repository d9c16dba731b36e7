"""Immutable observation batches and their order statistics."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Union

import numpy as np

from tailix.errors import DomainError


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class OrderStatView:
    """Ascending order statistics ``X_(1) <= ... <= X_(n)`` of a sample.

    Indexing through :meth:`x` is 1-based so formulas can be written with the
    usual order-statistic subscripts.
    """

    def __init__(self, sorted_values: np.ndarray):
        self._s = sorted_values

    @classmethod
    def from_values(cls, values: Iterable[float]) -> "OrderStatView":
        # stable sort keeps ties in input order
        return cls(_frozen(np.sort(np.asarray(values, dtype=float), kind="stable")))

    @property
    def values(self) -> np.ndarray:
        return self._s

    def __len__(self) -> int:
        return self._s.size

    def x(self, i: int) -> float:
        """Return ``X_(i)`` for ``1 <= i <= n``."""
        n = self._s.size
        if not 1 <= i <= n:
            raise IndexError(f"order statistic index {i} outside 1..{n}")
        return float(self._s[i - 1])

    def largest(self, i: int) -> float:
        """Return the i-th largest observation (``i = 1`` is the maximum)."""
        return self.x(self._s.size - i + 1)


class Sample:
    """A read-only batch of nonnegative observations.

    The sorted view is computed once on first use and shared by every
    order-statistics estimator applied to the sample.
    """

    def __init__(self, values: Union[Iterable[float], np.ndarray]):
        arr = np.array(values, dtype=float, copy=True).reshape(-1)
        if arr.size == 0:
            raise DomainError("sample must contain at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample contains non-finite values")
        if np.any(arr < 0):
            raise DomainError("observations must be nonnegative")
        self._values = _frozen(arr)

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return self._values.size

    def __repr__(self) -> str:
        return f"Sample(n={len(self)})"

    @cached_property
    def order_stats(self) -> OrderStatView:
        return OrderStatView.from_values(self._values)

    def head(self, k: int) -> "Sample":
        """First ``k`` observations, in collection order."""
        if not 1 <= k <= len(self):
            raise DomainError(f"cannot take {k} observations from a sample of {len(self)}")
        return Sample(self._values[:k])


def as_values(data) -> np.ndarray:
    """Coerce a :class:`Sample` or array-like into a 1-D float array."""
    if isinstance(data, Sample):
        return data.values
    arr = np.asarray(data, dtype=float).reshape(-1)
    if arr.size == 0:
        raise DomainError("sample must contain at least one observation")
    return arr


def as_view(data) -> OrderStatView:
    if isinstance(data, OrderStatView):
        return data
    if isinstance(data, Sample):
        return data.order_stats
    return OrderStatView.from_values(data)
