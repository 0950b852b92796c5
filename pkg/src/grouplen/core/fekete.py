"""Doubling-schedule upper bounds for limits of subadditive sequences.

If ``a(n+m) <= a(n) + a(m)`` then ``lim a(n)/n = inf a(n)/n``, so every
value ``a(n)/n`` is an upper bound on the limit.  Sampling along
``n = 2^j`` gives a non-increasing schedule because ``a(2n) <= 2 a(n)``.
No lower bound is claimed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from ..errors import NegativeValueError, NonFiniteValueError, SubadditivityError


@dataclass
class SubadditiveSeries:
    """``provider(n) -> a(n)`` together with the doubling exponent budget.

    ``spot_max`` bounds the pairs ``(n, m)`` with ``n, m <= spot_max`` on
    which subadditivity is tested directly; the doubling steps themselves
    are always tested.  ``rtol`` is the relative slack allowed for float
    providers (0 for exact ones).  ``nonnegative=False`` admits signed
    sequences such as ``log ||M^n||`` for contracting ``M``.
    """

    provider: Callable[[int], object]
    doubling_budget: int
    spot_max: int = 4
    rtol: float = 0.0
    nonnegative: bool = True


@dataclass(frozen=True)
class FeketeResult:
    rows: tuple            # ((n, bound), ...) with n = 2^j
    estimate: object
    one_sided: bool = True

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    @property
    def bounds(self):
        return [b for _, b in self.rows]


def _check_value(n, v, nonnegative):
    if isinstance(v, float) and not math.isfinite(v):
        raise NonFiniteValueError(f"a({n}) = {v}")
    if nonnegative and v < 0:
        raise NegativeValueError(f"a({n}) = {v} < 0")


def _leq(x, y, rtol):
    if rtol == 0:
        return x <= y
    return x <= y + rtol * max(1.0, abs(float(x)), abs(float(y)))


def fekete_upper_bounds(s: SubadditiveSeries) -> FeketeResult:
    if s.doubling_budget < 1:
        raise ValueError("doubling_budget must be at least 1")
    cache = {}

    def a(n):
        if n not in cache:
            v = s.provider(n)
            _check_value(n, v, s.nonnegative)
            cache[n] = v
        return cache[n]

    for n in range(1, s.spot_max + 1):
        for m in range(n, s.spot_max + 1):
            if not _leq(a(n + m), a(n) + a(m), s.rtol):
                raise SubadditivityError(n, m, f"a({n + m}) = {a(n + m)} > {a(n) + a(m)}")

    rows = []
    for j in range(s.doubling_budget + 1):
        n = 1 << j
        if j and not _leq(a(n), 2 * a(n // 2), s.rtol):
            raise SubadditivityError(n // 2, n // 2, f"a({n}) = {a(n)} > 2 a({n // 2})")
        v = a(n)
        bound = Fraction(v, n) if isinstance(v, (int, Fraction)) else v / n
        if rows and rows[-1][1] < bound:
            # float noise inside rtol; every a(n)/n is an upper bound, keep the smaller
            bound = rows[-1][1]
        rows.append((n, bound))
    return FeketeResult(tuple(rows), rows[-1][1])
