"""Piecewise-linear circle-map lifts and certified rotation-number brackets.

A lift F: R -> R is increasing with F(x + 1) = F(x) + 1; it is stored by its
nodes (x_i, F(x_i)) for 0 = x_0 < x_1 < ... < x_k < 1 and interpolated
linearly, the last piece ending at (1, F(0) + 1).

Bracket.  If p = floor(F^N(0)) then p <= N rho <= p + 1, because F^N(0) >= p
gives F^(kN)(0) >= kp by monotonicity and integer equivariance (same for the
upper side).  So rho lies in [p/N, (p+1)/N].  F^N(0) = p exactly means 0 is
periodic and rho = p/N.  One-step displacement min/max over the nodes is a
second bracket.

Iteration is exact over the rationals while denominators stay small.  After
that the orbit point is carried as an interval with endpoints k / 2^P,
rounded outward at each step; F is increasing, so the image of an interval
is bracketed by the images of its endpoints.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import NonMonotoneError
from ..rational import fmt_short, to_fraction


def _floor(q: Fraction):
    return q.numerator // q.denominator


class CircleLiftPL:
    __slots__ = ("xs", "ys", "slopes", "_scaled")

    def __init__(self, xs, ys):
        xs = [to_fraction(x) for x in xs]
        ys = [to_fraction(y) for y in ys]
        if not xs or xs[0] != 0:
            raise NonMonotoneError("the first node must be at x = 0")
        if len(xs) != len(ys):
            raise NonMonotoneError("nodes and values differ in length")
        if any(b <= a for a, b in zip(xs, xs[1:])) or xs[-1] >= 1:
            raise NonMonotoneError("nodes must increase strictly inside [0, 1)")
        ex, ey = xs + [Fraction(1)], ys + [ys[0] + 1]
        slopes = []
        for i in range(len(xs)):
            dy = ey[i + 1] - ey[i]
            if dy <= 0:
                raise NonMonotoneError(f"lift is not strictly increasing on [{fmt_short(ex[i])}, {fmt_short(ex[i + 1])}]")
            slopes.append(dy / (ex[i + 1] - ex[i]))
        # canonical form: drop interior nodes where the slope does not change
        keep = [0] + [i for i in range(1, len(xs)) if slopes[i] != slopes[i - 1]]
        self.xs = tuple(xs[i] for i in keep)
        self.ys = tuple(ys[i] for i in keep)
        self.slopes = tuple(slopes[i] for i in keep)
        self._scaled = {}

    # construction ------------------------------------------------------
    @classmethod
    def rotation(cls, alpha):
        return cls([0], [to_fraction(alpha)])

    @classmethod
    def from_slopes(cls, breakpoints, slopes, shift=0):
        """Nodes at ``breakpoints`` (starting at 0), given slopes, F(0) = shift.

        The slopes must average to 1 over [0, 1]."""
        bs = [to_fraction(b) for b in breakpoints]
        ss = [to_fraction(s) for s in slopes]
        ys, y = [], to_fraction(shift)
        for i, b in enumerate(bs):
            ys.append(y)
            nxt = bs[i + 1] if i + 1 < len(bs) else Fraction(1)
            y += ss[i] * (nxt - b)
        if y != ys[0] + 1:
            raise NonMonotoneError("slopes do not give F(1) = F(0) + 1")
        return cls(bs, ys)

    @classmethod
    def from_points(cls, xs, F):
        xs = sorted(set(Fraction(x) for x in xs) | {Fraction(0)})
        return cls(xs, [F(x) for x in xs])

    @classmethod
    def identity(cls):
        return cls.rotation(0)

    def to_json(self):
        return {"nodes": [[fmt_short(x), fmt_short(y)] for x, y in zip(self.xs, self.ys)]}

    @classmethod
    def from_json(cls, d):
        nodes = d["nodes"]
        return cls([n[0] for n in nodes], [n[1] for n in nodes])

    def __eq__(self, o):
        return isinstance(o, CircleLiftPL) and self.xs == o.xs and self.ys == o.ys

    def __hash__(self):
        return hash((self.xs, self.ys))

    def __repr__(self):
        return "CircleLiftPL(" + ", ".join(f"({fmt_short(x)}, {fmt_short(y)})" for x, y in zip(self.xs, self.ys)) + ")"

    # evaluation ---------------------------------------------------------
    def __call__(self, x):
        x = to_fraction(x)
        q = _floor(x)
        r = x - q
        i = bisect.bisect_right(self.xs, r) - 1
        return self.ys[i] + self.slopes[i] * (r - self.xs[i]) + q

    def inverse_at(self, y):
        y = to_fraction(y)
        q = _floor(y - self.ys[0])
        r = y - q
        i = bisect.bisect_right(self.ys, r) - 1
        return self.xs[i] + (r - self.ys[i]) / self.slopes[i] + q

    # group operations -----------------------------------------------------
    def compose(self, g: "CircleLiftPL") -> "CircleLiftPL":
        """self o g."""
        g0 = g.ys[0]
        pts = set(g.xs)
        for b in self.xs:
            # the translate of b inside [g(0), g(0) + 1)
            b = b + math.ceil(g0 - b)
            u = g.inverse_at(b)
            pts.add(u - _floor(u))
        return CircleLiftPL.from_points(pts, lambda x: self(g(x)))

    def __matmul__(self, g):
        return self.compose(g)

    def inverse(self) -> "CircleLiftPL":
        pts = [y - _floor(y) for y in self.ys]
        return CircleLiftPL.from_points(pts, self.inverse_at)

    def power(self, k: int) -> "CircleLiftPL":
        base = self if k >= 0 else self.inverse()
        out = CircleLiftPL.identity()
        for _ in range(abs(k)):
            out = out.compose(base)
        return out

    def displacement_range(self):
        """min and max of F(x) - x; attained at nodes since F - id is PL and 1-periodic."""
        d = [y - x for x, y in zip(self.xs, self.ys)]
        return min(d), max(d)

    # fixed-point evaluation -------------------------------------------------
    def _scaled_pieces(self, P):
        if P not in self._scaled:
            S = 1 << P
            cut = [-((-x.numerator * S) // x.denominator) for x in self.xs]   # ceil(x_i 2^P)
            pieces = []
            for x, y, s in zip(self.xs, self.ys, self.slopes):
                b = y - s * x                                   # F(x) = s x + b on the piece
                D = math.lcm(s.denominator, b.denominator)
                pieces.append((s.numerator * (D // s.denominator),
                               b.numerator * (D // b.denominator) * S, D))
            self._scaled[P] = (cut, pieces)
        return self._scaled[P]


@dataclass(frozen=True)
class RotationBracket:
    lo: Fraction
    hi: Fraction
    iterations: int
    method: str          # "periodic", "exact", "interval"

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def exact(self):
        return self.lo == self.hi

    def contains(self, x):
        return self.lo <= x <= self.hi

    def overlaps(self, o: "RotationBracket"):
        return max(self.lo, o.lo) <= min(self.hi, o.hi)

    def scaled(self, k):
        a, b = self.lo * k, self.hi * k
        return RotationBracket(min(a, b), max(a, b), self.iterations, self.method)

    def as_dict(self):
        return {"lo": fmt_short(self.lo), "hi": fmt_short(self.hi), "width": fmt_short(self.width),
                "iterations": self.iterations, "method": self.method}


EXACT_DENOMINATOR_LIMIT = 1 << 64


def _bracket_from(lo_pt, hi_pt, N, f, method):
    dmin, dmax = f.displacement_range()
    lo = max(Fraction(_floor(lo_pt), N), dmin)
    hi = min(Fraction(_floor(hi_pt) + 1, N), dmax)
    return RotationBracket(lo, hi, N, method)


def rotation_number(f: CircleLiftPL, N: int, precision: int | None = 160) -> RotationBracket:
    """Certified bracket for rho(f) from the orbit of 0 under N iterations.

    Width at most 1/N unless the interval orbit straddles an integer.
    ``precision=None`` iterates exactly throughout (cost grows with the
    denominators, so only for moderate N).
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    x = Fraction(0)
    n = 0
    while n < N:
        x = f(x)
        n += 1
        if x.denominator == 1:
            rho = Fraction(x.numerator, n)
            return RotationBracket(rho, rho, n, "periodic")
        if precision is not None and x.denominator > EXACT_DENOMINATOR_LIMIT:
            break
    if n == N:
        return _bracket_from(x, x, N, f, "exact")
    P = precision
    S = 1 << P
    lo = (x.numerator * S) // x.denominator
    hi = -((-x.numerator * S) // x.denominator)
    cut, pieces = f._scaled_pieces(P)
    mask = S - 1
    br = bisect.bisect_right
    for _ in range(N - n):
        q, r = lo >> P, lo & mask
        a, b, D = pieces[br(cut, r) - 1]
        lo = (a * r + b) // D + (q << P)
        q, r = hi >> P, hi & mask
        a, b, D = pieces[br(cut, r) - 1]
        hi = -((-(a * r + b)) // D) + (q << P)
    return _bracket_from(Fraction(lo, S), Fraction(hi, S), N, f, "interval")


@dataclass(frozen=True)
class ConjugationReport:
    rho_f: RotationBracket
    rho_conj: RotationBracket

    @property
    def overlap(self):
        return self.rho_f.overlaps(self.rho_conj)

    def as_dict(self):
        return {"rho_f": self.rho_f.as_dict(), "rho_hfh^-1": self.rho_conj.as_dict(),
                "overlap": self.overlap}


def rotation_conjugation_check(f: CircleLiftPL, h: CircleLiftPL, N: int) -> ConjugationReport:
    g = h.compose(f).compose(h.inverse())
    return ConjugationReport(rotation_number(f, N), rotation_number(g, N))


@dataclass(frozen=True)
class HomogeneityReport:
    k: int
    rho_f: RotationBracket
    rho_fk: RotationBracket

    @property
    def overlap(self):
        return self.rho_fk.overlaps(self.rho_f.scaled(self.k))

    def as_dict(self):
        return {"k": self.k, "rho_f": self.rho_f.as_dict(), "rho_f^k": self.rho_fk.as_dict(),
                "k*rho_f": self.rho_f.scaled(self.k).as_dict(), "overlap": self.overlap}


def rotation_homogeneity_check(f: CircleLiftPL, k: int, N: int) -> HomogeneityReport:
    return HomogeneityReport(k, rotation_number(f, N), rotation_number(f.power(k), N))
