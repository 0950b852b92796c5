"""SL_2 classification and translation lengths on the upper half-plane.

``translation_length`` uses the trace formula |tr M| = 2 cosh(tau/2).
``orbit_translation_estimate`` is the independent floating check: the
displacement d(z0, M^n z0) is subadditive in n, so d(z0, M^(2^j) z0) / 2^j is
a non-increasing schedule of upper bounds on tau.  Powers are formed by
repeated squaring with the largest entry factored out after every product,
its log accumulated separately.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction

import numpy as np

from ..core.fekete import FeketeResult, SubadditiveSeries, fekete_upper_bounds
from ..errors import NumericalOverflowError, PreconditionError
from .qmatrix import QMatrix


class SL2Class(enum.Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


def _entries(M):
    if isinstance(M, QMatrix):
        if M.shape != (2, 2):
            raise PreconditionError(f"expected a 2x2 matrix, got {M.shape}")
        return [list(r) for r in M.rows], True
    rows = [list(r) for r in M]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise PreconditionError("expected a 2x2 matrix")
    exact = all(isinstance(x, (int, Fraction)) for r in rows for x in r)
    return rows, exact


def _check_det(rows, exact, tol):
    d = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if exact:
        if d != 1:
            raise PreconditionError(f"det = {d}, expected 1")
    elif abs(float(d) - 1.0) > tol:
        raise PreconditionError(f"det = {float(d)!r}, expected 1 within {tol}")


def sl2_classify(M, tol: float = 1e-9) -> SL2Class:
    """By |tr| against 2; float input compares with tolerance ``tol``.

    Both +-I count as parabolic (|tr| = 2).
    """
    rows, exact = _entries(M)
    _check_det(rows, exact, tol)
    tr = abs(rows[0][0] + rows[1][1])
    t = 0 if exact else tol
    if tr > 2 + t:
        return SL2Class.HYPERBOLIC
    if tr < 2 - t:
        return SL2Class.ELLIPTIC
    return SL2Class.PARABOLIC


def translation_length(M, tol: float = 1e-9) -> float:
    """2 arccosh(|tr M| / 2) for hyperbolic M, else 0."""
    if sl2_classify(M, tol) is not SL2Class.HYPERBOLIC:
        return 0.0
    rows, _ = _entries(M)
    return 2.0 * math.acosh(abs(float(rows[0][0] + rows[1][1])) / 2.0)


def _basepoint_frame(z0):
    """T in SL_2(R) with T(i) = z0."""
    x, y = float(z0.real), float(z0.imag)
    if y <= 0:
        raise PreconditionError(f"basepoint {z0} is not in the upper half-plane")
    s = math.sqrt(y)
    return np.array([[s, x / s], [0.0, 1.0 / s]])


def _renormalized_power(G, n):
    """(log scale, R) with G^n = exp(log scale) * R and max |R| = 1."""
    logs, R = 0.0, np.eye(2)
    blog, B = 0.0, G.copy()
    while n:
        if n & 1:
            R = R @ B
            logs += blog
            m = np.max(np.abs(R))
            R /= m
            logs += math.log(m)
        n >>= 1
        if n:
            B = B @ B
            blog *= 2
            m = np.max(np.abs(B))
            B /= m
            blog += math.log(m)
    return logs, R


def _log_arccosh_frob(logs, R):
    """arccosh(||exp(logs) R||_F^2 / 2), staying in the log domain."""
    L = 2.0 * logs + math.log(float(np.sum(R * R))) - math.log(2.0)   # log of the arccosh argument
    if L > 20.0:
        return L + math.log1p(math.sqrt(max(0.0, 1.0 - math.exp(-2.0 * L))))
    return math.acosh(max(1.0, math.exp(L)))


def hyperbolic_displacement(M, n: int, z0: complex = 1j) -> float:
    """d(z0, M^n z0) in the upper half-plane metric."""
    rows, _ = _entries(M)
    G = np.array([[float(x) for x in r] for r in rows])
    T = _basepoint_frame(z0)
    Gc = np.linalg.solve(T, G @ T)
    logs, R = _renormalized_power(Gc, n)
    d = _log_arccosh_frob(logs, R)
    if not math.isfinite(d):
        raise NumericalOverflowError(n.bit_length() - 1, f"displacement for n = {n} is {d}")
    return d


def orbit_translation_estimate(M, z0: complex = 1j, doubling_budget: int = 12,
                               rtol: float = 1e-9) -> FeketeResult:
    """Doubling schedule d(z0, M^(2^j) z0) / 2^j, j = 0..B; each entry bounds tau from above."""
    rows, exact = _entries(M)
    _check_det(rows, exact, 1e-9)

    def provider(n):
        try:
            return hyperbolic_displacement(M, n, z0)
        except (OverflowError, FloatingPointError) as e:
            raise NumericalOverflowError(n.bit_length() - 1, str(e)) from None

    return fekete_upper_bounds(SubadditiveSeries(provider, doubling_budget, rtol=rtol))


def random_hyperbolic(rng, max_trace: int = 10, max_entry: int = 6) -> QMatrix:
    """Uniform-ish integer matrix in SL_2(Z) with 3 <= |tr| <= max_trace and entries bounded by max_entry."""
    if max_trace < 3:
        raise PreconditionError("hyperbolic matrices need |tr| >= 3")
    while True:
        t = rng.choice([1, -1]) * rng.randint(3, max_trace)
        a = rng.randint(-max_entry, max_entry)
        d = t - a
        bc = a * d - 1
        if abs(d) > max_entry or bc == 0:
            continue
        divs = [b for b in range(-max_entry, max_entry + 1) if b and bc % b == 0 and abs(bc // b) <= max_entry]
        if not divs:
            continue
        b = rng.choice(divs)
        return QMatrix([[a, b], [bc // b, d]])
