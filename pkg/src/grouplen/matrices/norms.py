"""Stable norm s(M) = lim log||M^n|| / n and the matrix length max(s(M), s(M^-1)).

The Frobenius norm is submultiplicative, so log||M^n||_F is subadditive and
feeds the doubling schedule directly.  The limit is the log of the spectral
radius; ``log_spectral_radius`` is the oracle used by the tests.  Values may
be negative (contracting M), so the schedule runs without a sign check.
"""

from __future__ import annotations

import math

import numpy as np

from ..core.fekete import FeketeResult, SubadditiveSeries, fekete_upper_bounds
from ..errors import NumericalOverflowError, PreconditionError
from .qmatrix import QMatrix


def _as_float(M):
    if isinstance(M, QMatrix):
        if not M.is_square():
            raise PreconditionError("stable norm of a non-square matrix")
        if M.det() == 0:
            raise PreconditionError("stable norm needs an invertible matrix")
        return np.array([[float(x) for x in r] for r in M.rows])
    A = np.array(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError("stable norm of a non-square matrix")
    return A


def log_power_norm(A: np.ndarray, n: int) -> float:
    """log ||A^n||_F by renormalized binary powering."""
    logs, R = 0.0, np.eye(A.shape[0])
    blog, B = 0.0, A.copy()
    while n:
        if n & 1:
            R = R @ B
            logs += blog
            m = float(np.max(np.abs(R)))
            if m == 0.0:
                return -math.inf
            R /= m
            logs += math.log(m)
        n >>= 1
        if n:
            B = B @ B
            blog *= 2
            m = float(np.max(np.abs(B)))
            if m == 0.0 or not math.isfinite(m):
                raise NumericalOverflowError(n.bit_length(), f"squaring produced {m}")
            B /= m
            blog += math.log(m)
    return logs + 0.5 * math.log(float(np.sum(R * R)))


def stable_norm_bounds(M, doubling_budget: int = 12, rtol: float = 1e-9) -> FeketeResult:
    """Upper-bound schedule log||M^(2^j)||_F / 2^j for s(M)."""
    A = _as_float(M)

    def provider(n):
        v = log_power_norm(A, n)
        if not math.isfinite(v):
            raise NumericalOverflowError(n.bit_length() - 1, f"log norm of M^{n} is {v}")
        return v

    return fekete_upper_bounds(SubadditiveSeries(provider, doubling_budget, rtol=rtol, nonnegative=False))


def matrix_length(M, doubling_budget: int = 12) -> float:
    """Upper bound on max(s(M), s(M^-1)) at the final doubling level."""
    Q = M if isinstance(M, QMatrix) else None
    A = _as_float(M)
    Ainv = np.array([[float(x) for x in r] for r in Q.inverse().rows]) if Q is not None else np.linalg.inv(A)
    return max(stable_norm_bounds(A, doubling_budget).estimate,
               stable_norm_bounds(Ainv, doubling_budget).estimate)


def log_spectral_radius(M) -> float:
    A = _as_float(M)
    return math.log(float(np.max(np.abs(np.linalg.eigvals(A)))))
