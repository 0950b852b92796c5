"""Unipotent matrices are conjugate to their squares.

For U = I + N with N nilpotent, U^2 = I + N' where N' = 2N + N^2 has the same
Jordan type as N (char 0).  Jordan chain bases P, P' with P^-1 N P = J and
P'^-1 N' P' = J give X = P' P^-1 with X U X^-1 = U^2.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import InvariantViolation, PreconditionError
from .qmatrix import QMatrix


def _independent(vectors):
    if not vectors:
        return True
    return QMatrix(vectors).rank() == len(vectors)


def jordan_chains(N: QMatrix):
    """Chains [N^(k-1) x, ..., N x, x] for a nilpotent N, longest first."""
    n = N.n
    kernels = [[]]          # kernels[i] = basis of ker N^i
    P = QMatrix.identity(n)
    i = 0
    while len(kernels[-1]) < n:
        i += 1
        P = P @ N
        kernels.append(P.nullspace())
        if i > n:
            raise InvariantViolation("matrix is not nilpotent")
    height = len(kernels) - 1
    chains = []
    level: list = []        # vectors already placed at the current level
    for k in range(height, 0, -1):
        base = [list(v) for v in kernels[k - 1]] + [list(v) for v in level]
        for x in kernels[k]:
            if _independent(base + [list(x)]):
                base.append(list(x))
                chain = [list(x)]
                for _ in range(k - 1):
                    chain.append(N.apply(chain[-1]))
                chains.append(list(reversed(chain)))
                level.append(list(x))
        level = [N.apply(v) for v in level]
    chains.sort(key=len, reverse=True)
    return chains


def jordan_type(N: QMatrix):
    return tuple(len(c) for c in jordan_chains(N))


def chain_basis(N: QMatrix) -> QMatrix:
    cols = [v for c in jordan_chains(N) for v in c]
    return QMatrix.from_columns(cols)


def is_unitriangular(U: QMatrix):
    n = U.n
    return all(U[i, j] == (1 if i == j else 0) for i in range(n) for j in range(i + 1))


def unipotent_square_conjugator(U) -> QMatrix:
    """Exact P with P U P^-1 = U^2 for upper unitriangular U."""
    if not isinstance(U, QMatrix):
        U = QMatrix(U)
    if not U.is_square() or not is_unitriangular(U):
        raise PreconditionError("input is not upper unitriangular")
    I = QMatrix.identity(U.n)
    U2 = U @ U
    N, N2 = U - I, U2 - I
    if jordan_type(N) != jordan_type(N2):
        raise InvariantViolation("U and U^2 have different Jordan types")
    P = chain_basis(N2) @ chain_basis(N).inverse()
    if P @ U != U2 @ P:
        raise InvariantViolation("conjugator check P U P^-1 = U^2 failed")
    return P


def random_unitriangular(rng, n=5, lo=-9, hi=9, denominators=(1, 2, 3)):
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = Fraction(1)
        for j in range(i + 1, n):
            rows[i][j] = Fraction(rng.randint(lo, hi), rng.choice(denominators))
    return QMatrix(rows)
