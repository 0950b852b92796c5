"""Jordan-Chevalley decompositions over the rationals.

The semisimple part S is a polynomial in M: it is the root of q(S) = 0 reached
by Newton's method started at M, where q is the squarefree part of the
characteristic polynomial.  Since q'(S) is invertible on the algebra
generated by M, the iteration S <- S - q(S) q'(S)^-1 terminates after about
log2(n) steps with q(S) = 0 exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ..errors import InvariantViolation, PreconditionError
from .qmatrix import QMatrix

# univariate polynomials over Q as coefficient lists, lowest degree first


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def upoly_divmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = [Fraction(x) for x in a]
    while len(r) >= len(b) and r:
        c = r[-1] / b[-1]
        s = len(r) - len(b)
        q[s] = c
        for i, x in enumerate(b):
            r[s + i] -= c * x
        r = _trim(r)
    return _trim(q), r


def upoly_gcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, upoly_divmod(a, b)[1]
    if not a:
        return a
    lc = a[-1]
    return [Fraction(x) / lc for x in a]


def upoly_deriv(p):
    return _trim([i * Fraction(c) for i, c in enumerate(p)][1:])


def squarefree_part(p):
    g = upoly_gcd(p, upoly_deriv(p))
    q, r = upoly_divmod(p, g)
    if r:
        raise InvariantViolation("gcd does not divide the polynomial")
    lc = q[-1]
    return [x / lc for x in q]


def eval_at_matrix(p, M: QMatrix):
    """Horner evaluation of p at a square matrix."""
    n = M.n
    out = QMatrix.zeros(n)
    I = QMatrix.identity(n)
    for c in reversed(_trim(p)):
        out = out @ M + I * c
    return out


def rational_roots(p):
    """All rational roots of p (Fraction coefficients), each once."""
    p = _trim(p)
    den = math.lcm(*(Fraction(c).denominator for c in p))
    ip = [int(Fraction(c) * den) for c in p]
    roots = []
    while ip and ip[0] == 0:
        ip = ip[1:]
        if Fraction(0) not in roots:
            roots.append(Fraction(0))
    if len(ip) <= 1:
        return roots
    a0, an = abs(ip[0]), abs(ip[-1])
    for num in _divisors(a0):
        for d in _divisors(an):
            for s in (1, -1):
                r = Fraction(s * num, d)
                if r not in roots and sum(c * r ** i for i, c in enumerate(ip)) == 0:
                    roots.append(r)
    return sorted(roots)


def _divisors(m):
    if m > 10 ** 12:
        raise PreconditionError(f"rational root search on coefficient {m} is out of budget")
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small + [m // d for d in small]))


@dataclass(frozen=True)
class JCDecomposition:
    M: QMatrix
    S: QMatrix
    N: QMatrix
    Ms: QMatrix | None = None
    Mu: QMatrix | None = None

    @property
    def has_multiplicative(self):
        return self.Ms is not None

    def as_dict(self):
        out = {"M": self.M.to_json(), "S": self.S.to_json(), "N": self.N.to_json()}
        if self.Ms is not None:
            out.update(Ms=self.Ms.to_json(), Mu=self.Mu.to_json())
        return out


def _check(M, S, N, Ms, Mu, q):
    n = M.n
    Z, I = QMatrix.zeros(n), QMatrix.identity(n)
    if S + N != M:
        raise InvariantViolation("S + N != M")
    if S @ N != N @ S:
        raise InvariantViolation("S and N do not commute")
    if N ** n != Z:
        raise InvariantViolation("N is not nilpotent")
    if eval_at_matrix(q, S) != Z:
        raise InvariantViolation("S is not annihilated by a squarefree polynomial")
    if Ms is not None:
        if Ms @ Mu != M or Ms @ Mu != Mu @ Ms:
            raise InvariantViolation("multiplicative parts do not recombine")
        if (Mu - I) ** n != Z:
            raise InvariantViolation("M_u is not unipotent")


def jordan_chevalley(M, multiplicative: bool | None = None) -> JCDecomposition:
    """M = S + N and, when M is invertible, M = M_s M_u with M_s = S, M_u = S^-1 M.

    ``multiplicative=True`` demands the multiplicative part (error if M is
    singular); ``False`` skips it; ``None`` computes it when possible.
    """
    if not isinstance(M, QMatrix):
        M = QMatrix(M)
    if not M.is_square():
        raise PreconditionError(f"Jordan-Chevalley needs a square matrix, got shape {M.shape}")
    q = squarefree_part(M.charpoly())
    dq = upoly_deriv(q)
    S = M
    for _ in range(2 * M.n.bit_length() + 4):
        qS = eval_at_matrix(q, S)
        if qS == QMatrix.zeros(M.n):
            break
        S = S - qS @ eval_at_matrix(dq, S).inverse()
    else:
        raise InvariantViolation("Newton iteration for the semisimple part did not terminate")
    N = M - S
    Ms = Mu = None
    singular = M.det() == 0
    if multiplicative and singular:
        raise PreconditionError("multiplicative decomposition of a singular matrix: S is singular")
    if multiplicative or (multiplicative is None and not singular):
        Ms, Mu = S, S.inverse() @ M
    _check(M, S, N, Ms, Mu, q)
    return JCDecomposition(M, S, N, Ms, Mu)


@dataclass(frozen=True)
class EHU:
    """M = e h u with e elliptic, h hyperbolic, u unipotent, pairwise commuting."""

    e: QMatrix
    h: QMatrix
    u: QMatrix
    method: str

    def as_dict(self):
        return {"e": self.e.to_json(), "h": self.h.to_json(), "u": self.u.to_json(), "method": self.method}


def ehu_decomposition(M) -> EHU:
    """Elliptic/hyperbolic split of the semisimple part, where it is exactly decidable.

    Two cases: 2x2 of determinant 1 (decided by the trace), or every
    eigenvalue rational (then e carries the signs and h the absolute
    values).  Anything else raises PreconditionError.
    """
    if not isinstance(M, QMatrix):
        M = QMatrix(M)
    jc = jordan_chevalley(M, multiplicative=True)
    S, n = jc.S, M.n
    I = QMatrix.identity(n)
    if n == 2 and M.det() == 1:
        tr = M.trace()
        if abs(tr) > 2:
            e = I if tr > 0 else -I
            out = EHU(e, e @ S, jc.Mu, "sl2-trace")
        else:
            out = EHU(S, I, jc.Mu, "sl2-trace")
    else:
        q = squarefree_part(M.charpoly())
        roots = rational_roots(q)
        if len(roots) != len(q) - 1:
            raise PreconditionError("eigenvalues are not all rational; only the JC decomposition is available")
        e = QMatrix.zeros(n)
        h = QMatrix.zeros(n)
        for r in roots:
            # Lagrange idempotent for eigenvalue r, as a polynomial in S
            P = I
            for s in roots:
                if s != r:
                    P = P @ (S - I * s) * (1 / (r - s))
            e = e + P * (1 if r > 0 else -1)
            h = h + P * abs(r)
        out = EHU(e, h, jc.Mu, "rational-eigenvalues")
    if out.e @ out.h @ out.u != M:
        raise InvariantViolation("e h u != M")
    for x, y in ((out.e, out.h), (out.e, out.u), (out.h, out.u)):
        if x @ y != y @ x:
            raise InvariantViolation("e, h, u do not commute")
    return out
