"""Abelian-by-cyclic groups G_A = Z^n x|_A Z and their vanishing certificates.

An element ``(v, p)`` stands for ``v t^p`` with the stable letter acting by
``t v t^-1 = A v``, so

    (v1, p1)(v2, p2) = (v1 + A^p1 v2, p1 + p2).

The certificate generators here turn the classical arguments for length
functions on these groups into step lists that :func:`verify_certificate`
replays: the Anosov case via Cayley-Hamilton, the parabolic case via the
family ``t^k w t^-k = w + k n u``, and the dominant-coefficient criterion for
characteristic polynomials of powers of A.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction

from .core.certificates import CertificateBuilder, VanishingCertificate, register_constructor
from .core.families import Family, register_family
from .errors import InvariantViolation, PreconditionError
from .heisenberg import HeisenbergElement, ext_gcd
from .matrices.qmatrix import QMatrix
from .rational import fmt_short


def _mat(A):
    if isinstance(A, QMatrix):
        return A.int_rows()
    return tuple(tuple(int(x) for x in r) for r in A)


def imatmul(X, Y):
    return tuple(tuple(sum(X[i][t] * Y[t][j] for t in range(len(Y))) for j in range(len(Y[0])))
                 for i in range(len(X)))


def imatvec(X, v):
    return tuple(sum(a * b for a, b in zip(r, v)) for r in X)


def idet(X):
    return int(QMatrix(X).det())


def iidentity(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


@dataclass(frozen=True)
class AbcElement:
    v: tuple
    p: int = 0

    def __str__(self):
        return "(" + ",".join(str(x) for x in self.v) + f");t^{self.p}"


class AbcGroup(Family):
    """Z^n x|_A Z for an integer matrix A with det +-1."""

    tag = "polycyclic"

    def __init__(self, A):
        A = _mat(A)
        n = len(A)
        if any(len(r) != n for r in A):
            raise ValueError("A must be square")
        d = idet(A)
        if d not in (1, -1):
            raise PreconditionError(f"det A = {d}; the action must be unimodular")
        self.A, self.n, self.det = A, n, d
        Ainv = QMatrix(A).inverse().int_rows()
        self._pow = {0: iidentity(n), 1: A, -1: Ainv}

    def params(self):
        return {"A": [list(r) for r in self.A]}

    def apow(self, p):
        if p not in self._pow:
            base = self._pow[1 if p > 0 else -1]
            out, b, e = iidentity(self.n), base, abs(p)
            while e:
                if e & 1:
                    out = imatmul(out, b)
                b = imatmul(b, b)
                e >>= 1
            if len(self._pow) < 4096:
                self._pow[p] = out
            return out
        return self._pow[p]

    def element(self, v=None, p=0):
        v = tuple(int(x) for x in (v if v is not None else [0] * self.n))
        if len(v) != self.n:
            raise ValueError(f"vector of length {len(v)} in a rank-{self.n} fiber")
        return AbcElement(v, int(p))

    def vec(self, v):
        return self.element(v, 0)

    def t(self, p=1):
        return self.element(None, p)

    def identity(self):
        return AbcElement((0,) * self.n, 0)

    def _check(self, x):
        if not isinstance(x, AbcElement) or len(x.v) != self.n:
            raise ValueError(f"{x!r} is not an element of a rank-{self.n} semidirect product")

    def mul(self, x, y):
        self._check(x)
        self._check(y)
        w = imatvec(self.apow(x.p), y.v)
        return AbcElement(tuple(a + b for a, b in zip(x.v, w)), x.p + y.p)

    def inv(self, x):
        self._check(x)
        w = imatvec(self.apow(-x.p), x.v)
        return AbcElement(tuple(-a for a in w), -x.p)

    def pow(self, x, e):
        if x.p == 0:
            return AbcElement(tuple(e * a for a in x.v), 0)
        return super().pow(x, e)

    def contains(self, x):
        return isinstance(x, AbcElement) and len(x.v) == self.n

    _PAT = re.compile(r"^\(\s*([-+\d,\s]*)\)\s*(?:;\s*t\^\s*\{?([+-]?\d+)\}?)?$")

    def parse(self, s):
        mt = self._PAT.match(s.strip())
        if not mt:
            raise ValueError(f"cannot parse {s!r}; expected '(v1,...,vn);t^p'")
        v = [int(x) for x in mt.group(1).split(",") if x.strip()]
        return self.element(v, int(mt.group(2) or 0))

    def format(self, x):
        return str(x)


register_family("polycyclic")(AbcGroup)


def abc_mul(G: AbcGroup, x, y):
    return G.mul(x, y)


def abc_pow(G: AbcGroup, x, e):
    return G.pow(x, e)


def abc_conj(G: AbcGroup, x, y):
    """x y x^-1"""
    return G.conj(x, y)


# trace classification -------------------------------------------------------

class TraceClass(enum.Enum):
    ANOSOV = "Anosov"
    PARABOLIC = "Parabolic"
    FINITE_ORDER = "FiniteOrder"
    IDENTITY = "Identity"


def trace_classify(A) -> TraceClass:
    """Classify A in SL_2(Z) by |tr A| against 2.

    ``-I`` has |tr| = 2 but order 2; it is reported as ``FiniteOrder``.
    """
    A = _mat(A)
    if len(A) != 2 or idet(A) != 1:
        raise PreconditionError(f"expected a 2x2 matrix of determinant 1, got {A}")
    tr = A[0][0] + A[1][1]
    if A == iidentity(2):
        return TraceClass.IDENTITY
    if abs(tr) > 2:
        return TraceClass.ANOSOV
    if abs(tr) == 2 and A != ((-1, 0), (0, -1)):
        return TraceClass.PARABOLIC
    return TraceClass.FINITE_ORDER


def basis_vector(n, i):
    return tuple(int(j == i) for j in range(n))


# span layer --------------------------------------------------------------

def _span_layer(b: CertificateBuilder, G: AbcGroup, v, finals):
    """Append steps proving l(v) <= 0 from per-basis results ``finals[j]``.

    ``finals[j]`` indexes an admitted relation gap_j l(e_j) <= 0 (as a form),
    gap_j > 0.  Uses l(v) <= sum l(x_j e_j) = sum |x_j| l(e_j).
    """
    parts = [(G.vec(basis_vector(G.n, j)), x, j) for j, x in enumerate(v) if x]
    if not parts:
        raise PreconditionError("the zero vector needs no certificate")
    terms = []
    acc = G.pow(parts[0][0], parts[0][1])
    for e, x, _ in parts[1:]:
        terms.append((b.comm(acc, G.pow(e, x)), 1))
        acc = G.mul(acc, G.pow(e, x))
    for e, x, j in parts:
        terms.append((b.homogeneity(e, x), 1))
        gap = b.relation(finals[j]).form().get(G.format(e), 0)
        if gap <= 0:
            raise InvariantViolation(f"basis relation for {G.format(e)} does not force vanishing")
        terms.append((finals[j], Fraction(abs(x)) / gap))
    return b.linear(terms)


# Anosov ------------------------------------------------------------------

def _anosov_steps(b: CertificateBuilder, G: AbcGroup, i):
    A = G.A
    tr, det = A[0][0] + A[1][1], G.det
    v = G.vec(basis_vector(2, i))
    t = G.t()
    Av, A2v = G.conj(t, v), G.conj(G.t(2), v)
    i0 = b.conj(v, t)                                  # l(Av) = l(v)
    i1 = b.conj(v, G.t(2))                             # l(A^2 v) = l(v)
    i2 = b.homogeneity(Av, tr)                         # l(tr Av) = |tr| l(Av)
    b.identity([(Av, tr)], [(A2v, 1), (v, det)])     # Cayley-Hamilton
    i4 = b.homogeneity(v, det)                         # l(det v) = l(v)
    i5 = b.comm(A2v, G.pow(v, det))                    # l(tr Av) <= l(A^2 v) + l(det v)
    return b.linear([(i5, 1), (i2, -1), (i0, -abs(tr)), (i1, 1), (i4, 1)],
                    lhs={v: abs(tr)}, rhs={v: 1 + abs(det)})


def _require_anosov(A):
    A = _mat(A)
    if len(A) != 2:
        raise PreconditionError("Anosov certificates are for 2x2 matrices")
    det, tr = idet(A), A[0][0] + A[1][1]
    if det not in (1, -1) or abs(tr) <= 2:
        raise PreconditionError(f"A = {A} is not Anosov (tr = {tr}, det = {det})")
    return A


def anosov_certificate(A) -> list:
    """ExactZero certificates for e_1 and e_2: |tr| l(e_i) <= (1 + |det|) l(e_i)."""
    A = _require_anosov(A)
    G = AbcGroup(A)
    certs = []
    for i in range(2):
        b = CertificateBuilder(G)
        _anosov_steps(b, G, i)
        certs.append(b.build(G.vec(basis_vector(2, i)), "ExactZero"))
    return certs


# parabolic ---------------------------------------------------------------

@dataclass(frozen=True)
class ParabolicNormalForm:
    eigenvalue: int
    u: tuple           # primitive eigenvector (the certified target)
    w: tuple           # completes u to a basis with det [u | w] = 1
    n: int             # U^-1 A U = [[eigenvalue, n], [0, eigenvalue]], U = [u | w]
    U: tuple

    @property
    def U_inv(self):
        return QMatrix(self.U).inverse().int_rows()


def primitive_kernel_vector(M):
    """Primitive integer vector spanning ker M for a rank-1 integer 2x2 M.

    Sign: last nonzero coordinate positive.
    """
    ker = QMatrix(M).nullspace()
    if len(ker) != 1:
        raise InvariantViolation(f"kernel of {M} has dimension {len(ker)}")
    v = ker[0]
    den = math.lcm(*(x.denominator for x in v))
    iv = [int(x * den) for x in v]
    g = math.gcd(*iv)
    iv = [x // g for x in iv]
    last = [x for x in iv if x][-1]
    if last < 0:
        iv = [-x for x in iv]
    return tuple(iv)


def parabolic_normal_form(A) -> ParabolicNormalForm:
    A = _mat(A)
    if trace_classify(A) is not TraceClass.PARABOLIC:
        raise PreconditionError(f"A = {A} is not parabolic")
    lam = (A[0][0] + A[1][1]) // 2
    u = primitive_kernel_vector(((A[0][0] - lam, A[0][1]), (A[1][0], A[1][1] - lam)))
    # complete to det [u | w] = u0 w1 - u1 w0 = 1
    g, x, y = ext_gcd(u[0], -u[1])   # u0 x - u1 y = 1
    if g != 1:
        raise InvariantViolation(f"eigenvector {u} is not primitive")
    w = (y, x)
    U = ((u[0], w[0]), (u[1], w[1]))
    N = imatmul(imatmul(QMatrix(U).inverse().int_rows(), A), U)
    if N[0][0] != lam or N[1][1] != lam or N[1][0] != 0 or abs(idet(U)) != 1:
        raise InvariantViolation(f"basis change failed: U^-1 A U = {N}")
    return ParabolicNormalForm(lam, u, w, N[0][1], U)


@register_constructor("polycyclic.parabolic")
def _parabolic_instance(G, params, k):
    """k |m| l(u) <= 2 l(w): t^(pk) w t^(-pk) = w + k m u."""
    u, w, p = G.vec(params["u"]), G.vec(params["w"]), int(params["p"])
    b = CertificateBuilder(G)
    Bkw = G.conj(G.t(p * k), w)
    diff = tuple(x - y for x, y in zip(Bkw.v, w.v))
    m = int(params["m"])
    if diff != tuple(k * m * x for x in u.v):
        raise InvariantViolation(f"A^{p * k} w - w = {diff} is not {k * m} u")
    i0 = b.conj(w, G.t(p * k))                              # l(w + kmu) = l(w)
    b.identity([(Bkw, 1), (w, -1)], [(u, k * m)])
    i2 = b.homogeneity(u, k * m)                            # l(km u) = k|m| l(u)
    i3 = b.homogeneity(w, -1)                               # l(-w) = l(w)
    i4 = b.comm(Bkw, G.inv(w))                              # l(km u) <= l(w + kmu) + l(-w)
    b.linear([(i4, 1), (i2, -1), (i0, 1), (i3, 1)], lhs={u: k * abs(m)}, rhs={w: 2})
    return b.steps


def parabolic_certificate(A, budget: int = 10) -> VanishingCertificate:
    """LimitZero certificate for the primitive eigenvector u of a parabolic A.

    For eigenvalue -1 the family uses even powers of t (A^2 is unipotent);
    the conclusion carries a note saying so.
    """
    nf = parabolic_normal_form(A)
    G = AbcGroup(A)
    p = 1 if nf.eigenvalue == 1 else 2
    Bw = G.conj(G.t(p), G.vec(nf.w))
    m = (Bw.v[0] - nf.w[0]) // nf.u[0] if nf.u[0] else (Bw.v[1] - nf.w[1]) // nf.u[1]
    b = CertificateBuilder(G)
    b.archimedean("polycyclic.parabolic", {"u": list(nf.u), "w": list(nf.w), "p": p, "m": m},
                  target=G.vec(nf.u), slope=abs(m), rhs={G.vec(nf.w): 2}, budget=budget)
    extra = {}
    if nf.eigenvalue == -1:
        extra["note"] = "eigenvalue -1: family built from even powers of t, where A^2 is unipotent"
    return b.build(G.vec(nf.u), "LimitZero", **extra)


# dominant coefficient ----------------------------------------------------

def int_charpoly(A):
    return [int(c) for c in QMatrix(A).charpoly()]


def dominant_index(coeffs):
    total = sum(abs(c) for c in coeffs)
    for i, c in enumerate(coeffs):
        if abs(c) > total - abs(c):
            return i
    return None


def _dominant_steps(b: CertificateBuilder, G: AbcGroup, v, k, coeffs, i):
    """|a_i| l(v) <= sum_{j != i} |a_j| l(v) from sum_j a_j A^(kj) v = 0."""
    powers = {j: G.conj(G.t(k * j), v) for j, a in enumerate(coeffs) if a}
    conj = {j: b.conj(v, G.t(k * j)) for j in powers}
    others = [j for j in powers if j != i]
    hom = {j: b.homogeneity(powers[j], coeffs[j]) for j in others}
    terms_el = [G.pow(powers[j], coeffs[j]) for j in others]
    target = G.pow(powers[i], -coeffs[i])
    b.identity([(powers[i], -coeffs[i])], [(powers[j], coeffs[j]) for j in others])
    hi = b.homogeneity(powers[i], -coeffs[i])
    terms = []
    acc = terms_el[0]
    for el in terms_el[1:]:
        terms.append((b.comm(acc, el), 1))
        acc = G.mul(acc, el)
    if acc != target:
        raise InvariantViolation("characteristic polynomial relation failed")
    terms.append((hi, -1))
    terms += [(hom[j], 1) for j in others]
    terms.append((conj[i], -abs(coeffs[i])))
    terms += [(conj[j], abs(coeffs[j])) for j in others]
    return b.linear(terms, lhs={v: abs(coeffs[i])}, rhs={v: sum(abs(coeffs[j]) for j in others)})


def find_dominant_power(A, k_max):
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    A = _mat(A)
    G = AbcGroup(A)
    for k in range(1, k_max + 1):
        coeffs = int_charpoly(G.apow(k))
        i = dominant_index(coeffs)
        if i is not None:
            return k, coeffs, i
    return None


def dominant_coefficient_certificate(A, k_max: int = 8):
    """ExactZero certificates for every basis vector of Z^n, or None.

    Searches k = 1 .. k_max for a power A^k whose characteristic polynomial
    has a strictly dominant coefficient.
    """
    found = find_dominant_power(A, k_max)
    if found is None:
        return None
    k, coeffs, i = found
    G = AbcGroup(A)
    certs = []
    for j in range(G.n):
        b = CertificateBuilder(G)
        v = G.vec(basis_vector(G.n, j))
        _dominant_steps(b, G, v, k, coeffs, i)
        certs.append(b.build(v, "ExactZero", power=k, charpoly=[str(c) for c in coeffs]))
    return certs


# whole fiber --------------------------------------------------------------

def fiber_vanishing_certificate(A, v, k_max: int = 8) -> VanishingCertificate:
    """ExactZero certificate for an arbitrary fiber vector v.

    Proves vanishing on each basis vector (Anosov route for 2x2 matrices
    with |tr| > 2, else the dominant-coefficient route), then uses
    homogeneity and subadditivity inside Z^n.
    """
    A = _mat(A)
    G = AbcGroup(A)
    v = tuple(int(x) for x in v)
    b = CertificateBuilder(G)
    finals = {}
    anosov = G.n == 2 and abs(A[0][0] + A[1][1]) > 2
    if not anosov:
        found = find_dominant_power(A, k_max)
        if found is None:
            raise PreconditionError("no power of A up to k_max has a dominant coefficient")
        k, coeffs, i = found
    for j, x in enumerate(v):
        if not x:
            continue
        e = G.vec(basis_vector(G.n, j))
        finals[j] = _anosov_steps(b, G, j) if anosov else _dominant_steps(b, G, e, k, coeffs, i)
    if not any(v):
        raise PreconditionError("the zero vector needs no certificate")
    _span_layer(b, G, v, finals)
    return b.build(G.vec(v), "ExactZero")


# Heisenberg isomorphism ----------------------------------------------------

HEISENBERG_MATRIX = ((1, 1), (0, 1))


def heisenberg_to_polycyclic(x: HeisenbergElement, G: AbcGroup | None = None):
    """a -> t, b -> e_2, c -> e_1 in Z^2 x|_A Z with A = [[1,1],[0,1]]."""
    G = G or AbcGroup(HEISENBERG_MATRIX)
    t, e2, e1 = G.t(), G.vec((0, 1)), G.vec((1, 0))
    return G.mul(G.mul(G.pow(t, x.m), G.pow(e2, x.n)), G.pow(e1, x.k))


# Baumslag-Solitar BS(1, q) -------------------------------------------------

@dataclass(frozen=True)
class BSElement:
    r: Fraction
    p: int = 0

    def __str__(self):
        return f"({fmt_short(self.r)});t^{self.p}"


@register_family("bs")
class BaumslagSolitarFamily(Family):
    """BS(1, q) = Z[1/q] x| Z, with t x t^-1 = x^q for x = (1, 0)."""

    tag = "bs"

    def __init__(self, q=2):
        self.q = int(q)
        if self.q == 0:
            raise ValueError("q must be nonzero")

    def params(self):
        return {"q": self.q}

    def identity(self):
        return BSElement(Fraction(0), 0)

    def mul(self, x, y):
        return BSElement(x.r + Fraction(self.q) ** x.p * y.r, x.p + y.p)

    def inv(self, x):
        return BSElement(-x.r / Fraction(self.q) ** x.p, -x.p)

    def contains(self, x):
        return isinstance(x, BSElement)

    _PAT = re.compile(r"^\(\s*([-+]?\d+(?:/\d+)?)\s*\)\s*(?:;\s*t\^\s*([+-]?\d+))?$")

    def parse(self, s):
        mt = self._PAT.match(s.strip())
        if not mt:
            raise ValueError(f"cannot parse {s!r}; expected '(r);t^p'")
        return BSElement(Fraction(mt.group(1)), int(mt.group(2) or 0))

    def format(self, x):
        return str(x)


def baumslag_solitar_certificate(q: int) -> VanishingCertificate:
    """ExactZero for x in BS(1, q), |q| >= 2: |q| l(x) = l(x^q) = l(t x t^-1) = l(x)."""
    if abs(q) < 2:
        raise PreconditionError("need |q| >= 2")
    fam = BaumslagSolitarFamily(q)
    x, t = BSElement(Fraction(1), 0), BSElement(Fraction(0), 1)
    b = CertificateBuilder(fam)
    i0 = b.conj(x, t)
    i1 = b.homogeneity(x, q)
    b.linear([(i1, -1), (i0, 1)], lhs={x: abs(q)}, rhs={x: 1})
    return b.build(x, "ExactZero")
