"""The integer Heisenberg group H = <a, b, c | [a,b] = c, c central>.

Elements are stored in the normal form ``a^m b^n c^k``.  The faithful
representation sends ``a^m b^n c^k`` to the unitriangular matrix

    [[1, m, k + m n],
     [0, 1, n      ],
     [0, 0, 1      ]]

and the multiplication law below is read off from it:

    (m1, n1, k1)(m2, n2, k2) = (m1 + m2, n1 + n2, k1 + k2 - m2 n1)

Length functions on H are exactly the functions
``l(a^m b^n c^k) = gcd(m, n) * coeff[class of (m, n)/gcd]`` for nonnegative
coefficients on primitive directions up to sign; in particular every
length function kills the centre.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core.axioms import AxiomReport, LengthFunctionSpec, Violation
from .core.certificates import CertificateBuilder, VanishingCertificate, register_constructor
from .core.families import Family, register_family
from .errors import NoWitnessError, InvariantViolation
from .rational import to_fraction


@dataclass(frozen=True, order=True)
class HeisenbergElement:
    m: int = 0
    n: int = 0
    k: int = 0

    def __mul__(self, other):
        return h_mul(self, other)

    def __pow__(self, e):
        return h_pow(self, e)

    def inverse(self):
        return HeisenbergElement(-self.m, -self.n, -self.k - self.m * self.n)

    def matrix(self):
        m, n, k = self.m, self.n, self.k
        return ((1, m, k + m * n), (0, 1, n), (0, 0, 1))

    @classmethod
    def from_matrix(cls, M):
        m, n = M[0][1], M[1][2]
        return cls(m, n, M[0][2] - m * n)

    def is_identity(self):
        return self.m == 0 and self.n == 0 and self.k == 0

    def __str__(self):
        return f"a^{self.m} b^{self.n} c^{self.k}"


IDENTITY = HeisenbergElement(0, 0, 0)
A = HeisenbergElement(1, 0, 0)
B = HeisenbergElement(0, 1, 0)
C = HeisenbergElement(0, 0, 1)


def h_mul(x: HeisenbergElement, y: HeisenbergElement) -> HeisenbergElement:
    return HeisenbergElement(x.m + y.m, x.n + y.n, x.k + y.k - y.m * x.n)


def h_pow(x: HeisenbergElement, e: int) -> HeisenbergElement:
    # binomial expansion of (I + N)^e, valid for negative e as well
    return HeisenbergElement(e * x.m, e * x.n, e * x.k - x.m * x.n * (e * (e - 1) // 2))


def h_inv(x):
    return x.inverse()


def commutator(x, y):
    return x * y * x.inverse() * y.inverse()


def commutator_power(n: int, m: int) -> HeisenbergElement:
    """[a^n, b^m], which equals c^(nm)."""
    return commutator(h_pow(A, n), h_pow(B, m))


def mat3_mul(X, Y):
    return tuple(tuple(sum(X[i][t] * Y[t][j] for t in range(3)) for j in range(3)) for i in range(3))


_TOKEN = re.compile(r"\s*([abcABC])\s*(?:\^\s*\{?\s*([+-]?\d+)\s*\}?)?")


def parse_element(s: str) -> HeisenbergElement:
    """Parse a word in a, b, c (capitals are inverses), e.g. ``a^4 b^0 c^7``."""
    s = s.strip()
    if s in ("", "1", "e", "id"):
        return IDENTITY
    pos, out = 0, IDENTITY
    gens = {"a": A, "b": B, "c": C}
    while pos < len(s):
        mt = _TOKEN.match(s, pos)
        if not mt or mt.end() == pos:
            raise ValueError(f"cannot parse Heisenberg word {s!r} at position {pos}")
        sym, e = mt.group(1), int(mt.group(2)) if mt.group(2) is not None else 1
        if sym.isupper():
            sym, e = sym.lower(), -e
        out = out * h_pow(gens[sym], e)
        pos = mt.end()
        while pos < len(s) and s[pos] in " *·":
            pos += 1
    return out


@register_family("heisenberg")
class HeisenbergFamily(Family):
    tag = "heisenberg"

    def identity(self):
        return IDENTITY

    def mul(self, x, y):
        return h_mul(x, y)

    def inv(self, x):
        return x.inverse()

    def pow(self, x, n):
        return h_pow(x, n)

    def contains(self, x):
        return isinstance(x, HeisenbergElement)

    def parse(self, s):
        return parse_element(s)

    def format(self, x):
        return str(x)

    def commute(self, x, y):
        return h_mul(x, y) == h_mul(y, x)

    generators = {"a": A, "b": B, "c": C}


FAMILY = HeisenbergFamily()


# conjugation witnesses ------------------------------------------------------

def ext_gcd(a: int, b: int):
    """Return (g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def conjugator_witness(m: int, n: int, k: int) -> HeisenbergElement:
    """An element g = a^t b^-s with g (a^m b^n) g^-1 = a^m b^n c^k.

    ``(s, t)`` solves ``m s + n t = k``; the solution is not unique and any
    one is returned.  Raises :class:`NoWitnessError` if ``gcd(m, n)`` does
    not divide ``k``.
    """
    d, x, y = ext_gcd(m, n)
    if d == 0:
        if k != 0:
            raise NoWitnessError("a^0 b^0 is central; no conjugate of it equals c^k with k != 0")
        return IDENTITY
    if k % d:
        raise NoWitnessError(f"gcd({m}, {n}) = {d} does not divide {k}")
    s, t = x * (k // d), y * (k // d)
    g = HeisenbergElement(t, -s, 0)
    base = HeisenbergElement(m, n, 0)
    if g * base * g.inverse() != HeisenbergElement(m, n, k):
        raise InvariantViolation(f"conjugator {g} failed for {(m, n, k)}")
    return g


# the cone of length functions --------------------------------------------

def primitive_class(m: int, n: int):
    """Canonical representative of +-(m, n)/gcd: first nonzero coordinate positive."""
    d = math.gcd(m, n)
    if d == 0:
        raise ValueError("(0, 0) has no direction class")
    p, q = m // d, n // d
    if p < 0 or (p == 0 and q < 0):
        p, q = -p, -q
    return p, q


class ConeCoefficients:
    """Nonnegative rational coefficients on primitive direction classes."""

    def __init__(self, coeffs=None):
        self._c = {}
        for key, v in (coeffs or {}).items():
            if isinstance(key, str):
                key = tuple(int(t) for t in key.replace("(", "").replace(")", "").split(","))
            p, q = key
            if math.gcd(p, q) != 1:
                raise ValueError(f"class ({p},{q}) is not primitive")
            v = to_fraction(v)
            if v < 0:
                raise ValueError(f"coefficient for ({p},{q}) is negative")
            cls = primitive_class(p, q)
            if cls in self._c and self._c[cls] != v:
                raise ValueError(f"conflicting coefficients for class {cls}")
            if v:
                self._c[cls] = v

    def __getitem__(self, cls):
        return self._c.get(primitive_class(*cls), Fraction(0))

    def items(self):
        return sorted(self._c.items())

    def __len__(self):
        return len(self._c)

    def to_json(self):
        return {f"{p},{q}": f"{v.numerator}/{v.denominator}" for (p, q), v in self.items()}

    def __repr__(self):
        return f"ConeCoefficients({dict(self.items())})"


def cone_length(coeffs: ConeCoefficients, x: HeisenbergElement) -> Fraction:
    if x.m == 0 and x.n == 0:
        return Fraction(0)
    d = math.gcd(x.m, x.n)
    return d * coeffs[(x.m // d, x.n // d)]


def cone_length_function(coeffs: ConeCoefficients) -> LengthFunctionSpec:
    return LengthFunctionSpec(lambda x: cone_length(coeffs, x), FAMILY, name="cone")


def random_cone(rng, support=8, max_entry=5, max_value=10):
    """A random coefficient map: ``support`` classes, rational values in [0, max_value]."""
    coeffs = {}
    while len(coeffs) < support:
        p, q = rng.randint(-max_entry, max_entry), rng.randint(-max_entry, max_entry)
        if math.gcd(p, q) != 1:
            continue
        den = rng.randint(1, 12)
        coeffs[primitive_class(p, q)] = Fraction(rng.randint(0, max_value * den), den)
    return ConeCoefficients(coeffs)


# vectorised exhaustive axiom suite -----------------------------------------

def _vmul(x, y):
    m1, n1, k1 = x
    m2, n2, k2 = y
    return m1 + m2, n1 + n2, k1 + k2 - m2 * n1


def _vinv(x):
    m, n, k = x
    return -m, -n, -k - m * n


def _vpow(x, e):
    m, n, k = x
    return e * m, e * n, e * k - m * n * ((e * (e - 1)) // 2)


class _VectorCone:
    """cone_length on integer arrays, with rational coefficients scaled to integers."""

    def __init__(self, coeffs: ConeCoefficients, reach: int):
        dens = [v.denominator for _, v in coeffs.items()] or [1]
        self.scale = math.lcm(*dens)
        self.reach = reach
        size = 2 * reach + 1
        self.table = np.zeros((size, size), dtype=np.int64)
        for p in range(-reach, reach + 1):
            for q in range(-reach, reach + 1):
                if math.gcd(p, q) == 1:
                    self.table[p + reach, q + reach] = int(coeffs[(p, q)] * self.scale)

    def __call__(self, x):
        m, n, _ = x
        d = np.gcd(m, n)
        safe = np.where(d == 0, 1, d)
        p, q = m // safe, n // safe
        if np.abs(p).max(initial=0) > self.reach or np.abs(q).max(initial=0) > self.reach:
            raise ValueError("direction outside the precomputed table")
        return np.where(d == 0, 0, d * self.table[p + self.reach, q + self.reach])


def _box(radius):
    r = np.arange(-radius, radius + 1, dtype=np.int64)
    m, n, k = np.meshgrid(r, r, r, indexing="ij")
    return m.ravel(), n.ravel(), k.ravel()


def cone_axiom_suite(coeffs: ConeCoefficients, radius: int = 8, conj_k=None, max_violations=20) -> AxiomReport:
    """Exhaustive exact axiom check of a cone length on the box |m|,|n|,|k| <= radius.

    * homogeneity: every g in the box, every |e| <= radius;
    * commuting subadditivity: every pair in the box that commutes;
    * conjugation: every g in the box against conjugators h with
      |p|,|q| <= radius and k-coordinate in ``conj_k`` (default {-r, 0, r}).

    Arithmetic is int64 on integer-scaled coefficients, hence exact.
    """
    lf = _VectorCone(coeffs, reach=radius * radius + 2 * radius)
    report = AxiomReport()
    g = _box(radius)
    lg = lf(g)

    def record(axiom, mask, *cols):
        idx = np.flatnonzero(mask)[:max_violations - len(report.violations)]
        for i in idx:
            report.violations.append(Violation(axiom, tuple(int(c[i]) for c in cols), "", ""))

    for e in range(-radius, radius + 1):
        lge = lf(_vpow(g, e))
        report.tested["homogeneity"] += lge.size
        record("homogeneity", lge != abs(e) * lg, g[0], g[1], g[2])

    conj_k = (-radius, 0, radius) if conj_k is None else conj_k
    for p in range(-radius, radius + 1):
        for q in range(-radius, radius + 1):
            for r in conj_k:
                h = tuple(np.full_like(g[0], v) for v in (p, q, r))
                lc = lf(_vmul(_vmul(h, g), _vinv(h)))
                report.tested["conjugation"] += lc.size
                record("conjugation", lc != lg, g[0], g[1], g[2])

    # commuting pairs: screen (m, n) pairs, then expand the k coordinates
    r = np.arange(-radius, radius + 1, dtype=np.int64)
    mm, nn = [a.ravel() for a in np.meshgrid(r, r, indexing="ij")]
    i1, i2 = [a.ravel() for a in np.meshgrid(np.arange(mm.size), np.arange(mm.size), indexing="ij")]
    zero = np.zeros_like(i1)
    x = (mm[i1], nn[i1], zero)
    y = (mm[i2], nn[i2], zero)
    xy, yx = _vmul(x, y), _vmul(y, x)
    ok = (xy[2] == yx[2]) & (xy[0] == yx[0]) & (xy[1] == yx[1])
    i1, i2 = i1[ok], i2[ok]
    ks = np.arange(-radius, radius + 1, dtype=np.int64)
    k1, k2 = [a.ravel() for a in np.meshgrid(ks, ks, indexing="ij")]
    shape = (i1.size, k1.size)
    x = tuple(np.broadcast_to(v, shape).ravel() for v in (mm[i1][:, None], nn[i1][:, None], k1[None, :]))
    y = tuple(np.broadcast_to(v, shape).ravel() for v in (mm[i2][:, None], nn[i2][:, None], k2[None, :]))
    xy, yx = _vmul(x, y), _vmul(y, x)
    comm = (xy[0] == yx[0]) & (xy[1] == yx[1]) & (xy[2] == yx[2])
    lhs, rhs = lf(xy), lf(x) + lf(y)
    report.tested["subadditivity"] += int(comm.sum())
    record("subadditivity", comm & (lhs > rhs), x[0], x[1], x[2], y[0], y[1], y[2])
    return report


# centre-vanishing certificate ---------------------------------------------

@register_constructor("heisenberg.center")
def _center_instance(fam, params, k):
    """k l(c) <= 2 l(a): a is conjugate to a c^k, and c^k = a^-1 (a c^k)."""
    b = CertificateBuilder(fam)
    ck = HeisenbergElement(0, 0, k)
    i_conj = b.conj(A, h_pow(B, -k))                 # l(a c^k) = l(a)
    i_sub = b.comm(A.inverse(), A * ck)               # l(c^k) <= l(a^-1) + l(a c^k)
    i_hc = b.homogeneity(C, k)                        # l(c^k) = k l(c)
    i_ha = b.homogeneity(A, -1)                       # l(a^-1) = l(a)
    b.linear([(i_sub, 1), (i_hc, -1), (i_conj, 1), (i_ha, 1)], lhs={C: k}, rhs={A: 2})
    return b.steps


def center_vanishing_certificate(budget: int = 10) -> VanishingCertificate:
    """LimitZero certificate for l(c) with certified bound 2 l(a) / 2^budget."""
    b = CertificateBuilder(FAMILY)
    b.archimedean("heisenberg.center", {}, target=C, slope=1, rhs={A: 2}, budget=budget)
    return b.build(C, "LimitZero")
