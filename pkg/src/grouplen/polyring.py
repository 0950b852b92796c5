"""Sparse multivariate polynomials over the integers (or rationals).

Monomials are packed into one Python int, ``BITS`` bits per variable with
variable ``n-1`` most significant, so monomial multiplication is integer
addition and comparing packed keys is lexicographic order.

The gcd is content extraction plus recursive subresultant pseudo-remainder
sequences.  When one argument is a monomial the gcd is read off directly;
the general path refuses inputs beyond a desk-scale size budget.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

from .errors import BudgetExceededError

BITS = 20
MASK = (1 << BITS) - 1

GCD_MAX_DEGREE = 64
GCD_MAX_TERMS = 10 ** 5


def pack(exps):
    k = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MASK:
            raise ValueError(f"exponent {e} out of range")
        k |= e << (BITS * i)
    return k


def unpack(k, n):
    return tuple((k >> (BITS * i)) & MASK for i in range(n))


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


def _qdiv(c, d):
    if isinstance(c, int) and isinstance(d, int):
        if c % d:
            raise ValueError("not divisible over the integers")
        return c // d
    return _norm(Fraction(c) / d)


def _ge(a, b, n):
    """Every exponent of packed a is >= the matching one of b."""
    for i in range(n):
        s = BITS * i
        if (a >> s) & MASK < (b >> s) & MASK:
            return False
    return True


def _kmin(a, b, n):
    k = 0
    for i in range(n):
        s = BITS * i
        k |= min((a >> s) & MASK, (b >> s) & MASK) << s
    return k


class Poly:
    __slots__ = ("n", "t", "_h")

    def __init__(self, n, terms=None):
        self.n = n
        self.t = {k: _norm(c) for k, c in (terms or {}).items() if c != 0}
        self._h = None

    # construction ------------------------------------------------------
    @classmethod
    def from_terms(cls, n, pairs):
        """From (exponent tuple, coefficient) pairs; repeated monomials add up."""
        t: dict = {}
        for e, c in pairs:
            if len(e) != n:
                raise ValueError(f"exponent {e} has the wrong arity for {n} variables")
            k = pack(e)
            t[k] = t.get(k, 0) + c
        return cls(n, t)

    @classmethod
    def const(cls, c, n):
        return cls(n, {0: c})

    @classmethod
    def var(cls, i, n, power=1):
        return cls(n, {power << (BITS * i): 1})

    @classmethod
    def monomial(cls, exps, c=1):
        return cls(len(exps), {pack(exps): c})

    def _new(self, t):
        p = Poly.__new__(Poly)
        p.n, p.t, p._h = self.n, t, None
        return p

    # introspection ------------------------------------------------------
    def terms(self):
        """(exponents, coefficient) pairs, highest lex monomial first."""
        return [(unpack(k, self.n), self.t[k]) for k in sorted(self.t, reverse=True)]

    def to_json(self):
        return [[list(e), str(c)] for e, c in self.terms()]

    @classmethod
    def from_json(cls, n, data):
        return cls.from_terms(n, [(tuple(e), Fraction(c)) for e, c in data])

    def is_zero(self):
        return not self.t

    def is_monomial(self):
        return len(self.t) == 1

    def is_const(self):
        return not self.t or (len(self.t) == 1 and 0 in self.t)

    def __len__(self):
        return len(self.t)

    def degree(self):
        if not self.t:
            return -1
        return max(sum(unpack(k, self.n)) for k in self.t)

    def deg_in(self, i):
        s = BITS * i
        return max(((k >> s) & MASK for k in self.t), default=-1)

    def is_homogeneous(self):
        return len({sum(unpack(k, self.n)) for k in self.t}) <= 1

    def variables(self):
        return [i for i in range(self.n) if self.deg_in(i) > 0]

    def lead(self):
        k = max(self.t)
        return k, self.t[k]

    # arithmetic -----------------------------------------------------------
    def _coerce(self, o):
        if isinstance(o, Poly):
            if o.n != self.n:
                raise ValueError("polynomials over different variable sets")
            return o
        return Poly.const(o, self.n)

    def __add__(self, o):
        o = self._coerce(o)
        t = dict(self.t)
        for k, c in o.t.items():
            v = t.get(k, 0) + c
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -c for k, c in self.t.items()})

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if not isinstance(o, Poly):
            if o == 0:
                return self._new({})
            return self._new({k: _norm(c * o) for k, c in self.t.items()})
        o = self._coerce(o)
        a, b = (self.t, o.t) if len(self.t) <= len(o.t) else (o.t, self.t)
        if len(a) == 1:
            (ka, ca), = a.items()
            return self._new({ka + k: _norm(ca * c) for k, c in b.items()})
        out: dict = {}
        get = out.get
        for ka, ca in a.items():
            for kb, cb in b.items():
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
        return self._new({k: _norm(c) for k, c in out.items() if c})

    __rmul__ = __mul__

    def square(self):
        items = list(self.t.items())
        out: dict = {}
        get = out.get
        for i, (ka, ca) in enumerate(items):
            k = ka + ka
            out[k] = get(k, 0) + ca * ca
            c2 = 2 * ca
            for kb, cb in items[i + 1:]:
                k = ka + kb
                out[k] = get(k, 0) + c2 * cb
        return self._new({k: _norm(c) for k, c in out.items() if c})

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        if len(self.t) == 1:
            (k, c), = self.t.items()
            return self._new({k * e: c ** e}) if e else Poly.const(1, self.n)
        out, b = Poly.const(1, self.n), self
        while e:
            if e & 1:
                out = out * b
            e >>= 1
            if e:
                b = b.square()
        return out

    def __eq__(self, o):
        if not isinstance(o, Poly):
            return self.is_const() and self.t.get(0, 0) == o
        return self.n == o.n and self.t == o.t

    def __hash__(self):
        if self._h is None:
            self._h = hash((self.n, frozenset(self.t.items())))
        return self._h

    # display -------------------------------------------------------------
    def names(self):
        return list("xyz") if self.n <= 3 else [f"x{i + 1}" for i in range(self.n)]

    def __str__(self):
        if not self.t:
            return "0"
        names = self.names()
        parts = []
        for e, c in self.terms():
            mono = "*".join(f"{names[i]}^{x}" if x > 1 else names[i] for i, x in enumerate(e) if x)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({self})"

    # substitution ----------------------------------------------------------
    def substitute(self, vals):
        """Replace variable i by ``vals[i]`` (all Polys over a common ring)."""
        if len(vals) != self.n:
            raise ValueError("need one value per variable")
        m = vals[0].n
        cache = [dict() for _ in vals]

        def power(i, e):
            c = cache[i]
            if e not in c:
                c[e] = vals[i] ** e
            return c[e]

        out = Poly(m)
        for k, c in self.t.items():
            term = Poly.const(c, m)
            for i, e in enumerate(unpack(k, self.n)):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    # division --------------------------------------------------------------
    def divexact(self, d: "Poly"):
        """Exact quotient; ValueError if d does not divide self."""
        d = self._coerce(d)
        if d.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        n = self.n
        if len(d.t) == 1:
            (kd, cd), = d.t.items()
            out = {}
            for k, c in self.t.items():
                if not _ge(k, kd, n):
                    raise ValueError("not divisible")
                q = _qdiv(c, cd)
                out[k - kd] = q
            return self._new(out)
        kd, cd = d.lead()
        r = dict(self.t)
        q = {}
        while r:
            k = max(r)
            if not _ge(k, kd, n):
                raise ValueError("not divisible")
            c = r[k]
            qc = _qdiv(c, cd)
            dk = k - kd
            q[dk] = qc
            for kk, cc in d.t.items():
                key = kk + dk
                v = r.get(key, 0) - qc * cc
                if v:
                    r[key] = v
                else:
                    r.pop(key, None)
        return self._new(q)

    def coeffs_in(self, i):
        """{power of variable i: coefficient Poly (free of variable i)}."""
        s = BITS * i
        out: dict = {}
        for k, c in self.t.items():
            e = (k >> s) & MASK
            out.setdefault(e, {})[k - (e << s)] = c
        return {e: self._new(t) for e, t in out.items()}

    # integer content ---------------------------------------------------
    def content(self):
        if not self.t:
            return 0
        if not all(isinstance(c, int) for c in self.t.values()):
            raise TypeError("integer content of a polynomial with rational coefficients")
        g = reduce(math.gcd, (abs(c) for c in self.t.values()))
        _, lc = self.lead()
        return g if lc > 0 else -g

    def clear_denominators(self):
        dens = [c.denominator for c in self.t.values() if isinstance(c, Fraction)]
        m = math.lcm(*dens) if dens else 1
        return self * m

    def normalized(self):
        """Leading coefficient positive."""
        if self.t and self.lead()[1] < 0:
            return -self
        return self

    def primitive(self):
        return self.divexact(Poly.const(self.content(), self.n)) if self.t else self


# gcd ----------------------------------------------------------------------

def _monomial_gcd(m: Poly, p: Poly):
    (km, cm), = m.t.items()
    k = km
    for kp in p.t:
        k = _kmin(k, kp, m.n)
    g = math.gcd(abs(cm), *(abs(c) for c in p.t.values()))
    return Poly(m.n, {k: g})


def _check_budget(*ps):
    for p in ps:
        if p.degree() > GCD_MAX_DEGREE or len(p) > GCD_MAX_TERMS:
            raise BudgetExceededError(
                f"gcd of a polynomial with degree {p.degree()} and {len(p)} terms exceeds the "
                f"budget (degree <= {GCD_MAX_DEGREE}, terms <= {GCD_MAX_TERMS})", p.degree())


def _lc_in(p, i):
    cs = p.coeffs_in(i)
    return cs[max(cs)]


def _prem(F, G, i):
    dG = G.deg_in(i)
    lcG = _lc_in(G, i)
    R = F
    e = F.deg_in(i) - dG + 1
    x = Poly.var(i, F.n)
    while not R.is_zero() and R.deg_in(i) >= dG:
        s = _lc_in(R, i) * (x ** (R.deg_in(i) - dG))
        R = lcG * R - s * G
        e -= 1
    return (lcG ** e) * R


def _content_in(p, i):
    return reduce(poly_gcd, p.coeffs_in(i).values())


def _subresultant(A, B, i):
    if A.deg_in(i) < B.deg_in(i):
        A, B = B, A
    g = h = Poly.const(1, A.n)
    while True:
        d = A.deg_in(i) - B.deg_in(i)
        R = _prem(A, B, i)
        if R.is_zero():
            return B
        if R.deg_in(i) == 0:
            return Poly.const(1, A.n)
        A, B = B, R.divexact(g * h ** d)
        g = _lc_in(A, i)
        h = (g ** d).divexact(h ** (d - 1)) if d >= 1 else h


def poly_gcd(A: Poly, B: Poly) -> Poly:
    """gcd over Z[x_1..x_n], leading coefficient positive."""
    if A.n != B.n:
        raise ValueError("polynomials over different variable sets")
    if A.is_zero():
        return B.normalized()
    if B.is_zero():
        return A.normalized()
    if A.is_monomial():
        return _monomial_gcd(A, B)
    if B.is_monomial():
        return _monomial_gcd(B, A)
    _check_budget(A, B)
    va, vb = set(A.variables()), set(B.variables())
    if not va or not vb:
        return Poly.const(math.gcd(abs(A.content()), abs(B.content())), A.n)
    i = max(va | vb)
    if i not in va:
        return poly_gcd(A, _content_in(B, i))
    if i not in vb:
        return poly_gcd(_content_in(A, i), B)
    cA, cB = _content_in(A, i), _content_in(B, i)
    c = poly_gcd(cA, cB)
    pA, pB = A.divexact(cA), B.divexact(cB)
    g = _subresultant(pA, pB, i)
    if g.deg_in(i) > 0:
        g = g.divexact(_content_in(g, i))
    else:
        g = Poly.const(1, A.n)
    return (c * g).normalized()


def poly_gcd_many(ps):
    """gcd of several polynomials; fewest terms first so monomials short-circuit."""
    ps = sorted((p for p in ps if not p.is_zero()), key=len)
    if not ps:
        raise ValueError("gcd of zero polynomials only")
    g = ps[0].normalized()
    for p in ps[1:]:
        if g.is_const():
            c = math.gcd(abs(g.t.get(0, 0)), *(abs(x) for x in p.t.values()))
            g = Poly.const(c, g.n)
            continue
        g = poly_gcd(g, p)
    return g
