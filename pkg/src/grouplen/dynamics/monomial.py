"""Monomial maps x_i -> c_i prod_j x_j^E_ij with coefficients.

Two composition conventions are available, since the Cremona group and the
field automorphism group are anti-isomorphic:

* ``"point"``: (u o v)(x) = u(v(x)), substitute v into u; exponents E_u E_v;
* ``"automorphism"``: (u o v)(x_i) = u(v(x_i)) for field automorphisms, which
  substitutes u into v's formulas; exponents E_v E_u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import PreconditionError
from ..matrices.qmatrix import QMatrix
from ..rational import fmt_short, to_fraction

CONVENTIONS = ("point", "automorphism")


def _imatmul(X, Y):
    return tuple(tuple(sum(X[i][t] * Y[t][j] for t in range(len(Y))) for j in range(len(Y[0])))
                 for i in range(len(X)))


@dataclass(frozen=True)
class MonomialMapWithCoeffs:
    E: tuple
    c: tuple

    def __post_init__(self):
        E = tuple(tuple(int(x) for x in r) for r in self.E)
        c = tuple(to_fraction(x) for x in self.c)
        n = len(E)
        if any(len(r) != n for r in E) or len(c) != n:
            raise PreconditionError("exponent matrix and coefficients disagree in size")
        if any(x == 0 for x in c):
            raise PreconditionError("coefficients must be nonzero")
        if QMatrix(E).det() not in (1, -1):
            raise PreconditionError("exponent matrix must have det +-1")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "c", c)

    @property
    def n(self):
        return len(self.E)

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), (1,) * n)

    def __call__(self, point):
        """Evaluate at a point with nonzero rational coordinates."""
        pt = [to_fraction(p) for p in point]
        return tuple(ci * math.prod((pt[j] ** e for j, e in enumerate(r)), start=Fraction(1))
                     for ci, r in zip(self.c, self.E))

    def formula(self, names=None):
        names = names or [f"x{i + 1}" for i in range(self.n)]
        out = []
        for ci, r in zip(self.c, self.E):
            mono = "*".join(f"{names[j]}^{e}" if e != 1 else names[j] for j, e in enumerate(r) if e)
            out.append((fmt_short(ci) + ("*" + mono if mono else "")) if ci != 1 else (mono or "1"))
        return out

    def __str__(self):
        return "(" + ", ".join(self.formula()) + ")"

    def to_json(self):
        return {"E": [list(r) for r in self.E], "c": [fmt_short(x) for x in self.c]}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(tuple(r) for r in d["E"]), tuple(d["c"]))


def _substitute(u: MonomialMapWithCoeffs, v: MonomialMapWithCoeffs):
    """u(v(x)): exponents E_u E_v, coefficients c_u,i prod_j c_v,j^E_u,ij."""
    E = _imatmul(u.E, v.E)
    c = tuple(cu * math.prod((v.c[j] ** e for j, e in enumerate(r)), start=Fraction(1))
              for cu, r in zip(u.c, u.E))
    return MonomialMapWithCoeffs(E, c)


def monomial_compose(u, v, convention: str = "point") -> MonomialMapWithCoeffs:
    if u.n != v.n:
        raise PreconditionError("maps on different numbers of variables")
    if convention == "point":
        return _substitute(u, v)
    if convention == "automorphism":
        return _substitute(v, u)
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def monomial_inverse(u: MonomialMapWithCoeffs) -> MonomialMapWithCoeffs:
    Einv = QMatrix(u.E).inverse().int_rows()
    # d_j = prod_k c_k^(-Einv_jk) makes u(w(x)) = x
    d = tuple(math.prod((u.c[k] ** (-e) for k, e in enumerate(r)), start=Fraction(1)) for r in Einv)
    return MonomialMapWithCoeffs(Einv, d)


def monomial_commutator(u, v, convention="point"):
    """u v u^-1 v^-1 under the given convention."""
    comp = lambda a, b: monomial_compose(a, b, convention)
    return comp(comp(comp(u, v), monomial_inverse(u)), monomial_inverse(v))


# dynamical degree ---------------------------------------------------------

@dataclass(frozen=True)
class MonomialDegree:
    value: float
    lo: Fraction | None
    hi: Fraction | None
    certified: bool
    method: str

    def as_dict(self):
        return {"value": repr(self.value), "lo": fmt_short(self.lo) if self.lo is not None else None,
                "hi": fmt_short(self.hi) if self.hi is not None else None,
                "certified": self.certified, "method": self.method}


def _cw_bracket(E, x):
    """Collatz-Wielandt: min_i (Ex)_i/x_i <= rho(E) <= max_i (Ex)_i/x_i, x > 0, E >= 0."""
    Ex = [sum(E[i][j] * x[j] for j in range(len(x))) for i in range(len(x))]
    ratios = [Ex[i] / x[i] for i in range(len(x))]
    return min(ratios), max(ratios)


def monomial_dd(u, tol: float = 1e-9, max_iter: int = 200) -> MonomialDegree:
    """Spectral radius of the exponent matrix (the dynamical degree of a monomial map).

    Nonnegative E: power iteration on E + I in floats, then an exact
    Collatz-Wielandt bracket at the final vector.  Otherwise: numerical
    eigenvalues with {lo, hi} left open.
    """
    E = u.E if isinstance(u, MonomialMapWithCoeffs) else tuple(tuple(int(x) for x in r) for r in u)
    n = len(E)
    A = np.array(E, dtype=float)
    if all(x >= 0 for r in E for x in r):
        x = np.ones(n)
        B = A + np.eye(n)
        lo = hi = None
        for _ in range(max_iter):
            xq = [Fraction(float(v)) for v in x]
            lo, hi = _cw_bracket(E, xq)
            if hi - lo <= tol:
                break
            x = B @ x
            x = x / np.max(x)
            x = np.maximum(x, 1e-300)
        return MonomialDegree(float((lo + hi) / 2), lo, hi, True, "collatz-wielandt")
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    return MonomialDegree(rho, None, None, False, "eigenvalues")


# Cremona Heisenberg witness ------------------------------------------------

@dataclass(frozen=True)
class CremonaWitness:
    alpha: Fraction
    f: MonomialMapWithCoeffs
    g: MonomialMapWithCoeffs
    h: MonomialMapWithCoeffs
    checks: dict         # convention -> {identity: bool}
    realized_by: tuple   # conventions under which all three identities hold

    @property
    def ok(self):
        return bool(self.realized_by)

    def as_dict(self):
        return {"alpha": fmt_short(self.alpha), "f": self.f.to_json(), "g": self.g.to_json(),
                "h": self.h.to_json(), "checks": self.checks, "realized_by": list(self.realized_by)}


def cremona_heisenberg_witness(alpha, n: int = 2) -> CremonaWitness:
    """f: x1 -> alpha x1; g: x1 -> x1 x2; h: x2 -> x2 / alpha; other variables fixed.

    Checks [g,h] = f, [g,f] = 1, [h,f] = 1 under both conventions.
    """
    alpha = to_fraction(alpha)
    if alpha == 0:
        raise PreconditionError("alpha must be nonzero")
    if n < 2:
        raise PreconditionError("need at least two variables")
    I = [[int(i == j) for j in range(n)] for i in range(n)]
    one = [Fraction(1)] * n
    cf = list(one); cf[0] = alpha
    Eg = [list(r) for r in I]; Eg[0][1] = 1
    ch = list(one); ch[1] = 1 / alpha
    f = MonomialMapWithCoeffs(tuple(map(tuple, I)), tuple(cf))
    g = MonomialMapWithCoeffs(tuple(map(tuple, Eg)), tuple(one))
    h = MonomialMapWithCoeffs(tuple(map(tuple, I)), tuple(ch))
    e = MonomialMapWithCoeffs.identity(n)
    checks = {}
    for conv in CONVENTIONS:
        checks[conv] = {
            "[g,h] = f": monomial_commutator(g, h, conv) == f,
            "[g,f] = 1": monomial_commutator(g, f, conv) == e,
            "[h,f] = 1": monomial_commutator(h, f, conv) == e,
        }
    realized = tuple(c for c in CONVENTIONS if all(checks[c].values()))
    return CremonaWitness(alpha, f, g, h, checks, realized)
