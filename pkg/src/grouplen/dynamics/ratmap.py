"""Rational self-maps of the projective plane and their degree sequences.

A map is three homogeneous integer polynomials of one degree in x, y, z with
no common factor.  Composition substitutes the right map into the left one
and divides out the gcd of the three results.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..core.fekete import SubadditiveSeries, fekete_upper_bounds
from ..errors import BudgetExceededError, DegenerateMapError, InvariantViolation, PreconditionError
from ..polyring import Poly, poly_gcd_many


class RationalMapP2:
    __slots__ = ("components", "degree")

    def __init__(self, components, check_coprime: bool = True):
        comps = tuple(components)
        if len(comps) != 3 or any(not isinstance(p, Poly) or p.n != 3 for p in comps):
            raise PreconditionError("a map of P^2 has three polynomial components in x, y, z")
        if all(p.is_zero() for p in comps):
            raise DegenerateMapError("all components vanish")
        degs = {p.degree() for p in comps if not p.is_zero()}
        if len(degs) != 1 or not all(p.is_homogeneous() for p in comps):
            raise PreconditionError("components must be homogeneous of a common degree")
        if any(not isinstance(c, int) for p in comps for c in p.t.values()):
            raise PreconditionError("components must have integer coefficients")
        if check_coprime:
            g = poly_gcd_many(comps)
            if g.degree() > 0:
                raise PreconditionError(f"components share the factor {g}")
        self.components = comps
        self.degree = degs.pop()

    @classmethod
    def reduced(cls, components):
        """Divide out the common factor (and integer content) first."""
        comps = [p.clear_denominators() if not p.is_zero() else p for p in components]
        if all(p.is_zero() for p in comps):
            raise DegenerateMapError("all components vanish")
        g = poly_gcd_many(comps)
        return cls([p.divexact(g) for p in comps], check_coprime=False), g

    def __call__(self, point):
        from ..rational import to_fraction
        pt = [to_fraction(p) for p in point]
        return tuple(_eval(p, pt) for p in self.components)

    def __eq__(self, o):
        return isinstance(o, RationalMapP2) and self.components == o.components

    def __hash__(self):
        return hash(self.components)

    def __str__(self):
        return "(" + " : ".join(str(p) for p in self.components) + ")"

    def to_json(self):
        return {"components": [p.to_json() for p in self.components]}

    @classmethod
    def from_json(cls, d):
        comps = [Poly.from_json(3, c) for c in d["components"]]
        return cls.reduced(comps)[0]

    def size(self):
        return sum(len(p) for p in self.components)


def _eval(p: Poly, pt):
    total = Fraction(0)
    for e, c in p.terms():
        total += c * math.prod((pt[i] ** k for i, k in enumerate(e)), start=Fraction(1))
    return total


X, Y, Z = (Poly.var(i, 3) for i in range(3))


def standard_involution() -> RationalMapP2:
    """sigma = (yz : xz : xy)."""
    return RationalMapP2([Y * Z, X * Z, X * Y])


def henon_map() -> RationalMapP2:
    """(x : y : z) -> (yz : y^2 + 3z^2 - 2xz : z^2), the homogenized (x, y) -> (y, y^2 + 3 - 2x)."""
    return RationalMapP2([Y * Z, Y * Y + 3 * Z * Z - 2 * X * Z, Z * Z])


def identity_map() -> RationalMapP2:
    return RationalMapP2([X, Y, Z])


def linear_map(M) -> RationalMapP2:
    return RationalMapP2([sum((int(M[i][j]) * v for j, v in enumerate((X, Y, Z))), Poly(3)) for i in range(3)])


BUILTIN_MAPS = {"sigma": standard_involution, "henon": henon_map, "identity": identity_map}

_VARS = {"x": X, "y": Y, "z": Z}


def parse_poly3(text: str) -> Poly:
    """Parse an integer polynomial in x, y, z such as ``"y^2 + 3*z^2 - 2*x*z"``."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise PreconditionError(f"cannot parse polynomial {text!r} at column {e.offset}") from None

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Poly.const(node.value, 3)
        if isinstance(node, ast.Name) and node.id in _VARS:
            return _VARS[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)
                        and node.right.value >= 0):
                    raise PreconditionError(f"exponents must be nonnegative integers in {text!r}")
                return ev(node.left) ** node.right.value
            ops = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b, ast.Mult: lambda a, b: a * b}
            for k, f in ops.items():
                if isinstance(node.op, k):
                    return f(ev(node.left), ev(node.right))
        raise PreconditionError(f"unsupported syntax at column {getattr(node, 'col_offset', 0)} in {text!r}")

    return ev(tree)


def load_map(spec) -> RationalMapP2:
    """A builtin name, a JSON object ``{"components": [...]}`` or a path to one.

    Components are polynomial strings or the ``[[exponents], coeff]`` term
    lists written by :meth:`RationalMapP2.to_json`.
    """
    if isinstance(spec, RationalMapP2):
        return spec
    if isinstance(spec, str):
        if spec in BUILTIN_MAPS:
            return BUILTIN_MAPS[spec]()
        if spec.lstrip().startswith("{"):
            try:
                spec = json.loads(spec)
            except json.JSONDecodeError as e:
                raise PreconditionError(f"malformed map JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
        else:
            with open(spec) as fh:
                text = fh.read()
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as e:
                raise PreconditionError(f"{spec}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
            if isinstance(spec, dict) and "builtin" in spec:
                return load_map(spec["builtin"])
    if isinstance(spec, dict) and "builtin" in spec:
        return load_map(spec["builtin"])
    if not isinstance(spec, dict) or "components" not in spec:
        raise PreconditionError("a map needs a 'components' list of three polynomials")
    comps = [parse_poly3(c) if isinstance(c, str) else Poly.from_json(3, c) for c in spec["components"]]
    if len(comps) != 3:
        raise PreconditionError("a map of P^2 has three components")
    return RationalMapP2.reduced(comps)[0]


@dataclass(frozen=True)
class Composition:
    map: RationalMapP2
    removed: Poly
    raw_degree: int


def ratmap_compose(u: RationalMapP2, v: RationalMapP2) -> Composition:
    """u o v with the common factor removed; ``removed`` is the gcd that was divided out."""
    raw = [p.substitute(list(v.components)) for p in u.components]
    if all(p.is_zero() for p in raw):
        raise DegenerateMapError("composition has all components zero")
    m, g = RationalMapP2.reduced(raw)
    return Composition(m, g, u.degree * v.degree)


def ratmap_compose_reduce(u: RationalMapP2, v: RationalMapP2) -> RationalMapP2:
    return ratmap_compose(u, v).map


@dataclass
class DegreeSequence:
    degrees: list                 # deg(f^n), n = 1..len
    schedule: list                # [(n, deg(f^n)^(1/n))] along n = 2^j
    lambda_bound: float | None
    checks: int = 0
    truncated: str = ""
    gcd_degrees: list = field(default_factory=list)
    removed: list = field(default_factory=list)   # common factor divided out at each n (1 for n = 1)

    def as_rows(self):
        return [(n + 1, d) for n, d in enumerate(self.degrees)]


def dynamical_degree_estimate(f: RationalMapP2, n_max: int, max_terms: int = 200_000) -> DegreeSequence:
    """Exact deg(f^n) for n <= n_max and the doubling bound on lambda(f).

    f^n = f o f^(n-1).  Stops early (with a report) if an iterate exceeds
    ``max_terms`` terms.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    degs = [f.degree]
    gdeg = [0]
    removed = [Poly.const(1, 3)]
    cur = f
    truncated = ""
    for n in range(2, n_max + 1):
        c = ratmap_compose(f, cur)
        cur = c.map
        degs.append(cur.degree)
        gdeg.append(c.removed.degree())
        removed.append(c.removed)
        if cur.size() > max_terms and n < n_max:
            truncated = f"stopped after n = {n}: iterate has {cur.size()} terms (budget {max_terms})"
            break
    checks = 0
    for a in range(1, len(degs) + 1):
        for b in range(1, len(degs) + 1 - a):
            checks += 1
            if degs[a + b - 1] > degs[a - 1] * degs[b - 1]:
                raise InvariantViolation(f"deg f^{a + b} = {degs[a + b - 1]} > deg f^{a} deg f^{b}")
    J = len(degs).bit_length() - 1
    if J == 0:
        sched = [(1, float(degs[0]))]
    else:
        series = SubadditiveSeries(lambda n: math.log(degs[n - 1]), J,
                                   spot_max=min(4, len(degs) // 2), rtol=1e-12)
        sched = [(n, math.exp(b)) for n, b in fekete_upper_bounds(series).rows]
    lam = sched[-1][1]
    return DegreeSequence(degs, sched, lam, checks, truncated, gdeg, removed)
