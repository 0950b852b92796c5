"""Word lengths over symmetric generating sets.

Exact lengths come from breadth-first search with visited-set dedup on the
family's canonical keys.  Upper bounds for large powers come from verified
witness words; a :class:`WitnessWord` cannot be constructed unless its
evaluation equals the claimed element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .core.families import Family
from .errors import BudgetExceededError, InvariantViolation, PreconditionError
from .heisenberg import FAMILY as HEISENBERG, HeisenbergElement
from .polycyclic import AbcGroup, _require_anosov


class GeneratingSet:
    """Symbol -> element, closed under inverses."""

    def __init__(self, family: Family, gens: dict):
        self.family = family
        self.gens = dict(gens)
        keys = {family.key(x) for x in self.gens.values()}
        for s, x in self.gens.items():
            if family.key(family.inv(x)) not in keys:
                raise PreconditionError(f"generating set is not symmetric: inverse of {s} missing")
        self.inverse_symbol = {}
        by_key = {family.key(x): s for s, x in self.gens.items()}
        for s, x in self.gens.items():
            self.inverse_symbol[s] = by_key[family.key(family.inv(x))]

    @classmethod
    def symmetric(cls, family: Family, gens: dict):
        """Close ``gens`` under inverses; the inverse of ``s`` is named ``s.upper()``
        (or ``s + "'"`` when that name is taken)."""
        out = dict(gens)
        keys = {family.key(x) for x in out.values()}
        for s, x in gens.items():
            xi = family.inv(x)
            if family.key(xi) in keys:
                continue
            name = s.upper() if s.upper() not in out else s + "'"
            out[name] = xi
            keys.add(family.key(xi))
        return cls(family, out)

    def symbols(self):
        return list(self.gens)

    def evaluate(self, symbols):
        fam = self.family
        out = fam.identity()
        for s in symbols:
            try:
                out = fam.mul(out, self.gens[s])
            except KeyError:
                raise PreconditionError(f"unknown generator symbol {s!r}") from None
        return out

    def __len__(self):
        return len(self.gens)


@dataclass(frozen=True)
class WitnessWord:
    gens: GeneratingSet = field(repr=False)
    symbols: tuple
    claim: object

    def __post_init__(self):
        got = self.gens.evaluate(self.symbols)
        fam = self.gens.family
        if not fam.eq(got, self.claim):
            raise InvariantViolation(
                f"word evaluates to {fam.format(got)}, not the claimed {fam.format(self.claim)}")

    @property
    def length(self):
        return len(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        return " ".join(self.symbols)


def free_reduce(symbols, gens: GeneratingSet):
    out = []
    for s in symbols:
        if out and gens.inverse_symbol[out[-1]] == s:
            out.pop()
        else:
            out.append(s)
    return out


# BFS --------------------------------------------------------------------

DEFAULT_MEMORY_BUDGET = 2_000_000


def bfs_ball(gens: GeneratingSet, radius: int, memory_budget: int = DEFAULT_MEMORY_BUDGET):
    """Canonical key -> word length, for every element of length <= radius."""
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    fam = gens.family
    e = fam.identity()
    dist = {fam.key(e): 0}
    frontier = [e]
    order = [gens.gens[s] for s in gens.symbols()]
    for r in range(1, radius + 1):
        nxt = []
        for x in frontier:
            for s in order:
                y = fam.mul(x, s)
                k = fam.key(y)
                if k not in dist:
                    dist[k] = r
                    nxt.append(y)
        if len(dist) > memory_budget:
            raise BudgetExceededError(f"ball of radius {r} has {len(dist)} elements", len(dist))
        frontier = nxt
        if not frontier:
            break
    return dist


def bfs_word_length(gens: GeneratingSet, g, radius_max: int,
                    memory_budget: int = DEFAULT_MEMORY_BUDGET):
    """Exact word length of g if at most radius_max, else None."""
    if radius_max < 0:
        raise ValueError("radius_max must be nonnegative")
    fam = gens.family
    target = fam.key(g)
    e = fam.identity()
    if fam.key(e) == target:
        return 0
    seen = {fam.key(e)}
    frontier = [e]
    order = [gens.gens[s] for s in gens.symbols()]
    for r in range(1, radius_max + 1):
        nxt = []
        for x in frontier:
            for s in order:
                y = fam.mul(x, s)
                k = fam.key(y)
                if k == target:
                    return r
                if k not in seen:
                    seen.add(k)
                    nxt.append(y)
        if len(seen) > memory_budget:
            raise BudgetExceededError(f"ball of radius {r} has {len(seen)} elements", len(seen))
        frontier = nxt
        if not frontier:
            return None
    return None


# stable length --------------------------------------------------------------

@dataclass(frozen=True)
class StableRow:
    n: int
    length_bound: int
    method: str

    @property
    def upper_bound(self):
        return Fraction(self.length_bound, self.n)


@dataclass
class StableLengthResult:
    rows: list
    lower_bound: Fraction | None = None
    lower_method: str = ""
    truncated: str = ""

    @property
    def bounds(self):
        return [r.upper_bound for r in self.rows]

    @property
    def estimate(self):
        return self.rows[-1].upper_bound if self.rows else None


def abelianization_lower_bound(gens: GeneratingSet, abelianize: Callable, g, n: int):
    """φ(g^n) >= ||ab(g^n)||_1 / max_s ||ab(s)||_1 for a homomorphism ab to Z^k."""
    norms = [sum(abs(x) for x in abelianize(s)) for s in gens.gens.values()]
    m = max(norms)
    if m == 0:
        return Fraction(0)
    return Fraction(sum(abs(x) for x in abelianize(gens.family.pow(g, n))), m)


def stable_length_bounds(gens: GeneratingSet, g, doubling_budget: int,
                         witness_gen: Callable | None = None, bfs_radius: int = 8,
                         memory_budget: int = 200_000, abelianize: Callable | None = None):
    """Certified upper bounds on φ(g^(2^j)) for j = 0..B, divided by 2^j.

    Each level takes the least of: the exact BFS length (if inside the ball),
    the length of ``witness_gen(2^j)`` (a verified WitnessWord), and twice the
    previous level's bound.  A lower bound on the limit is reported only when
    ``abelianize`` provides one.
    """
    if doubling_budget < 1:
        raise ValueError("doubling_budget must be at least 1")
    fam = gens.family
    ball = None
    try:
        ball = bfs_ball(gens, bfs_radius, memory_budget)
    except BudgetExceededError:
        ball = None
    rows = []
    truncated = ""
    prev = None
    for j in range(doubling_budget + 1):
        n = 1 << j
        gn = fam.pow(g, n)
        cands = []
        if ball is not None and fam.key(gn) in ball:
            cands.append((ball[fam.key(gn)], "bfs"))
        if witness_gen is not None:
            w = witness_gen(n)
            if w is not None:
                if not fam.eq(w.claim, gn):
                    raise InvariantViolation(f"witness for n = {n} claims the wrong element")
                cands.append((w.length, "witness"))
        if prev is not None:
            cands.append((2 * prev, "doubling"))
        if not cands:
            truncated = f"no BFS value or witness at n = {n}"
            break
        best = min(cands, key=lambda c: c[0])
        rows.append(StableRow(n, best[0], best[1]))
        prev = best[0]
    res = StableLengthResult(rows, truncated=truncated)
    if abelianize is not None:
        # ||ab(g^n)|| = n ||ab(g)||, so the n = 1 ratio bounds every level
        res.lower_bound = abelianization_lower_bound(gens, abelianize, g, 1)
        res.lower_method = "abelianization"
    return res


# Heisenberg ---------------------------------------------------------------------

def heisenberg_generators(with_center: bool = False) -> GeneratingSet:
    gens = {"a": HeisenbergElement(1, 0, 0), "b": HeisenbergElement(0, 1, 0)}
    if with_center:
        gens["c"] = HeisenbergElement(0, 0, 1)
    return GeneratingSet.symmetric(HEISENBERG, gens)


def heisenberg_abelianization(x: HeisenbergElement):
    return (x.m, x.n)


def heisenberg_commutator_witness(n: int, m: int, gens: GeneratingSet | None = None) -> WitnessWord:
    """a^n b^m a^-n b^-m = c^(nm), length 2(|n| + |m|)."""
    gens = gens or heisenberg_generators()
    x, X = ("a", "A") if n >= 0 else ("A", "a")
    y, Y = ("b", "B") if m >= 0 else ("B", "b")
    word = [x] * abs(n) + [y] * abs(m) + [X] * abs(n) + [Y] * abs(m)
    return WitnessWord(gens, tuple(word), HeisenbergElement(0, 0, n * m))


def heisenberg_center_witness(n: int, gens: GeneratingSet | None = None) -> WitnessWord:
    """Word a^n b^n a^-n b^-n for c^(n^2); n = 0 gives the empty word."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return heisenberg_commutator_witness(n, n, gens)


def heisenberg_center_power_witness(N: int, gens: GeneratingSet | None = None) -> WitnessWord:
    """Witness for c^N with N = 2^j: [a^(2^ceil(j/2)), b^(2^floor(j/2))]."""
    j = N.bit_length() - 1
    if N != 1 << j:
        raise ValueError("N must be a power of two")
    return heisenberg_commutator_witness(1 << ((j + 1) // 2), 1 << (j // 2), gens)


# Anosov distortion ------------------------------------------------------------------

def abc_generators(G: AbcGroup) -> GeneratingSet:
    gens = {f"e{i + 1}": G.vec(tuple(int(i == k) for k in range(G.n))) for i in range(G.n)}
    gens["t"] = G.t()
    return GeneratingSet.symmetric(G, gens)


@dataclass(frozen=True)
class DistortionWitness:
    word: WitnessWord
    constant: float          # length <= constant * log2(n) + constant
    digits: tuple            # (j, c_j) pairs with n = c_0 + sum_j c_j |tr A^j|

    @property
    def length(self):
        return self.word.length


def _trace_powers(A, upto):
    """tr(A^j) for j = 0..upto via T_{j+1} = tr(A) T_j - det(A) T_{j-1}."""
    tr, det = A[0][0] + A[1][1], A[0][0] * A[1][1] - A[0][1] * A[1][0]
    T = [2, tr]
    while len(T) <= upto:
        T.append(tr * T[-1] - det * T[-2])
    return T


def distortion_constant(A, v):
    """C with witness length <= C log2 n + C for every n >= 1."""
    A = _require_anosov(A)
    tr = abs(A[0][0] + A[1][1])
    lam = (tr + math.sqrt(tr * tr - 4)) / 2
    T = [abs(x) for x in _trace_powers(A, 64)]
    cmax = max(-(-T[j + 1] // T[j]) for j in range(1, 64))
    v1 = sum(abs(x) for x in v)
    K = (4 + 2 * cmax * v1) / math.log2(lam)
    return K + tr * v1, cmax


def anosov_distortion_witness(G: AbcGroup, v, n: int, digit_bound: int | None = None,
                              gens: GeneratingSet | None = None) -> DistortionWitness:
    """Verified word of length O(log n) for (n v, 0) in Z^2 x|_A Z, A Anosov with det 1.

    Uses A^j + A^-j = tr(A^j) I: write n = c_0 + sum_{j>=1} c_j |tr A^j|
    greedily, so n v = c_0 v + sum_j c_j s_j (A^j v + A^-j v) with s_j the sign
    of tr A^j, and realize the sum as t^-J d_-J t d_-J+1 t ... t d_J t^-J.
    """
    A = _require_anosov(G.A)
    if G.det != 1:
        raise PreconditionError("the trace-sum expansion needs det A = 1")
    if n < 1:
        raise ValueError("n must be positive")
    v = tuple(int(x) for x in v)
    if sorted(abs(x) for x in v) != [0, 1]:
        raise PreconditionError("v must be a basis vector +-e_i")
    gens = gens or abc_generators(G)
    C, cmax = distortion_constant(A, v)
    T = _trace_powers(A, 1)
    while abs(T[-1]) <= n:
        T = _trace_powers(A, len(T))
    J = max(j for j in range(1, len(T)) if abs(T[j]) <= n) if abs(T[1]) <= n else 0
    rem, c = n, {}
    for j in range(J, 0, -1):
        c[j], rem = divmod(rem, abs(T[j]))
    c[0] = rem
    if digit_bound is not None and max(c.values()) > digit_bound:
        raise BudgetExceededError(f"digit {max(c.values())} exceeds the bound {digit_bound}", max(c.values()))
    i = next(k for k, x in enumerate(v) if x)
    e, E = (f"e{i + 1}", f"E{i + 1}") if v[i] > 0 else (f"E{i + 1}", f"e{i + 1}")

    def digit(j):
        k = c[abs(j)]
        if j and T[abs(j)] < 0:
            return [E] * k
        return [e] * k

    word = ["T"] * J
    for j in range(-J, J + 1):
        if j > -J:
            word.append("t")
        word += digit(j)
    word += ["T"] * J
    word = free_reduce(word, gens)
    ww = WitnessWord(gens, tuple(word), G.vec(tuple(n * x for x in v)))
    if ww.length > C * math.log2(n) + C:
        raise InvariantViolation(f"witness of length {ww.length} exceeds {C} log2({n}) + {C}")
    return DistortionWitness(ww, C, tuple(sorted(c.items())))
