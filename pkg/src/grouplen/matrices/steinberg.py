"""Elementary matrices over a commutative polynomial ring.

e_ij(r) = I + r E_ij.  Matrices are sparse dicts {(i, j): Poly} (indices from
1), which keeps products of near-identity matrices cheap.  Group elements
are words of elementary generators ``(i, j, r)`` so inverses are exact
without division in the ring.

Checked relations, for r, s in the ring:

    (St1)  e_ij(r) e_ij(s) = e_ij(r + s)
    (St2)  [e_ij(r), e_jk(s)] = e_ik(rs)       i, j, k distinct
    (St3)  [e_ij(r), e_kl(s)] = 1              j != k, i != l

with [x, y] = x y x^-1 y^-1.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from ..errors import PreconditionError
from ..polyring import Poly

NVARS = 2


def _p(c):
    return c if isinstance(c, Poly) else Poly.const(c, NVARS)


class SparseMatrix:
    __slots__ = ("n", "e")

    def __init__(self, n, entries=None):
        self.n = n
        self.e = {k: v for k, v in (entries or {}).items() if not v.is_zero()}

    @classmethod
    def identity(cls, n):
        one = _p(1)
        return cls(n, {(i, i): one for i in range(1, n + 1)})

    def __matmul__(self, o):
        rows: dict = {}
        for (i, k), v in self.e.items():
            rows.setdefault(k, []).append((i, v))
        out: dict = {}
        for (k, j), w in o.e.items():
            for i, v in rows.get(k, ()):
                key = (i, j)
                out[key] = out[key] + v * w if key in out else v * w
        return SparseMatrix(self.n, out)

    def __eq__(self, o):
        return isinstance(o, SparseMatrix) and self.n == o.n and self.e == o.e

    def is_identity(self):
        return self == SparseMatrix.identity(self.n)

    def __str__(self):
        return "[" + "; ".join(f"({i},{j}):{v}" for (i, j), v in sorted(self.e.items())) + "]"


def elementary(n, i, j, r) -> SparseMatrix:
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        raise PreconditionError(f"bad elementary index ({i},{j}) for n = {n}")
    M = SparseMatrix.identity(n)
    M.e[(i, j)] = _p(r)
    M.e = {k: v for k, v in M.e.items() if not v.is_zero()}
    return M


# words -------------------------------------------------------------------

def word_inverse(word):
    return [(i, j, -_p(r)) for i, j, r in reversed(word)]


def evaluate(n, word) -> SparseMatrix:
    M = SparseMatrix.identity(n)
    for i, j, r in word:
        M = M @ elementary(n, i, j, r)
    return M


def commutator_word(x, y):
    return list(x) + list(y) + word_inverse(x) + word_inverse(y)


def weyl_word(p, q):
    """w_pq = e_pq(1) e_qp(-1) e_pq(1)."""
    return [(p, q, _p(1)), (q, p, _p(-1)), (p, q, _p(1))]


# random ring elements --------------------------------------------------------

def random_poly(rng: random.Random, max_degree=3, coeff=5, terms=4):
    exps = [(a, b) for a in range(max_degree + 1) for b in range(max_degree + 1 - a)]
    pairs = [(rng.choice(exps), rng.randint(-coeff, coeff)) for _ in range(rng.randint(1, terms))]
    return Poly.from_terms(NVARS, pairs)


# relation check --------------------------------------------------------------

@dataclass
class SteinbergReport:
    n: int
    trials: int
    max_degree: int
    checked: dict = field(default_factory=lambda: {"St1": 0, "St2": 0, "St3": 0})
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def as_dict(self):
        return {"n": self.n, "trials": self.trials, "max_degree": self.max_degree,
                "checked": dict(self.checked), "violations": list(self.violations), "ok": self.ok}


def st3_pairs(n):
    idx = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return [(a, b) for a in idx for b in idx if a[1] != b[0] and a[0] != b[1]]


def steinberg_relation_check(n: int, trials: int = 100, max_degree: int = 3, seed: int = 0) -> SteinbergReport:
    if n < 3:
        raise PreconditionError("Steinberg relations need n >= 3")
    rng = random.Random(seed)
    rep = SteinbergReport(n, trials, max_degree)
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    triples = list(itertools.permutations(range(1, n + 1), 3))
    disjoint = st3_pairs(n)
    for t in range(trials):
        r, s = random_poly(rng, max_degree), random_poly(rng, max_degree)
        for i, j in pairs:
            rep.checked["St1"] += 1
            if elementary(n, i, j, r) @ elementary(n, i, j, s) != elementary(n, i, j, r + s):
                rep.violations.append({"relation": "St1", "trial": t, "indices": [i, j]})
        for i, j, k in triples:
            rep.checked["St2"] += 1
            c = evaluate(n, commutator_word([(i, j, r)], [(j, k, s)]))
            if c != elementary(n, i, k, r * s):
                rep.violations.append({"relation": "St2", "trial": t, "indices": [i, j, k]})
        for (i, j), (k, l) in disjoint:
            rep.checked["St3"] += 1
            x, y = elementary(n, i, j, r), elementary(n, k, l, s)
            if x @ y != y @ x:
                rep.violations.append({"relation": "St3", "trial": t, "indices": [i, j, k, l]})
    return rep


# Heisenberg triple and conjugators ---------------------------------------------

def conjugator_to_13(n, i, j):
    """Weyl word W and sign with W e_ij(r) W^-1 = e_13(sign r) for every r."""
    word = []
    a, b = i, j

    def swap(p, q):
        nonlocal a, b, word
        word = weyl_word(p, q) + word
        tau = {p: q, q: p}
        a, b = tau.get(a, a), tau.get(b, b)

    if a != 1:
        swap(a, 1)
    if b != 3:
        swap(b, 3)
    # sign from a probe with r = 1
    probe = evaluate(n, word + [(i, j, _p(1))] + word_inverse(word))
    for sign in (1, -1):
        if probe == elementary(n, 1, 3, sign):
            return word, sign
    raise PreconditionError(f"no Weyl conjugator found for ({i},{j})")


@dataclass
class HeisenbergReport:
    n: int
    triple: dict
    witnesses: list
    consequence: str

    @property
    def ok(self):
        return all(self.triple.values()) and all(w["verified"] for w in self.witnesses)

    def as_dict(self):
        return {"n": self.n, "ok": self.ok, "triple": self.triple,
                "witnesses": self.witnesses, "consequence": self.consequence}


def _word_str(word):
    return " ".join(f"e{i}{j}({r})" for i, j, r in word)


def elementary_heisenberg_report(n: int, r=None) -> HeisenbergReport:
    """Heisenberg triple (e_12(1), e_23(1), e_13(1)) and conjugators e_ij(r) -> e_13(+-r)."""
    if n < 3:
        raise PreconditionError("elementary Heisenberg triples need n >= 3")
    r = _p(1) if r is None else _p(r)
    x, y, z = [(1, 2, _p(1))], [(2, 3, _p(1))], [(1, 3, _p(1))]
    Z = evaluate(n, z)
    triple = {
        "[e12(1),e23(1)] = e13(1)": evaluate(n, commutator_word(x, y)) == Z,
        "[e12(1),e13(1)] = 1": evaluate(n, commutator_word(x, z)).is_identity(),
        "[e23(1),e13(1)] = 1": evaluate(n, commutator_word(y, z)).is_identity(),
    }
    witnesses = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            W, sign = conjugator_to_13(n, i, j)
            got = evaluate(n, W + [(i, j, r)] + word_inverse(W))
            witnesses.append({"pair": [i, j], "sign": sign, "conjugator": _word_str(W),
                              "verified": got == elementary(n, 1, 3, r * sign)})
    consequence = ("e13(r) = [e12(1), e23(r)] is central in that Heisenberg subgroup, so l(e13(r)) = 0; "
                   "each e_ij(r) is conjugate to e13(+-r), so l(e_ij(r)) = 0 for every length function l; "
                   "a purely positive l on a quotient of E_n needs every e_ij(1) to map to a torsion element")
    return HeisenbergReport(n, triple, witnesses, consequence)
