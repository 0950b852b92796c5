import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grouplen import heisenberg as H
from grouplen import polycyclic as P
from grouplen import wordmetric as W
from grouplen.errors import BudgetExceededError, InvariantViolation, PreconditionError


@pytest.fixture(scope="module")
def ball():
    return W.bfs_ball(W.heisenberg_generators(), 8)


def test_ball_sizes_and_neighbours(ball):
    gens = W.heisenberg_generators()
    fam = gens.family
    assert ball[fam.key(H.A)] == 1 and ball[fam.key(H.C)] == 4
    # moving by one generator changes the length by exactly one
    for key, L in ball.items():
        if L == 8:
            continue
        g = fam.parse(key)
        for s in gens.gens.values():
            assert abs(ball[fam.key(fam.mul(g, s))] - L) == 1


def center_length(k):
    """Closed form for |c^k| over {a, b}, k >= 1: with n = floor(sqrt k),
    4n if k = n^2, 4n + 2 if n^2 < k <= n^2 + n, else 4n + 4."""
    n = math.isqrt(k)
    if k == n * n:
        return 4 * n
    return 4 * n + 2 if k <= n * n + n else 4 * n + 4


def test_center_lengths_closed_form():
    gens = W.heisenberg_generators()
    ball10 = W.bfs_ball(gens, 10)
    for k in range(1, 13):
        L = center_length(k)
        key = H.FAMILY.key(H.HeisenbergElement(0, 0, k))
        assert ball10.get(key) == (L if L <= 10 else None)
        assert ball10.get(H.FAMILY.key(H.HeisenbergElement(0, 0, -k))) == ball10.get(key)


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(-4, 4))
def test_bfs_word_length_agrees_with_ball(m, n, k):
    gens = W.heisenberg_generators()
    g = H.HeisenbergElement(m, n, k)
    ball = W.bfs_ball(gens, 6)
    assert W.bfs_word_length(gens, g, 6) == ball.get(gens.family.key(g))


def test_generating_set_must_be_symmetric():
    with pytest.raises(PreconditionError):
        W.GeneratingSet(H.FAMILY, {"a": H.A})
    gens = W.heisenberg_generators(with_center=True)
    assert set(gens.symbols()) == {"a", "A", "b", "B", "c", "C"}


def test_witness_word_checks_its_claim():
    gens = W.heisenberg_generators()
    with pytest.raises(InvariantViolation):
        W.WitnessWord(gens, ("a", "b"), H.C)
    w = W.heisenberg_commutator_witness(-3, 2)
    assert w.length == 10 and w.claim == H.HeisenbergElement(0, 0, -6)


def test_free_reduce():
    gens = W.heisenberg_generators()
    assert W.free_reduce(list("aAbBBa"), gens) == ["B", "a"]


def test_memory_budget():
    with pytest.raises(BudgetExceededError):
        W.bfs_ball(W.heisenberg_generators(), 12, memory_budget=1000)


def test_stable_length_with_center_generator():
    gens = W.heisenberg_generators(with_center=True)
    res = W.stable_length_bounds(gens, H.C, 10, witness_gen=lambda N: W.heisenberg_center_power_witness(N, gens))
    assert res.bounds[0] == 1 and res.estimate <= Fraction(1, 4)


def test_stable_length_of_fiber_vector_in_anosov_group():
    G = P.AbcGroup([[2, 1], [1, 1]])
    gens = W.abc_generators(G)
    res = W.stable_length_bounds(gens, G.vec((1, 0)), 12,
                                 witness_gen=lambda N: W.anosov_distortion_witness(G, (1, 0), N, gens=gens).word)
    assert res.estimate < Fraction(1, 50)
    assert all(a >= b for a, b in zip(res.bounds, res.bounds[1:]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10 ** 9), st.sampled_from([(1, 0), (0, 1), (-1, 0), (0, -1)]))
def test_distortion_witness_any_n(n, v):
    G = P.AbcGroup([[3, 1], [2, 1]])
    w = W.anosov_distortion_witness(G, v, n)
    assert w.word.claim == G.vec((n * v[0], n * v[1]))
    assert W.abc_generators(G).evaluate(w.word.symbols) == w.word.claim


def test_distortion_preconditions():
    with pytest.raises(PreconditionError):
        W.anosov_distortion_witness(P.AbcGroup([[1, 1], [0, 1]]), (1, 0), 5)
    with pytest.raises(PreconditionError):
        W.anosov_distortion_witness(P.AbcGroup([[2, 1], [1, 1]]), (1, 1), 5)
    with pytest.raises(BudgetExceededError):
        W.anosov_distortion_witness(P.AbcGroup([[2, 1], [1, 1]]), (1, 0), 10 ** 6, digit_bound=0)
