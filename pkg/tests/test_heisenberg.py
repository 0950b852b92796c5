import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grouplen import heisenberg as H
from grouplen.errors import NoWitnessError

ints = st.integers(-10 ** 6, 10 ** 6)
elems = st.builds(H.HeisenbergElement, ints, ints, ints)


def mmul(X, Y):
    return tuple(tuple(sum(X[i][t] * Y[t][j] for t in range(3)) for j in range(3)) for i in range(3))


@given(elems, elems)
def test_multiplication_matches_matrices(x, y):
    assert H.h_mul(x, y).matrix() == mmul(x.matrix(), y.matrix())
    assert H.HeisenbergElement.from_matrix(x.matrix()) == x


@given(elems, elems, elems)
def test_associative(x, y, z):
    assert H.h_mul(H.h_mul(x, y), z) == H.h_mul(x, H.h_mul(y, z))


@given(elems, st.integers(-30, 30))
def test_pow_and_inverse(x, e):
    assert H.h_mul(x, H.h_inv(x)).is_identity()
    acc = H.IDENTITY
    for _ in range(abs(e)):
        acc = H.h_mul(acc, x if e >= 0 else H.h_inv(x))
    assert H.h_pow(x, e) == acc


@given(elems)
def test_parse_roundtrip(x):
    assert H.parse_element(str(x)) == x


def test_parse_words():
    assert H.parse_element("a b A B") == H.HeisenbergElement(0, 0, 1)
    assert H.parse_element("a^{-2} c^3") == H.HeisenbergElement(-2, 0, 3)
    with pytest.raises(ValueError):
        H.parse_element("a^2 d")


@given(ints, ints, ints)
def test_conjugator_witness(m, n, k):
    import math
    d = math.gcd(m, n)
    if (d == 0 and k != 0) or (d and k % d):
        with pytest.raises(NoWitnessError):
            H.conjugator_witness(m, n, k)
        return
    g = H.conjugator_witness(m, n, k)
    assert H.h_mul(H.h_mul(g, H.HeisenbergElement(m, n, 0)), H.h_inv(g)) == H.HeisenbergElement(m, n, k)


def test_primitive_class():
    assert H.primitive_class(-4, 6) == (2, -3)
    assert H.primitive_class(0, -5) == (0, 1)
    with pytest.raises(ValueError):
        H.primitive_class(0, 0)


def test_cone_coefficients_validation():
    with pytest.raises(ValueError):
        H.ConeCoefficients({(2, 2): 1})
    with pytest.raises(ValueError):
        H.ConeCoefficients({(1, 0): -1})
    with pytest.raises(ValueError):
        H.ConeCoefficients({(1, 2): 1, (-1, -2): 2})
    c = H.ConeCoefficients({"1,0": "1/2", (-1, -2): 3})
    assert c[(1, 2)] == 3 and c[(-1, 0)] == Fraction(1, 2) and c[(0, 1)] == 0


def test_cone_length_values():
    c = H.ConeCoefficients({(1, 0): 1})
    assert H.cone_length(c, H.HeisenbergElement(4, 0, 7)) == 4
    assert H.cone_length(c, H.HeisenbergElement(-4, 0, 0)) == 4
    assert H.cone_length(c, H.HeisenbergElement(4, 1, 0)) == 0
    assert H.cone_length(c, H.C) == 0


@settings(max_examples=50)
@given(st.integers(0, 2 ** 32), elems, elems, st.integers(-20, 20))
def test_random_cone_satisfies_axioms_off_box(seed, g, h, e):
    c = H.random_cone(random.Random(seed), support=4)
    lg = H.cone_length(c, g)
    assert H.cone_length(c, H.h_pow(g, e)) == abs(e) * lg
    assert H.cone_length(c, H.h_mul(H.h_mul(h, g), H.h_inv(h))) == lg
    if H.h_mul(g, h) == H.h_mul(h, g):
        assert H.cone_length(c, H.h_mul(g, h)) <= lg + H.cone_length(c, h)


def test_axiom_suite_counts():
    c = H.ConeCoefficients({(1, 0): 1, (0, 1): 1})
    rep = H.cone_axiom_suite(c, radius=3)
    assert rep.passed and rep.tested["homogeneity"] == 7 ** 4


def test_center_certificate_bound():
    from grouplen.core import verify_certificate
    rep = verify_certificate(H.center_vanishing_certificate(9))
    assert rep.ok and rep.conclusion == "LimitZero"
    assert rep.certified_bound == "1/256*l(a^1 b^0 c^0)"
