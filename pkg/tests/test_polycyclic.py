import copy

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from grouplen import heisenberg as H
from grouplen import polycyclic as P
from grouplen.core import VanishingCertificate, verify_certificate
from grouplen.errors import PreconditionError

A2 = [[2, 1], [1, 1]]
small = st.integers(-20, 20)


def block(G, x):
    """(v, p) as the (n+1)x(n+1) matrix [[A^p, v], [0, 1]]."""
    Ap = sp.Matrix(G.A) ** x.p if x.p >= 0 else sp.Matrix(G.A).inv() ** (-x.p)
    M = sp.zeros(G.n + 1)
    M[:G.n, :G.n] = Ap
    M[:G.n, G.n] = sp.Matrix(x.v)
    M[G.n, G.n] = 1
    return M


@settings(max_examples=60)
@given(small, small, st.integers(-6, 6), small, small, st.integers(-6, 6))
def test_mul_matches_block_matrices(a, b, p, c, d, q):
    G = P.AbcGroup(A2)
    x, y = G.element((a, b), p), G.element((c, d), q)
    assert block(G, G.mul(x, y)) == block(G, x) * block(G, y)
    assert G.is_identity(G.mul(x, G.inv(x)))


def test_parse_format_and_errors():
    G = P.AbcGroup([[1, 1], [0, 1]])
    x = G.parse("( 3, -2 ) ; t^{-4}")
    assert str(x) == "(3,-2);t^-4" and G.parse(str(x)) == x
    with pytest.raises(ValueError):
        G.parse("(1,2,3);t^0")
    with pytest.raises(PreconditionError):
        P.AbcGroup([[2, 0], [0, 1]])


@pytest.mark.parametrize("A, cls", [
    ([[2, 1], [1, 1]], P.TraceClass.ANOSOV),
    ([[1, 4], [0, 1]], P.TraceClass.PARABOLIC),
    ([[-1, 1], [0, -1]], P.TraceClass.PARABOLIC),
    ([[0, -1], [1, 0]], P.TraceClass.FINITE_ORDER),
    ([[-1, 0], [0, -1]], P.TraceClass.FINITE_ORDER),
    ([[1, 0], [0, 1]], P.TraceClass.IDENTITY),
])
def test_trace_classify(A, cls):
    assert P.trace_classify(A) is cls


def test_anosov_certificates_cover_both_basis_vectors():
    certs = P.anosov_certificate([[3, 2], [1, 1]])
    assert [c.target for c in certs] == ["(1,0);t^0", "(0,1);t^0"]
    assert all(verify_certificate(c).ok for c in certs)
    with pytest.raises(PreconditionError):
        P.anosov_certificate([[1, 1], [0, 1]])
    # det -1 still closes: 3 l(e1) <= (1 + |det|) l(e1)
    final = P.anosov_certificate([[3, 1], [1, 0]])[0].steps[-1].data
    assert final["lhs"] == {"(1,0);t^0": "3/1"} and final["rhs"] == {"(1,0);t^0": "2/1"}


def test_parabolic_negative_eigenvalue():
    cert = P.parabolic_certificate([[-1, 2], [0, -1]], budget=5)
    rep = verify_certificate(cert)
    assert rep.ok and "even powers" in cert.conclusion["note"]


def test_parabolic_normal_form():
    nf = P.parabolic_normal_form([[1, 0], [6, 1]])
    assert nf.u == (0, 1)
    G = P.AbcGroup([[1, 0], [6, 1]])
    assert G.conj(G.t(), G.vec(nf.u)) == G.vec(nf.u)


def test_dominant_3x3_and_fiber():
    A = [[0, 0, 1], [1, 0, -1], [0, 1, 3]]       # companion of x^3 - 3x^2 + x - 1
    x = sp.symbols("x")
    assert sp.Matrix(A).charpoly(x).as_expr() == x ** 3 - 3 * x ** 2 + x - 1
    certs = P.dominant_coefficient_certificate(A)
    assert certs is not None and all(verify_certificate(c).ok for c in certs)
    fib = P.fiber_vanishing_certificate(A, (2, -1, 5))
    assert verify_certificate(fib).ok and fib.target == "(2,-1,5);t^0"
    assert P.dominant_coefficient_certificate([[1, 1], [0, 1]]) is None


def test_fiber_certificate_anosov_route():
    rep = verify_certificate(P.fiber_vanishing_certificate(A2, (3, -7)))
    assert rep.ok and rep.conclusion == "ExactZero"


def test_tampered_identity_step_is_rejected():
    d = P.anosov_certificate(A2)[0].to_dict()
    step = next(s for s in d["steps"] if s["kind"] == "GroupIdentity")
    step["rhs"][0][0] = "(5,2);t^0"
    rep = verify_certificate(VanishingCertificate.from_dict(d))
    assert not rep.ok and rep.failed_step().kind == "GroupIdentity"


def test_baumslag_solitar():
    for q in (2, -3, 5):
        assert verify_certificate(P.baumslag_solitar_certificate(q)).ok
    with pytest.raises(PreconditionError):
        P.baumslag_solitar_certificate(1)


@given(st.builds(H.HeisenbergElement, small, small, small), st.builds(H.HeisenbergElement, small, small, small))
def test_heisenberg_isomorphism(x, y):
    G = P.AbcGroup(P.HEISENBERG_MATRIX)
    f = lambda z: P.heisenberg_to_polycyclic(z, G)
    assert f(H.h_mul(x, y)) == G.mul(f(x), f(y))
    if f(x) == G.identity():
        assert x.is_identity()
