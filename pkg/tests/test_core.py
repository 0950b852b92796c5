import json
import math
from fractions import Fraction

import pytest

from grouplen import heisenberg as H
from grouplen.core import (LengthFunctionSpec, SubadditiveSeries, VanishingCertificate, check_axioms,
                           derive_torsion_zero, fekete_upper_bounds, make_family, verify_certificate, zero_length)
from grouplen.core.families import known_families
from grouplen.errors import (CertificateError, MultiplierError, NegativeValueError, PreconditionError,
                             SubadditivityError, UnknownFamilyError)
from grouplen.matrices import MatrixFamily, QMatrix
from grouplen.wordmetric import bfs_ball, heisenberg_generators


def test_zero_length_passes_everything():
    samples = [(H.A, H.B, 3), (H.C, H.A, -2), (H.HeisenbergElement(2, -1, 5), H.C, 4)]
    rep = check_axioms(zero_length(H.FAMILY), samples)
    assert rep.passed
    assert rep.tested["subadditivity"] == 2     # (c, a) and (g, c) commute, (a, b) does not


def test_word_length_fails_homogeneity_on_center():
    ball = bfs_ball(heisenberg_generators(), 10)
    wl = LengthFunctionSpec(lambda g: Fraction(ball[H.FAMILY.key(g)]), H.FAMILY, "word")
    rep = check_axioms(wl, [(H.C, H.A, 4)])
    v = rep.by_axiom("homogeneity")
    assert len(v) == 1 and v[0].expected == 16 and v[0].actual == 8


def test_negative_length_rejected():
    bad = LengthFunctionSpec(lambda g: Fraction(-1), H.FAMILY)
    with pytest.raises(NegativeValueError):
        check_axioms(bad, [(H.A, H.B, 1)])


def test_fekete_exact_and_monotone():
    lin = fekete_upper_bounds(SubadditiveSeries(lambda n: 3 * n, 6))
    assert all(b == 3 for b in lin.bounds) and lin.estimate == 3
    sq = fekete_upper_bounds(SubadditiveSeries(lambda n: math.sqrt(n), 10, rtol=1e-12))
    assert sq.bounds == sorted(sq.bounds, reverse=True)
    assert sq.estimate == pytest.approx(1 / 32)


def test_fekete_detects_superadditive():
    with pytest.raises(SubadditivityError):
        fekete_upper_bounds(SubadditiveSeries(lambda n: n * n, 5))


def test_certificate_json_roundtrip():
    cert = H.center_vanishing_certificate(6)
    again = VanishingCertificate.from_json(cert.to_json())
    assert again == cert
    rep = verify_certificate(again)
    assert rep.ok and rep.certified_bound == "1/32*l(a^1 b^0 c^0)"


def test_malformed_json_reports_position():
    with pytest.raises(CertificateError, match="line 2 column"):
        VanishingCertificate.from_json('{"family": "heisenberg",\n  "steps": [,]}')


def test_unknown_family():
    d = H.center_vanishing_certificate(2).to_dict()
    d["family"] = "no-such-group"
    with pytest.raises(UnknownFamilyError):
        verify_certificate(VanishingCertificate.from_dict(d))
    assert "heisenberg" in known_families() and "polycyclic" in known_families()


def test_torsion_certificate():
    fam = MatrixFamily(2)
    rot = QMatrix([[0, -1], [1, 0]])
    assert verify_certificate(derive_torsion_zero(rot, 4, fam)).ok
    with pytest.raises(PreconditionError, match="not the identity"):
        derive_torsion_zero(rot, 3, fam)


def test_negative_multiplier_on_inequality():
    d = H.center_vanishing_certificate(2).to_dict()
    from grouplen.core.certificates import _CONSTRUCTORS
    steps = [s.to_dict() for s in _CONSTRUCTORS["heisenberg.center"](H.FAMILY, {}, 2)]
    steps[-1]["terms"][0]["coeff"] = "-1/1"       # the CommSubadd inequality, reversed
    d["steps"] = steps
    d["conclusion"] = {"kind": "ExactZero"}
    with pytest.raises(MultiplierError):
        verify_certificate(VanishingCertificate.from_dict(d))


def test_exact_zero_needs_positive_coefficient():
    # l(c^2) = 2 l(c) alone does not force l(c) = 0
    d = {"family": "heisenberg", "target": "c", "conclusion": {"kind": "ExactZero"},
         "steps": [{"kind": "Homogeneity", "g": "c", "n": 2}]}
    rep = verify_certificate(VanishingCertificate.from_dict(d))
    assert not rep.ok and "does not force" in rep.message


def test_budget_override_tightens_bound():
    cert = H.center_vanishing_certificate(3)
    assert verify_certificate(cert, budget=8).certified_bound == "1/128*l(a^1 b^0 c^0)"


def test_make_family_params():
    G = make_family("polycyclic", {"A": [[2, 1], [1, 1]]})
    x = G.parse("(1,0);t^1")
    assert G.format(G.mul(x, G.inv(x))) == "(0,0);t^0"
    assert json.dumps(G.params()) == '{"A": [[2, 1], [1, 1]]}'
