"""Sample-based checks of the three length-function axioms.

A length function ``l: G -> [0, inf)`` must satisfy

* homogeneity          ``l(g^n) = |n| l(g)``
* conjugation invariance ``l(h g h^-1) = l(g)``
* commuting subadditivity ``l(gh) <= l(g) + l(h)`` whenever ``gh = hg``.

There is no decision procedure for this, so :func:`check_axioms` only tests
the supplied samples.  Commutation is decided by the family's exact
arithmetic before subadditivity is tested on a pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

from ..errors import FamilyMismatchError, NegativeValueError, NonFiniteValueError
from .families import Family


@dataclass(frozen=True)
class LengthFunctionSpec:
    """An evaluatable length function on one family.

    ``evaluate`` maps a family element to a nonnegative ``Fraction`` (exact
    families) or ``float``.
    """

    evaluate: Callable[[Any], Any]
    family: Family
    name: str = "l"

    @property
    def family_tag(self) -> str:
        return self.family.tag

    def __call__(self, g):
        return self.evaluate(g)


def zero_length(family: Family) -> LengthFunctionSpec:
    return LengthFunctionSpec(lambda g: Fraction(0), family, name="zero")


@dataclass(frozen=True)
class Violation:
    axiom: str
    elements: tuple
    expected: Any
    actual: Any

    def as_dict(self):
        return {"axiom": self.axiom, "elements": list(self.elements),
                "expected": str(self.expected), "actual": str(self.actual)}


@dataclass
class AxiomReport:
    tested: dict = field(default_factory=lambda: {"homogeneity": 0, "conjugation": 0, "subadditivity": 0})
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def by_axiom(self, axiom):
        return [v for v in self.violations if v.axiom == axiom]

    def as_dict(self):
        return {"passed": self.passed, "tested": dict(self.tested),
                "violations": [v.as_dict() for v in self.violations]}


def _value(l: LengthFunctionSpec, g):
    v = l.evaluate(g)
    if isinstance(v, float) and not math.isfinite(v):
        raise NonFiniteValueError(f"{l.name}({l.family.format(g)}) = {v}")
    if v < 0:
        raise NegativeValueError(f"{l.name}({l.family.format(g)}) = {v} < 0")
    return v


def _close(x, y, tol):
    if tol == 0:
        return x == y
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def check_axioms(l: LengthFunctionSpec, samples: Iterable[tuple], tol: float = 0) -> AxiomReport:
    """Test every axiom on every ``(g, h, n)`` sample.

    For each sample: homogeneity on ``(g, n)``, conjugation invariance of
    ``g`` under ``h``, and subadditivity on ``(g, h)`` if they commute.
    ``tol`` is a relative tolerance for float-valued lengths; leave it 0 for
    exact ones.
    """
    fam = l.family
    report = AxiomReport()
    for g, h, n in samples:
        for x in (g, h):
            if not fam.contains(x):
                raise FamilyMismatchError(f"{x!r} is not an element of family {fam.tag!r}")
        fmt = fam.format
        lg = _value(l, g)

        lgn = _value(l, fam.pow(g, n))
        report.tested["homogeneity"] += 1
        if not _close(lgn, abs(n) * lg, tol):
            report.violations.append(Violation("homogeneity", (fmt(g), n), abs(n) * lg, lgn))

        lc = _value(l, fam.conj(h, g))
        report.tested["conjugation"] += 1
        if not _close(lc, lg, tol):
            report.violations.append(Violation("conjugation", (fmt(g), fmt(h)), lg, lc))

        if fam.commute(g, h):
            lh = _value(l, h)
            lgh = _value(l, fam.mul(g, h))
            report.tested["subadditivity"] += 1
            if lgh > lg + lh and not _close(lgh, lg + lh, tol):
                report.violations.append(Violation("subadditivity", (fmt(g), fmt(h)), f"<= {lg + lh}", lgh))
    return report
