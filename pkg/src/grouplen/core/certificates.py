"""Vanishing certificates: serialised derivations from the length-function
axioms, checked by exact group arithmetic and exact rational linear
arithmetic.

Symbols ``l(g)`` are keyed by the family's canonical element string, so two
conjugate elements are different symbols until a ``ConjInvariance`` step
relates them.  Every step emits one formal linear relation ``lhs REL rhs``
over these symbols with ``REL`` in ``{"<=", "="}``; nonnegativity ``l(x) >= 0``
is available to ``LinearArith`` as an implicit source.

Step kinds and what the checker does before admitting the emitted relation:

=====================  =====================================  =========================
kind                   side condition                         emitted relation
=====================  =====================================  =========================
Homogeneity(g, n)      none                                   l(g^n) = |n| l(g)
ConjInvariance(g,h,c)  h g h^-1 == c                          l(c) = l(g)
CommSubadd(a, b)       ab == ba                               l(ab) <= l(a) + l(b)
TorsionZero(g, o)      o >= 1 and g^o == 1                    l(g) = 0
GroupIdentity(L, R)    prod L == prod R                       l(L) = l(R)
LinearArith(terms)     multipliers valid, claim matches       the claimed combination
ArchimedeanFamily      every sampled instance verifies        instance at the largest k
=====================  =====================================  =========================

``ArchimedeanFamily`` covers proofs of the shape "for every k, k*s*l(t) <= R"
with R independent of k.  The verifier replays the named instance
constructor at k = 2^0 ... 2^B, checks each instance exactly, admits
``l(t) <= R / (s 2^B)`` and reports the ``LimitZero`` conclusion as resting
on one analytic step (l >= 0 and the bound holds for all verified k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..errors import CertificateError, GroupLenError, MultiplierError, PreconditionError
from ..rational import fmt, fmt_short, to_fraction
from .families import Family, make_family

STEP_KINDS = ("Homogeneity", "ConjInvariance", "CommSubadd", "TorsionZero",
              "GroupIdentity", "LinearArith", "ArchimedeanFamily")
CONCLUSIONS = ("ExactZero", "BoundedBy", "LimitZero")


# linear forms -------------------------------------------------------------

def _lin_add(*forms_with_coeffs):
    out: dict = {}
    for form, c in forms_with_coeffs:
        for k, v in form.items():
            out[k] = out.get(k, 0) + c * v
    return {k: v for k, v in out.items() if v != 0}


def _fmt_form(form):
    if not form:
        return "0"
    parts = []
    for k in sorted(form):
        c = form[k]
        parts.append(f"l({k})" if c == 1 else f"{fmt_short(c)}*l({k})")
    return " + ".join(parts)


@dataclass(frozen=True)
class Inequality:
    lhs: dict
    rhs: dict
    rel: str = "<="

    def form(self):
        """lhs - rhs, with zero coefficients dropped."""
        return _lin_add((self.lhs, 1), (self.rhs, -1))

    def __str__(self):
        return f"{_fmt_form(self.lhs)} {self.rel} {_fmt_form(self.rhs)}"


def _form_to_json(form):
    return {k: fmt(v) for k, v in sorted(form.items())}


def _form_from_json(d):
    return {k: to_fraction(v) for k, v in d.items()}


# steps and certificates ---------------------------------------------------

@dataclass(frozen=True)
class CertStep:
    kind: str
    data: dict

    def to_dict(self):
        return {"kind": self.kind, **self.data}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        try:
            kind = d.pop("kind")
        except KeyError:
            raise CertificateError("step without 'kind'") from None
        if kind not in STEP_KINDS:
            raise CertificateError(f"unknown step kind {kind!r}")
        return cls(kind, d)


@dataclass(frozen=True)
class VanishingCertificate:
    family: str
    target: str
    steps: tuple
    conclusion: dict
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {"family": self.family, "params": self.params, "target": self.target,
                "steps": [s.to_dict() for s in self.steps], "conclusion": self.conclusion}

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        try:
            steps = tuple(CertStep.from_dict(s) for s in d["steps"])
            conclusion = dict(d["conclusion"])
            if conclusion.get("kind") not in CONCLUSIONS:
                raise CertificateError(f"unknown conclusion {conclusion.get('kind')!r}")
            return cls(d["family"], d["target"], steps, conclusion, dict(d.get("params", {})))
        except KeyError as e:
            raise CertificateError(f"certificate is missing field {e.args[0]!r}") from None

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise CertificateError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
        return cls.from_dict(d)


# instance constructors for ArchimedeanFamily ------------------------------

_CONSTRUCTORS: dict = {}


def register_constructor(name):
    """Register ``fn(family, params, k) -> list[CertStep]``."""
    def deco(fn):
        _CONSTRUCTORS[name] = fn
        return fn
    return deco


# step semantics -----------------------------------------------------------

class _SideConditionFailed(Exception):
    pass


def _elem(fam, data, name):
    try:
        s = data[name]
    except KeyError:
        raise CertificateError(f"missing operand {name!r}") from None
    try:
        return fam.parse(s)
    except GroupLenError:
        raise
    except Exception as e:
        raise CertificateError(f"operand {name}={s!r} does not parse in family {fam.tag!r}: {e}") from None


def _word(fam, factors):
    try:
        return fam.word([(fam.parse(x), int(e)) for x, e in factors])
    except (TypeError, ValueError) as e:
        raise CertificateError(f"bad word {factors!r}: {e}") from None


def _admit(step: CertStep, fam: Family, admitted: list, budget, path):
    """Return the relation emitted by ``step`` or raise _SideConditionFailed."""
    d, key = step.data, fam.key
    k = step.kind
    if k == "Homogeneity":
        g, n = _elem(fam, d, "g"), int(d["n"])
        return Inequality({key(fam.pow(g, n)): Fraction(1)}, {key(g): Fraction(abs(n))}, "=")
    if k == "ConjInvariance":
        g, h, claim = _elem(fam, d, "g"), _elem(fam, d, "h"), _elem(fam, d, "claim")
        got = fam.conj(h, g)
        if not fam.eq(got, claim):
            raise _SideConditionFailed(
                f"h g h^-1 = {fam.format(got)} but certificate claims {fam.format(claim)} "
                f"(g = {fam.format(g)}, h = {fam.format(h)})")
        return Inequality({key(claim): Fraction(1)}, {key(g): Fraction(1)}, "=")
    if k == "CommSubadd":
        a, b = _elem(fam, d, "a"), _elem(fam, d, "b")
        ab, ba = fam.mul(a, b), fam.mul(b, a)
        if not fam.eq(ab, ba):
            raise _SideConditionFailed(
                f"operands do not commute: ab = {fam.format(ab)}, ba = {fam.format(ba)}")
        return Inequality({key(ab): Fraction(1)}, _lin_add(({key(a): Fraction(1)}, 1), ({key(b): Fraction(1)}, 1)))
    if k == "TorsionZero":
        g, order = _elem(fam, d, "g"), int(d["order"])
        if order < 1:
            raise _SideConditionFailed(f"order must be positive, got {order}")
        p = fam.pow(g, order)
        if not fam.is_identity(p):
            raise _SideConditionFailed(f"g^{order} = {fam.format(p)} is not the identity")
        return Inequality({key(g): Fraction(1)}, {}, "=")
    if k == "GroupIdentity":
        lhs, rhs = _word(fam, d["lhs"]), _word(fam, d["rhs"])
        if not fam.eq(lhs, rhs):
            raise _SideConditionFailed(f"words differ: {fam.format(lhs)} != {fam.format(rhs)}")
        return Inequality({key(lhs): Fraction(1)}, {key(rhs): Fraction(1)}, "=")
    if k == "LinearArith":
        return _linear(d, fam, admitted, path)
    if k == "ArchimedeanFamily":
        return _archimedean(d, fam, budget, path)
    raise CertificateError(f"unknown step kind {k!r}", path)


def _canon_form(fam, form, path):
    try:
        return _lin_add(*(({fam.canonical(k): v}, 1) for k, v in form.items()))
    except GroupLenError:
        raise
    except Exception as e:
        raise CertificateError(f"symbol in {form!r} does not parse: {e}", path) from None


def _linear(d, fam, admitted, path):
    sources = []
    strict = False
    for t in d.get("terms", []):
        c = to_fraction(t["coeff"])
        if "step" in t:
            i = int(t["step"])
            if not 0 <= i < len(admitted):
                raise MultiplierError(f"reference to step {i}, which is not earlier", path)
            ineq = admitted[i]
        elif "nonneg" in t:
            ineq = Inequality({}, _canon_form(fam, {t["nonneg"]: Fraction(1)}, path), "<=")
        else:
            raise MultiplierError(f"term {t!r} names neither a step nor a nonneg source", path)
        if ineq.rel == "<=" and c < 0:
            raise MultiplierError(f"negative multiplier {fmt_short(c)} on an inequality", path)
        if c != 0 and ineq.rel == "<=":
            strict = True
        sources.append((ineq.form(), c))
    combo = _lin_add(*sources)
    claim = Inequality(_canon_form(fam, _form_from_json(d.get("lhs", {})), path),
                       _canon_form(fam, _form_from_json(d.get("rhs", {})), path),
                       d.get("rel", "<="))
    if claim.form() != combo:
        raise MultiplierError(
            f"multipliers give {_fmt_form(combo)} <= 0, certificate claims {claim}", path)
    if claim.rel == "=" and strict:
        raise MultiplierError("claimed equality but an inequality source was used", path)
    return claim


def _archimedean(d, fam, budget, path):
    name = d.get("constructor")
    try:
        ctor = _CONSTRUCTORS[name]
    except KeyError:
        raise CertificateError(f"unknown instance constructor {name!r}", path) from None
    B = int(d.get("budget", 10)) if budget is None else int(budget)
    if B < 0:
        raise CertificateError("budget must be nonnegative", path)
    target = fam.key(_elem(fam, d, "target"))
    slope = to_fraction(d["slope"])
    rhs = _canon_form(fam, _form_from_json(d["rhs"]), path)
    if slope <= 0:
        raise _SideConditionFailed(f"slope must be positive, got {fmt_short(slope)}")
    last = None
    for j in range(B + 1):
        kk = 1 << j
        steps = ctor(fam, d.get("params", {}), kk)
        results, admitted = _replay(steps, fam, None, f"{path}/k={kk}")
        bad = [r for r in results if not r.ok]
        if bad:
            raise _SideConditionFailed(f"instance k={kk}, step {bad[0].index}: {bad[0].message}")
        inst = admitted[-1]
        expect = _lin_add(({target: slope * kk}, 1), (rhs, -1))
        if inst.form() != expect:
            raise _SideConditionFailed(
                f"instance k={kk} proves {inst}, expected {fmt_short(slope * kk)}*l({target}) <= {_fmt_form(rhs)}")
        last = Inequality({target: slope * kk}, dict(rhs), "<=")
    return last


@dataclass(frozen=True)
class StepResult:
    index: object
    kind: str
    ok: bool
    emitted: str = ""
    message: str = ""


def _replay(steps, fam, budget, path=""):
    results, admitted = [], []
    for i, step in enumerate(steps):
        here = f"{path}/{i}" if path else i
        try:
            ineq = _admit(step, fam, admitted, budget, here)
        except _SideConditionFailed as e:
            results.append(StepResult(here, step.kind, False, "", str(e)))
            return results, admitted
        except (KeyError, TypeError, ValueError) as e:
            raise CertificateError(f"malformed {step.kind} step: {e!r}", here) from None
        admitted.append(ineq)
        results.append(StepResult(here, step.kind, True, str(ineq)))
    return results, admitted


@dataclass
class VerifyReport:
    ok: bool
    conclusion: str
    target: str
    steps: list
    certified_bound: str = ""
    analytic_limit: bool = False
    message: str = ""
    final: Inequality | None = None

    def failed_step(self):
        for r in self.steps:
            if not r.ok:
                return r
        return None

    def trace(self):
        lines = []
        for r in self.steps:
            status = "ok  " if r.ok else "FAIL"
            lines.append(f"[{status}] step {r.index} {r.kind}: {r.emitted or r.message}")
        verdict = "VERIFIED" if self.ok else "REJECTED"
        lines.append(f"{verdict} {self.conclusion} for l({self.target})"
                     + (f"; certified bound l({self.target}) <= {self.certified_bound}" if self.certified_bound else "")
                     + (" [analytic limit step: l >= 0 and the bound holds for every verified k]" if self.analytic_limit else "")
                     + (f" -- {self.message}" if self.message else ""))
        return "\n".join(lines)

    def as_dict(self):
        return {"ok": self.ok, "conclusion": self.conclusion, "target": self.target,
                "certified_bound": self.certified_bound, "analytic_limit": self.analytic_limit,
                "message": self.message,
                "steps": [{"index": str(r.index), "kind": r.kind, "ok": r.ok,
                           "emitted": r.emitted, "message": r.message} for r in self.steps]}


def _check_conclusion(cert, fam, final, last_step):
    target = fam.key(fam.parse(cert.target))
    kind = cert.conclusion["kind"]
    form = final.form()
    c = form.get(target, Fraction(0))
    if kind == "ExactZero":
        others_ok = all(v >= 0 for s, v in form.items() if s != target)
        if c > 0 and others_ok:
            return True, "", ""
        return False, "", f"final relation {final} does not force l({target}) = 0"
    if kind == "BoundedBy":
        bound = _form_from_json(cert.conclusion.get("bound", {}))
        if c <= 0:
            return False, "", f"final relation {final} does not bound l({target}) from above"
        for s, v in form.items():
            if s != target and v < 0 and -v / c > bound.get(s, 0):
                return False, "", f"final relation {final} is weaker than the claimed bound"
        implied = {s: -v / c for s, v in form.items() if s != target and v < 0}
        return True, _fmt_form(implied), ""
    # LimitZero
    if last_step.kind != "ArchimedeanFamily":
        return False, "", "LimitZero requires the last step to be an ArchimedeanFamily"
    if c <= 0:
        return False, "", f"final relation {final} does not bound l({target})"
    implied = {s: -v / c for s, v in form.items() if s != target and v < 0}
    return True, _fmt_form(implied), ""


def verify_certificate(cert: VanishingCertificate, arithmetic: Family | None = None,
                       budget: int | None = None) -> VerifyReport:
    """Replay every step of ``cert`` and decide whether it proves its conclusion.

    Side-condition failures produce a report with ``ok=False`` naming the
    step; malformed or inconsistent ``LinearArith`` multipliers raise
    :class:`MultiplierError`.  ``budget`` overrides the parameter budget B
    stored in ``ArchimedeanFamily`` steps.
    """
    fam = arithmetic if arithmetic is not None else make_family(cert.family, cert.params)
    if fam.tag != cert.family:
        raise CertificateError(f"certificate is for family {cert.family!r}, oracle is {fam.tag!r}")
    try:
        target = fam.canonical(cert.target)
    except GroupLenError:
        raise
    except Exception as e:
        raise CertificateError(f"target {cert.target!r} does not parse: {e}") from None
    kind = cert.conclusion["kind"]
    results, admitted = _replay(cert.steps, fam, budget)
    if len(admitted) < len(cert.steps):
        bad = results[-1]
        return VerifyReport(False, kind, target, results, message=f"step {bad.index} failed: {bad.message}")
    if not admitted:
        return VerifyReport(False, kind, target, results, message="empty certificate")
    ok, bound, msg = _check_conclusion(cert, fam, admitted[-1], cert.steps[-1])
    return VerifyReport(ok, kind, target, results, certified_bound=bound if ok else "",
                        analytic_limit=ok and kind == "LimitZero", message=msg, final=admitted[-1])


# building -----------------------------------------------------------------

class CertificateBuilder:
    """Accumulate steps over a family, computing claims with exact arithmetic.

    Methods return the index of the step they append, for use in
    :meth:`linear` multipliers.
    """

    def __init__(self, family: Family):
        self.fam = family
        self.steps: list = []
        self._admitted: list = []

    def _push(self, kind, **data):
        step = CertStep(kind, data)
        ineq = _admit(step, self.fam, self._admitted, None, len(self.steps))
        self.steps.append(step)
        self._admitted.append(ineq)
        return len(self.steps) - 1

    def s(self, x):
        return self.fam.format(x)

    def relation(self, i) -> Inequality:
        return self._admitted[i]

    def homogeneity(self, g, n):
        return self._push("Homogeneity", g=self.s(g), n=int(n))

    def conj(self, g, h):
        return self._push("ConjInvariance", g=self.s(g), h=self.s(h), claim=self.s(self.fam.conj(h, g)))

    def comm(self, a, b):
        return self._push("CommSubadd", a=self.s(a), b=self.s(b))

    def torsion(self, g, order):
        return self._push("TorsionZero", g=self.s(g), order=int(order))

    def identity(self, lhs, rhs):
        return self._push("GroupIdentity", lhs=[[self.s(x), int(e)] for x, e in lhs],
                          rhs=[[self.s(x), int(e)] for x, e in rhs])

    def linear(self, terms, lhs=None, rhs=None):
        """``terms``: iterable of ``(step_index | ("nonneg", element), coeff)``.

        Without an explicit ``lhs``/``rhs`` presentation the combination is
        split by sign (positive coefficients on the left).
        """
        jt, sources = [], []
        for ref, c in terms:
            c = Fraction(c)
            if isinstance(ref, tuple):
                sym = self.s(ref[1])
                jt.append({"nonneg": sym, "coeff": fmt(c)})
                sources.append((Inequality({}, {sym: Fraction(1)}).form(), c))
            else:
                jt.append({"step": int(ref), "coeff": fmt(c)})
                sources.append((self._admitted[ref].form(), c))
        combo = _lin_add(*sources)
        if lhs is None:
            lhs = {k: v for k, v in combo.items() if v > 0}
            rhs = {k: -v for k, v in combo.items() if v < 0}
        else:
            lhs = {self.s(k) if not isinstance(k, str) else k: Fraction(v) for k, v in lhs.items()}
            rhs = {self.s(k) if not isinstance(k, str) else k: Fraction(v) for k, v in (rhs or {}).items()}
        rel = "="
        for ref, c in terms:
            if c != 0 and (isinstance(ref, tuple) or self._admitted[ref].rel == "<="):
                rel = "<="
        return self._push("LinearArith", terms=jt, lhs=_form_to_json(lhs), rhs=_form_to_json(rhs), rel=rel)

    def archimedean(self, constructor, params, target, slope, rhs, budget=10):
        return self._push("ArchimedeanFamily", constructor=constructor, params=params,
                          target=self.s(target), slope=fmt(slope), budget=int(budget),
                          rhs=_form_to_json({self.s(k) if not isinstance(k, str) else k: Fraction(v)
                                             for k, v in rhs.items()}))

    def build(self, target, conclusion="ExactZero", **extra) -> VanishingCertificate:
        return VanishingCertificate(self.fam.tag, self.s(target), tuple(self.steps),
                                    {"kind": conclusion, **extra}, self.fam.params())


def derive_torsion_zero(g, order: int, family: Family) -> VanishingCertificate:
    """One-step ``ExactZero`` certificate for a torsion element."""
    if order < 1 or not family.is_identity(family.pow(g, order)):
        raise PreconditionError(f"({family.format(g)})^{order} = {family.format(family.pow(g, order))} is not the identity")
    b = CertificateBuilder(family)
    b.torsion(g, order)
    return b.build(g, "ExactZero")


def constructor_names():
    return sorted(_CONSTRUCTORS)


ConstructorFn = Callable[[Family, dict, int], list]
