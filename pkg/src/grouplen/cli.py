"""Command-line driver: ``grouplen <subcommand> <action> [flags]``.

Every action returns a table (written as CSV) or a document (written as JSON
with sorted keys), optionally with a JSON side report.  Nothing depends on
time or scheduling, so identical flags give byte-identical files.

``--config FILE`` reads a JSON object whose keys are flag names (plus
``"command"``, e.g. ``"dynamics dd"``), or ``{"experiments": [...]}`` with
several such objects, optionally sharing ``"defaults"``.  A config entry
expands to exactly the flags it names, so both routes share one parser.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import random
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .errors import GroupLenError, PreconditionError, UnknownFamilyError
from .rational import fmt_short

DEFAULT_SEED = 0
DEFAULT_PRECISION = 12


class UsageError(Exception):
    pass


@dataclass
class Output:
    table: tuple | None = None        # (header, rows)
    doc: object = None
    text: str | None = None
    report: object = None
    status: int = 0


def _num(x, prec):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, Fraction)):
        return fmt_short(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return format(x, f".{prec}g")
    return str(x)


def _jsonable(x, prec):
    if isinstance(x, dict):
        return {str(k): _jsonable(v, prec) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v, prec) for v in x]
    if isinstance(x, (Fraction, float)) and not isinstance(x, bool):
        return _num(x, prec)
    return x


def dumps(doc, prec=DEFAULT_PRECISION):
    return json.dumps(_jsonable(doc, prec), indent=2, sort_keys=True) + "\n"


def render(out: Output, prec):
    if out.table is not None:
        header, rows = out.table
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(x, prec) for x in r])
        return buf.getvalue()
    if out.text is not None:
        return out.text if out.text.endswith("\n") else out.text + "\n"
    return dumps(out.doc, prec)


def pmap(fn, items, jobs):
    """Ordered map, threaded when jobs > 1."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _json_arg(s, what):
    try:
        return json.loads(s)
    except json.JSONDecodeError as e:
        raise PreconditionError(f"{what}: malformed JSON at column {e.colno}: {e.msg}") from None


def _int_matrix(s):
    M = _json_arg(s, "matrix")
    if not (isinstance(M, list) and M and all(isinstance(r, list) for r in M)):
        raise PreconditionError(f"not a matrix literal: {s!r}")
    return [[int(x) for x in r] for r in M]


def _qmatrix(s):
    from .matrices import parse_matrix
    return parse_matrix(s)


def _vector(s):
    return tuple(int(t) for t in s.replace("(", "").replace(")", "").split(",") if t.strip())


# axioms -----------------------------------------------------------------

def _heis_box(radius):
    from .heisenberg import HeisenbergElement
    r = range(-radius, radius + 1)
    return [HeisenbergElement(m, n, k) for m in r for n in r for k in r]


def _word_length_spec(radius):
    from .core import LengthFunctionSpec
    from .heisenberg import FAMILY
    from .wordmetric import bfs_ball, heisenberg_generators

    gens = heisenberg_generators()
    ball = bfs_ball(gens, radius)

    def phi(g):
        k = FAMILY.key(g)
        if k not in ball:
            raise PreconditionError(f"{FAMILY.format(g)} lies outside the BFS ball of radius {radius}")
        return Fraction(ball[k])

    return LengthFunctionSpec(phi, FAMILY, name="phi_S")


def cmd_axioms(args):
    from .core import check_axioms, derive_torsion_zero, fekete_upper_bounds, make_family, verify_certificate
    from .core import SubadditiveSeries, zero_length
    from .heisenberg import FAMILY, ConeCoefficients, cone_axiom_suite, cone_length_function, parse_element

    if args.action == "check":
        if args.length == "cone":
            l = cone_length_function(ConeCoefficients(_json_arg(args.coeffs, "--coeffs")))
        elif args.length == "zero":
            l = zero_length(FAMILY)
        else:
            l = _word_length_spec(args.bfs_radius)
        if args.sample:
            samples = [(parse_element(g), parse_element(h), int(n)) for g, h, n in args.sample]
        else:
            rng = random.Random(args.seed)
            box = _heis_box(args.radius)
            exps = [int(e) for e in args.exponents.split(",")]
            samples = [(g, rng.choice(box), n) for g in box for n in exps]
        rep = check_axioms(l, samples)
        return Output(doc={"length": l.name, "samples": len(samples), **rep.as_dict()},
                      status=0 if rep.passed else 1)
    if args.action == "cone":
        rep = cone_axiom_suite(ConeCoefficients(_json_arg(args.coeffs, "--coeffs")), radius=args.radius)
        return Output(doc=rep.as_dict(), status=0 if rep.passed else 1)
    if args.action == "fekete":
        B = args.budget if args.budget is not None else 10
        oracle = None
        if args.sequence == "linear":
            series = SubadditiveSeries(lambda n: n, B)
        elif args.sequence == "sqrt":
            def ceil4sqrt(n):
                s = math.isqrt(16 * n)
                return s if s * s == 16 * n else s + 1
            series = SubadditiveSeries(ceil4sqrt, B)
        else:
            from .matrices.norms import _as_float, log_power_norm, log_spectral_radius
            M = _qmatrix(args.M)
            A = _as_float(M)
            series = SubadditiveSeries(lambda n: log_power_norm(A, n), B, rtol=1e-9, nonnegative=False)
            oracle = log_spectral_radius(M)
        res = fekete_upper_bounds(series)
        rows = [(n, b, (float(b) - oracle) if oracle is not None else None, "doubling") for n, b in res.rows]
        return Output(table=(["n", "upper_bound", "error", "method"], rows),
                      report={"estimate": res.estimate, "one_sided": res.one_sided, "oracle": oracle})
    if args.action == "torsion":
        fam = make_family(args.family, _json_arg(args.params, "--params") if args.params else None)
        cert = derive_torsion_zero(fam.parse(args.elem), args.order, fam)
        rep = verify_certificate(cert, fam)
        return Output(doc=cert.to_dict(), report=rep.as_dict(), status=0 if rep.ok else 1)
    raise UsageError(f"unknown axioms action {args.action!r}")


# heisenberg ----------------------------------------------------------------

def cmd_heisenberg(args):
    from . import heisenberg as H
    from .core import verify_certificate

    if args.action == "cone":
        coeffs = H.ConeCoefficients(_json_arg(args.coeffs, "--coeffs"))
        return Output(text=fmt_short(H.cone_length(coeffs, H.parse_element(args.elem))))
    if args.action == "mul":
        return Output(text=str(H.h_mul(H.parse_element(args.x), H.parse_element(args.y))))
    if args.action == "pow":
        return Output(text=str(H.h_pow(H.parse_element(args.x), args.e)))
    if args.action == "commutator":
        return Output(text=str(H.commutator_power(args.n, args.m)))
    if args.action == "witness":
        g = H.conjugator_witness(args.m, args.n, args.k)
        return Output(doc={"conjugator": str(g), "element": str(H.HeisenbergElement(args.m, args.n, 0)),
                           "conjugate": str(H.HeisenbergElement(args.m, args.n, args.k))})
    if args.action == "center-cert":
        cert = H.center_vanishing_certificate(args.budget if args.budget is not None else 10)
        rep = verify_certificate(cert)
        return Output(doc=cert.to_dict(), report=rep.as_dict(), status=0 if rep.ok else 1)
    if args.action == "suite":
        rng = random.Random(args.seed)
        cones = [H.random_cone(rng) for _ in range(args.count)]

        def one(c):
            rep = H.cone_axiom_suite(c, radius=args.radius)
            return (len(c), sum(rep.tested.values()), len(rep.violations), H.cone_length(c, H.C))

        rows = [(i, *r) for i, r in enumerate(pmap(one, cones, args.jobs))]
        bad = any(r[3] or r[4] for r in rows)
        return Output(table=(["index", "support", "tested", "violations", "l_c"], rows),
                      report={"cones": [c.to_json() for c in cones]}, status=1 if bad else 0)
    raise UsageError(f"unknown heisenberg action {args.action!r}")


# polycyclic -------------------------------------------------------------------

def _certs_output(certs, jobs, budget=None):
    from .core import verify_certificate
    reps = pmap(lambda c: verify_certificate(c, budget=budget), certs, jobs)
    doc = certs[0].to_dict() if len(certs) == 1 else [c.to_dict() for c in certs]
    return Output(doc=doc, report=[r.as_dict() for r in reps], status=0 if all(r.ok for r in reps) else 1)


def cmd_polycyclic(args):
    from . import polycyclic as P

    if args.action == "classify":
        return Output(text=P.trace_classify(_int_matrix(args.A)).value)
    if args.action in ("mul", "pow", "conj"):
        G = P.AbcGroup(_int_matrix(args.A))
        x = G.parse(args.x)
        if args.action == "pow":
            return Output(text=str(P.abc_pow(G, x, args.e)))
        y = G.parse(args.y)
        f = P.abc_mul if args.action == "mul" else P.abc_conj
        return Output(text=str(f(G, x, y)))
    if args.action == "certify":
        A = _int_matrix(args.A)
        kind = args.kind
        budget = args.budget if args.budget is not None else 10
        if kind == "auto":
            if len(A) == 2 and P.idet(A) == -1 and abs(A[0][0] + A[1][1]) > 2:
                kind = "anosov"
            elif len(A) == 2:
                cls = P.trace_classify(A)
                if cls is P.TraceClass.ANOSOV:
                    kind = "anosov"
                elif cls is P.TraceClass.PARABOLIC:
                    kind = "parabolic"
                else:
                    raise PreconditionError(f"{cls.value} action: no vanishing certificate applies")
            else:
                kind = "dominant"
        if kind == "anosov":
            certs = P.anosov_certificate(A)
        elif kind == "parabolic":
            certs = [P.parabolic_certificate(A, budget=budget)]
        elif kind == "dominant":
            certs = P.dominant_coefficient_certificate(A, k_max=args.k_max)
            if certs is None:
                raise PreconditionError(f"no power A^k with k <= {args.k_max} has a dominant coefficient")
        else:
            if not args.v:
                raise UsageError("--kind fiber needs --v")
            certs = [P.fiber_vanishing_certificate(A, _vector(args.v), k_max=args.k_max)]
        return _certs_output(certs, args.jobs)
    if args.action == "bs":
        return _certs_output([P.baumslag_solitar_certificate(args.q)], 1)
    if args.action == "image":
        from .heisenberg import parse_element
        return Output(text=str(P.heisenberg_to_polycyclic(parse_element(args.elem))))
    raise UsageError(f"unknown polycyclic action {args.action!r}")


# matrix ------------------------------------------------------------------------

def _complex(s):
    return complex(s.replace(" ", "").replace("i", "j"))


def cmd_matrix(args):
    from . import matrices as Mx

    B = args.budget if args.budget is not None else 12
    if args.action == "jc":
        M = _qmatrix(args.M)
        doc = Mx.jordan_chevalley(M).as_dict()
        try:
            doc["ehu"] = Mx.ehu_decomposition(M).as_dict()
        except PreconditionError as e:
            doc["ehu"] = {"unavailable": str(e)}
        return Output(doc=doc)
    if args.action == "classify":
        M = _qmatrix(args.M)
        return Output(doc={"class": Mx.sl2_classify(M).value, "translation_length": Mx.translation_length(M)})
    if args.action == "sl2":
        M = _qmatrix(args.M)
        exact = Mx.translation_length(M)
        res = Mx.orbit_translation_estimate(M, z0=_complex(args.basepoint), doubling_budget=B)
        rows = [(n, b, b - exact, "orbit-doubling") for n, b in res.rows]
        return Output(table=(["n", "upper_bound", "error", "method"], rows),
                      report={"trace_formula": exact, "estimate": res.estimate, "one_sided": True})
    if args.action == "sl2-random":
        from .matrices.sl2 import random_hyperbolic
        rng = random.Random(args.seed)
        mats = [random_hyperbolic(rng, max_trace=args.max_trace, max_entry=args.max_entry) for _ in range(args.count)]

        def one(M):
            est = Mx.orbit_translation_estimate(M, doubling_budget=B).estimate
            exact = Mx.translation_length(M)
            return (json.dumps([list(r) for r in M.int_rows()], separators=(",", ":")), M.trace(), est, exact, est - exact)

        rows = [(i, *r) for i, r in enumerate(pmap(one, mats, args.jobs))]
        return Output(table=(["index", "matrix", "trace", "estimate", "trace_formula", "error"], rows))
    if args.action == "norm":
        M = _qmatrix(args.M)
        res = Mx.stable_norm_bounds(M, doubling_budget=B)
        oracle = Mx.log_spectral_radius(M)
        rows = [(n, b, b - oracle, "doubling") for n, b in res.rows]
        return Output(table=(["n", "upper_bound", "error", "method"], rows),
                      report={"log_spectral_radius": oracle, "matrix_length": Mx.matrix_length(M, B)})
    if args.action == "unipotent":
        if args.M:
            U = _qmatrix(args.M)
            P = Mx.unipotent_square_conjugator(U)
            return Output(doc={"U": U.to_json(), "P": P.to_json(), "jordan_type": list(Mx.jordan_type(U - U.identity(U.n))),
                               "verified": P @ U @ P.inverse() == U @ U})
        from .matrices.unipotent import random_unitriangular
        rng = random.Random(args.seed)
        Us = [random_unitriangular(rng, n=args.size) for _ in range(args.count)]

        def one(U):
            P = Mx.unipotent_square_conjugator(U)
            return (list(Mx.jordan_type(U - U.identity(U.n))), P @ U @ P.inverse() == U @ U)

        rows = [(i, "+".join(map(str, t)), ok) for i, (t, ok) in enumerate(pmap(one, Us, args.jobs))]
        return Output(table=(["index", "jordan_type", "verified"], rows),
                      status=0 if all(r[2] for r in rows) else 1)
    if args.action == "steinberg":
        sizes = [int(x) for x in args.n.split(",")]
        reps = pmap(lambda n: Mx.steinberg_relation_check(n, args.trials, args.max_degree, args.seed), sizes, args.jobs)
        return Output(doc=[r.as_dict() for r in reps], status=0 if all(r.ok for r in reps) else 1)
    if args.action == "elementary":
        rep = Mx.elementary_heisenberg_report(int(args.n))
        return Output(doc=rep.as_dict(), status=0 if rep.ok else 1)
    raise UsageError(f"unknown matrix action {args.action!r}")


# word metrics --------------------------------------------------------------------

def _word_group(args):
    from . import wordmetric as W
    if args.group == "heisenberg":
        from .heisenberg import parse_element
        return W.heisenberg_generators(args.with_center), parse_element, W.heisenberg_abelianization
    from .polycyclic import AbcGroup
    G = AbcGroup(_int_matrix(args.A))
    return W.abc_generators(G), G.parse, None


def cmd_wordmetric(args):
    from . import wordmetric as W

    if args.action == "bfs":
        gens, parse, _ = _word_group(args)
        L = W.bfs_word_length(gens, parse(args.elem), args.radius)
        return Output(doc={"element": args.elem, "length": L, "radius_max": args.radius})
    if args.action == "ball":
        gens, _, _ = _word_group(args)
        ball = W.bfs_ball(gens, args.radius)
        sphere = [0] * (args.radius + 1)
        for r in ball.values():
            sphere[r] += 1
        rows, tot = [], 0
        for r, s in enumerate(sphere):
            tot += s
            rows.append((r, s, tot))
        return Output(table=(["radius", "sphere", "ball"], rows))
    if args.action == "stable":
        gens, parse, ab = _word_group(args)
        g = parse(args.elem)
        fam = gens.family
        witness = None
        if args.group == "heisenberg" and (g.m, g.n, g.k) == (0, 0, 1) and not args.with_center:
            witness = lambda N: W.heisenberg_center_power_witness(N, gens)
        elif args.group == "polycyclic" and g.p == 0 and sorted(map(abs, g.v)) == [0] * (len(g.v) - 1) + [1]:
            from .polycyclic import TraceClass, trace_classify
            if len(g.v) == 2 and fam.det == 1 and trace_classify(fam.A) is TraceClass.ANOSOV:
                witness = lambda N: W.anosov_distortion_witness(fam, g.v, N, gens=gens).word
        B = args.budget if args.budget is not None else 10
        res = W.stable_length_bounds(gens, g, B, witness_gen=witness, bfs_radius=args.radius, abelianize=ab)
        rows = [(r.n, r.length_bound, r.upper_bound, r.method) for r in res.rows]
        return Output(table=(["n", "length_bound", "upper_bound", "method"], rows),
                      report={"lower_bound": res.lower_bound, "lower_method": res.lower_method,
                              "truncated": res.truncated})
    if args.action == "distortion":
        from .polycyclic import AbcGroup
        G = AbcGroup(_int_matrix(args.A))
        v = _vector(args.v)
        ns = [int(x) for x in args.n.split(",")] if args.n else [1 << j for j in range(args.max_exp + 1)]

        def one(n):
            w = W.anosov_distortion_witness(G, v, n)
            return (n, w.length, w.length / math.log2(n) if n > 1 else None, w.constant)

        rows = pmap(one, ns, args.jobs)
        return Output(table=(["n", "length", "length_over_log2n", "constant"], rows))
    raise UsageError(f"unknown wordmetric action {args.action!r}")


# dynamics -------------------------------------------------------------------------

def _lift(s):
    from .dynamics.circle import CircleLiftPL
    if s.lstrip().startswith("{"):
        return CircleLiftPL.from_json(_json_arg(s, "lift"))
    if s.endswith(".json"):
        with open(s) as fh:
            return CircleLiftPL.from_json(_json_arg(fh.read(), s))
    return CircleLiftPL.rotation(Fraction(s))


def cmd_dynamics(args):
    from .dynamics import circle as Ci
    from .dynamics import monomial as Mo
    from .dynamics import ratmap as Ra

    if args.action == "dd":
        f = Ra.load_map(args.map)
        seq = Ra.dynamical_degree_estimate(f, args.n)
        removed = ["" if g.degree() == 0 else str(g) for g in seq.removed]
        rows = [(n, d, removed[n - 1]) for n, d in seq.as_rows()]
        return Output(table=(["n", "degree", "removed_gcd"], rows),
                      report={"map": str(f), "schedule": [list(r) for r in seq.schedule],
                              "lambda_upper_bound": seq.lambda_bound, "submultiplicativity_checks": seq.checks,
                              "truncated": seq.truncated})
    if args.action == "compose":
        c = Ra.ratmap_compose(Ra.load_map(args.u), Ra.load_map(args.v))
        return Output(doc={"map": str(c.map), "removed_gcd": str(c.removed), "degree": c.map.degree,
                           "raw_degree": c.raw_degree})
    if args.action == "rotation":
        f = _lift(args.lift)
        br = Ci.rotation_number(f, args.N, precision=args.bits)
        return Output(doc=br.as_dict())
    if args.action == "rotation-check":
        f = _lift(args.lift)
        doc = {"homogeneity": Ci.rotation_homogeneity_check(f, args.k, args.N).as_dict()}
        if args.h:
            doc["conjugation"] = Ci.rotation_conjugation_check(f, _lift(args.h), args.N).as_dict()
        ok = doc["homogeneity"]["overlap"] and doc.get("conjugation", {"overlap": True})["overlap"]
        return Output(doc=doc, status=0 if ok else 1)
    if args.action == "monomial":
        E = _int_matrix(args.E)
        return Output(doc=Mo.monomial_dd(E).as_dict())
    if args.action == "cremona":
        w = Mo.cremona_heisenberg_witness(Fraction(args.alpha))
        return Output(doc=w.as_dict(), status=0 if w.ok else 1)
    raise UsageError(f"unknown dynamics action {args.action!r}")


# certify ------------------------------------------------------------------------

def cmd_certify(args):
    from .core import VanishingCertificate, verify_certificate
    from .core.families import known_families

    with open(args.inp) as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        from .errors import CertificateError
        raise CertificateError(f"{args.inp}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    docs = data if isinstance(data, list) else [data]
    certs = []
    for d in docs:
        fam = d.get("family") if isinstance(d, dict) else None
        if fam is not None and fam not in known_families():
            raise UnknownFamilyError(f"unknown family tag {fam!r}; known: {', '.join(sorted(known_families()))}")
        certs.append(VanishingCertificate.from_dict(d))
    reps = pmap(lambda c: verify_certificate(c, budget=args.budget), certs, args.jobs)
    text = "\n".join(r.trace() for r in reps)
    return Output(text=text, report=[r.as_dict() for r in reps] if len(reps) > 1 else reps[0].as_dict(),
                  status=0 if all(r.ok for r in reps) else 1)


# parser -----------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def __init__(self, *a, **kw):
        super().__init__(*a, **kw)
        # so that "--alpha -3/5" reads -3/5 as a value, not an option
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common")
    g.add_argument("--out", help="write the primary output here instead of stdout")
    g.add_argument("--report", help="write the JSON side report here")
    g.add_argument("--jobs", type=int, default=1, help="worker threads for batch actions")
    g.add_argument("--budget", type=int, help="doubling / certificate budget B")
    g.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="significant digits for floats")
    g.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for sample-based checks")
    g.add_argument("--config", help="JSON file with the same keys as the flags")
    return p


def build_parser():
    common = _common()
    top = _Parser(prog="grouplen", description="Length functions on groups: arithmetic, certificates, estimators.")
    top.add_argument("--version", action="version", version=f"grouplen {__version__}")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def action(parent, name, help_):
        return parent.add_parser(name, help=help_, parents=[common])

    # axioms
    ax = sub.add_parser("axioms", help="axiom checks, Fekete schedules, torsion certificates").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = action(ax, "check", "sample-based axiom check on the Heisenberg group")
    p.add_argument("--length", choices=["cone", "zero", "word"], default="cone")
    p.add_argument("--coeffs", default='{"1,0": "1"}')
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--exponents", default="-2,-1,0,2,3")
    p.add_argument("--bfs-radius", type=int, default=10)
    p.add_argument("--sample", nargs=3, action="append", metavar=("G", "H", "N"))
    p = action(ax, "cone", "exhaustive axiom suite for one cone length")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--radius", type=int, default=8)
    p = action(ax, "fekete", "doubling schedule of a built-in subadditive sequence")
    p.add_argument("--sequence", choices=["linear", "sqrt", "matrix-norm"], required=True)
    p.add_argument("--M", default="[[2,1],[1,1]]")
    p = action(ax, "torsion", "one-step torsion certificate")
    p.add_argument("--family", required=True)
    p.add_argument("--params")
    p.add_argument("--elem", required=True)
    p.add_argument("--order", type=int, required=True)

    # heisenberg
    he = sub.add_parser("heisenberg", help="integer Heisenberg group").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = action(he, "cone", "evaluate a cone length")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--elem", required=True)
    p = action(he, "mul", "product of two elements")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p = action(he, "pow", "power of an element")
    p.add_argument("--x", required=True)
    p.add_argument("--e", type=int, required=True)
    p = action(he, "commutator", "[a^n, b^m]")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p = action(he, "witness", "conjugator taking a^m b^n to a^m b^n c^k")
    for k in ("--m", "--n", "--k"):
        p.add_argument(k, type=int, required=True)
    action(he, "center-cert", "vanishing certificate for c")
    p = action(he, "suite", "axiom suite over random cone lengths")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--radius", type=int, default=8)

    # polycyclic
    po = sub.add_parser("polycyclic", help="abelian-by-cyclic groups Z^n x|_A Z").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = action(po, "classify", "trace class of A in SL_2(Z)")
    p.add_argument("--A", required=True)
    for name in ("mul", "conj"):
        p = action(po, name, f"{name} of two elements")
        p.add_argument("--A", required=True)
        p.add_argument("--x", required=True)
        p.add_argument("--y", required=True)
    p = action(po, "pow", "power of an element")
    p.add_argument("--A", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--e", type=int, required=True)
    p = action(po, "certify", "emit and verify fiber vanishing certificates")
    p.add_argument("--A", required=True)
    p.add_argument("--kind", choices=["auto", "anosov", "parabolic", "dominant", "fiber"], default="auto")
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--v")
    p = action(po, "bs", "Baumslag-Solitar BS(1,q) certificate")
    p.add_argument("--q", type=int, required=True)
    p = action(po, "image", "image of a Heisenberg element in G_[[1,1],[0,1]]")
    p.add_argument("--elem", required=True)

    # matrix
    ma = sub.add_parser("matrix", help="matrix groups").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = action(ma, "jc", "Jordan-Chevalley decomposition")
    p.add_argument("--M", required=True)
    p = action(ma, "classify", "SL_2 class and translation length")
    p.add_argument("--M", required=True)
    p = action(ma, "sl2", "orbit translation-length schedule")
    p.add_argument("--M", required=True)
    p.add_argument("--basepoint", default="1j")
    p = action(ma, "sl2-random", "random hyperbolic matrices against the trace formula")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--max-trace", type=int, default=10)
    p.add_argument("--max-entry", type=int, default=6)
    p = action(ma, "norm", "stable norm schedule")
    p.add_argument("--M", required=True)
    p = action(ma, "unipotent", "conjugator P with P U P^-1 = U^2")
    p.add_argument("--M")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--size", type=int, default=5)
    p = action(ma, "steinberg", "Steinberg relation check")
    p.add_argument("--n", default="3,4,5")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-degree", type=int, default=3)
    p = action(ma, "elementary", "Heisenberg triple and conjugators in E_n")
    p.add_argument("--n", default="5")

    # word metrics
    wm = sub.add_parser("wordmetric", help="word metrics and stable word length").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    for name, h in (("bfs", "exact word length by BFS"), ("ball", "sphere and ball sizes"),
                    ("stable", "stable-length schedule")):
        p = action(wm, name, h)
        p.add_argument("--group", choices=["heisenberg", "polycyclic"], default="heisenberg")
        p.add_argument("--A", default="[[2,1],[1,1]]")
        p.add_argument("--with-center", action="store_true")
        p.add_argument("--radius", type=int, default=8)
        if name != "ball":
            p.add_argument("--elem", required=True)
    p = action(wm, "distortion", "short words for (n v, 0) in an Anosov G_A")
    p.add_argument("--A", default="[[2,1],[1,1]]")
    p.add_argument("--v", default="1,0")
    p.add_argument("--n")
    p.add_argument("--max-exp", type=int, default=17)

    # dynamics
    dy = sub.add_parser("dynamics", help="rotation numbers and dynamical degrees").add_subparsers(
        dest="action", required=True, parser_class=_Parser)
    p = action(dy, "dd", "degree sequence of a rational map of P^2")
    p.add_argument("--map", required=True, help="builtin name (sigma, henon, identity), JSON, or a JSON file")
    p.add_argument("--n", type=int, default=8)
    p = action(dy, "compose", "u o v with the common factor removed")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p = action(dy, "rotation", "rotation-number bracket")
    p.add_argument("--lift", required=True, help="rational rotation p/q, lift JSON, or a JSON file")
    p.add_argument("--N", type=int, default=10 ** 6)
    p.add_argument("--bits", type=int, default=160)
    p = action(dy, "rotation-check", "homogeneity and conjugation invariance as bracket overlaps")
    p.add_argument("--lift", required=True)
    p.add_argument("--h")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--N", type=int, default=10 ** 6)
    p = action(dy, "monomial", "dynamical degree of a monomial map")
    p.add_argument("--E", required=True)
    p = action(dy, "cremona", "Heisenberg witness among monomial maps")
    p.add_argument("--alpha", required=True)

    # certify
    p = sub.add_parser("certify", help="verify a certificate file", parents=[common])
    p.add_argument("--in", dest="inp", required=True)
    return top


HANDLERS = {"axioms": cmd_axioms, "heisenberg": cmd_heisenberg, "polycyclic": cmd_polycyclic,
            "matrix": cmd_matrix, "wordmetric": cmd_wordmetric, "dynamics": cmd_dynamics,
            "certify": cmd_certify}


# config files -------------------------------------------------------------------

def _config_tokens(entry: dict):
    entry = dict(entry)
    cmd = entry.pop("command", None)
    toks = cmd.split() if isinstance(cmd, str) else list(cmd or [])
    for k, v in entry.items():
        flag = "--" + k.replace("_", "-")
        if v is None or v is False:
            continue
        if v is True:
            toks.append(flag)
        elif isinstance(v, list) and k == "sample":
            for s in v:
                toks += [flag] + [str(x) for x in s]
        elif isinstance(v, (dict, list)):
            toks += [flag, json.dumps(v, sort_keys=True)]
        else:
            toks += [flag, str(v)]
    return toks


def expand_config(argv):
    """Split argv into one argv per experiment, expanding ``--config``."""
    argv = list(argv)
    path = None
    for i, a in enumerate(argv):
        if a == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config needs a path")
            path = argv[i + 1]
            del argv[i:i + 2]
            break
        if a.startswith("--config="):
            path = a.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return [argv]
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    if isinstance(data, dict) and "experiments" in data:
        defaults, entries = data.get("defaults", {}), data["experiments"]
    else:
        defaults, entries = {}, data if isinstance(data, list) else [data]
    pos = []
    while argv and not argv[0].startswith("-"):
        pos.append(argv.pop(0))
    out = []
    for e in entries:
        toks = _config_tokens({**defaults, **e})
        if pos:
            head = [t for t in toks if not t.startswith("-")][:len(pos)]
            if head and head != pos:
                raise UsageError(f"config command {' '.join(head)!r} disagrees with {' '.join(pos)!r}")
            toks = toks[len(head):]
        out.append(pos + toks + argv)
    return out


def _error_doc(e, command):
    doc = {"error": type(e).__name__, "message": str(e), "command": command}
    for attr in ("step", "n", "m", "reached", "j"):
        v = getattr(e, attr, None)
        if v is not None and not callable(v):
            doc[attr] = v if isinstance(v, (int, str)) else str(v)
    return doc


def execute(argv):
    """Run one experiment; returns (status, primary text or None, stderr text)."""
    parser = build_parser()
    args = parser.parse_args(argv)
    command = f"{args.command} {getattr(args, 'action', '')}".strip()
    try:
        out = HANDLERS[args.command](args)
    except (GroupLenError, ValueError, KeyError, ZeroDivisionError, OSError, TypeError) as e:
        return 1, None, dumps(_error_doc(e, command))
    text = render(out, args.precision)
    if out.report is not None and args.report:
        with open(args.report, "w") as fh:
            fh.write(dumps(out.report, args.precision))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        return out.status, None, ""
    return out.status, text, ""


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        runs = expand_config(argv)
        jobs = 1
        for r in runs:
            for i, a in enumerate(r):
                if a == "--jobs" and i + 1 < len(r):
                    jobs = max(jobs, int(r[i + 1]))
        results = pmap(execute, runs, jobs) if len(runs) > 1 else [execute(runs[0])]
    except UsageError as e:
        sys.stderr.write(dumps({"error": "UsageError", "message": str(e)}))
        return 2
    except SystemExit as e:             # --help / --version
        return int(e.code or 0)
    status = 0
    for st, text, err in results:
        if text:
            sys.stdout.write(text)
        if err:
            sys.stderr.write(err)
        status = max(status, st)
    return status


if __name__ == "__main__":
    sys.exit(main())
