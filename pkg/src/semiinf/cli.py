"""
Command-line front end: spec-file ingestion, command dispatch and JSON
reports.  Every rational is written as a "num/den" string.
"""

import argparse
import json
import random
import sys
import traceback
from fractions import Fraction
from importlib import resources

from .deformation import (DgLieAlgebra, is_unit_normalized, mc_residual, normalize_unit,
                          solve_mc, verify_conjugation, verify_flatness_identities)
from .dgbv import (DgbvAlgebra, check_dgbv_axioms, check_lie_axioms, check_manin,
                   check_module_axioms, cohomology, dgbv_module, manin_cohomology_dims)
from .errors import ArgumentError, ParseError, SemiInfError, ValidationError
from .frobenius import cubic_coefficients, frobenius
from .kahler_ops import build_model_A, build_model_B, dgbv_pair
from .models import BUILTINS, builtin
from .report import Report, jsonable, record
from .super_core import GradedBasis, LinearOp, StructureConstants, fmt, mono_str, scalar
from .vhs import period_map, unit_equation_defect

COMMANDS = ("verify", "cohomology", "deform", "frobenius", "mirror", "selftest")
GEOMETRIC = {"torus-n1": 1, "torus-n2": 2}


# ------------------------------------------------------------ spec files

def _get(doc, key, where, kind=None):
    if key not in doc:
        raise ParseError("missing field %r" % key, where)
    v = doc[key]
    if kind is not None and not isinstance(v, kind):
        raise ParseError("field %r has the wrong type" % key, "%s.%s" % (where, key))
    return v


def _rational(x, where):
    try:
        return scalar(x)
    except (ParseError, ArgumentError):
        raise ParseError("bad rational %r" % (x,), where) from None


def _symbol(basis, s, where):
    try:
        return basis.index(s)
    except (SemiInfError, TypeError):
        raise ParseError("unknown basis symbol %r" % (s,), where) from None


def _operator(basis, entries, shift, where):
    cols = {}
    for k, e in enumerate(entries):
        loc = "%s[%d]" % (where, k)
        if not isinstance(e, dict):
            raise ParseError("operator entry must be an object", loc)
        j = _symbol(basis, _get(e, "from", loc), loc + ".from")
        i = _symbol(basis, _get(e, "to", loc), loc + ".to")
        c = _rational(_get(e, "coeff", loc), loc + ".coeff")
        col = cols.setdefault(j, {})
        col[i] = col.get(i, 0) + c
    return LinearOp(basis, cols, shift)


def algebra_from_dict(doc, where="$"):
    """Build a DgbvAlgebra from a parsed spec document (no axiom checks)."""
    if not isinstance(doc, dict):
        raise ParseError("spec document must be a JSON object", where)
    name = _get(doc, "name", where, str)
    n = _get(doc, "n", where, int)
    entries = []
    for k, b in enumerate(_get(doc, "basis", where, list)):
        loc = "%s.basis[%d]" % (where, k)
        if not isinstance(b, dict):
            raise ParseError("basis entry must be an object", loc)
        entries.append((_get(b, "symbol", loc, str),
                        (_get(b, "p", loc, int), _get(b, "q", loc, int))))
    try:
        basis = GradedBasis(entries)
    except SemiInfError as exc:
        raise ParseError(str(exc), where + ".basis") from None
    if "dim" in doc and doc["dim"] != len(basis):
        raise ParseError("declared dim %r but %d basis symbols" % (doc["dim"], len(basis)),
                         where + ".dim")
    unit = _symbol(basis, _get(doc, "unit", where, str), where + ".unit")
    table = {}
    for k, t in enumerate(_get(doc, "product", where, list)):
        loc = "%s.product[%d]" % (where, k)
        if not isinstance(t, dict):
            raise ParseError("product entry must be an object", loc)
        a = _symbol(basis, _get(t, "a", loc), loc + ".a")
        b = _symbol(basis, _get(t, "b", loc), loc + ".b")
        c = _symbol(basis, _get(t, "c", loc), loc + ".c")
        v = _rational(_get(t, "coeff", loc), loc + ".coeff")
        out = table.setdefault((a, b), {})
        out[c] = out.get(c, 0) + v
    d = _operator(basis, _get(doc, "d", where, list), (0, 1), where + ".d")
    delta = _operator(basis, _get(doc, "delta", where, list), (-1, 0), where + ".delta")
    integral = None
    if doc.get("integral") is not None:
        integral = [Fraction(0)] * len(basis)
        for k, e in enumerate(doc["integral"]):
            loc = "%s.integral[%d]" % (where, k)
            i = _symbol(basis, _get(e, "symbol", loc), loc + ".symbol")
            integral[i] = _rational(_get(e, "coeff", loc), loc + ".coeff")
    A = DgbvAlgebra(name, basis, n, unit, StructureConstants(basis, table), d, delta, integral)
    if doc.get("calibration") is not None:
        A.eta = A.e(_symbol(basis, doc["calibration"], where + ".calibration"))
    return A


def validate_algebra(A):
    rep = check_dgbv_axioms(A)
    if not rep.passed:
        bad = ", ".join("%s (%s)" % (c.name, jsonable(c.witness)) for c in rep.failures())
        raise ValidationError("algebra %r violates: %s" % (A.name, bad), rep)
    return rep


def parse_spec(path):
    """Read, build and validate a spec file; returns the DgbvAlgebra."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "%s:%d:%d" % (path, exc.lineno, exc.colno)) from None
    except OSError as exc:
        raise ParseError("cannot read spec file: %s" % exc.strerror, path) from None
    A = algebra_from_dict(doc, path)
    validate_algebra(A)
    return A


def algebra_to_dict(A):
    b = A.basis
    doc = {"name": A.name, "n": A.n, "dim": len(b),
           "basis": [{"symbol": s, "p": p, "q": q} for s, (p, q) in zip(b.names, b.bidegrees)],
           "unit": b.names[A.unit]}
    doc["product"] = [{"a": b.names[i], "b": b.names[j], "c": b.names[k], "coeff": fmt(c)}
                      for (i, j), out in sorted(A.product.table.items())
                      for k, c in sorted(out.items())]
    for key, op in (("d", A.d), ("delta", A.delta)):
        doc[key] = [{"from": b.names[j], "to": b.names[i], "coeff": fmt(c)}
                    for j, col in sorted(op.cols.items()) for i, c in sorted(col.items())]
    if A.integral is not None:
        doc["integral"] = [{"symbol": b.names[i], "coeff": fmt(c)}
                           for i, c in enumerate(A.integral) if c]
    if A.eta is not None:
        keys = [i for (i, _, _), c in A.eta.terms.items() if c]
        if len(keys) == 1:
            doc["calibration"] = b.names[keys[0]]
    return doc


def dump_spec(A, path=None):
    text = json.dumps(algebra_to_dict(A), indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def bundled_spec(name):
    """Path-like handle of a golden spec file shipped with the package."""
    return resources.files("semiinf") / "data" / ("%s.json" % name)


def read_metric(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "%s:%d:%d" % (path, exc.lineno, exc.colno)) from None
    except OSError as exc:
        raise ParseError("cannot read metric file: %s" % exc.strerror, path) from None
    rows = doc.get("metric") if isinstance(doc, dict) else doc
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("metric must be a list of rows", path)
    if isinstance(doc, dict) and "n" in doc and doc["n"] != len(rows):
        raise ParseError("declared n %r but %d metric rows" % (doc["n"], len(rows)), path + ".n")
    return [[_rational(x, "%s.metric[%d][%d]" % (path, i, j)) for j, x in enumerate(r)]
            for i, r in enumerate(rows)]


def read_filtration(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "%s:%d:%d" % (path, exc.lineno, exc.colno)) from None
    except OSError as exc:
        raise ParseError("cannot read filtration file: %s" % exc.strerror, path) from None
    if not isinstance(doc, dict):
        raise ParseError("filtration must map r to lists of vectors", path)
    return doc


# ------------------------------------------------------------ payload helpers

def series_dict(s):
    return {mono_str(s.params, m): fmt(c) for m, c in sorted(s.terms.items()) if c}


def matrix_strs(M):
    return [[fmt(x) for x in row] for row in M]


def _checks(rep):
    return [c.to_dict() for c in rep.checks]


def _load_algebra(args):
    if args.spec:
        return parse_spec(args.spec)
    if args.model:
        A = builtin(args.model)
        validate_algebra(A)
        return A
    raise ArgumentError("give a spec file or --model")


# ------------------------------------------------------------ commands

def cmd_verify(args):
    A = _load_algebra(args)
    out = Report("verify %s" % A.name)
    out.extend(check_dgbv_axioms(A), "dgbv: ")
    out.extend(check_lie_axioms(A), "odd Lie: ")
    out.extend(check_module_axioms(dgbv_module(A)), "module: ")
    out.extend(check_module_axioms(dgbv_module(A, hbar=True)), "hbar-module: ")
    man = check_manin(A)
    return out, {"algebra": A.name, "dim": A.dim,
                 "manin": {"holds": man.verdict, "dims": list(man.dims())}}


def cmd_cohomology(args):
    A = _load_algebra(args)
    data = cohomology(A.d)
    out = Report("cohomology %s" % A.name)
    reps = []
    for v in data.reps:
        reps.append({A.basis.names[i]: fmt(c) for i, c in enumerate(v) if c})
    hd, hD, hk = manin_cohomology_dims(A)
    man = check_manin(A)
    out.add("homotopy data consistent", data.dim == len(reps))
    return out, {"algebra": A.name, "dim": A.dim, "H(d)": hd, "H(delta)": hD,
                 "ker d ∩ ker delta / im d delta": hk, "representatives": reps,
                 "manin": {"holds": man.verdict, "dims": list(man.dims())}}


def cmd_deform(args):
    A = _load_algebra(args)
    N = args.order
    g = DgLieAlgebra.from_dgbv(A)
    sol = solve_mc(g, N)
    out = Report("deform %s, N = %d" % (A.name, N))
    payload = {"algebra": A.name, "order": N, "parameters": list(sol.params.names),
               "obstructions": [{"order": k, "class": o.to_str()} for k, o in sol.obstructions]}
    c = out.start("unobstructed")
    record(c, sol.unobstructed, sol.obstructions[0][0] if sol.obstructions else None)
    if sol.unobstructed:
        out.add("MC equation mod m^{N+1}", not mc_residual(g, sol.gamma))
        if not is_unit_normalized(sol):
            sol = normalize_unit(sol)
        out.add("unit normalized", is_unit_normalized(sol))
        M = dgbv_module(A)
        out.extend(verify_conjugation(M, sol.gamma), "")
        out.extend(verify_flatness_identities(M, sol.gamma), "")
    payload["gamma"] = sol.gamma.to_str()
    return out, payload


def _pair_for(args):
    name = args.model
    route = args.route
    if args.spec:
        if route in ("A", "B"):
            raise ArgumentError("geometric routes take --model torus-nK")
        A = parse_spec(args.spec)
        return dgbv_pair(A), "dgbv", A.name
    if name is None:
        raise ArgumentError("give a spec file or --model")
    if route == "auto":
        route = "A" if name in GEOMETRIC else "dgbv"
    if route in ("A", "B"):
        if name not in GEOMETRIC:
            raise ArgumentError("geometric routes exist for %s" % sorted(GEOMETRIC))
        n = GEOMETRIC[name]
        metric = read_metric(args.metric) if args.metric else \
            [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        build = build_model_A if route == "A" else build_model_B
        return build(n, metric), route + "-model", name
    A = builtin(name)
    validate_algebra(A)
    return dgbv_pair(A), "dgbv", A.name


def cmd_frobenius(args):
    pair, route, label = _pair_for(args)
    N = args.order
    if pair.unit is None:
        raise ArgumentError("model has no unit")
    g = DgLieAlgebra.from_structure(pair.structure, pair.unit)
    sol = solve_mc(g, N)
    if sol.unobstructed and not is_unit_normalized(sol):
        sol = normalize_unit(sol)
    W = read_filtration(args.filtration) if args.filtration else None
    P = period_map(pair, sol, W)
    F = frobenius(P)
    out = Report("frobenius %s (%s), N = %d" % (label, route, N))
    out.add("Psi(0) = eta", P.psi.truncate(0) == P.eta.truncate(0))
    out.add("dPsi/dt0 = hbar^-1 Psi", not unit_equation_defect(P))
    out.extend(F.report, "")
    payload = {"model": label, "route": route, "order": N, "parameters": list(F.params.names),
               "classes": [{pair.g_basis.names[i]: fmt(c) for i, c in enumerate(v) if c}
                           for v in sol.reps],
               "metric": matrix_strs(F.g),
               "potential": series_dict(F.phi),
               "cubic": {mono_str(F.params, m): fmt(c)
                         for m, c in sorted(cubic_coefficients(F.phi).items())},
               "euler": [series_dict(e) for e in F.E]}
    return out, payload


def cmd_mirror(args):
    from .mirror import FlatTorusPair, verify_intertwining, verify_mirror_theorem
    if not args.metric:
        raise ArgumentError("mirror needs --metric")
    G = read_metric(args.metric)
    pair = FlatTorusPair(len(G), G)
    out = Report("mirror n = %d, N = %d" % (pair.n, args.order))
    W = read_filtration(args.filtration) if args.filtration else None
    payload = {"n": pair.n, "metric": matrix_strs(pair.g), "order": args.order, "roles": []}
    for side in (0, 1):
        tag = "A on %s / B on %s: " % (pair.tags[side], pair.tags[1 - side])
        out.extend(verify_intertwining(pair, side), tag)
        rep = verify_mirror_theorem(pair, args.order, W if side == 0 else None, side)
        out.extend(rep, tag)
        FA = rep.payload["A"]
        payload["roles"].append({"A-side": pair.tags[side], "equal": rep.passed,
                                 "potential": series_dict(FA.phi)})
    return out, payload


def cmd_selftest(args):
    from .selftest import run_selftest
    rep = run_selftest(args.seed, args.cases)
    return rep, {"seed": args.seed, "cases": args.cases}


HANDLERS = {"verify": cmd_verify, "cohomology": cmd_cohomology, "deform": cmd_deform,
            "frobenius": cmd_frobenius, "mirror": cmd_mirror, "selftest": cmd_selftest}


def make_parser():
    p = argparse.ArgumentParser(prog="semiinf", description="semi-infinite VHS toolkit")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("spec", nargs="?", help="algebra spec file (JSON)")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--filtration")
    p.add_argument("--metric")
    p.add_argument("--model", help="built-in model: %s" % ", ".join(sorted(BUILTINS)))
    p.add_argument("--route", choices=("auto", "dgbv", "A", "B"), default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    return p


def _provenance(exc):
    tb = traceback.extract_tb(exc.__traceback__)
    for frame in reversed(tb):
        if "semiinf" in frame.filename:
            return frame.filename.rsplit("/", 1)[-1].rsplit(".", 1)[0]
    return "cli"


def run(argv=None, stream=None):
    """Parse ``argv``, run the command, print the JSON report; returns the exit status."""
    stream = stream or sys.stdout
    args = make_parser().parse_args(argv)
    try:
        rep, payload = HANDLERS[args.command](args)
    except SemiInfError as exc:
        doc = {"command": args.command, "passed": False,
               "error": {"type": type(exc).__name__, "module": _provenance(exc),
                         "message": str(exc)}}
        report = getattr(exc, "report", None)
        if report is not None:
            doc["error"]["checks"] = _checks(report)
        stream.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
        return 1
    doc = {"command": args.command, "title": rep.title, "passed": rep.passed,
           "checks": _checks(rep), "result": jsonable(payload)}
    stream.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")
    return 0 if rep.passed else 1


def main():
    sys.exit(run())
