"""Command-line front end: ``negbern <subcommand> ...``.

Exit codes: 0 success or accept, 1 verified violation (reject), 2 usage
error, 3 numerical failure (quadrature, inconclusive test, insufficient
data). Errors are reported as one JSON object on stderr.

Function sources accepted by ``--fn``:

    catalog:NAME?k=v&k=v     a catalog entry
    expr:TEXT                a formula in s or s1..sn
    triple:FILE              a Levy triple in JSON
    recipe:FILE              a JSON construction tree (what compose/tailint/lift2 emit)
"""

import argparse
import datetime
import json
import math
import sys
from pathlib import Path
from urllib.parse import parse_qsl

import numpy as np

from . import catalog
from .constructors import (
    ConstructionError,
    WeightSpec,
    compose,
    conic_combine,
    divided_difference_lift,
    permute_arguments,
    tail_integral,
)
from .expr import ParseError, parse_expression
from .handles import FunctionHandle
from .membership import (
    EvaluationFailure,
    SectorSpec,
    exponential_criterion,
    lemma_inequality_check,
    sector_check,
    verify_Tn,
)
from .quadrature import QuadratureError
from .representation import IntegrabilityError, StructuralError, evaluate_complex, evaluate_real, triple_from_json
from .stochastic import SamplingError, SimPlan, verify_exponent

EXIT_OK, EXIT_REJECT, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Rejected(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def _number(text):
    t = text.strip().lower().replace(" ", "")
    if "pi" in t:
        num, _, den = t.partition("/")
        coef = num.replace("*", "").replace("pi", "")
        coef = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
        return coef * math.pi / (float(den) if den else 1.0)
    return float(t)


def _numbers(text):
    return [_number(x) for x in text.split(",") if x.strip()]


def _points(text, arity):
    """'a,b;c,d' -> [[a,b],[c,d]]; for arity 1, 'a,b' is two points."""
    groups = [_numbers(g) for g in text.split(";") if g.strip()]
    if arity == 1:
        groups = [[x] for g in groups for x in g]
    for g in groups:
        if len(g) != arity:
            raise UsageError(f"point {g} has {len(g)} coordinates, expected {arity}")
    return np.array(groups, dtype=float)


def _param(v):
    try:
        x = float(v)
    except ValueError:
        return v
    return int(x) if x.is_integer() and "." not in v and "e" not in v.lower() else x


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})") from None


def _catalog_entry(spec):
    name, _, query = spec.partition("?")
    params = {k: _param(v) for k, v in parse_qsl(query, keep_blank_values=True)}
    try:
        return catalog.get(name, **params)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None


def _catalog_handle(spec=None, entry=None):
    entry = entry or _catalog_entry(spec)
    h = entry.handle
    if h.triple is None:
        h.triple = entry.triple
    return h


def build(node):
    """Handle from a recipe node; recipes share the format of handle provenance."""
    if isinstance(node, str):
        return load_fn(node)
    if not isinstance(node, dict):
        raise UsageError(f"recipe node must be an object or a source string, got {node!r}")
    if "catalog" in node:
        return _catalog_handle(entry=catalog.get(node["catalog"], **node.get("params", {})))
    if "expr" in node:
        return parse_expression(node["expr"])
    if "triple" in node:
        t = node["triple"]
        t = triple_from_json(_read_json(t) if isinstance(t, str) else t)
        return FunctionHandle.from_triple(t)
    op = node.get("op")
    args = node.get("args", [])
    if op == "compose":
        outer, inner = (build(a) for a in args)
        return compose(outer, inner, node.get("slot", 1))
    if op == "permute":
        return permute_arguments(build(args[0]), node["permutation"])
    if op == "conic":
        return conic_combine(list(zip(node["coefs"], (build(a) for a in args))))
    if op == "scale":
        return build(args[0]).scaled(float(node["coef"]))
    if op == "tailint":
        return tail_integral(build(args[0]), WeightSpec.from_json(node["weight"]), node.get("tol", 1e-10))
    if op == "lift2":
        src = build(args[0])
        if src.triple is None:
            raise UsageError("lift2 needs a one-dimensional source with a Levy triple")
        return divided_difference_lift(src.triple, atoms=node.get("atoms", 1000)).handle
    raise UsageError(f"unknown recipe node {json.dumps(node, sort_keys=True)[:80]}")


def load_fn(source):
    kind, sep, rest = source.partition(":")
    if not sep:
        raise UsageError(f"function source {source!r} must start with catalog:, expr:, triple: or recipe:")
    if kind == "catalog":
        return _catalog_handle(rest)
    if kind == "expr":
        return parse_expression(rest)
    if kind == "triple":
        return FunctionHandle.from_triple(triple_from_json(_read_json(rest)))
    if kind == "recipe":
        return build(_read_json(rest))
    raise UsageError(f"unknown function source kind {kind!r}")


def _weight(text):
    name, _, query = text.partition("?")
    params = {k: _param(v) for k, v in parse_qsl(query)}
    try:
        return WeightSpec.from_json({"name": name, "params": params})
    except KeyError as e:
        raise UsageError(f"weight {name} needs parameter {e}") from None


def _grid(text, arity):
    if text is None:
        return None
    if ":" in text:
        lo, hi, n = text.split(":")
        axis = -np.geomspace(-_number(lo), -_number(hi), int(n))
    else:
        axis = np.array(_numbers(text))
    if not np.all(axis < 0):
        raise UsageError("grid points must be negative")
    return [np.sort(axis)] * arity


# ---------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _dumps(obj):
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


def _emit(args, result):
    doc = {"command": args.command, "params": _resolved(args), "result": result}
    if getattr(args, "timestamp", False):
        doc["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    text = _dumps(doc) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _resolved(args):
    skip = {"func", "out", "timestamp", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args):
    if (args.fn is None) == (args.triple is None):
        raise UsageError("eval needs exactly one of --fn and --triple")
    f = load_fn(args.fn if args.fn else "triple:" + args.triple)
    pts = _points(args.s, f.arity)
    if args.y is not None:
        ys = _points(args.y, f.arity)
        if ys.shape != pts.shape:
            raise UsageError("--y must match --s point for point")
        z = pts + 1j * ys
        vals = f.eval_complex(z)
    else:
        vals = f.eval(pts)
    if args.format == "json":
        rows = [{"s": p, "value": v} for p, v in zip(pts.tolist(), vals.tolist())]
        if args.y is not None:
            rows = [{"s": p, "y": y, "value": [v.real, v.imag]} for p, y, v in zip(pts.tolist(), ys.tolist(), vals.tolist())]
        _emit(args, {"values": rows})
    else:
        for v in vals:
            sys.stdout.write((repr(float(v)) if args.y is None else repr(complex(v))) + "\n")
    return EXIT_OK


def _verdict_code(verdicts):
    if "reject" in verdicts:
        return EXIT_REJECT
    if "inconclusive" in verdicts:
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_verify(args):
    f = load_fn(args.fn)
    grid = _grid(args.grid, f.arity)
    tests = {"tn", "exp", "sector", "lemma"} if args.test == "all" else {args.test}
    reports, verdicts = {}, []
    if "tn" in tests:
        r = verify_Tn(f, grid, args.order, args.step, args.resolution)
        reports["verify_Tn"] = r.to_json()
        verdicts.append(r.verdict)
    if "exp" in tests:
        reports["exponential_criterion"] = []
        for v in _numbers(args.v):
            r = exponential_criterion(f, v, grid, args.order, args.step, args.resolution)
            reports["exponential_criterion"].append(r.to_json())
            verdicts.append(r.verdict)
    if "sector" in tests:
        if not f.has_complex:
            raise UsageError("sector check needs a function with a complex evaluator")
        reports["sector_check"] = []
        for theta in _numbers(args.theta):
            r = sector_check(f, SectorSpec(theta, args.samples), args.seed, args.tol)
            reports["sector_check"].append(r.to_json())
            verdicts.append("accept" if r.passed else "reject")
    if args.test == "all" and f.triple is None:
        tests.discard("lemma")
        reports["lemma_inequality"] = "skipped: no Levy triple"
    if "lemma" in tests:
        if f.triple is None:
            raise UsageError("the lemma inequality needs a function with a Levy triple")
        r = lemma_inequality_check(f.triple, seed=args.seed)
        reports["lemma_inequality"] = r.to_json()
        verdicts.append("accept" if r.passed else "reject")
    code = _verdict_code(verdicts)
    verdict = {EXIT_OK: "accept", EXIT_REJECT: "reject", EXIT_NUMERIC: "inconclusive"}[code]
    _emit(args, {"function": f.provenance, "verdict": verdict, "reports": reports})
    return code


def _values(f, text):
    if text is None:
        return None
    pts = _points(text, f.arity)
    return [{"s": p, "value": v} for p, v in zip(pts.tolist(), f.eval(pts).tolist())]


def cmd_compose(args):
    h = compose(load_fn(args.outer), load_fn(args.inner), args.slot)
    _emit(args, {"recipe": h.provenance, "arity": h.arity, "values": _values(h, args.s)})
    return EXIT_OK


def cmd_tailint(args):
    h = tail_integral(load_fn(args.fn), _weight(args.weight), args.tol)
    _emit(args, {"recipe": h.provenance, "arity": 1, "values": _values(h, args.s)})
    return EXIT_OK


def cmd_lift2(args):
    if (args.fn is None) == (args.triple is None):
        raise UsageError("lift2 needs exactly one of --fn and --triple")
    src = load_fn(args.fn if args.fn else "triple:" + args.triple)
    if src.triple is None:
        raise UsageError("lift2 needs a source with a Levy triple")
    res = divided_difference_lift(src.triple, atoms=args.atoms)
    recipe = {"op": "lift2", "atoms": args.atoms, "args": [{"triple": src.triple.to_json()}]}
    result = {"recipe": recipe, "omega": res.omega, "arity": 2, "values": _values(res.handle, args.s)}
    if args.triple_out:
        Path(args.triple_out).write_text(_dumps(res.triple.to_json()) + "\n")
        result["triple_file"] = args.triple_out
    _emit(args, result)
    return EXIT_OK


def cmd_simulate(args):
    t = triple_from_json(_read_json(args.triple))
    probes = _points(args.s, t.dim) if args.s else None
    plan = SimPlan(t, tuple(_numbers(args.t)), probes, args.samples, args.eps, args.seed)
    report = verify_exponent(plan)
    payload = report.to_csv()
    if args.csv:
        Path(args.csv).write_text(payload, newline="")
    statuses = {r.status for r in report.rows}
    summary = {
        "passed": report.passed,
        "rows": len(report.rows),
        "failures": sum(r.status == "fail" for r in report.rows),
        "insufficient": sum(r.status == "insufficient" for r in report.rows),
        "max_truncation_bias": max(abs(r.t_psi - r.t_psi_eps) / r.t for r in report.rows),
        "semigroup": report.semigroup,
    }
    if not args.csv:
        summary["csv"] = payload
    _emit(args, summary)
    if "insufficient" in statuses:
        return EXIT_NUMERIC
    return EXIT_OK if report.passed else EXIT_REJECT


def cmd_catalog(args):
    if args.action == "list":
        _emit(args, {name: params for name, (_, params) in sorted(catalog.REGISTRY.items())})
        return EXIT_OK
    if not args.name:
        raise UsageError("catalog show needs an entry, e.g. 'log?b=2'")
    entry = _catalog_entry(args.name)
    _emit(args, entry.to_json())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser():
    p = _Parser(prog="negbern", description="Negative Bernstein functions: evaluate, verify, construct, simulate.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write the JSON document here instead of stdout")
        sp.add_argument("--timestamp", action="store_true", help="add a UTC timestamp to the JSON header")

    e = sub.add_parser("eval", help="evaluate a function at points")
    e.add_argument("--fn")
    e.add_argument("--triple")
    e.add_argument("--s", required=True, help="points: coordinates split by ',', points by ';'")
    e.add_argument("--y", help="imaginary parts, same layout as --s")
    e.add_argument("--tol", type=float)
    e.add_argument("--format", choices=["text", "json"], default="text")
    common(e)
    e.set_defaults(func=cmd_eval)

    v = sub.add_parser("verify", help="run membership tests")
    v.add_argument("--fn", required=True)
    v.add_argument("--test", choices=["tn", "exp", "sector", "lemma", "all"], default="tn")
    v.add_argument("--order", type=int, default=5)
    v.add_argument("--step", type=float)
    v.add_argument("--grid", help="'lo:hi:n' (geometric) or a comma list, shared by all axes")
    v.add_argument("--resolution", type=float, default=1e-2)
    v.add_argument("--v", default="0.5,1,2")
    v.add_argument("--theta", default="pi/3,pi/2,2pi/3")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=float, default=1e-9)
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compose", help="psi1(psi2(r), s2..sn)")
    c.add_argument("--outer", required=True)
    c.add_argument("--inner", required=True)
    c.add_argument("--slot", type=int, default=1)
    c.add_argument("--s")
    common(c)
    c.set_defaults(func=cmd_compose)

    t = sub.add_parser("tailint", help="int_s^0 psi(t) w(t) dt")
    t.add_argument("--fn", required=True)
    t.add_argument("--weight", default="heaviside", help="heaviside | power?k=K | saturating?a=A")
    t.add_argument("--tol", type=float, default=1e-10)
    t.add_argument("--s")
    common(t)
    t.set_defaults(func=cmd_tailint)

    lft = sub.add_parser("lift2", help="divided-difference lift to two variables")
    lft.add_argument("--fn")
    lft.add_argument("--triple")
    lft.add_argument("--atoms", type=int, default=1000)
    lft.add_argument("--s")
    lft.add_argument("--triple-out", help="write the pushforward triple JSON here")
    common(lft)
    lft.set_defaults(func=cmd_lift2)

    s = sub.add_parser("simulate", help="Monte Carlo check of g_t = exp(t psi)")
    s.add_argument("--triple", required=True)
    s.add_argument("--t", default="0.5,1,2")
    s.add_argument("--s", help="probe points; default {-0.5,-1,-2}^n")
    s.add_argument("--samples", type=int, default=100_000)
    s.add_argument("--eps", type=float, default=1e-3)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--csv")
    common(s)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("catalog", help="list or show catalog entries")
    k.add_argument("action", choices=["list", "show"])
    k.add_argument("name", nargs="?", help="NAME?k=v&... for show")
    common(k)
    k.set_defaults(func=cmd_catalog)
    return p


def _glue_values(argv):
    """Let option values start with '-' (e.g. '--s -1,-2'): rewrite to '--s=-1,-2'."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and argv[i + 1][:1] == "-" and argv[i + 1][1:2] not in ("-", ""):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _fail(code, kind, message, **extra):
    sys.stderr.write(_dumps({"error": kind, "message": message, "exit_code": code, **extra}) + "\n")
    return code


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = make_parser().parse_args(_glue_values(argv))
        return args.func(args)
    except (UsageError, ParseError, StructuralError, KeyError, TypeError) as e:
        return _fail(EXIT_USAGE, type(e).__name__, str(e.args[0]) if e.args else str(e))
    except (ConstructionError, IntegrabilityError, SamplingError, Rejected) as e:
        return _fail(EXIT_REJECT, type(e).__name__, str(e))
    except EvaluationFailure as e:
        return _fail(EXIT_NUMERIC, "EvaluationFailure", str(e), point=e.point)
    except (QuadratureError, ArithmeticError, FloatingPointError) as e:
        return _fail(EXIT_NUMERIC, type(e).__name__, str(e))
    except ValueError as e:
        return _fail(EXIT_USAGE, "ValueError", str(e))


if __name__ == "__main__":
    sys.exit(main())
