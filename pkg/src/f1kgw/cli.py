"""Command line front end.

Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error,
3 a verification check failed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .builtins import (datum_from_json, form_from_json, load_scheme, named_bundle, named_duality,
                       named_twist)
from .bundles import CechBundle, K0Ring, LineClasses, decompose, pic, validate, verify_split
from .errors import F1Error, ParseError
from .forms import (classify, gw0_monoid, gw0_scheme, is_isometric, isometry_group_order, normal_form,
                    spic)
from .monoid import monoid_from_json, named_monoid
from .projbundle import proj_bundle, verify as pbf_verify
from .suite import run_suite

FORMAT = "f1kgw/1"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- helpers

def _fmt(x):
    return "(" + ", ".join(str(v) for v in x) + ")"


def _line_name(X, cls):
    if X.meta.get("kind") == "Pn":
        return f"O({cls[0]})"
    return f"L{_fmt(cls)}" if cls else "O"


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ParseError(f"no such file {path!r}")
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON ({e.msg})")


def _monoid(ref):
    if ref.endswith(".json"):
        return monoid_from_json(_load_json(ref))
    return named_monoid(ref)


def _datum(args):
    if getattr(args, "file", None):
        return datum_from_json(_load_json(args.file))
    return named_duality(args.monoid, args.sigma, args.epsilon)


class Out:
    """Collects human lines and a JSON payload; prints one of them."""

    def __init__(self, args, command):
        self.args, self.lines = args, []
        self.data = {"format": FORMAT, "command": command}

    def line(self, s=""):
        self.lines.append(s)

    def put(self, **kw):
        self.data.update(kw)

    def emit(self):
        if self.args.json:
            print(json.dumps(self.data, indent=2, sort_keys=True))
        else:
            for s in self.lines:
                print(s)


def _table(out, rows):
    width = max(len(n) for n, _, _ in rows)
    for name, ok, detail in rows:
        out.line(f"{'PASS' if ok else 'FAIL'}  {name.ljust(width)}  {detail}".rstrip())
    n = sum(1 for _, ok, _ in rows if ok)
    out.line(f"{n}/{len(rows)} checks passed")


# ---------------------------------------------------------------- commands

def cmd_monoid(args):
    A = _monoid(args.spec)
    out = Out(args, f"monoid {args.action}")
    primes = [A.describe_prime(p) for p in A.primes()]
    if args.action == "info":
        U = A.units()
        props = A.properties().as_dict()
        out.put(name=A.name, units=U.group.describe(), properties=props, primes=len(primes))
        out.line(f"monoid: {A.name}")
        out.line(f"units: {U.group.describe()}")
        out.line("properties: " + ", ".join(f"{k}={v}" for k, v in props.items()))
        out.line(f"primes: {len(primes)}")
    else:
        out.put(name=A.name, primes=primes)
        for p in primes:
            out.line(p)
    out.emit()
    return 0


def cmd_scheme(args):
    X = load_scheme(args.scheme)
    out = Out(args, f"scheme {args.action}")
    if args.action == "info":
        units = X.global_units().describe()
        info = {"name": X.name, "charts": X.nchart, "points": len(X.points()),
                "closed_points": len(X.closed_points()), "irreducible": X.is_irreducible(),
                "pc": X.is_pc(), "integral": X.is_integral(), "global_units": units}
        if X.is_integral():
            G = X.global_sections()
            info["global_sections"] = [list(g) for g in getattr(G, "generators", [])]
        out.put(**info)
        for k, v in info.items():
            out.line(f"{k}: {v}")
    elif args.action == "points":
        if args.dot:
            dot = X.to_dot()
            out.put(dot=dot)
            out.line(dot.rstrip("\n"))
        else:
            pts = [p.describe() for p in X.points()]
            closed = {p.index for p in X.closed_points()}
            out.put(points=pts, generizations=sorted(list(g) for g in X.generizations()),
                    closed=sorted(closed))
            for p in X.points():
                out.line(f"{p.index}: {p.describe()}{'  (closed)' if p.index in closed else ''}")
    else:
        P = pic(X)
        gens = [_line_name(X, e) if X.meta.get("kind") == "Pn" else _fmt(e) for e in P.group.basis()]
        out.put(pic=P.describe(), generators=gens)
        if X.meta.get("kind") == "Pn":
            out.line(f"Pic = {P.describe()}, generator O(1)")
        else:
            out.line(f"Pic = {P.describe()}")
    out.emit()
    return 0


def cmd_bundle(args):
    X = load_scheme(args.scheme)
    b = named_bundle(X, args.bundle)
    out = Out(args, f"bundle {args.action}")
    if args.action == "validate":
        rep = validate(b)
        out.put(valid=rep.valid, violations=rep.violations)
        out.line("valid" if rep.valid else f"INVALID: {len(rep.violations)} violation(s)")
        for v in rep.violations:
            where = v.get("triple", v.get("pair"))
            out.line(f"  {v['kind']} at {where}")
        out.emit()
        return 0 if rep.valid else 1
    if args.action == "split":
        res = decompose(b)
        if isinstance(res, LineClasses):
            names = [_line_name(X, c) for c in res.classes]
            out.put(split=True, classes=[list(c) for c in res.classes], verified=verify_split(b, res))
            out.line(" + ".join(names))
        else:
            out.put(split=False, components=[[list(s) for s in c] for c in res.components])
            out.line(res.summary())
    else:
        if b.rank == 1:
            cls = pic(X).class_of(b)
            out.put(pic_class=list(cls))
            out.line(f"[{_line_name(X, cls)}] in Pic = {pic(X).describe()}")
        else:
            k = K0Ring(X).class_of_bundle(b)
            out.put(k0_class=k.to_json())
            out.line(" + ".join(f"{k[key]}[{_line_name(X, key)}]" for key in k.support()))
    out.emit()
    return 0


def cmd_forms(args):
    out = Out(args, f"forms {args.action}")
    if args.action == "classify":
        if args.file:
            psi = form_from_json(_load_json(args.file))
        else:
            if args.entries is None:
                raise UsageError("forms classify needs --file or --entries")
            data = {"monoid": args.monoid, "sigma": args.sigma, "size": args.size,
                    "entries": json.loads(args.entries)}
            if args.epsilon is not None:
                data["epsilon"] = json.loads(args.epsilon)
            psi = form_from_json(data)
        sp = spic(psi.datum)
        cls, g = classify(psi, sp)
        nf = normal_form(psi.datum, cls, sp)
        order = isometry_group_order(cls, psi.datum, sp)
        ok, _ = is_isometric(psi, nf)
        out.put(**{"class": {"h": cls.h, "m": [[k, v] for k, v in sorted(cls.m.items())]},
                   "normal_form": nf.to_json()["entries"], "isometry_group_order": order,
                   "witness": {"perm": list(g.perm), "units": [psi.datum.monoid.encode(u) for u in g.units]},
                   "witness_checked": ok})
        out.line(f"class: {cls.describe()}")
        out.line(f"rank: {cls.rank}")
        out.line(f"isometry group order: {order}")
        out.line(f"witness perm: {list(g.perm)}")
    else:
        d = _datum(args)
        sp = spic(d)
        reps = [(d.monoid.encode(r), sp.stabilizer_order(r)) for r in sp.reps]
        out.put(mode=sp.mode, reps=[{"rep": r, "stabilizer_order": s} for r, s in reps])
        out.line(f"|SPic| = {len(sp)}")
        for r, s in reps:
            out.line(f"  {r}  |I| = {s}")
    out.emit()
    return 0


def _gw0_group(args):
    if args.scheme:
        X = load_scheme(args.scheme)
        return gw0_scheme(X, named_twist(X, args.twist)), X
    if args.monoid:
        return gw0_monoid(named_duality(args.monoid, args.sigma, args.epsilon)), None
    raise UsageError("need --scheme or --monoid")


def cmd_k0(args):
    X = load_scheme(args.scheme)
    K = K0Ring(X)
    P = pic(X)
    out = Out(args, "k0")
    out.put(pic=P.describe(), k0=f"Z[{P.describe()}]")
    out.line(f"K0 = Z[Pic], Pic = {P.describe()}")
    if args.bundle:
        k = K.class_of_bundle(named_bundle(X, args.bundle))
        out.put(k0_class=k.to_json())
        out.line("class: " + " + ".join(f"{k[key]}[{_line_name(X, key)}]" for key in k.support()))
    out.emit()
    return 0


def cmd_gw0(args, w0=False):
    G, X = _gw0_group(args)
    out = Out(args, "w0" if w0 else "gw0")
    reps = [list(r) for r in G.hyperbolic_reps(args.window)] if G.pic.ngens else [[]]
    fixed = G.fixed.particular
    res = {"fixed_nonempty": G.fixed_nonempty(), "spic": len(G.spic),
           "fixed_particular": None if fixed is None else list(fixed)}
    if w0:
        res["w0"] = G.w0_describe()
        out.line(f"W0 = {G.w0_describe()}")
    else:
        res.update(gw0=G.describe(), hyperbolic_reps=reps)
        out.line(f"GW0 = {G.describe()}")
        out.line(f"fixed part nonempty: {G.fixed_nonempty()}")
        if X is not None and G.pic.ngens:
            out.line("hyperbolic orbit reps: " + ", ".join(_line_name(X, r) for r in reps))
    out.put(**res)
    out.emit()
    return 0


def cmd_projbundle(args):
    out = Out(args, f"projbundle {args.action}")
    if args.action == "build":
        if not (args.base and args.bundle):
            raise UsageError("projbundle build needs --base and --bundle")
        X = load_scheme(args.base)
        E = named_bundle(X, args.bundle)
        PB = proj_bundle(X, E)
        PE = PB.scheme
        doc = {"format": FORMAT, "base": X.to_json(), "bundle": E.to_json(), "total": PE.to_json()}
        if args.output:
            Path(args.output).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        out.put(charts=PE.nchart, points=len(PE.points()), pic=pic(PE).describe())
        out.line(f"P(E): {PE.nchart} charts, {len(PE.points())} points, Pic = {pic(PE).describe()}")
        out.emit()
        return 0
    if args.input:
        from .builtins import scheme_from_json
        doc = _load_json(args.input)
        X = scheme_from_json(doc["base"])
        E = CechBundle.from_json(X, doc["bundle"])
    elif args.base and args.bundle:
        X = load_scheme(args.base)
        E = named_bundle(X, args.bundle)
    else:
        raise UsageError("projbundle verify needs --input or --base and --bundle")
    PB = proj_bundle(X, E)
    rep = pbf_verify(PB, named_twist(X, args.twist))
    rows = [(k, v, "") for k, v in rep.items()]
    out.put(checks=rep, ok=all(rep.values()))
    _table(out, rows)
    out.emit()
    return 0 if all(rep.values()) else 3


def cmd_verify_all(args):
    rows = run_suite(seed=args.seed)
    out = Out(args, "verify-all")
    out.put(suite=args.suite, seed=args.seed,
            checks=[{"name": n, "ok": ok, "detail": d} for n, ok, d in rows],
            ok=all(ok for _, ok, _ in rows))
    _table(out, rows)
    out.emit()
    return 0 if all(ok for _, ok, _ in rows) else 3


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks")

    p = _Parser(prog="f1kgw", description="K-theory and Grothendieck-Witt invariants of monoid schemes",
                parents=[common])
    p.add_argument("--version", action="version", version=f"f1kgw {__version__}")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def scheme_arg(q, required=True):
        q.add_argument("--scheme", "--builtin", "--file", dest="scheme", required=required,
                       help="built-in name (P2, A1, triangle, ...) or scheme JSON path")

    def duality_args(q):
        q.add_argument("--monoid", default="F1")
        q.add_argument("--sigma", default="id", help="id, neg, or a JSON permutation")
        q.add_argument("--epsilon", default=None, help="JSON element")

    m = sub.add_parser("monoid", parents=[common], help="units, properties and primes of a monoid")
    m.add_argument("action", choices=["info", "primes"])
    m.add_argument("spec", help="named monoid (F1, F1[t], F1Z3, free(2), ...) or JSON path")
    m.set_defaults(fn=cmd_monoid)

    s = sub.add_parser("scheme", parents=[common], help="points and Picard group of a scheme")
    s.add_argument("action", choices=["info", "points", "pic"])
    scheme_arg(s)
    s.add_argument("--dot", action="store_true", help="Graphviz output for points")
    s.set_defaults(fn=cmd_scheme)

    b = sub.add_parser("bundle", parents=[common], help="validate, split or classify a bundle")
    b.add_argument("action", choices=["validate", "split", "class"])
    scheme_arg(b)
    b.add_argument("--bundle", required=True, help="triangle_F, O^n, O(a)+O(b), L(x,y) or JSON path")
    b.set_defaults(fn=cmd_bundle)

    f = sub.add_parser("forms", parents=[common], help="classify symmetric forms, list SPic")
    f.add_argument("action", choices=["classify", "spic"])
    f.add_argument("--file", default=None, help="form JSON (classify) or duality JSON (spic)")
    duality_args(f)
    f.add_argument("--size", type=int, default=1)
    f.add_argument("--entries", default=None, help="JSON list of [row, col, unit]")
    f.set_defaults(fn=cmd_forms)

    k = sub.add_parser("k0", parents=[common], help="K0 = Z[Pic] and bundle classes")
    scheme_arg(k)
    k.add_argument("--bundle", default=None)
    k.set_defaults(fn=cmd_k0)

    for verb, w0 in (("gw0", False), ("w0", True)):
        g = sub.add_parser(verb, parents=[common], help=f"{verb.upper()} of a scheme or a monoid")
        scheme_arg(g, required=False)
        g.add_argument("--twist", default=None, help="line bundle, e.g. O(1)")
        duality_args(g)
        g.set_defaults(monoid=None)
        g.add_argument("--window", type=int, default=3, help="box for listed orbit representatives")
        g.set_defaults(fn=lambda a, w0=w0: cmd_gw0(a, w0))

    pb = sub.add_parser("projbundle", parents=[common], help="build P(E) and check the bundle formulas")
    pb.add_argument("action", choices=["build", "verify"])
    pb.add_argument("--base", default=None)
    pb.add_argument("--bundle", default=None)
    pb.add_argument("--input", default=None, help="output of projbundle build")
    pb.add_argument("-o", "--output", default=None)
    pb.add_argument("--twist", default=None)
    pb.set_defaults(fn=cmd_projbundle)

    v = sub.add_parser("verify-all", parents=[common], help="run the built-in example checks")
    v.add_argument("--suite", choices=["paper-examples"], default="paper-examples")
    v.set_defaults(fn=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 2
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", 0)
    try:
        return args.fn(args)
    except UsageError as e:
        print(str(e), file=sys.stderr)
        return 2
    except ParseError as e:
        print(json.dumps(e.as_dict(), sort_keys=True), file=sys.stderr)
        return 2
    except F1Error as e:
        print(json.dumps(e.as_dict(), sort_keys=True), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
