"""Command-line front end.

    cxmut validate --context ctx.json [--point x.json]
    cxmut mutate --dir 1to2|2to1 --space s.json --point x.json
    cxmut mutate --dir left|right --point x.json --at 1 --kernel H1
    cxmut check --level red|G [--strict] --point x.json --pol pol.json [--field fp:5]
    cxmut constants --which c0p --k 1 [--n 2] [--mode auto|exact|sample] [--p 101]
    cxmut chambers --setting ex2|ex3 --n 2 [--n1 5]
    cxmut certify --setting complex|morphism --stats stats.json --pol pol.json --constants paper|file
    cxmut reproduce --scenario p2-complex|ex2-chambers|ex3-pathological|all

Files are JSON trees.  Exit codes: 0 ok, 1 mismatch, 2 input error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

from .complexspace import (ChainPoint, ChainSpace, SpaceError, Type1Point, Type1Space, Type2Point, Type2Space,
                           blocks_from_forms, build_chain, chain_residuals)
from .exactlin import BudgetExceeded, FieldSpec
from .sheafctx import CompositionContext, ContextError, kernel_object, projective_context, validate_context

EXIT_OK, EXIT_MISMATCH, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


class InputError(ValueError):
    pass


# ---------------------------------------------------------------- input

def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def need(d, key, where):
    if not isinstance(d, dict) or key not in d:
        raise InputError(f"{where}: missing key '{key}'")
    return d[key]


def load_context(d, where, field: FieldSpec | None = None) -> CompositionContext:
    """Either a serialized context or {"projective": {"n", "twists", "kernels": [[name, gamma, g]]}}."""
    if isinstance(d, str):
        return load_context(read_json(d), d, field)
    if "projective" in d:
        spec = d["projective"]
        F = field or FieldSpec.parse(spec.get("field", d.get("field", "q")))
        ctx = projective_context(need(spec, "n", where + ".projective"), need(spec, "twists", where + ".projective"), F)
        for i, kern in enumerate(spec.get("kernels", [])):
            if len(kern) != 3:
                raise InputError(f"{where}.projective.kernels[{i}]: expected [name, gamma, g]")
            name, gamma, g = kern
            ctx = kernel_object(ctx, gamma, g, name)
        return ctx
    try:
        ctx = CompositionContext.from_json(d)
    except KeyError as e:
        raise InputError(f"{where}: missing key {e}") from None
    if field is not None and field != ctx.field:
        raise InputError(f"{where}: context is over {ctx.field.label()}, not {field.label()}")
    return ctx


def load_chain_point(path: str, field: FieldSpec | None = None, check=True) -> ChainPoint:
    """{"context": ..., "terms": [[[obj, mult], ...], ...], then "forms" (with "nvars") or "blocks"}."""
    d = read_json(path)
    ctx = load_context(need(d, "context", path), path + ".context", field)
    terms = d.get("terms") or need(need(d, "space", path), "terms", path + ".space")
    terms = tuple(tuple((x, int(m)) for x, m in term) for term in terms)
    for i, term in enumerate(terms):
        for x, _ in term:
            if x not in ctx.objects:
                raise InputError(f"{path}.terms[{i}]: unknown object {x}")
    sp = ChainSpace(ctx, terms, None, d.get("label", "chain"))
    F = ctx.field
    if "forms" in d:
        entries = {}
        for key, mat in d["forms"].items():
            entries[tuple(int(t) for t in key.split(","))] = mat
        blocks = blocks_from_forms(sp, entries, need(d, "nvars", path))
    else:
        blocks = {}
        for i, b in enumerate(d.get("blocks", [])):
            at = tuple(need(b, "at", f"{path}.blocks[{i}]"))
            blocks[at] = tuple(tuple(tuple(F.from_json(c) for c in r) for r in m)
                               for m in need(b, "mats", f"{path}.blocks[{i}]"))
    return build_chain(sp, blocks, check)


def load_polarization(path: str):
    from .stability import Polarization, complex_polarization, morphism_polarization
    d = read_json(path)
    if "weights" in d:
        return Polarization.from_json(d)
    if "complex" in d:
        return complex_polarization(*[Fraction(str(v)) for v in d["complex"]])
    if "morphism" in d:
        return morphism_polarization(*[Fraction(str(v)) for v in d["morphism"]])
    raise InputError(f"{path}: expected 'weights', 'complex' or 'morphism'")


# ---------------------------------------------------------------- output

def _flatten(tree, prefix=""):
    if isinstance(tree, dict):
        for k, v in tree.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(tree, list):
        for i, v in enumerate(tree):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, tree


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def emit(tree, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "csv":
        w = csv.writer(out)
        w.writerow(["path", "value"])
        plain = json.loads(json.dumps(tree, default=_default))
        for k, v in _flatten(plain):
            w.writerow([k, v])
    else:
        out.write(json.dumps(tree, default=_default, indent=2, sort_keys=False) + "\n")


# ---------------------------------------------------------------- commands

def cmd_validate(args):
    report = {}
    ok = True
    if args.context:
        ctx = load_context(args.context, args.context, args.field)
        rep = validate_context(ctx)
        report["context"] = rep.to_json()
        ok &= rep.ok
    if args.point:
        x = load_chain_point(args.point, args.field, check=False)
        bad = x.space.check_hypotheses()
        res = chain_residuals(x)
        report["point"] = {"hypotheses": bad, "residual_blocks": [list(k) for k in res]}
        ok &= not bad and not res
    if args.space:
        d = read_json(args.space)
        try:
            Type1Space.from_json(d) if d.get("type") == 1 else Type2Space.from_json(d)
            report["space"] = {"type": d.get("type"), "ok": True}
        except SpaceError as e:
            report["space"] = {"type": d.get("type"), "ok": False, "violations": list(e.args[0])}
            ok = False
    if not report:
        raise InputError("nothing to validate: pass --context, --point or --space")
    report["ok"] = ok
    return report, (EXIT_OK if ok else EXIT_MISMATCH)


def cmd_mutate(args):
    from . import mutation as mu
    if args.dir in ("1to2", "2to1"):
        if not args.space:
            raise InputError("--space is required for 1to2 and 2to1")
        d = read_json(args.space)
        if args.dir == "1to2":
            th = Type1Space.from_json(d)
            x = Type1Point.from_json(th, read_json(args.point))
            tp = mu.mutate_space_1to2(th)
            y, cert = mu.mutate_point_1to2(th, x, space2=tp)
            return {"space": tp.to_json(), "point": y.to_json(), "certificate": cert.to_json()}, \
                (EXIT_OK if cert.ok() else EXIT_MISMATCH)
        tp = Type2Space.from_json(d)
        y = Type2Point.from_json(tp, read_json(args.point))
        th = mu.mutate_space_2to1(tp)
        x, cert = mu.mutate_point_2to1(tp, y, space1=th)
        return {"space": th.to_json(), "point": x.to_json(), "certificate": cert.to_json()}, \
            (EXIT_OK if cert.ok() else EXIT_MISMATCH)
    if args.dir in ("left", "right"):
        x = load_chain_point(args.point, args.field)
        if args.at is None:
            raise InputError("--at is required for chain mutations")
        if args.dir == "left":
            y, cert = mu.mutate_chain_left(x, args.at, args.kernel)
        else:
            y, cert = mu.mutate_chain_right(x, args.at, args.kernel)
        tree = {"space": y.space.to_json(), "point": y.to_json(), "certificate": cert.to_json()}
        return tree, (EXIT_OK if cert.ok() else EXIT_MISMATCH)
    raise InputError(f"unknown direction {args.dir}")


def cmd_check(args):
    from .stability import is_semistable_G, is_semistable_red, revalidate_witness
    x = load_chain_point(args.point, args.field)
    pol = load_polarization(args.pol)
    if args.level == "red":
        v = is_semistable_red(x, pol, args.strict, budget=args.budget)
    else:
        v = is_semistable_G(x, pol, args.strict, method=args.method, budget=args.budget)
    tree = v.to_json()
    tree["holds"] = v.holds(args.strict)
    tree["witness_revalidated"] = revalidate_witness(x, pol, v)
    return tree, EXIT_OK if tree["witness_revalidated"] else EXIT_MISMATCH


def cmd_constants(args):
    from .constants import NAMES, named_constants, paper_constants
    which = NAMES if args.which == "all" else tuple(args.which.split(","))
    res = named_constants(args.n, args.k, which, args.mode, args.p, args.budget, args.samples, args.seed,
                          args.splitting)
    paper = paper_constants(args.n) if args.k == 1 else {}
    tree = {"n": args.n, "k": args.k, "results": {}}
    for name, r in res.items():
        t = r.to_json()
        if name in paper:
            t["paper_value"] = str(paper[name])
            t["matches_paper"] = r.value == paper[name]
        tree["results"][name] = t
    return tree, EXIT_OK


def cmd_chambers(args):
    from .stability import singular_values
    sv = singular_values(args.setting, args.n, args.n1)
    return {"setting": args.setting, "variable": sv["variable"], "values": [str(v) for v in sv["values"]],
            "chambers": [[str(a), "inf" if b is None else str(b)] for a, b in sv["chambers"]]}, EXIT_OK


def cmd_certify(args):
    from .constants import paper_constants
    from .stability import existence_certificate
    stats = read_json(args.stats) if args.stats else None
    if stats is None:
        raise InputError("--stats is required")
    if args.constants == "paper":
        consts = paper_constants(args.n)
    else:
        raw = read_json(args.constants)
        consts = {k: Fraction(str(v)) for k, v in raw.items()}
    pol = read_json(args.pol)
    values = [Fraction(str(v)) for v in need(pol, args.setting, args.pol)]
    try:
        cert = existence_certificate(args.setting, stats, values, consts)
    except KeyError as e:
        raise InputError(str(e)) from None
    return cert.to_json(), EXIT_OK


def cmd_reproduce(args):
    from .scenarios import SCENARIOS, run_scenario
    names = list(SCENARIOS) if args.scenario == "all" else [args.scenario]
    reports = [run_scenario(n) for n in names]
    ok = all(r["ok"] for r in reports)
    return {"scenarios": reports, "ok": ok}, (EXIT_OK if ok else EXIT_MISMATCH)


def build_parser():
    p = argparse.ArgumentParser(prog="cxmut", description="Exact mutations and stability of complexes.")
    p.add_argument("--field", type=FieldSpec.parse, default=None, help="q or fp:<p>")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**7)
    p.add_argument("--report", choices=("tree", "csv"), default="tree")
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate")
    s.add_argument("--context")
    s.add_argument("--point")
    s.add_argument("--space")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("mutate")
    s.add_argument("--dir", required=True, choices=("1to2", "2to1", "left", "right"))
    s.add_argument("--space")
    s.add_argument("--point", required=True)
    s.add_argument("--at", type=int)
    s.add_argument("--kernel")
    s.set_defaults(fn=cmd_mutate)

    s = sub.add_parser("check")
    s.add_argument("--level", choices=("red", "G"), default="G")
    s.add_argument("--strict", action="store_true")
    s.add_argument("--method", choices=("auto", "enumerate", "affine"), default="auto")
    s.add_argument("--point", required=True)
    s.add_argument("--pol", required=True)
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("constants")
    s.add_argument("--which", default="all")
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--mode", choices=("auto", "exact", "sample"), default="auto")
    s.add_argument("--p", type=int, default=None)
    s.add_argument("--samples", type=int, default=400)
    s.add_argument("--splitting", choices=("moore-penrose", "pivot"), default="moore-penrose")
    s.set_defaults(fn=cmd_constants)

    s = sub.add_parser("chambers")
    s.add_argument("--setting", choices=("ex2", "ex3"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--n1", type=int)
    s.set_defaults(fn=cmd_chambers)

    s = sub.add_parser("certify")
    s.add_argument("--setting", choices=("complex", "morphism"), required=True)
    s.add_argument("--stats", required=True)
    s.add_argument("--pol", required=True)
    s.add_argument("--constants", default="paper")
    s.add_argument("--n", type=int, default=2, help="projective dimension for the paper constants")
    s.set_defaults(fn=cmd_certify)

    s = sub.add_parser("reproduce")
    s.add_argument("--scenario", default="all")
    s.set_defaults(fn=cmd_reproduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    if args.command == "constants" and args.budget == 10**7:
        args.budget = 200000
    try:
        tree, code = args.fn(args)
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (InputError, SpaceError, ContextError, KeyError, ValueError) as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", newline="") as fh:
            emit(tree, args.report, fh)
    else:
        emit(tree, args.report)
    return code


if __name__ == "__main__":
    sys.exit(main())
