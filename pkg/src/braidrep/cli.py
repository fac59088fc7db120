"""``braidrep`` command-line interface.

Every invocation prints exactly one JSON document (sorted keys) on stdout.
Exit status: 0 success, 2 check failed, 3 budget exceeded, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from pathlib import Path

from . import closure, gaussian, grouptype
from .bvs import BVS, check_unitary, check_ybe, braid_generators, eval_braid_word, flip_bvs, parse_braid_word
from .cyclo import CycMatrix, CycNum
from .errors import BraidrepError, ConstructionCheckFailed, ParseError, YBEFails

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 2, 3, 4


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def _jsonable(x):
    if isinstance(x, CycNum):
        return str(x)
    if isinstance(x, CycMatrix):
        return x.to_json()
    if isinstance(x, (set, frozenset, tuple)):
        return list(x)
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


# ---------------------------------------------------------------------------
# inputs


def load_inputs(path):
    """Load a SetSolution, PhaseTwist, FiniteGroup or BVS from a JSON file.

    The kind is recognised by its keys; every type invariant runs at load.
    """
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: {e.msg} at line {e.lineno} column {e.colno}", e.pos) from None
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: expected a JSON object", 0)
    if "table" in obj:
        return grouptype.FiniteGroup.from_json(obj)
    if "phases" in obj:
        return grouptype.PhaseTwist.from_json(obj)
    if "S" in obj:
        return grouptype.SetSolution.from_json(obj)
    if "c" in obj and "dim" in obj:
        return BVS.from_json(obj)
    raise ParseError(f"{path}: unrecognised document (keys {sorted(obj)})", 0)


def _group(spec):
    if Path(spec).is_file():
        g = load_inputs(spec)
        if not isinstance(g, grouptype.FiniteGroup):
            raise ParseError(f"{spec} is not a group table", 0)
        return g
    return grouptype.FiniteGroup.by_name(spec)


_FIXTURE = re.compile(r"^(gaussian:(\d+)|flip(\d+)|discussion-example:(\d+))$")


def resolve_generators(spec, n, override=False):
    """Generator images for a named fixture or a BVS / solution file."""
    m = _FIXTURE.match(spec)
    if m and m.group(4):
        if n != 3:
            raise InputError("discussion-example fixtures are 3-strand representations (use --n 3)")
        return closure.discussion_example(int(m.group(4)))
    return braid_generators(resolve_bvs(spec), n, override=override)


def resolve_bvs(spec) -> BVS:
    m = _FIXTURE.match(spec)
    if m:
        if m.group(2):
            return gaussian.gaussian_bvs(int(m.group(2))).bvs
        if m.group(3):
            return flip_bvs(int(m.group(3)))
        raise InputError("discussion-example is a set of braid images, not a braided vector space")
    if spec.startswith("conjugation:"):
        G = grouptype.FiniteGroup.by_name(spec.split(":", 1)[1])
        return grouptype.linearize(grouptype.SetSolution.conjugation(G))
    if not Path(spec).is_file():
        raise InputError(f"unknown BVS spec {spec!r}")
    obj = load_inputs(spec)
    if isinstance(obj, BVS):
        return obj
    if isinstance(obj, grouptype.SetSolution):
        return grouptype.linearize(obj)
    raise ParseError(f"{spec} does not describe a braided vector space", 0)


# ---------------------------------------------------------------------------
# subcommands


def _image(gens, args):
    budget = args.budget if args.budget is not None else closure.default_budget()
    fn = closure.closure_mod_scalars if args.projective else closure.dimino_closure
    res = fn(gens, budget, args.seed, override=args.override_size_guard)
    out = res.to_json()
    cert = closure.monomial_certificate(gens)
    out["monomial_certificate"] = cert.to_json() if cert else None
    return out, (EXIT_OK if res.finite else EXIT_BUDGET)


def cmd_gaussian(args):
    m, n, ov = args.m, args.n, args.override_size_guard
    check = args.check
    if check == "ybe":
        g = gaussian.gaussian_bvs(m)
        rep = check_ybe(g.bvs)
        return {"check": "ybe", "m": m, "n": n, "holds": rep.holds, "details": {"first_discrepancy": rep.first_discrepancy}}
    if check == "unitary":
        g = gaussian.gaussian_bvs(m)
        return {"check": "unitary", "m": m, "n": n, "holds": check_unitary(g.bvs), "details": {}}
    if check == "gauss-sum":
        gs = gaussian.gauss_sum(m)
        return {
            "check": "gauss-sum", "m": m, "n": n, "holds": gs.closed_form_matches,
            "details": {"value": str(gs.value), "closed_form": str(gs.closed_form)},
        }
    if check == "jones":
        return gaussian.jones_conditions(m).to_json()
    if check == "relations":
        reps = [
            gaussian.es_relations_check(m, n),
            gaussian.es_braid_relations_check(m, n),
            gaussian.localized_relations_check(m, n, override=ov),
        ]
    elif check == "conjugation":
        reps = [gaussian.es_conjugation_check(m, n), gaussian.localized_braid_check(m, n, override=ov)]
    else:
        reps = [gaussian.check_coprime_factorization(m, n, override=ov)]
    return {
        "check": check, "m": m, "n": n, "holds": all(r.holds for r in reps),
        "details": {r.check: {"holds": r.holds, **r.details} for r in reps},
    }


def cmd_settheoretic(args):
    if args.file.startswith("flip") and args.file[4:].isdigit():
        sol = grouptype.SetSolution.flip(int(args.file[4:]))
    elif args.file.startswith("conjugation:"):
        sol = grouptype.SetSolution.conjugation(grouptype.FiniteGroup.by_name(args.file.split(":", 1)[1]))
    else:
        sol = load_inputs(args.file)
        if not isinstance(sol, grouptype.SetSolution):
            raise ParseError(f"{args.file} is not a set-theoretic solution", 0)
    twist = None
    if args.twist:
        twist = load_inputs(args.twist)
        if not isinstance(twist, grouptype.PhaseTwist):
            raise ParseError(f"{args.twist} is not a phase twist", 0)
    rep = grouptype.check_set_theoretic(sol)
    if args.check == "ybe":
        details = {"bijective": rep.bijective, "first_failure": rep.first_failure}
        holds = rep.holds
        if holds and twist is not None:
            try:
                grouptype.linearize(sol, twist)
            except grouptype.TwistBreaksYBE as e:
                holds = False
                details["twist_witness"] = e.witness
        return {"check": "ybe", "holds": holds, "details": details}
    if not rep.holds:
        return {"check": "image", "holds": False, "details": {"first_failure": rep.first_failure}}
    b = grouptype.linearize(sol, twist)
    return _image_report(b, args)


def _image_report(b, args):
    gens = braid_generators(b, args.n, override=args.override_size_guard)
    out, code = _image(gens, args)
    cert = out["monomial_certificate"]
    out.update({"check": "image", "holds": code == EXIT_OK and cert is not None})
    out["details"] = {"monomial": cert is not None, "n": args.n}
    if code == EXIT_OK and cert is None:
        code = EXIT_FAIL
    return out, code


def cmd_yd(args):
    G = _group(args.group)
    if args.cls is None:
        elems = None
    else:
        names = G.names
        g = names.index(args.cls) if args.cls in names else int(args.cls)
        elems = G.conjugacy_class(g)
    v = grouptype.conjugation_module(G, elems)
    if args.check == "ybe":
        b = grouptype.yd_braiding(v)
        return {"check": "ybe", "holds": check_ybe(b).holds, "details": {"dim": v.dim, **grouptype.faithfulness_report(v)}}
    return _image_report(grouptype.yd_braiding(v), args)


def cmd_cocycle(args):
    w = grouptype.cyclic_3cocycle(args.n, args.s)
    rep = grouptype.check_cocycle(w)
    details = {"normalized": rep.normalized, "quadruples_checked": rep.checked}
    holds = rep.holds and rep.normalized
    if args.degree is not None:
        module, rhs = grouptype.one_dim_twisted_module(w, args.degree % args.n)
        tw = grouptype.check_twisted_action(module, w)
        details.update({
            "degree": args.degree % args.n,
            "generator_constraint_rhs": str(rhs),
            "action": [str(a[0, 0]) for a in module.action],
            "twisted_action_holds": tw.holds,
        })
        holds = holds and tw.holds
    return {"check": "cocycle", "n": args.n, "s": args.s, "holds": holds, "details": details}


def cmd_braid(args):
    b_spec = args.bvs
    word = parse_braid_word(args.word, args.strands)
    m = _FIXTURE.match(b_spec)
    if m and m.group(4):
        if word.strands != 3:
            raise InputError("discussion-example fixtures act on 3 strands")
        gens = closure.discussion_example(int(m.group(4)))
        out = CycMatrix.identity(3, gens[0].N)
        for x in word.letters:
            g = gens[abs(x) - 1]
            out = out @ (g if x > 0 else g.inverse())
    else:
        out = eval_braid_word(resolve_bvs(b_spec), word, override=args.override_size_guard)
    return {"word": str(word), "strands": word.strands, "matrix": out.to_json(), "is_identity": out.is_identity()}


def cmd_image(args):
    gens = resolve_generators(args.bvs, args.n, args.override_size_guard)
    out, code = _image(gens, args)
    out["n"] = args.n
    out["bvs"] = args.bvs
    return out, code


# ---------------------------------------------------------------------------


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=True, help="JSON output (always on)")
    common.add_argument("--budget", type=int, default=None, help="closure element budget (default $BRAIDREP_BUDGET or 10^6)")
    common.add_argument("--override-size-guard", action="store_true", help="allow d^n > 4096, large closures")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized spot checks")
    common.add_argument("--projective", action="store_true", help="closure modulo scalars (image checks)")

    p = _Parser(prog="braidrep", description="Exact braid group representations from braided vector spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gaussian", parents=[common], help="checks on the Gaussian BVS")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--check", required=True,
                   choices=["ybe", "unitary", "relations", "conjugation", "gauss-sum", "jones", "factorization"])

    s = sub.add_parser("settheoretic", parents=[common], help="set-theoretic solutions")
    s.add_argument("--file", required=True, help="solution JSON, flip<d> or conjugation:<group>")
    s.add_argument("--twist", default=None, help="phase twist JSON")
    s.add_argument("--check", choices=["ybe", "image"], default="ybe")
    s.add_argument("--n", type=int, default=3)

    y = sub.add_parser("yd", parents=[common], help="conjugation Yetter-Drinfeld modules")
    y.add_argument("--group", required=True, help="Z<n>, S<k>, trivial or a group JSON file")
    y.add_argument("--class", dest="cls", default=None, help="element (index or name) whose class spans V")
    y.add_argument("--check", choices=["ybe", "image"], default="ybe")
    y.add_argument("--n", type=int, default=3)

    c = sub.add_parser("cocycle", parents=[common], help="cyclic 3-cocycles on Z/n")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--check", action="store_true", help="run the exhaustive cocycle identity (always done)")
    c.add_argument("--degree", type=int, default=None, help="also solve a 1-dim twisted module of this degree")

    b = sub.add_parser("braid", parents=[common], help="braid words")
    b.add_argument("action", choices=["eval"])
    b.add_argument("--word", required=True)
    b.add_argument("--bvs", required=True)
    b.add_argument("--strands", type=int, default=None)

    im = sub.add_parser("image", parents=[common], help="closure of the braid group image")
    im.add_argument("--bvs", required=True, help="gaussian:M, flip<d>, discussion-example:<k>, conjugation:<group> or a file")
    im.add_argument("--n", type=int, required=True)
    return p


_COMMANDS = {
    "gaussian": cmd_gaussian,
    "settheoretic": cmd_settheoretic,
    "yd": cmd_yd,
    "cocycle": cmd_cocycle,
    "braid": cmd_braid,
    "image": cmd_image,
}


def _emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True, default=_jsonable) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.budget is None and os.environ.get("BRAIDREP_BUDGET"):
            args.budget = closure.default_budget()
        res = _COMMANDS[args.command](args)
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except (YBEFails, ConstructionCheckFailed) as e:
        print(f"braidrep: {e}", file=sys.stderr)
        _emit({"check": args.command, "holds": False, "details": {"error": str(e), "witness": getattr(e, "witness", None)}})
        return EXIT_FAIL
    except (InputError, BraidrepError, OSError, ValueError, KeyError) as e:
        print(f"braidrep: {e}", file=sys.stderr)
        _emit({"error": str(e), "type": type(e).__name__})
        return EXIT_INPUT
    if isinstance(res, tuple):
        out, code = res
    else:
        out = res
        code = EXIT_OK if out.get("holds", True) else EXIT_FAIL
    _emit(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
