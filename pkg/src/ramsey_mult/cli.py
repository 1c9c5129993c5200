"""Command-line entry point: ``ramsey-mult <subcommand> ...`` (or ``python -m ramsey_mult``).

Exit codes: 0 computed and the claim holds, 1 computed and the claim fails,
2 usage error or the computation could not be carried out.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import sys
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .additive_search import (
    AdditiveSystem,
    LimitExceeded,
    export_cnf,
    find_threshold,
)
from .constructions import NAMED_CONSTRUCTIONS, LiftSpec, build_named, build_omega, lift, named_runs
from .core import EquationSpec, read_colouring, write_colouring
from .counting import CountQuery, count_runs, count_solutions
from .real_intervals import certify_interval_lower_bound, check_sumfree, load_template
from .verify import BudgetExceeded, minimize, pattern_soundness, stability_check, verify_lemma31

Outcome = Tuple[int, dict, str]


def _range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


def _eq(text: str) -> EquationSpec:
    try:
        return EquationSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def _digest(result: dict) -> str:
    return hashlib.sha256(json.dumps(result, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


# --- subcommands -------------------------------------------------------------


def cmd_count(args) -> Outcome:
    lo, hi = args.range
    col = read_colouring(args.colouring) if args.colouring else None
    rep = count_solutions(CountQuery(args.eq, hi, lo, col, args.non_degenerate), method=args.method)
    result = {"eq": list(args.eq.exponents), "lo": lo, "hi": hi, **rep.as_dict()}
    lines = [f"equation {args.eq.label()} on [{lo}, {hi}]: total {rep.total}, non-degenerate {rep.non_degenerate}"]
    for c, (t, n) in sorted(rep.per_colour.items()):
        lines.append(f"  colour {c}: total {t}, non-degenerate {n}")
    return 0, result, "\n".join(lines)


def cmd_construct(args) -> Outcome:
    eq = EquationSpec((1, 1))
    if args.name:
        r, runs = named_runs(args.name, args.n)
        source = {"name": args.name}
        col = build_named(args.name, args.n) if args.out else None
    else:
        if args.lift:
            col = lift(LiftSpec(load_template(args.lift), args.n, args.m))
            source = {"lift": args.lift, "M": args.m}
        else:
            col = build_omega(read_colouring(args.omega), args.n)
            source = {"omega": args.omega}
        r, runs = col.r, col.runs()
    rep = count_runs(eq, runs, r)
    if args.out:
        write_colouring(col, args.out)
    result = {
        "N": args.n,
        "colours": r,
        "runs": [[s, e, c] for s, e, c in runs] if len(runs) <= 1000 else len(runs),
        "mono_xy_z": rep.as_dict(),
        **source,
    }
    text = f"colouring of [2, {args.n}] with {r} colours, {len(runs)} runs; monochromatic xy=z solutions: {rep.total}"
    return 0, result, text


def cmd_search(args) -> Outcome:
    kind = args.system.replace("-", "_")
    system = AdditiveSystem(kind, args.eq if kind.startswith("rado") else None)
    rep = find_threshold(system, args.colours, args.limit, keep_extremals=args.enumerate_extremals, jobs=args.jobs)
    result = rep.as_dict(include_extremals=args.enumerate_extremals, timing=args.timing)
    text = (
        f"{system.label()} with {args.colours} colours: threshold {rep.threshold}; "
        f"{rep.extremal_count} extremal colourings of [1, {rep.threshold - 1}] up to colour permutation "
        f"({rep.raw_extremal_count} raw); {rep.nodes_visited} nodes"
    )
    if args.enumerate_extremals and rep.extremals:
        text += "\n" + "\n".join("  " + c.word() for c in rep.extremals)
    if args.cnf:
        n = args.cnf_n if args.cnf_n is not None else rep.threshold - 1
        nvars, ncl = export_cnf(system, args.colours, n, args.cnf)
        result["cnf"] = {"N": n, "variables": nvars, "clauses": ncl}
        text += f"\nwrote CNF for N={n}: {nvars} variables, {ncl} clauses"
    return 0, result, text


def cmd_interval_check(args) -> Outcome:
    tmpl = load_template(args.template)
    res = check_sumfree(tmpl, args.eq)
    result = {
        "eq": list(args.eq.exponents),
        "domain": tmpl.domain(),
        "free": res.free,
        "witness": None if res.free else [str(v) for v in res.witness],
        "witness_colour": res.colour,
    }
    if args.certify:
        kind = "schur" if args.eq.exponents == (1, 1) else "rado"
        rec = certify_interval_lower_bound(kind, args.eq, args.colours or tmpl.r, tmpl)
        with open(args.certify, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(rec))
        result["certificate"] = rec["digest"]
    if res.free:
        text = f"{tmpl.domain()} colouring is free of {args.eq.label()} solutions"
    else:
        text = f"monochromatic solution in colour {res.colour}: " + ", ".join(map(str, res.witness))
    return (0 if res.free else 1), result, text


def cmd_verify(args) -> Outcome:
    if args.target == "lemma31":
        if args.sweep:
            rng = range(2, args.sweep + 1)
            failures = [[a, l, k] for a in rng for l in rng for k in rng if not verify_lemma31(a, l, k)]  # noqa: E741
            result = {"sweep": args.sweep, "failures": failures}
            text = f"nine-element pattern sweep over [2, {args.sweep}]^3: {len(failures)} failures"
            return (1 if failures else 0), result, text
        ok = verify_lemma31(args.a, args.l, args.k)
        result = {"a": args.a, "l": args.l, "k": args.k, "holds": ok}
        return (0 if ok else 1), result, f"(a, l, k) = ({args.a}, {args.l}, {args.k}): {'holds' if ok else 'FAILS'}"
    rep = pattern_soundness(
        args.eq, args.b, args.s, args.w, args.colours, args.trials, args.seed, args.mode, args.lcm
    )
    result = {
        "eq": list(args.eq.exponents),
        "b": args.b,
        "S": args.s,
        "W": args.w,
        "colours": args.colours,
        "mode": args.mode,
        "lcm": args.lcm,
        **rep.as_dict(),
    }
    text = (
        f"{rep.trials} colourings (seed {args.seed}): {rep.returned} witnesses returned, "
        f"{len(rep.violations)} violations"
    )
    return (1 if rep.violations else 0), result, text


def cmd_minimize(args) -> Outcome:
    rep = minimize(args.eq, args.colours, args.n, args.budget)
    result = rep.as_dict(timing=args.timing)
    text = (
        f"minimum monochromatic {args.eq.label()} count over {args.colours}-colourings of [2, {args.n}]: "
        f"{rep.minimum} ({rep.participating} participating elements, {rep.nodes} nodes)"
    )
    return 0, result, text


def cmd_stability(args) -> Outcome:
    rep = stability_check(read_colouring(args.colouring))
    text = f"M = {rep.M}, prefix [2, {rep.prefix_end}]: {rep.status}"
    return (0 if rep.ok else 1), rep.as_dict(), text


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ramsey-mult", description="Monochromatic solution counts, constructions and searches.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed: bool = False):
        sp.add_argument("--json", nargs="?", const="-", metavar="PATH", help="write canonical JSON ('-' for stdout)")
        sp.add_argument("--timing", action="store_true", help="include wall time in the JSON result")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("count", help="count (monochromatic) solutions of x1^a1...xk^ak = y")
    sp.add_argument("--eq", type=_eq, required=True, help="exponents, e.g. 1,2")
    sp.add_argument("--range", type=_range, required=True, metavar="LO..HI")
    sp.add_argument("--colouring", metavar="FILE")
    sp.add_argument("--non-degenerate", action="store_true")
    sp.add_argument("--method", default="auto", choices=["auto", "formula", "runs", "dense", "enumerate"])
    common(sp)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("construct", help="build a colouring of [2, N]")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--name", choices=NAMED_CONSTRUCTIONS)
    src.add_argument("--lift", metavar="TEMPLATE.json")
    src.add_argument("--omega", metavar="FILE", help="colouring of small integers indexed by Omega(x)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, help="lift threshold M (default: least M with M^T >= N)")
    sp.add_argument("--out", metavar="FILE")
    common(sp)
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("search", help="Schur, shifted Schur and Rado numbers")
    sp.add_argument("--system", required=True, choices=["schur", "schur-star", "rado", "rado-star"])
    sp.add_argument("--eq", type=_eq, default=None)
    sp.add_argument("--colours", type=int, required=True)
    sp.add_argument("--limit", type=int, default=200)
    sp.add_argument("--enumerate-extremals", action="store_true")
    sp.add_argument("--cnf", metavar="PATH")
    sp.add_argument("--cnf-n", type=int, help="interval length for the CNF (default: threshold - 1)")
    sp.add_argument("--jobs", type=int, default=None, help="worker cap (default: RAMSEY_MULT_JOBS or CPU count)")
    common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("interval-check", help="check a real-interval template for monochromatic solutions")
    sp.add_argument("--eq", type=_eq, required=True)
    sp.add_argument("--template", required=True)
    sp.add_argument("--colours", type=int, default=None)
    sp.add_argument("--certify", metavar="OUT.json")
    common(sp)
    sp.set_defaults(func=cmd_interval_check)

    sp = sub.add_parser("verify", help="pattern checks")
    vsub = sp.add_subparsers(dest="target", required=True)
    v1 = vsub.add_parser("lemma31", help="nine-element pattern, exhaustive over 2-colourings")
    v1.add_argument("--a", type=int, default=5)
    v1.add_argument("--l", type=int, default=2)
    v1.add_argument("--k", type=int, default=3)
    v1.add_argument("--sweep", type=int, metavar="MAX", help="check every (a, l, k) in [2, MAX]^3")
    common(v1)
    v1.set_defaults(func=cmd_verify)
    v2 = vsub.add_parser("pattern-m", help="run the grid pattern finder on seeded colourings")
    v2.add_argument("--eq", type=_eq, default=EquationSpec((1, 1)))
    v2.add_argument("--b", type=int, default=3)
    v2.add_argument("--s", type=int, default=5)
    v2.add_argument("--w", type=int, default=64)
    v2.add_argument("--colours", type=int, default=2)
    v2.add_argument("--trials", type=int, default=1000)
    v2.add_argument("--mode", default="mixed", choices=["random", "structured", "perturbed", "mixed"])
    v2.add_argument("--lcm", action="store_true", help="use lcm(1..S) instead of S! as the progression step")
    common(v2, seed=True)
    v2.set_defaults(func=cmd_verify)

    sp = sub.add_parser("minimize", help="exact minimum number of monochromatic solutions")
    sp.add_argument("--eq", type=_eq, default=EquationSpec((1, 1)))
    sp.add_argument("--colours", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--budget", type=int, default=48, help="maximum number of participating elements")
    common(sp)
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("stability", help="is a long prefix monochromatic when few solutions remain?")
    sp.add_argument("--colouring", required=True)
    common(sp)
    sp.set_defaults(func=cmd_stability)
    return p


def _versions() -> Dict[str, str]:
    return {"ramsey_mult": __version__, "python": platform.python_version(), "numpy": np.__version__}


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "command", None) == "search" and args.system.startswith("rado") and args.eq is None:
        print("ramsey-mult search: error: --eq is required for rado systems", file=sys.stderr)
        return 2
    func: Callable[..., Outcome] = args.func
    try:
        code, result, text = func(args)
    except (ValueError, LimitExceeded, BudgetExceeded, OSError) as exc:
        print(f"ramsey-mult {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.json is not None:
        manifest = {
            "subcommand": args.command if args.command != "verify" else f"verify {args.target}",
            "argv": argv,
            "seed": getattr(args, "seed", None),
            "versions": _versions(),
            "digest": _digest(result),
        }
        payload = canonical_json({"manifest": manifest, "result": result})
        if args.json == "-":
            sys.stdout.write(payload)
        else:
            with open(args.json, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(payload)
            print(text)
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
