"""Command-line client: ``plslab <command> ...``.

Exit codes: 0 when every check passed, 1 when a counterexample was found,
2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .. import set_problems as sp
from ..core import NeighborhoodTooLarge, PivotRule, local_search, verify_local_optimum
from ..greedy import greedy_cover, greedy_packing
from ..reductions import CORRECTED, PAPER_LITERAL, is_consistent, pull_back
from ..source_problems import (
    McaInstance,
    gen_cnf,
    gen_posnae,
    gen_tricolored_mca,
    source_binding,
    source_cost,
)
from ..core import Sense
from .suites import (
    REDUCTION_KINDS,
    ExperimentConfig,
    GreedyConfig,
    reduce_with,
    run_consistency_suite,
    run_greedy_suite,
    run_n_formula_observation,
    run_offset_suite,
    run_pullback_suite,
    run_ts_literal_observation,
)
from .textio import ASSIGNMENT, ParseError, parse_instance, parse_solution, serialize_instance, serialize_solution

OK, COUNTEREXAMPLE, USAGE = 0, 1, 2
PIVOTS = {"first": "first_improvement", "best": "best_improvement", "random": "random_improvement"}
SCHEMES = {"corrected": CORRECTED, "paper-literal": PAPER_LITERAL}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _load_source(path: str) -> McaInstance:
    inst = parse_instance(_read(path))
    if not isinstance(inst, McaInstance):
        raise UsageError(f"{path} holds a {inst.kind} instance, expected a source problem")
    return inst


def _load_solution(path: str, inst):
    names = inst.variables if isinstance(inst, McaInstance) else None
    tag, sol = parse_solution(_read(path), names)
    want = ASSIGNMENT if isinstance(inst, McaInstance) else inst.kind
    if tag != want:
        raise UsageError(f"solution is tagged {tag}, instance needs {want}")
    return sol


def _binding(inst, k: int | None):
    if isinstance(inst, McaInstance):
        return source_binding(inst)
    return sp.binding(inst, 1 if k is None else k)


def _solution_text(inst, sol) -> str:
    if isinstance(inst, McaInstance):
        return serialize_solution(ASSIGNMENT, sol, inst.variables)
    return serialize_solution(inst.kind, sol)


# -- commands ----------------------------------------------------------------------


def cmd_gen(args) -> int:
    p = args.problem
    if p in ("MCA", "MINCA"):
        sense = Sense.MINIMIZE if p == "MINCA" else Sense.MAXIMIZE
        inst = gen_tricolored_mca(
            args.constraints, args.r, args.weight_low, args.weight_high, args.zero_fraction, args.seed, sense
        )
    elif p == "POSNAE":
        inst = gen_posnae(args.vars, args.clauses, args.all_pairs, args.weight_high, args.seed)
    else:
        inst = gen_cnf(args.vars, args.clauses, args.h, args.weight_high, args.seed)
    _write(serialize_instance(inst), args.out)
    return OK


def _reduction_config(args, kind: str) -> ExperimentConfig:
    return ExperimentConfig(
        kind,
        ts_scheme=SCHEMES[args.scheme],
        ts_separation=args.separation,
        medium_factor=args.medium_factor,
    )


def cmd_reduce(args) -> int:
    src = _load_source(args.source)
    out = reduce_with(_reduction_config(args, args.to), src)
    text = serialize_instance(out.target)
    _write(f"# reduced from {src.semantics} source, W = {out.w}\n" + text, args.out)
    return OK


def cmd_solve(args) -> int:
    inst = parse_instance(_read(args.file))
    if args.algo != "local-search":
        if isinstance(inst, McaInstance):
            raise UsageError("greedy algorithms need an SP or SC instance")
        want = sp.SP if args.algo == "greedy-packing" else sp.SC
        if inst.kind != want:
            raise UsageError(f"{args.algo} needs a {want} instance, got {inst.kind}")
        sol = greedy_packing(inst) if want == sp.SP else greedy_cover(inst)
        _write(_solution_text(inst, sol) + f"# cost {sp.cost(inst, sol)}\n", args.out)
        return OK
    bind = _binding(inst, args.k)
    start = _load_solution(args.start, inst) if args.start else None
    rep = local_search(bind, start, PivotRule(PIVOTS[args.pivot], args.seed), args.budget)
    trailer = f"# cost {rep.final_cost}\n# steps {rep.steps}\n# termination {rep.terminated.value}\n"
    _write(_solution_text(inst, rep.final) + trailer, args.out)
    return OK


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.file))
    sol = _load_solution(args.solution, inst)
    bind = _binding(inst, args.k)
    if not bind.feasible(sol):
        print("infeasible")
        return COUNTEREXAMPLE
    cert = verify_local_optimum(bind, sol)
    print(f"feasible cost {cert.cost} scanned {cert.neighborhood_size_scanned}")
    if cert.locally_optimal:
        print("locally optimal")
        return OK
    move, better, c = cert.witness
    print(f"improvable: move {move} reaches cost {c}")
    sys.stdout.write(_solution_text(inst, better))
    return COUNTEREXAMPLE


def cmd_suite(args) -> int:
    if args.mode == "greedy":
        if args.reduction not in (sp.SP, sp.SC):
            raise UsageError("greedy suites exist for SP and SC only")
        report = run_greedy_suite(GreedyConfig(args.reduction, args.trials, args.seed))
    else:
        cfg = ExperimentConfig(
            args.reduction,
            trials=args.trials,
            seed=args.seed,
            pivot=PIVOTS[args.pivot],
            ts_scheme=SCHEMES[args.scheme],
            ts_separation=args.separation,
            medium_factor=args.medium_factor,
            budget=args.budget,
            pq_scan=args.pq_scan,
        )
        if args.mode == "consistency":
            report = run_consistency_suite(cfg, args.workers)
        elif args.mode == "pullback":
            report = run_pullback_suite(cfg, args.workers)
        elif args.mode == "offset":
            report = run_offset_suite(cfg, args.workers)
        elif args.mode == "ts-literal":
            report = run_ts_literal_observation(replace(cfg, reduction=sp.TS))
        else:
            report = run_n_formula_observation(replace(cfg, reduction=sp.W3DM))
    _write(report.to_text(), args.report)
    if args.json:
        Path(args.json).write_text(report.to_json())
    s = report.summary()
    print(f"{report.suite} {report.config.reduction}: {s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped",
          file=sys.stderr)
    return OK if report.ok else COUNTEREXAMPLE


def cmd_pullback(args) -> int:
    src = _load_source(args.source)
    reduced = parse_instance(_read(args.reduced))
    out = reduce_with(_reduction_config(args, args.reduction), src)
    if reduced != out.target:
        raise UsageError("the reduced file is not the reduction of the source under these options")
    sol = _load_solution(args.solution, out.target)
    if not sp.feasible(out.target, sol):
        raise UsageError("the solution is infeasible for the reduced instance")
    verdict = is_consistent(out, sol)
    a = pull_back(out, src, sol)
    note = "consistent" if verdict else f"inconsistent ({verdict.violation}); initial assignment returned"
    text = serialize_solution(ASSIGNMENT, a, src.variables)
    _write(f"# {verdict.predicate}: {note}\n# source cost {source_cost(src, a)}\n" + text, args.out)
    return OK


# -- argument parsing -----------------------------------------------------------------


def _add_reduction_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="corrected", help="TS pair-weight scheme")
    p.add_argument("--separation", choices=[sp.TWO_SIDED, sp.ONE_SIDED], default=sp.TWO_SIDED)
    p.add_argument("--medium-factor", type=int, default=3, help="W3DM medium triples weigh this many W")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random source instance")
    g.add_argument("--problem", required=True, choices=["MCA", "MINCA", "POSNAE", "CNF"])
    g.add_argument("--constraints", type=int, default=2, help="MCA/MINCA constraint count (even)")
    g.add_argument("--r", type=int, default=2, help="MCA/MINCA domain size")
    g.add_argument("--vars", type=int, default=4)
    g.add_argument("--clauses", type=int, default=5)
    g.add_argument("--h", type=int, default=3, help="CNF clause length bound")
    g.add_argument("--weight-low", type=int, default=2)
    g.add_argument("--weight-high", type=int, default=9)
    g.add_argument("--zero-fraction", type=float, default=0.0)
    g.add_argument("--all-pairs", action="store_true", help="POSNAE: close every variable pair")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reduce", help="reduce a source instance to a set problem")
    r.add_argument("--from", dest="source", required=True)
    r.add_argument("--to", required=True, choices=REDUCTION_KINDS)
    _add_reduction_flags(r)
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    s = sub.add_parser("solve", help="run local search or a greedy algorithm")
    s.add_argument("--file", required=True)
    s.add_argument("--algo", choices=["local-search", "greedy-packing", "greedy-cover"], default="local-search")
    s.add_argument("--pivot", choices=sorted(PIVOTS), default="first")
    s.add_argument("--seed", type=int, default=0, help="seed for the random pivot")
    s.add_argument("--k", type=int, help="k-differ radius (default 1)")
    s.add_argument("--budget", type=int, default=100_000)
    s.add_argument("--start", help="starting solution file (default: canonical initial solution)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check feasibility and local optimality of a solution")
    v.add_argument("--file", required=True)
    v.add_argument("--solution", required=True)
    v.add_argument("--k", type=int)
    v.set_defaults(func=cmd_verify)

    u = sub.add_parser("suite", help="run a randomized verification suite")
    u.add_argument("--reduction", required=True, choices=REDUCTION_KINDS)
    u.add_argument("--trials", type=int, default=100)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument(
        "--mode",
        choices=["consistency", "pullback", "offset", "greedy", "ts-literal", "n-formula"],
        default="pullback",
    )
    u.add_argument("--pivot", choices=sorted(PIVOTS), default="first")
    u.add_argument("--budget", type=int, default=100_000)
    u.add_argument("--pq-scan", action="store_true", help="W3DM: also scan the (2,4) neighborhood at N <= 14")
    u.add_argument("--workers", type=int, default=1)
    _add_reduction_flags(u)
    u.add_argument("--report", help="text report path (default: stdout)")
    u.add_argument("--json", help="also write the structured report here")
    u.set_defaults(func=cmd_suite)

    b = sub.add_parser("pullback", help="map a reduced-instance solution back to an assignment")
    b.add_argument("--reduction", required=True, choices=REDUCTION_KINDS)
    b.add_argument("--source", required=True)
    b.add_argument("--reduced", required=True)
    b.add_argument("--solution", required=True)
    _add_reduction_flags(b)
    b.add_argument("--out")
    b.set_defaults(func=cmd_pullback)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, UsageError, NeighborhoodTooLarge, ValueError) as exc:
        print(f"plslab: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
