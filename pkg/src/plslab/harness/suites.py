"""Randomized suites that check reductions on generated instances.

Each suite turns an :class:`ExperimentConfig` into a :class:`SuiteReport`.
Trials are derived from ``(seed, trial index)`` only, so equal configs give
identical reports apart from the wall-time fields.
"""

from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable

from .. import set_problems as sp
from ..core import NeighborhoodTooLarge, PivotRule, Sense, Termination, local_search, verify_local_optimum
from ..greedy import greedy_cover, greedy_packing, is_irredundant
from ..reductions import (
    CORRECTED,
    PAPER_LITERAL,
    cost_offset,
    encode,
    is_consistent,
    paper_n,
    pull_back,
    reduce,
    target_binding,
)
from ..source_problems import (
    McaInstance,
    all_assignments,
    gen_cnf,
    gen_posnae,
    gen_tricolored_mca,
    is_local_opt_source,
    source_cost,
)
from .textio import assignment_of, digest, serialize_instance, serialize_solution

MCA_KINDS = (sp.SP, sp.SC, sp.W3DM, sp.X3C)
NAE_KINDS = (sp.SSP, sp.TS, sp.IP)
CNF_KINDS = (sp.SB, sp.HS, sp.CC)
REDUCTION_KINDS = MCA_KINDS + NAE_KINDS + CNF_KINDS
GREEDY_KINDS = (sp.SP, sp.SC)

# (constraints, r) grids; (6, 3) is left out for runtime. SC starts from the
# whole collection, whose 2-differ neighborhood at (4, 3) exceeds the cap.
PACKING_GRID = ((2, 2), (2, 3), (4, 2), (4, 3), (6, 2))
COVER_GRID = ((2, 2), (2, 3), (4, 2), (6, 2))
PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one suite run.

    Size fields left at ``None`` take per-trial defaults: SP cycles through
    :data:`PACKING_GRID` and SC through :data:`COVER_GRID`, W3DM/X3C use two
    constraints with ``r`` alternating between 2 and 3, POSNAE draws 2..6 variables and 1..10 clauses, CNF draws
    1..6 variables (1..5 for SB) and 1..10 clauses.
    """

    reduction: str
    trials: int = 100
    seed: int = 0
    num_constraints: int | None = None
    r: int | None = None
    num_vars: int | None = None
    num_clauses: int | None = None
    h: int = 3
    weight_low: int = 2
    weight_high: int = 9
    zero_fraction: float = 0.0
    pivot: str = "first_improvement"
    ts_scheme: str = CORRECTED
    ts_separation: str = sp.TWO_SIDED
    medium_factor: int = 3
    k: int | None = None
    cap: int = sp.DEFAULT_CAP
    ground_cap: int = sp.DEFAULT_GROUND_CAP
    budget: int = 100_000
    pq_scan: bool = False

    def __post_init__(self) -> None:
        if self.reduction not in REDUCTION_KINDS:
            raise ValueError(f"unknown reduction {self.reduction!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.cap < 1 or self.ground_cap < 1 or self.budget < 0:
            raise ValueError("caps must be positive and the budget non-negative")
        if self.ts_scheme not in (CORRECTED, PAPER_LITERAL):
            raise ValueError(f"unknown TS scheme {self.ts_scheme!r}")
        if self.ts_separation not in (sp.TWO_SIDED, sp.ONE_SIDED):
            raise ValueError(f"unknown separation mode {self.ts_separation!r}")
        if self.weight_high < 1 or self.weight_low > self.weight_high:
            raise ValueError("weight range is empty")
        PivotRule.parse(self.pivot)

    def trial_seed(self, index: int) -> int:
        return self.seed * 1_000_003 + index


@dataclass
class TrialRecord:
    index: int
    seed: int
    status: str
    reason: str = ""
    source_digest: str = ""
    reduced_digest: str = ""
    steps: int = 0
    final_cost: int | None = None
    consistent: bool | None = None
    predicate: str = ""
    violation: str | None = None
    pullback_local_opt: bool | None = None
    offset_ok: bool | None = None
    wall_time: float = 0.0
    counterexample: dict | None = None


@dataclass
class SuiteReport:
    suite: str
    config: ExperimentConfig
    trials: list[TrialRecord] = field(default_factory=list)
    observation: str | None = None

    def count(self, status: str) -> int:
        return sum(t.status == status for t in self.trials)

    @property
    def passed(self) -> int:
        return self.count(PASS)

    @property
    def failed(self) -> int:
        return self.count(FAIL)

    @property
    def skipped(self) -> int:
        return self.count(SKIPPED)

    @property
    def ok(self) -> bool:
        """True when no trial failed, or when failures are only observations."""
        return self.failed == 0 or self.observation is not None

    def summary(self) -> dict:
        return {"pass": self.passed, "fail": self.failed, "skipped": self.skipped, "total": len(self.trials)}

    def to_dict(self, with_times: bool = True) -> dict:
        trials = []
        for t in self.trials:
            d = asdict(t)
            if not with_times:
                d.pop("wall_time")
            trials.append(d)
        return {
            "suite": self.suite,
            "config": asdict(self.config),
            "observation": self.observation,
            "summary": self.summary(),
            "trials": trials,
        }

    def to_json(self, with_times: bool = True) -> str:
        return json.dumps(self.to_dict(with_times), indent=2, sort_keys=True) + "\n"

    def to_text(self, with_times: bool = True) -> str:
        c = self.config
        s = self.summary()
        out = [
            f"# suite {self.suite} reduction {c.reduction} trials {c.trials} seed {c.seed}",
            f"# pass {s['pass']} fail {s['fail']} skipped {s['skipped']}",
        ]
        if self.observation:
            out.append(f"# observation mode: {self.observation}")
        for t in self.trials:
            line = f"trial {t.index} seed {t.seed} {t.status} steps {t.steps} cost {t.final_cost}"
            if t.reason:
                line += f" reason {t.reason!r}"
            if with_times:
                line += f" time {t.wall_time:.3f}"
            out.append(line)
        for t in self.trials:
            if t.counterexample:
                out.append("---")
                out.append(f"# counterexample trial {t.index} seed {t.seed}: {t.reason}")
                out.append(f"# source sha256 {t.source_digest}")
                for key in ("source", "reduced", "solution", "pullback", "assignment"):
                    if key in t.counterexample:
                        out.append(f"# {key}")
                        out.append(t.counterexample[key].rstrip("\n"))
        return "\n".join(out) + "\n"


# -- instance generation -------------------------------------------------------------


def generate_source(cfg: ExperimentConfig, index: int) -> McaInstance:
    seed = cfg.trial_seed(index)
    rng = random.Random(seed)
    kind = cfg.reduction
    if kind in MCA_KINDS:
        if kind in (sp.W3DM, sp.X3C):
            m = cfg.num_constraints or 2
            r = cfg.r or (2 + index % 2)
        elif cfg.num_constraints is None or cfg.r is None:
            grid = COVER_GRID if kind == sp.SC else PACKING_GRID
            m, r = grid[index % len(grid)]
            m, r = cfg.num_constraints or m, cfg.r or r
        else:
            m, r = cfg.num_constraints, cfg.r
        sense = Sense.MINIMIZE if kind == sp.SC else Sense.MAXIMIZE
        return gen_tricolored_mca(m, r, cfg.weight_low, cfg.weight_high, cfg.zero_fraction, seed, sense)
    if kind in NAE_KINDS:
        n = cfg.num_vars or rng.randint(2, 6)
        c = cfg.num_clauses or rng.randint(1, 10)
        return gen_posnae(n, c, kind == sp.IP, cfg.weight_high, seed)
    n = cfg.num_vars or rng.randint(1, 5 if kind == sp.SB else 6)
    c = cfg.num_clauses or rng.randint(1, 10)
    return gen_cnf(n, c, cfg.h, cfg.weight_high, seed)


def reduce_with(cfg: ExperimentConfig, src: McaInstance):
    options = {}
    if cfg.reduction == sp.TS:
        options["scheme"] = cfg.ts_scheme
    if cfg.reduction in (sp.W3DM, sp.X3C):
        options["medium_factor"] = cfg.medium_factor
    out = reduce(cfg.reduction, src, **options)
    if cfg.reduction == sp.TS and cfg.ts_separation != out.target.separation:
        out = replace(out, target=replace(out.target, separation=cfg.ts_separation))
    return out


def _dump(src, out=None, sol=None, pulled=None) -> dict:
    d = {"source": serialize_instance(src)}
    if out is not None:
        d["reduced"] = serialize_instance(out.target)
    if sol is not None:
        d["solution"] = serialize_solution(out.reduction, sol)
    if pulled is not None:
        d["pullback"] = assignment_of(src, pulled)
    return d


# -- search suites --------------------------------------------------------------------


def _search_trial(cfg: ExperimentConfig, index: int, check_pullback: bool) -> TrialRecord:
    t0 = time.perf_counter()
    seed = cfg.trial_seed(index)
    src = generate_source(cfg, index)
    rec = TrialRecord(index, seed, PASS, source_digest=digest(src))
    out = reduce_with(cfg, src)
    rec.reduced_digest = digest(out.target)
    rule = PivotRule.parse(cfg.pivot, seed)
    bind = target_binding(out, cfg.k, cap=cfg.cap, ground_cap=cfg.ground_cap)
    try:
        rep = local_search(bind, None, rule, cfg.budget)
    except NeighborhoodTooLarge as exc:
        rec.status, rec.reason = SKIPPED, f"cap exceeded: {exc}"
        rec.wall_time = time.perf_counter() - t0
        return rec
    except AssertionError as exc:
        rec.status, rec.reason = FAIL, f"neighborhood bound violated: {exc}"
        rec.counterexample = _dump(src, out)
        rec.wall_time = time.perf_counter() - t0
        return rec
    rec.steps, rec.final_cost = rep.steps, rep.final_cost
    if rep.terminated is Termination.BUDGET_EXHAUSTED:
        rec.status, rec.reason = SKIPPED, "budget_exhausted"
        rec.wall_time = time.perf_counter() - t0
        return rec
    verdict = is_consistent(out, rep.final)
    rec.consistent, rec.predicate, rec.violation = verdict.consistent, verdict.predicate, verdict.violation
    pulled = pull_back(out, src, rep.final)
    if verdict:
        try:
            delta = cost_offset(out)
        except ValueError:
            rec.offset_ok = None
        else:
            rec.offset_ok = rep.final_cost == source_cost(src, pulled) + delta
    problems = []
    if not verdict:
        problems.append(f"inconsistent local optimum: {verdict.violation}")
    if rec.offset_ok is False:
        problems.append("offset identity broken")
    if check_pullback:
        rec.pullback_local_opt = is_local_opt_source(src, pulled)
        if not rec.pullback_local_opt:
            problems.append("pulled-back assignment is not 1-flip optimal")
    if cfg.pq_scan and cfg.reduction == sp.W3DM and out.target.n <= 14:
        scan = sp.binding(out.target, p=2, q=4, w3dm_cap=14)
        if not verify_local_optimum(scan, rep.final).locally_optimal:
            problems.append("improving (2,4) neighbor at the catalog fixpoint")
    if problems:
        rec.status, rec.reason = FAIL, "; ".join(problems)
        rec.counterexample = _dump(src, out, rep.final, pulled)
    rec.wall_time = time.perf_counter() - t0
    return rec


def _consistency_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    return _search_trial(cfg, index, False)


def _pullback_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    return _search_trial(cfg, index, True)


def _run(
    name: str, cfg: ExperimentConfig, trial: Callable[[ExperimentConfig, int], TrialRecord], workers: int
) -> SuiteReport:
    indices = range(cfg.trials)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(trial, [cfg] * cfg.trials, indices))
    else:
        records = [trial(cfg, i) for i in indices]
    return SuiteReport(name, cfg, sorted(records, key=lambda r: r.index), _observation(cfg))


def _observation(cfg: ExperimentConfig) -> str | None:
    if cfg.reduction != sp.TS:
        return None
    notes = []
    if cfg.ts_scheme == PAPER_LITERAL:
        notes.append("scheme: paper_literal")
    if cfg.ts_separation == sp.ONE_SIDED:
        notes.append("separation: one_sided")
    return ", ".join(notes) or None



def run_consistency_suite(cfg: ExperimentConfig, workers: int = 1) -> SuiteReport:
    """Search every reduced instance to a local optimum and check consistency."""
    return _run("consistency", cfg, _consistency_trial, workers)


def run_pullback_suite(cfg: ExperimentConfig, workers: int = 1) -> SuiteReport:
    """As the consistency suite, plus 1-flip optimality of the pulled-back assignment."""
    return _run("pullback", cfg, _pullback_trial, workers)


def replay_trial(cfg: ExperimentConfig, index: int, check_pullback: bool = True) -> TrialRecord:
    return _search_trial(cfg, index, check_pullback)


# -- offsets -------------------------------------------------------------------------


def _offset_source(cfg: ExperimentConfig, index: int) -> McaInstance:
    kind = cfg.reduction
    if kind in MCA_KINDS:
        small = replace(cfg, num_constraints=2, r=cfg.r or (2 + index % 2))
    else:
        rng = random.Random(cfg.trial_seed(index))
        small = replace(cfg, num_vars=min(cfg.num_vars or rng.randint(1 if kind in CNF_KINDS else 2, 4), 4))
    return generate_source(small, index)


def _offset_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    t0 = time.perf_counter()
    src = _offset_source(cfg, index)
    out = reduce_with(cfg, src)
    rec = TrialRecord(index, cfg.trial_seed(index), PASS, source_digest=digest(src), reduced_digest=digest(out.target))
    delta = cost_offset(out)
    checked = 0
    for a in all_assignments(src):
        s = encode(out, a)
        checked += 1
        target_cost = sp.cost(out.target, s)
        if not (sp.feasible(out.target, s) and is_consistent(out, s) and target_cost == source_cost(src, a) + delta):
            rec.status = FAIL
            rec.reason = f"assignment {a}: target {target_cost} != source {source_cost(src, a)} + {delta}"
            rec.counterexample = _dump(src, out, s, a)
            break
    rec.steps = checked
    rec.offset_ok = rec.status == PASS
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_offset_suite(cfg: ExperimentConfig, workers: int = 1) -> SuiteReport:
    """Check the affine offset on every encoded assignment of tiny sources."""
    if cfg.reduction == sp.TS and cfg.ts_scheme == PAPER_LITERAL:
        raise ValueError("the paper_literal TS scheme has no affine offset")
    return _run("offset", cfg, _offset_trial, workers)


# -- greedy --------------------------------------------------------------------------


def random_greedy_instance(kind: str, seed: int, max_ground: int = 12, max_sets: int = 10) -> sp.SetSystem:
    rng = random.Random(seed)
    n = rng.randint(1, max_ground)
    count = rng.randint(1, max_sets)
    density = rng.uniform(0.1, 0.6)
    sets = [frozenset(e for e in range(n) if rng.random() < density) for _ in range(count)]
    if kind == sp.SC:
        covered = frozenset().union(*sets)
        missing = frozenset(range(n)) - covered
        if missing:
            sets[rng.randrange(count)] |= missing
    equal = seed % 10 == 0
    weights = tuple(5 if equal else rng.randint(0, 20) for _ in sets)
    bound = rng.randint(1, count) if kind == sp.SP else None
    return sp.SetSystem(kind, n, tuple(sets), weights, bound=bound)


@dataclass(frozen=True)
class GreedyConfig:
    kind: str
    trials: int = 200
    seed: int = 0
    max_ground: int = 12
    max_sets: int = 10

    def __post_init__(self) -> None:
        if self.kind not in GREEDY_KINDS:
            raise ValueError("greedy suites exist for SP and SC only")
        if self.trials < 1 or self.max_ground < 1 or self.max_sets < 1:
            raise ValueError("trials and sizes must be positive")


def _greedy_trial(cfg: GreedyConfig, index: int) -> TrialRecord:
    t0 = time.perf_counter()
    seed = cfg.seed * 1_000_003 + index
    inst = random_greedy_instance(cfg.kind, seed, cfg.max_ground, cfg.max_sets)
    rec = TrialRecord(index, seed, PASS, reduced_digest=digest(inst))
    s = greedy_packing(inst) if cfg.kind == sp.SP else greedy_cover(inst)
    rec.final_cost = sp.cost(inst, s)
    cert = verify_local_optimum(sp.binding(inst, 1), s)
    rec.steps = cert.neighborhood_size_scanned
    problems = []
    if not cert.locally_optimal:
        problems.append(f"improving 1-differ move {cert.witness[0]}")
    if cfg.kind == sp.SC and not is_irredundant(inst, s):
        problems.append("cover is redundant")
    if problems:
        rec.status, rec.reason = FAIL, "; ".join(problems)
        rec.counterexample = {"reduced": serialize_instance(inst), "solution": serialize_solution(cfg.kind, s)}
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_greedy_suite(cfg: GreedyConfig) -> SuiteReport:
    """Certify greedy outputs as 1-differ local optima by exhaustive scan."""
    records = [_greedy_trial(cfg, i) for i in range(cfg.trials)]
    shell = ExperimentConfig(cfg.kind, cfg.trials, cfg.seed)
    return SuiteReport(f"greedy-{cfg.kind}", shell, records)


# -- observation modes -----------------------------------------------------------------


def run_ts_literal_observation(cfg: ExperimentConfig) -> SuiteReport:
    """Pull-back suite for TS under the paper_literal weight scheme.

    Failures are reported as observations and do not make the report fail.
    """
    return run_pullback_suite(replace(cfg, reduction=sp.TS, ts_scheme=PAPER_LITERAL))


def _n_formula_trial(cfg: ExperimentConfig, index: int) -> TrialRecord:
    """Try to place the standard matching inside the formula's ground set."""
    t0 = time.perf_counter()
    cfg = replace(cfg, reduction=sp.W3DM)
    src = generate_source(cfg, index)
    out = reduce_with(cfg, src)
    sizes = paper_n(src)
    gm = out.meta["gadgets"]
    base = 2 * gm.r * gm.n_vars
    rec = TrialRecord(index, cfg.trial_seed(index), PASS, source_digest=digest(src), reduced_digest=digest(out.target))
    a = tuple(random.Random(rec.seed).randint(1, gm.r) for _ in range(gm.n_vars))
    # the formula leaves room for one zero element per variable: collapse both copies onto it
    squeeze = lambda e: e if e < base else base + (e - base) // 2  # noqa: E731
    triples = sorted(tuple(map(squeeze, t)) for t in gm.standard_triples(a))
    clash = None
    for coord in range(3):
        seen: dict[int, tuple] = {}
        for t in triples:
            if t[coord] in seen:
                clash = (coord, seen[t[coord]], t)
                break
            seen[t[coord]] = t
        if clash:
            break
    rec.steps = len(triples)
    if clash is not None:
        coord, t1, t2 = clash
        rec.status = FAIL
        rec.reason = (
            f"N formula {sizes['formula']} vs inventory {sizes['inventory_two_zero_copies']}: "
            f"standard triples {tuple(x + 1 for x in t1)} and {tuple(x + 1 for x in t2)} "
            f"share {'bgh'[coord]}-element {t1[coord] + 1}"
        )
        rec.counterexample = {"source": serialize_instance(src), "assignment": assignment_of(src, a)}
    rec.wall_time = time.perf_counter() - t0
    return rec


def run_n_formula_observation(cfg: ExperimentConfig) -> SuiteReport:
    """Show that the standard matching does not fit the formula's ground set."""
    records = [_n_formula_trial(cfg, i) for i in range(cfg.trials)]
    return SuiteReport("n-formula", replace(cfg, reduction=sp.W3DM), records, "W3DM N formula")
