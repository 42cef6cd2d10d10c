"""Generic improvement-based local search over pluggable problem bindings.

A :class:`ProblemBinding` bundles what a local-search problem needs: a
feasibility test, an exact integer cost, a neighbor stream and a canonical
starting solution. The engine never looks inside solutions; it only compares
costs, so any hashable value can serve as a solution.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator

Solution = Hashable
Move = Hashable

DEFAULT_ENUMERATION_CAP = 2_000_000


class Sense(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class InfeasibleStart(ValueError):
    """The solution handed to the engine is not feasible for the instance."""

    def __init__(self, detail: str = "") -> None:
        super().__init__("infeasible start" + (f": {detail}" if detail else ""))


class NeighborhoodTooLarge(RuntimeError):
    """Exhaustive enumeration would exceed the configured cap."""

    def __init__(self, cap: int, detail: str = "") -> None:
        msg = f"neighborhood too large (cap {cap})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.cap = cap


@dataclass(frozen=True)
class ProblemBinding:
    kind: str
    instance: Any
    sense: Sense
    feasible: Callable[[Solution], bool]
    cost: Callable[[Solution], int]
    neighbors: Callable[[Solution], Iterable[tuple[Move, Solution]]]
    initial: Callable[[], Solution]

    def better(self, a: int, b: int) -> bool:
        """True when cost ``a`` is strictly better than cost ``b``."""
        return a > b if self.sense is Sense.MAXIMIZE else a < b


@dataclass(frozen=True)
class PivotRule:
    name: str = "first_improvement"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.name not in ("first_improvement", "best_improvement", "random_improvement"):
            raise ValueError(f"unknown pivot rule {self.name!r}")

    @classmethod
    def parse(cls, text: str, seed: int | None = None) -> "PivotRule":
        return cls(text.replace("-", "_"), seed)


FIRST = PivotRule("first_improvement")
BEST = PivotRule("best_improvement")


class Termination(str, enum.Enum):
    LOCAL_OPT = "local_opt"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass
class SearchReport:
    start: Solution
    start_cost: int
    trajectory: list[tuple[Move, int]] = field(default_factory=list)
    final: Solution = None
    final_cost: int = 0
    terminated: Termination = Termination.LOCAL_OPT

    @property
    def steps(self) -> int:
        return len(self.trajectory)

    def costs(self) -> list[int]:
        return [self.start_cost] + [c for _, c in self.trajectory]


class Verdict(str, enum.Enum):
    LOCALLY_OPTIMAL = "locally_optimal"
    IMPROVABLE = "improvable"


@dataclass(frozen=True)
class Certificate:
    solution: Solution
    cost: int
    neighborhood_size_scanned: int
    witness: tuple[Move, Solution, int] | None = None

    @property
    def verdict(self) -> Verdict:
        return Verdict.IMPROVABLE if self.witness is not None else Verdict.LOCALLY_OPTIMAL

    @property
    def locally_optimal(self) -> bool:
        return self.witness is None


def _require_feasible(binding: ProblemBinding, s: Solution) -> None:
    if not binding.feasible(s):
        raise InfeasibleStart(f"{binding.kind} solution {s!r}")


def _improving(binding: ProblemBinding, s: Solution, base: int) -> Iterator[tuple[Move, Solution, int]]:
    for move, t in binding.neighbors(s):
        c = binding.cost(t)
        if binding.better(c, base):
            yield move, t, c


def improvement_step(
    binding: ProblemBinding,
    s: Solution,
    rule: PivotRule = FIRST,
    rng: random.Random | None = None,
    *,
    base_cost: int | None = None,
) -> tuple[Move, Solution, int] | None:
    """Return one strictly improving neighbor of ``s`` chosen by ``rule``.

    Ties under best improvement go to the earliest neighbor in enumeration
    order. Random improvement draws uniformly among all improving neighbors
    with ``rng`` (seeded from ``rule.seed`` when not supplied).
    """
    _require_feasible(binding, s)
    base = binding.cost(s) if base_cost is None else base_cost
    if rule.name == "first_improvement":
        return next(_improving(binding, s, base), None)
    if rule.name == "best_improvement":
        best = None
        for cand in _improving(binding, s, base):
            if best is None or binding.better(cand[2], best[2]):
                best = cand
        return best
    pool = list(_improving(binding, s, base))
    if not pool:
        return None
    rng = rng if rng is not None else random.Random(rule.seed)
    return pool[rng.randrange(len(pool))]


def local_search(
    binding: ProblemBinding,
    start: Solution | None = None,
    rule: PivotRule = FIRST,
    budget: int = 10_000,
) -> SearchReport:
    """Apply improving moves until none is left or ``budget`` moves were taken."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    s = binding.initial() if start is None else start
    _require_feasible(binding, s)
    rng = random.Random(rule.seed)
    cost = binding.cost(s)
    report = SearchReport(start=s, start_cost=cost)
    while True:
        if report.steps >= budget:
            # A local optimum at the budget boundary still counts as one.
            step = improvement_step(binding, s, FIRST, base_cost=cost)
            report.terminated = Termination.LOCAL_OPT if step is None else Termination.BUDGET_EXHAUSTED
            break
        step = improvement_step(binding, s, rule, rng, base_cost=cost)
        if step is None:
            report.terminated = Termination.LOCAL_OPT
            break
        move, s, cost = step
        report.trajectory.append((move, cost))
    report.final = s
    report.final_cost = cost
    return report


def verify_local_optimum(
    binding: ProblemBinding, s: Solution, cap: int = DEFAULT_ENUMERATION_CAP
) -> Certificate:
    """Exhaustively scan the neighborhood of ``s``.

    Raises :class:`NeighborhoodTooLarge` once more than ``cap`` neighbors
    have been produced, so an oversized neighborhood can never pass silently.
    """
    _require_feasible(binding, s)
    base = binding.cost(s)
    scanned = 0
    for move, t in binding.neighbors(s):
        scanned += 1
        if scanned > cap:
            raise NeighborhoodTooLarge(cap, binding.kind)
        c = binding.cost(t)
        if binding.better(c, base):
            return Certificate(s, base, scanned, (move, t, c))
    return Certificate(s, base, scanned)
