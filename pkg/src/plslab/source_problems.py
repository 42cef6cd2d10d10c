"""Generalized satisfiability source problems.

One data type, :class:`McaInstance`, covers max-constraint assignment with
explicit tables, its minimisation twin, positive not-all-equal 2-clauses and
weighted CNF. Variables take values ``1..r``; for the Boolean flavours value
``2`` means *true* and value ``1`` means *false*, so the literal index used by
the reductions is ``value - 1``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .core import ProblemBinding, Sense

TABLE = "table"
NAE = "nae"
CNF = "cnf"
SEMANTICS = (TABLE, NAE, CNF)

COLORS = ("blue", "red", "white")

Assignment = tuple[int, ...]


@dataclass(frozen=True)
class Constraint:
    scope: tuple[int, ...]
    table: Mapping[tuple[int, ...], int] | None = None
    weight: int = 0
    polarity: tuple[bool, ...] | None = None  # cnf only; True = positive literal

    def value(self, a: Sequence[int], semantics: str) -> int:
        vals = tuple(a[v] for v in self.scope)
        if semantics == TABLE:
            return self.table.get(vals, 0)
        if semantics == NAE:
            return self.weight if vals[0] != vals[1] else 0
        for val, pos in zip(vals, self.polarity):
            if (val == 2) == pos:
                return self.weight
        return 0

    def max_value(self, semantics: str) -> int:
        if semantics == TABLE:
            return max(self.table.values(), default=0)
        return self.weight

    def total_weight(self, semantics: str) -> int:
        if semantics == TABLE:
            return sum(self.table.values())
        return self.weight


@dataclass(frozen=True)
class McaInstance:
    variables: tuple[str, ...]
    domain_size: int
    constraints: tuple[Constraint, ...]
    semantics: str = TABLE
    sense: Sense = Sense.MAXIMIZE
    occurrence_bound: int | None = None
    coloring: tuple[str, ...] | None = None
    max_clause_len: int | None = None

    def __post_init__(self) -> None:
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.semantics!r}")
        if self.domain_size < 2:
            raise ValueError("domain size must be at least 2")
        if self.semantics in (NAE, CNF) and self.domain_size != 2:
            raise ValueError(f"{self.semantics} instances are binary")
        n = len(self.variables)
        for i, c in enumerate(self.constraints):
            if any(not 0 <= v < n for v in c.scope):
                raise ValueError(f"constraint {i} refers to an unknown variable")
            if self.semantics == NAE and len(c.scope) != 2:
                raise ValueError(f"nae constraint {i} must have two variables")
            if self.semantics == CNF:
                if c.polarity is None or len(c.polarity) != len(c.scope) or not c.scope:
                    raise ValueError(f"clause {i} needs one polarity per literal")
                if self.max_clause_len is not None and len(c.scope) > self.max_clause_len:
                    raise ValueError(f"clause {i} longer than h={self.max_clause_len}")
            if self.semantics == TABLE:
                if c.table is None:
                    raise ValueError(f"constraint {i} has no table")
                for key, w in c.table.items():
                    if len(key) != len(c.scope) or any(not 1 <= x <= self.domain_size for x in key):
                        raise ValueError(f"constraint {i} has a malformed table row {key}")
                    if w < 0:
                        raise ValueError(f"constraint {i} has a negative weight")
            elif c.weight < 0:
                raise ValueError(f"constraint {i} has a negative weight")
        if self.occurrence_bound is not None:
            for v, k in enumerate(self.occurrences()):
                if k > self.occurrence_bound:
                    raise ValueError(f"variable {self.variables[v]} occurs {k} > q times")
        if self.coloring is not None and len(self.coloring) != n:
            raise ValueError("coloring must give one color per variable")

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    def occurrences(self) -> list[int]:
        counts = [0] * self.num_vars
        for c in self.constraints:
            for v in c.scope:
                counts[v] += 1
        return counts

    def incidence(self) -> list[list[int]]:
        """Constraint indices per variable, in constraint order."""
        inc: list[list[int]] = [[] for _ in self.variables]
        for i, c in enumerate(self.constraints):
            for v in c.scope:
                inc[v].append(i)
        return inc

    def total_weight(self) -> int:
        return sum(c.total_weight(self.semantics) for c in self.constraints)

    def is_tricolored(self) -> bool:
        return not tricolor_violations(self)


def tricolor_violations(inst: McaInstance) -> list[str]:
    """Reasons why ``inst`` is outside the tri-colored (3,2,r) profile."""
    out = []
    if inst.semantics != TABLE:
        out.append("not a table instance")
    if inst.coloring is None:
        return out + ["no coloring"]
    n = inst.num_vars
    if n % 3:
        out.append("variable count not divisible by 3")
    for color in COLORS:
        k = inst.coloring.count(color)
        if k * 3 != n:
            out.append(f"{color} class has {k} variables, expected {n // 3}")
    for v, k in enumerate(inst.occurrences()):
        if k != 2:
            out.append(f"variable {inst.variables[v]} occurs {k} times")
    for i, c in enumerate(inst.constraints):
        if len(c.scope) != 3 or sorted(inst.coloring[v] for v in c.scope) != sorted(COLORS):
            out.append(f"constraint {i} is not rainbow-colored")
    return out


def check_total(inst: McaInstance, a: Sequence[int]) -> None:
    if len(a) != inst.num_vars:
        raise ValueError(f"partial assignment: {len(a)} of {inst.num_vars} variables")
    for v, x in enumerate(a):
        if not 1 <= x <= inst.domain_size:
            raise ValueError(f"value {x} of {inst.variables[v]} outside [1, {inst.domain_size}]")


def source_cost(inst: McaInstance, a: Sequence[int]) -> int:
    check_total(inst, a)
    return sum(c.value(a, inst.semantics) for c in inst.constraints)


def flip_neighbors(inst: McaInstance, a: Assignment) -> Iterator[tuple[tuple[int, int], Assignment]]:
    """All assignments at Hamming distance one, tagged ``(variable, new value)``."""
    for v in range(inst.num_vars):
        for x in range(1, inst.domain_size + 1):
            if x != a[v]:
                yield (v, x), a[:v] + (x,) + a[v + 1:]


def initial_assignment(inst: McaInstance) -> Assignment:
    return (1,) * inst.num_vars


def is_local_opt_source(inst: McaInstance, a: Sequence[int]) -> bool:
    a = tuple(a)
    base = source_cost(inst, a)
    better = (lambda c: c > base) if inst.sense is Sense.MAXIMIZE else (lambda c: c < base)
    # Only constraints touching the flipped variable change.
    inc = inst.incidence()
    sem = inst.semantics
    for (v, _), b in flip_neighbors(inst, a):
        cons = inst.constraints
        delta = sum(cons[i].value(b, sem) - cons[i].value(a, sem) for i in set(inc[v]))
        if better(base + delta):
            return False
    return True


def improving_flip(inst: McaInstance, a: Sequence[int]) -> tuple[int, int] | None:
    a = tuple(a)
    base = source_cost(inst, a)
    for move, b in flip_neighbors(inst, a):
        c = source_cost(inst, b)
        if (c > base) if inst.sense is Sense.MAXIMIZE else (c < base):
            return move
    return None


def source_binding(inst: McaInstance) -> ProblemBinding:
    def feasible(a) -> bool:
        try:
            check_total(inst, a)
        except ValueError:
            return False
        return True

    return ProblemBinding(
        kind=f"source/{inst.semantics}",
        instance=inst,
        sense=inst.sense,
        feasible=feasible,
        cost=lambda a: source_cost(inst, a),
        neighbors=lambda a: flip_neighbors(inst, a),
        initial=lambda: initial_assignment(inst),
    )


def all_assignments(inst: McaInstance) -> Iterator[Assignment]:
    return itertools.product(range(1, inst.domain_size + 1), repeat=inst.num_vars)


def as_minimization(inst: McaInstance) -> McaInstance:
    return McaInstance(
        inst.variables, inst.domain_size, inst.constraints, inst.semantics, Sense.MINIMIZE,
        inst.occurrence_bound, inst.coloring, inst.max_clause_len,
    )


def normalize(inst: McaInstance, floor: int = 2) -> McaInstance:
    """Shift every table so its smallest entry is at least ``floor``.

    Each constraint receives the same additive constant on every row, so all
    assignments move by the same amount and improving flips are unchanged.
    """
    if inst.semantics != TABLE:
        raise ValueError("normalize applies to table instances")
    low = min((min(c.table.values()) for c in inst.constraints if c.table), default=floor)
    shift = max(0, floor - low)
    cons = tuple(
        Constraint(c.scope, {k: w + shift for k, w in c.table.items()}) for c in inst.constraints
    )
    return McaInstance(
        inst.variables, inst.domain_size, cons, inst.semantics, inst.sense,
        inst.occurrence_bound, inst.coloring, inst.max_clause_len,
    )


# -- generators ---------------------------------------------------------------


def gen_tricolored_mca(
    num_constraints: int,
    r: int = 2,
    weight_low: int = 2,
    weight_high: int = 20,
    zero_fraction: float = 0.0,
    seed: int = 0,
    sense: Sense = Sense.MAXIMIZE,
) -> McaInstance:
    """Random (3,2,r) instance with rainbow scopes and two occurrences per variable."""
    m = num_constraints
    if m <= 0 or m % 2:
        raise ValueError("number of constraints must be positive and even")
    if weight_low < 2 or weight_high < weight_low:
        raise ValueError("need 2 <= weight_low <= weight_high")
    if not 0.0 <= zero_fraction <= 1.0:
        raise ValueError("zero_fraction must lie in [0, 1]")
    rng = random.Random(seed)
    k = m // 2
    names, colors = [], []
    slots: list[list[int]] = [[] for _ in range(m)]
    for ci, color in enumerate(COLORS):
        ids = list(range(ci * k, (ci + 1) * k))
        names += [f"{color[0]}{j + 1}" for j in range(k)]
        colors += [color] * k
        doubled = ids + ids
        rng.shuffle(doubled)
        for i, v in enumerate(doubled):
            slots[i].append(v)
    cons = []
    for scope in slots:
        rng.shuffle(scope)
        table = {}
        for row in itertools.product(range(1, r + 1), repeat=3):
            table[row] = 0 if rng.random() < zero_fraction else rng.randint(weight_low, weight_high)
        cons.append(Constraint(tuple(scope), table))
    return McaInstance(tuple(names), r, tuple(cons), TABLE, sense, 2, tuple(colors))


def gen_posnae(
    num_vars: int, num_clauses: int, all_pairs: bool = False, weight_high: int = 10, seed: int = 0
) -> McaInstance:
    if num_vars < 2:
        raise ValueError("POSNAE needs at least two variables")
    if weight_high < 1:
        raise ValueError("weight_high must be positive")
    rng = random.Random(seed)
    cons = []
    for _ in range(num_clauses):
        x, y = sorted(rng.sample(range(num_vars), 2))
        cons.append(Constraint((x, y), weight=rng.randint(1, weight_high)))
    if all_pairs:
        present = {c.scope for c in cons}
        for pair in itertools.combinations(range(num_vars), 2):
            if pair not in present:
                cons.append(Constraint(pair, weight=0))
    names = tuple(f"x{i + 1}" for i in range(num_vars))
    return McaInstance(names, 2, tuple(cons), NAE)


def gen_cnf(
    num_vars: int, num_clauses: int, max_clause_len: int = 3, weight_high: int = 10, seed: int = 0
) -> McaInstance:
    if max_clause_len < 1:
        raise ValueError("clause length bound h must be at least 1")
    if num_vars < 1 or weight_high < 1:
        raise ValueError("need at least one variable and positive weights")
    rng = random.Random(seed)
    cons = []
    for _ in range(num_clauses):
        size = rng.randint(1, min(max_clause_len, num_vars))
        scope = tuple(sorted(rng.sample(range(num_vars), size)))
        polarity = tuple(rng.random() < 0.5 for _ in scope)
        cons.append(Constraint(scope, weight=rng.randint(1, weight_high), polarity=polarity))
    names = tuple(f"x{i + 1}" for i in range(num_vars))
    return McaInstance(names, 2, tuple(cons), CNF, max_clause_len=max_clause_len)
