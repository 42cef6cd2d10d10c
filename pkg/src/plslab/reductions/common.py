"""Shared types for the reductions: the big weight, outputs and verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from ..core import Sense
from ..source_problems import McaInstance, tricolor_violations

# predicate names
STANDARD_ASSIGNMENT = "standard_assignment"
SET_CONSISTENT = "set_consistent"
POSITIVE_ELEMENT_CONSISTENT = "positive_element_consistent"
SINGLE_SET_CONSISTENT = "single_set_consistent"
ELEMENT_CONSISTENT = "element_consistent"
POSITION_CONSISTENT = "position_consistent"
ANY_PARTITION = "any_partition"


def big_w(inst: McaInstance) -> int:
    """Smallest integer strictly above the total weight of ``inst``."""
    return inst.total_weight() + 1


@dataclass(frozen=True)
class ReductionOutput:
    """A reduced instance together with the bookkeeping needed to map back.

    ``reduction`` is the target kind (``"SP"``, ``"W3DM"``, ...). ``meta`` is
    a read-only mapping whose keys depend on the reduction.
    """

    reduction: str
    target: Any
    source: McaInstance
    w: int
    meta: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ConsistencyVerdict:
    consistent: bool
    predicate: str
    violation: str | None = None

    def __post_init__(self) -> None:
        if not self.consistent and not self.violation:
            raise ValueError("an inconsistent verdict needs a witness")

    def __bool__(self) -> bool:
        return self.consistent


def ok(predicate: str) -> ConsistencyVerdict:
    return ConsistencyVerdict(True, predicate)


def bad(predicate: str, why: str) -> ConsistencyVerdict:
    return ConsistencyVerdict(False, predicate, why)


def require_semantics(inst: McaInstance, semantics: str, what: str) -> None:
    if inst.semantics != semantics:
        raise ValueError(f"{what} needs a {semantics} instance, got {inst.semantics}")


def require_tricolored(inst: McaInstance, sense: Sense) -> None:
    problems = tricolor_violations(inst)
    if problems:
        raise ValueError("instance is not tri-colored: " + "; ".join(problems))
    if inst.sense is not sense:
        raise ValueError(f"expected a {sense.value} instance")


def literal_names(inst: McaInstance) -> tuple[str, ...]:
    """Element labels ``x, ~x`` for every variable, in element order."""
    out = []
    for name in inst.variables:
        out += [name, "~" + name]
    return tuple(out)


def lit(var: int, value: int) -> int:
    """Element index of the literal made true by giving ``var`` this value.

    Literal elements are laid out as ``x`` (even index) and ``~x`` (odd).
    Value 2 (true) selects ``x``; value 1 selects ``~x``.
    """
    return 2 * var + (0 if value == 2 else 1)
