"""Reductions from the source problems to the weighted set problems.

Every ``reduce_*`` function returns a :class:`ReductionOutput`. The helpers
below dispatch on its ``reduction`` field:

* :func:`is_consistent` checks the standard-solution predicate,
* :func:`pull_back` maps a target solution to a source assignment,
* :func:`encode` goes the other way for a given assignment,
* :func:`cost_offset` is the constant separating the two costs on
  consistent solutions,
* :func:`target_binding` gives the local-search binding with the
  neighborhood the hardness argument uses.
"""

from __future__ import annotations

from ..core import ProblemBinding
from ..set_problems import (
    CC, DEFAULT_CAP, DEFAULT_GROUND_CAP, HS, IP, SB, SC, SENSE, SP, SSP, TS, W3DM, X3C,
    binding, feasible, init_solution, cost,
)
from ..source_problems import Assignment, McaInstance, initial_assignment
from . import cnf, nae, packing, w3dm
from .cnf import reduce_cnf_cc, reduce_cnf_hs, reduce_cnf_sb
from .common import ConsistencyVerdict, ReductionOutput, big_w
from .nae import CORRECTED, PAPER_LITERAL, reduce_posnae_ip, reduce_posnae_ssp, reduce_posnae_ts
from .packing import reduce_mca_sp, reduce_minca_sc
from .w3dm import paper_n, reduce_mca_w3dm, reduce_mca_x3c, w3dm_move_catalog

_HANDLERS = {**packing.HANDLERS, **nae.HANDLERS, **cnf.HANDLERS, **w3dm.HANDLERS}

REDUCERS = {
    W3DM: reduce_mca_w3dm,
    X3C: reduce_mca_x3c,
    SP: reduce_mca_sp,
    SC: reduce_minca_sc,
    SSP: reduce_posnae_ssp,
    TS: reduce_posnae_ts,
    IP: reduce_posnae_ip,
    SB: reduce_cnf_sb,
    HS: reduce_cnf_hs,
    CC: reduce_cnf_cc,
}

# neighborhood radius used by each hardness argument (W3DM/X3C use the catalog)
THEOREM_K = {SP: 2, SC: 2, SSP: 1, TS: 1, SB: 1, HS: 1, IP: 1, CC: 1, W3DM: 6, X3C: 6}


def reduce(kind: str, inst: McaInstance, **options) -> ReductionOutput:
    try:
        fn = REDUCERS[kind]
    except KeyError:
        raise ValueError(f"unknown reduction target {kind!r}") from None
    return fn(inst, **options)


def _handler(out: ReductionOutput):
    return _HANDLERS[out.reduction]


def is_consistent(out: ReductionOutput, s) -> ConsistencyVerdict:
    if not feasible(out.target, s):
        raise ValueError("solution is not feasible for the reduced instance")
    return _handler(out)[0](out, s)


def pull_back(out: ReductionOutput, source: McaInstance, s) -> Assignment:
    if source != out.source:
        raise ValueError("source instance does not match the reduction output")
    if is_consistent(out, s):
        return _handler(out)[1](out, s)
    return initial_assignment(source)


def encode(out: ReductionOutput, a: Assignment):
    return _handler(out)[2](out, tuple(a))


def cost_offset(out: ReductionOutput) -> int:
    return _handler(out)[3](out)


def target_binding(
    out: ReductionOutput,
    k: int | None = None,
    *,
    cap: int = DEFAULT_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
) -> ProblemBinding:
    """Binding for the reduced instance.

    By default SP and SC use the 2-differ neighborhood and the other set
    problems the 1-differ one; W3DM and X3C use the move catalog. An
    explicit ``k`` overrides the radius (ignored for the catalog kinds).
    """
    kind = out.reduction
    if kind not in (W3DM, X3C):
        return binding(out.target, THEOREM_K[kind] if k is None else k, cap=cap, ground_cap=ground_cap)
    inst = out.target
    return ProblemBinding(
        kind=kind,
        instance=inst,
        sense=SENSE[kind],
        feasible=lambda s: feasible(inst, s),
        cost=lambda s: cost(inst, s),
        neighbors=lambda s: w3dm_move_catalog(out, s),
        initial=lambda: init_solution(inst),
    )


__all__ = [
    "CORRECTED", "PAPER_LITERAL", "REDUCERS", "THEOREM_K", "ConsistencyVerdict", "ReductionOutput",
    "big_w", "cost_offset", "encode", "is_consistent", "paper_n", "pull_back", "reduce",
    "reduce_cnf_cc", "reduce_cnf_hs", "reduce_cnf_sb", "reduce_mca_sp", "reduce_mca_w3dm",
    "reduce_mca_x3c", "reduce_minca_sc", "reduce_posnae_ip", "reduce_posnae_ssp",
    "reduce_posnae_ts", "target_binding", "w3dm_move_catalog",
]
