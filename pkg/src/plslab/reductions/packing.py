"""Tri-colored MCA to set packing, and MINCA to set cover.

Both targets share one encoding. For a constraint ``C_i`` and values
``(a, b, c)`` the set ``C_i^{a,b,c}`` holds the family marker ``c_i`` and, per
scope variable, either the single element ``x_a`` (first occurrence of ``x``
in constraint order) or every ``x_j`` with ``j != a`` (second occurrence).
Two such sets meet on ``x``'s elements exactly when they disagree on ``x``.
"""

from __future__ import annotations

import itertools

from ..core import Sense
from ..set_problems import SC, SP, SetSystem, Sets
from ..source_problems import Assignment, McaInstance
from .common import (
    SET_CONSISTENT,
    ConsistencyVerdict,
    ReductionOutput,
    bad,
    big_w,
    ok,
    require_tricolored,
)


def _constraint_sets(inst: McaInstance, var_base: int, c_base: int):
    r = inst.domain_size
    first = {v: occ[0] for v, occ in enumerate(inst.incidence())}
    for i, con in enumerate(inst.constraints):
        for key in itertools.product(range(1, r + 1), repeat=len(con.scope)):
            elems = {c_base + i}
            for v, val in zip(con.scope, key):
                base = var_base + v * r
                if first[v] == i:
                    elems.add(base + val - 1)
                else:
                    elems.update(base + j - 1 for j in range(1, r + 1) if j != val)
            yield i, key, frozenset(elems), con.table.get(key, 0)


def _labels(inst: McaInstance, m: int, with_e: bool) -> tuple[str, ...]:
    out = [f"e{i + 1}" for i in range(m)] if with_e else []
    out += [f"c{i + 1}" for i in range(m)]
    out += [f"{x}_{j}" for x in inst.variables for j in range(1, inst.domain_size + 1)]
    return tuple(out)


def reduce_mca_sp(inst: McaInstance) -> ReductionOutput:
    require_tricolored(inst, Sense.MAXIMIZE)
    m = len(inst.constraints)
    w = big_w(inst)
    sets, weights, family = [], [], []
    for i in range(m):
        sets.append(frozenset({i}))
        weights.append(1)
        family.append(None)
    index = {}
    for i, key, elems, wt in _constraint_sets(inst, 2 * m, m):
        index[(i, key)] = len(sets)
        sets.append(elems)
        weights.append(wt)
        family.append((i, key))
    n = 2 * m + inst.num_vars * inst.domain_size
    target = SetSystem(SP, n, tuple(sets), tuple(weights), bound=m, labels=_labels(inst, m, True))
    return ReductionOutput(SP, target, inst, w, {"family": tuple(family), "index": index})


def reduce_minca_sc(inst: McaInstance) -> ReductionOutput:
    require_tricolored(inst, Sense.MINIMIZE)
    m = len(inst.constraints)
    w = big_w(inst)
    sets, weights, family, index = [], [], [], {}
    for i, key, elems, wt in _constraint_sets(inst, m, 0):
        index[(i, key)] = len(sets)
        sets.append(elems)
        weights.append(wt + w)
        family.append((i, key))
    n = m + inst.num_vars * inst.domain_size
    target = SetSystem(SC, n, tuple(sets), tuple(weights), labels=_labels(inst, m, False))
    return ReductionOutput(SC, target, inst, w, {"family": tuple(family), "index": index})


def consistency(out: ReductionOutput, s: Sets) -> ConsistencyVerdict:
    m = len(out.source.constraints)
    family = out.meta["family"]
    chosen = sorted(s.indices)
    if len(chosen) != m:
        return bad(SET_CONSISTENT, f"{len(chosen)} sets chosen, expected {m}")
    per_family: dict[int, list[int]] = {}
    for idx in chosen:
        fam = family[idx]
        if fam is None:
            return bad(SET_CONSISTENT, f"singleton set {idx} chosen")
        per_family.setdefault(fam[0], []).append(idx)
    for i in range(m):
        got = per_family.get(i, [])
        if len(got) != 1:
            return bad(SET_CONSISTENT, f"constraint {i + 1} has {len(got)} sets")
    if out.reduction == SP:
        sets = out.target.sets
        for a, b in itertools.combinations(chosen, 2):
            if sets[a] & sets[b]:
                return bad(SET_CONSISTENT, f"sets {a} and {b} intersect")
    return ok(SET_CONSISTENT)


def decode(out: ReductionOutput, s: Sets) -> Assignment:
    inst = out.source
    first = {v: occ[0] for v, occ in enumerate(inst.incidence())}
    a = [0] * inst.num_vars
    for idx in s.indices:
        i, key = out.meta["family"][idx]
        for v, val in zip(inst.constraints[i].scope, key):
            if first[v] == i:
                a[v] = val
    return tuple(a)


def encode(out: ReductionOutput, a: Assignment) -> Sets:
    index = out.meta["index"]
    picks = set()
    for i, con in enumerate(out.source.constraints):
        picks.add(index[(i, tuple(a[v] for v in con.scope))])
    return Sets(frozenset(picks))


def offset(out: ReductionOutput) -> int:
    if out.reduction == SP:
        return 0
    return len(out.source.constraints) * out.w


HANDLERS = {kind: (consistency, decode, encode, offset) for kind in (SP, SC)}
