"""POSNAE to set splitting, test set and intersection pattern.

Literal elements ``x_0`` and ``x_1`` stand for giving ``x`` the value 1 and
2 respectively (index = value - 1).
"""

from __future__ import annotations

import itertools
import math

from ..set_problems import IP, SSP, TS, TWO_SIDED, IpInstance, Partition, SetSystem, Sets, SetVector
from ..source_problems import NAE, Assignment, McaInstance
from .common import (
    ANY_PARTITION,
    POSITION_CONSISTENT,
    POSITIVE_ELEMENT_CONSISTENT,
    ConsistencyVerdict,
    ReductionOutput,
    bad,
    big_w,
    ok,
    require_semantics,
)

CORRECTED = "corrected"
PAPER_LITERAL = "paper_literal"
TS_SCHEMES = (CORRECTED, PAPER_LITERAL)


def merged_clauses(inst: McaInstance) -> dict[tuple[int, int], int]:
    """Clause weight per unordered variable pair, parallel clauses summed."""
    out: dict[tuple[int, int], int] = {}
    for i, c in enumerate(inst.constraints):
        x, y = c.scope
        if x == y:
            raise ValueError(f"clause {i + 1} repeats a variable")
        key = (min(x, y), max(x, y))
        out[key] = out.get(key, 0) + c.weight
    return out


# -- set splitting -------------------------------------------------------------


def reduce_posnae_ssp(inst: McaInstance) -> ReductionOutput:
    require_semantics(inst, NAE, "SSP reduction")
    sets = tuple(frozenset(c.scope) for c in inst.constraints)
    weights = tuple(c.weight for c in inst.constraints)
    target = SetSystem(SSP, inst.num_vars, sets, weights, labels=inst.variables)
    return ReductionOutput(SSP, target, inst, big_w(inst))


def _ssp_consistency(out, p: Partition) -> ConsistencyVerdict:
    return ok(ANY_PARTITION)


def _ssp_decode(out, p: Partition) -> Assignment:
    return tuple(1 if v in p.side1 else 2 for v in range(out.source.num_vars))


def _ssp_encode(out, a: Assignment) -> Partition:
    one = frozenset(v for v, x in enumerate(a) if x == 1)
    return Partition(one, frozenset(range(len(a))) - one)


# -- test set ----------------------------------------------------------------


def _ts_pair_weights(inst: McaInstance, w: int, scheme: str) -> dict[tuple[int, int], int]:
    clauses = merged_clauses(inst)
    n = inst.num_vars
    pw = {}
    for u, v in itertools.combinations(range(2 * n), 2):
        x, i = divmod(u, 2)
        y, j = divmod(v, 2)
        if x == y:
            pw[(u, v)] = 1
            continue
        cw = clauses.get((x, y))
        if scheme == CORRECTED:
            pw[(u, v)] = w + 1 + (cw if cw is not None and i != j else 0)
        elif cw is not None:
            pw[(u, v)] = cw + 1 + w if i != j else 1
        else:
            pw[(u, v)] = w + 1 if i == j else 1
    return pw


def ts_w(inst: McaInstance) -> int:
    """W for the test-set construction.

    Each clause weight lands on two pairs, ``(x_0, y_1)`` and ``(x_1, y_0)``,
    so W has to exceed twice the total clause weight.
    """
    return 2 * inst.total_weight() + 1


def reduce_posnae_ts(inst: McaInstance, scheme: str = CORRECTED, w: int | None = None) -> ReductionOutput:
    """``w`` overrides the default :func:`ts_w` weight unit."""
    require_semantics(inst, NAE, "TS reduction")
    if scheme not in TS_SCHEMES:
        raise ValueError(f"unknown TS weight scheme {scheme!r}")
    w = ts_w(inst) if w is None else w
    n = inst.num_vars
    sets = tuple(frozenset({e}) for e in range(2 * n))
    labels = tuple(f"{x}_{i}" for x in inst.variables for i in (0, 1))
    target = SetSystem(
        TS, 2 * n, sets, (0,) * (2 * n), bound=n,
        pair_weights=_ts_pair_weights(inst, w, scheme), separation=TWO_SIDED, labels=labels,
    )
    return ReductionOutput(TS, target, inst, w, {"scheme": scheme})


def _ts_chosen(out, s: Sets) -> list[int]:
    return sorted(e for i in s.indices for e in out.target.sets[i])


def _ts_consistency(out, s: Sets) -> ConsistencyVerdict:
    n = out.source.num_vars
    if len(s.indices) != n:
        return bad(POSITIVE_ELEMENT_CONSISTENT, f"{len(s.indices)} singletons chosen, expected {n}")
    elems = set(_ts_chosen(out, s))
    for x in range(n):
        if 2 * x in elems and 2 * x + 1 in elems:
            return bad(POSITIVE_ELEMENT_CONSISTENT, f"both literals of {out.source.variables[x]} chosen")
    return ok(POSITIVE_ELEMENT_CONSISTENT)


def _ts_decode(out, s: Sets) -> Assignment:
    a = [0] * out.source.num_vars
    for e in _ts_chosen(out, s):
        a[e // 2] = e % 2 + 1
    return tuple(a)


def _ts_encode(out, a: Assignment) -> Sets:
    return Sets(frozenset(2 * x + val - 1 for x, val in enumerate(a)))


def _ts_offset(out) -> int:
    if out.meta["scheme"] != CORRECTED:
        raise ValueError("no affine offset under the paper_literal TS scheme")
    w = out.w
    return (w + 1) * math.comb(out.source.num_vars, 2)


# -- intersection pattern ------------------------------------------------------


def reduce_posnae_ip(inst: McaInstance) -> ReductionOutput:
    require_semantics(inst, NAE, "IP reduction")
    clauses = merged_clauses(inst)
    n = inst.num_vars
    for pair in itertools.combinations(range(n), 2):
        if pair not in clauses:
            x, y = (inst.variables[v] for v in pair)
            raise ValueError(f"variables {x} and {y} share no clause (close the instance first)")
    w = big_w(inst)
    order = sorted(clauses)
    m = 2 * len(order)
    gamma = [0] * n
    for x, y in order:
        gamma[x] += 1
        gamma[y] += 1
    labels: list[str] = []
    ids: dict[tuple, int] = {}

    def elem(key: tuple, label: str) -> int:
        if key not in ids:
            ids[key] = len(labels)
            labels.append(label)
        return ids[key]

    names = inst.variables
    for j, (x, y) in enumerate(order):
        for v in (x, y):
            for i in (0, 1):
                elem(("c", v, i, j), f"{names[v]}_{i}^C{j + 1}")
    for v in range(n):
        for i in (0, 1):
            for pad in range(1, m - 2 * gamma[v] + v + 2):
                elem(("p", v, i, pad), f"{names[v]}_{i}^{pad}")
    donors = []
    for v in range(n):
        for i in (0, 1):
            members = set()
            for j, (x, y) in enumerate(order):
                if v in (x, y):
                    other = y if v == x else x
                    members.add(ids[("c", v, i, j)])
                    members.add(ids[("c", other, 1 - i, j)])
            members.update(ids[("p", v, i, pad)] for pad in range(1, m - 2 * gamma[v] + v + 2))
            donors.append(frozenset(members))
    a = [[2] * n for _ in range(n)]
    b = [[0] * n for _ in range(n)]
    for p in range(n):
        a[p][p] = m + p + 1
        b[p][p] = w
    for (x, y), cw in clauses.items():
        b[x][y] = b[y][x] = cw
    target = IpInstance(
        tuple(map(tuple, a)), tuple(map(tuple, b)), tuple(donors), len(labels), tuple(labels)
    )
    return ReductionOutput(IP, target, inst, w, {"m": m, "gamma": tuple(gamma)})


def _ip_consistency(out, v: SetVector) -> ConsistencyVerdict:
    tgt = out.target
    for p, d in enumerate(v.indices):
        size = len(tgt.donors[d])
        if size != tgt.a[p][p]:
            return bad(POSITION_CONSISTENT, f"position {p + 1} holds a set of size {size}, expected {tgt.a[p][p]}")
    return ok(POSITION_CONSISTENT)


def _ip_decode(out, v: SetVector) -> Assignment:
    return tuple(d % 2 + 1 for d in v.indices)


def _ip_encode(out, a: Assignment) -> SetVector:
    return SetVector(tuple(2 * p + val - 1 for p, val in enumerate(a)))


def _ip_offset(out) -> int:
    return out.w * out.source.num_vars


HANDLERS = {
    SSP: (_ssp_consistency, _ssp_decode, _ssp_encode, lambda out: 0),
    TS: (_ts_consistency, _ts_decode, _ts_encode, _ts_offset),
    IP: (_ip_consistency, _ip_decode, _ip_encode, _ip_offset),
}
