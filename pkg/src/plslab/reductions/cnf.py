"""Weighted CNF to set basis, hitting set and comparative containment.

The ground set is the literal set ``x, ~x`` laid out as ``2v`` (positive) and
``2v + 1`` (negated).
"""

from __future__ import annotations

import itertools

from ..set_problems import CC, HS, SB, Basis, CcInstance, Elements, SetSystem
from ..source_problems import CNF, Assignment, Constraint, McaInstance
from .common import (
    ELEMENT_CONSISTENT,
    SINGLE_SET_CONSISTENT,
    ConsistencyVerdict,
    ReductionOutput,
    bad,
    big_w,
    lit,
    literal_names,
    ok,
    require_semantics,
)


def _check(inst: McaInstance, what: str) -> None:
    require_semantics(inst, CNF, what)
    for i, c in enumerate(inst.constraints):
        if len(set(c.scope)) != len(c.scope):
            raise ValueError(f"clause {i + 1} repeats a variable")


def clause_literals(c: Constraint) -> frozenset[int]:
    return frozenset(lit(v, 2 if pos else 1) for v, pos in zip(c.scope, c.polarity))


def satisfying_literal_sets(c: Constraint) -> list[frozenset[int]]:
    """One literal set per satisfying assignment of the clause's variables."""
    out = []
    for vals in itertools.product((2, 1), repeat=len(c.scope)):
        if any((val == 2) == pos for val, pos in zip(vals, c.polarity)):
            out.append(frozenset(lit(v, val) for v, val in zip(c.scope, vals)))
    return out


def clause_family_w(inst: McaInstance) -> int:
    """W for the constructions that emit one set per satisfying clause assignment.

    Those sets carry ``w_C`` once per satisfying assignment, so W must exceed
    that larger total for the W-bearing sets to dominate.
    """
    return 1 + sum(c.weight * len(satisfying_literal_sets(c)) for c in inst.constraints)


def _literal_decode(out, chosen) -> Assignment:
    a = [0] * out.source.num_vars
    for e in chosen:
        a[e // 2] = 2 if e % 2 == 0 else 1
    return tuple(a)


def _literal_consistency(out, chosen, predicate: str) -> ConsistencyVerdict:
    n = out.source.num_vars
    if len(chosen) != n:
        return bad(predicate, f"{len(chosen)} literals chosen, expected {n}")
    for x in range(n):
        if 2 * x in chosen and 2 * x + 1 in chosen:
            return bad(predicate, f"complementary pair {out.source.variables[x]}")
    return ok(predicate)


# -- set basis -----------------------------------------------------------------


def reduce_cnf_sb(inst: McaInstance, w: int | None = None) -> ReductionOutput:
    """``w`` overrides the default :func:`clause_family_w` weight unit."""
    _check(inst, "SB reduction")
    w = clause_family_w(inst) if w is None else w
    n = inst.num_vars
    sets, weights = [], []
    for e in range(2 * n):
        sets.append(frozenset({e}))
        weights.append(2 * w)
    for x, y in itertools.combinations(range(n), 2):
        for ex, ey in itertools.product((2 * x, 2 * x + 1), (2 * y, 2 * y + 1)):
            sets.append(frozenset({ex, ey}))
            weights.append(w)
    for c in inst.constraints:
        for s in satisfying_literal_sets(c):
            sets.append(s)
            weights.append(c.weight)
    target = SetSystem(SB, 2 * n, tuple(sets), tuple(weights), bound=n, labels=literal_names(inst))
    return ReductionOutput(SB, target, inst, w)


def _sb_consistency(out, f: Basis) -> ConsistencyVerdict:
    for s in f.members:
        if len(s) != 1:
            return bad(SINGLE_SET_CONSISTENT, f"basis member of size {len(s)}")
    chosen = {e for s in f.members for e in s}
    return _literal_consistency(out, chosen, SINGLE_SET_CONSISTENT)


def _sb_decode(out, f: Basis) -> Assignment:
    return _literal_decode(out, {e for s in f.members for e in s})


def _sb_encode(out, a: Assignment) -> Basis:
    return Basis(frozenset(frozenset({lit(x, val)}) for x, val in enumerate(a)))


def _sb_offset(out) -> int:
    n = out.source.num_vars
    return 2 * out.w * n + out.w * (n * (n - 1) // 2)


# -- hitting set ---------------------------------------------------------------


def reduce_cnf_hs(inst: McaInstance) -> ReductionOutput:
    _check(inst, "HS reduction")
    w = big_w(inst)
    n = inst.num_vars
    sets = [frozenset({2 * x, 2 * x + 1}) for x in range(n)]
    weights = [w] * n
    for c in inst.constraints:
        sets.append(clause_literals(c))
        weights.append(c.weight)
    target = SetSystem(HS, 2 * n, tuple(sets), tuple(weights), bound=n, labels=literal_names(inst))
    return ReductionOutput(HS, target, inst, w)


# -- comparative containment -----------------------------------------------------


def reduce_cnf_cc(inst: McaInstance, w: int | None = None) -> ReductionOutput:
    """``w`` overrides the default :func:`clause_family_w` weight unit."""
    _check(inst, "CC reduction")
    w = clause_family_w(inst) if w is None else w
    n = inst.num_vars
    everything = frozenset(range(2 * n))

    def rest(x: int) -> frozenset[int]:
        return everything - {2 * x, 2 * x + 1}

    n_sets = tuple(rest(x) for x in range(n))
    n_weights = (2 * w,) * n
    m_sets, m_weights = [], []
    for x in range(n):
        m_sets += [rest(x) | {2 * x}, rest(x) | {2 * x + 1}]
        m_weights += [w, w]
    fan_out = []
    for c in inst.constraints:
        f = everything - {e for v in c.scope for e in (2 * v, 2 * v + 1)}
        fan_out.append(f)
        for s in satisfying_literal_sets(c):
            m_sets.append(f | s)
            m_weights.append(c.weight)
    shift = sum(n_weights)
    target = CcInstance(
        2 * n, tuple(m_sets), tuple(m_weights), n_sets, n_weights, shift, literal_names(inst)
    )
    return ReductionOutput(CC, target, inst, w, {"fan_out": tuple(fan_out)})


def _elem_consistency(out, s: Elements) -> ConsistencyVerdict:
    return _literal_consistency(out, s.items, ELEMENT_CONSISTENT)


def _elem_decode(out, s: Elements) -> Assignment:
    return _literal_decode(out, s.items)


def _elem_encode(out, a: Assignment) -> Elements:
    return Elements(frozenset(lit(x, val) for x, val in enumerate(a)))


HANDLERS = {
    SB: (_sb_consistency, _sb_decode, _sb_encode, _sb_offset),
    HS: (_elem_consistency, _elem_decode, _elem_encode, lambda out: out.w * out.source.num_vars),
    CC: (
        _elem_consistency, _elem_decode, _elem_encode,
        lambda out: out.w * out.source.num_vars + out.target.shift,
    ),
}
