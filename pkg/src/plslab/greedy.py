"""Greedy algorithms that reach 1-differ local optima for packing and cover.

Both process sets by descending weight, ties broken by ascending index.
"""

from __future__ import annotations

from .set_problems import SC, SP, SetSystem, Sets


def _order(inst: SetSystem, indices) -> list[int]:
    return sorted(indices, key=lambda i: (-inst.weights[i], i))


def greedy_packing(inst: SetSystem) -> Sets:
    """Add each set that is disjoint from those already taken, up to ``m_C``."""
    if inst.kind != SP:
        raise ValueError("greedy_packing expects an SP instance")
    taken: list[int] = []
    used = 0
    for i in _order(inst, range(len(inst.sets))):
        if len(taken) >= inst.bound:
            break
        m = inst.masks[i]
        if not m & used:
            taken.append(i)
            used |= m
    return Sets(frozenset(taken))


def greedy_cover(inst: SetSystem) -> Sets:
    """Start from the whole collection and drop every set that is redundant."""
    if inst.kind != SC:
        raise ValueError("greedy_cover expects an SC instance")
    full = inst.full_mask
    count = [0] * inst.n_elements
    for m in inst.masks:
        for e in range(inst.n_elements):
            count[e] += m >> e & 1
    if any(c == 0 for c in count):
        raise ValueError("the collection does not cover the ground set")
    keep = set(range(len(inst.sets)))
    for i in _order(inst, range(len(inst.sets))):
        elems = [e for e in range(inst.n_elements) if inst.masks[i] >> e & 1]
        if all(count[e] > 1 for e in elems):
            keep.discard(i)
            for e in elems:
                count[e] -= 1
    assert _union(inst, keep) == full
    return Sets(frozenset(keep))


def _union(inst: SetSystem, indices) -> int:
    u = 0
    for i in indices:
        u |= inst.masks[i]
    return u


def is_irredundant(inst: SetSystem, s: Sets) -> bool:
    full = inst.full_mask
    return all(_union(inst, s.indices - {i}) != full for i in s.indices)
