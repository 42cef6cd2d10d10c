"""Weighted standard set problems: feasibility, exact costs and neighborhoods.

Elements of a ground set are the integers ``0..n-1`` (with optional display
labels); collections are indexed families, so the same element set may occur
several times with different weights. All arithmetic is on Python ints.

Neighborhoods follow the k-differ rule: a neighbor removes at most ``k`` of
the describing elements and adds at most ``k`` new ones, so a single exchange
is a distance-one move.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Sequence

from .core import NeighborhoodTooLarge, ProblemBinding, Sense

SP, SSP, SC, TS, SB, HS, X3C = "SP", "SSP", "SC", "TS", "SB", "HS", "X3C"
IP, CC, W3DM = "IP", "CC", "W3DM"
SET_SYSTEM_KINDS = (SP, SSP, SC, TS, SB, HS, X3C)
ALL_KINDS = SET_SYSTEM_KINDS + (IP, CC, W3DM)

TWO_SIDED = "two_sided"
ONE_SIDED = "one_sided"

DEFAULT_CAP = 2_000_000
DEFAULT_GROUND_CAP = 16


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for e in items:
        m |= 1 << e
    return m


def items_of(mask: int) -> frozenset[int]:
    out = []
    e = 0
    while mask:
        if mask & 1:
            out.append(e)
        mask >>= 1
        e += 1
    return frozenset(out)


# -- instances ----------------------------------------------------------------


@dataclass(frozen=True)
class SetSystem:
    """Ground set plus an indexed, weighted family of subsets.

    ``bound`` is m_C for SP/SB and m_B for TS/HS; it is ignored elsewhere.
    ``pair_weights`` maps ordered pairs ``(i, j)`` with ``i < j`` to w_B and
    is only used by TS (missing pairs weigh 0).
    """

    kind: str
    n_elements: int
    sets: tuple[frozenset[int], ...]
    weights: tuple[int, ...]
    bound: int | None = None
    pair_weights: Mapping[tuple[int, int], int] = field(default_factory=dict)
    separation: str = TWO_SIDED
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in SET_SYSTEM_KINDS:
            raise ValueError(f"unknown set-system kind {self.kind!r}")
        if len(self.sets) != len(self.weights):
            raise ValueError("one weight per set required")
        for i, (s, w) in enumerate(zip(self.sets, self.weights)):
            if any(not 0 <= e < self.n_elements for e in s):
                raise ValueError(f"set {i} is not a subset of the ground set")
            if w < 0:
                raise ValueError(f"set {i} has negative weight")
        for (i, j), w in self.pair_weights.items():
            if not 0 <= i < j < self.n_elements:
                raise ValueError(f"pair weight key {(i, j)} must satisfy 0 <= i < j < n")
            if w < 0:
                raise ValueError("pair weights must be non-negative")
        if self.separation not in (TWO_SIDED, ONE_SIDED):
            raise ValueError(f"unknown separation mode {self.separation!r}")
        if self.kind in (SP, SB, TS, HS) and (self.bound is None or self.bound < 1):
            raise ValueError(f"{self.kind} needs a positive bound")
        if self.kind == X3C:
            seen = set()
            for i, s in enumerate(self.sets):
                if len(s) != 3:
                    raise ValueError(f"X3C set {i} does not have three elements")
                if s in seen:
                    raise ValueError(f"X3C set {i} is listed twice")
                seen.add(s)
        if self.labels is not None and len(self.labels) != self.n_elements:
            raise ValueError("one label per element required")

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(s) for s in self.sets)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n_elements) - 1

    @cached_property
    def weight_of_block(self) -> dict[frozenset[int], int]:
        return dict(zip(self.sets, self.weights))

    def label(self, e: int) -> str:
        return self.labels[e] if self.labels else str(e + 1)


@dataclass(frozen=True)
class IpInstance:
    a: tuple[tuple[int, ...], ...]
    b: tuple[tuple[int, ...], ...]
    donors: tuple[frozenset[int], ...]
    n_elements: int
    labels: tuple[str, ...] | None = None
    kind: str = field(default=IP, init=False)

    def __post_init__(self) -> None:
        n = len(self.a)
        for mat, name in ((self.a, "A"), (self.b, "B")):
            if len(mat) != n or any(len(row) != n for row in mat):
                raise ValueError(f"matrix {name} must be {n}x{n}")
            for i in range(n):
                for j in range(n):
                    if mat[i][j] != mat[j][i]:
                        raise ValueError(f"matrix {name} is not symmetric")
                    if mat[i][j] < 0:
                        raise ValueError(f"matrix {name} has a negative entry")
        if len(self.donors) < n:
            raise ValueError("donor collection needs at least n sets")
        for d in self.donors:
            if any(not 0 <= e < self.n_elements for e in d):
                raise ValueError("donor set outside the ground set")

    @property
    def n(self) -> int:
        return len(self.a)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(mask_of(d) for d in self.donors)


@dataclass(frozen=True)
class CcInstance:
    n_elements: int
    m_sets: tuple[frozenset[int], ...]
    m_weights: tuple[int, ...]
    n_sets: tuple[frozenset[int], ...]
    n_weights: tuple[int, ...]
    shift: int
    labels: tuple[str, ...] | None = None
    kind: str = field(default=CC, init=False)

    def __post_init__(self) -> None:
        if len(self.m_sets) != len(self.m_weights) or len(self.n_sets) != len(self.n_weights):
            raise ValueError("one weight per set required")
        if any(w < 0 for w in self.m_weights + self.n_weights):
            raise ValueError("weights must be non-negative")
        for s in self.m_sets + self.n_sets:
            if any(not 0 <= e < self.n_elements for e in s):
                raise ValueError("set outside the ground set")
        if self.shift < sum(self.n_weights):
            raise ValueError("offset must be at least the total weight of the N-side")

    @cached_property
    def m_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(s) for s in self.m_sets)

    @cached_property
    def n_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(s) for s in self.n_sets)


Triple = tuple[int, int, int]


@dataclass(frozen=True)
class W3dmInstance:
    n: int
    weights: Mapping[Triple, int]
    kind: str = field(default=W3DM, init=False)

    def __post_init__(self) -> None:
        for t, w in self.weights.items():
            if len(t) != 3 or any(not 0 <= x < self.n for x in t):
                raise ValueError(f"triple {t} outside [N]^3")
            if w < 0:
                raise ValueError("triple weights must be non-negative")

    def weight(self, t: Triple) -> int:
        return self.weights.get(t, 0)


# -- solutions ----------------------------------------------------------------


@dataclass(frozen=True)
class Sets:
    """Sub-collection, given by set indices."""

    indices: frozenset[int]


@dataclass(frozen=True)
class Elements:
    items: frozenset[int]


@dataclass(frozen=True)
class Partition:
    side1: frozenset[int]
    side2: frozenset[int]


@dataclass(frozen=True)
class SetVector:
    indices: tuple[int, ...]


@dataclass(frozen=True)
class Basis:
    members: frozenset[frozenset[int]]


@dataclass(frozen=True)
class Matching:
    triples: frozenset[Triple]

    @classmethod
    def of(cls, triples: Iterable[Sequence[int]]) -> "Matching":
        return cls(frozenset(tuple(t) for t in triples))


@dataclass(frozen=True)
class ExactCover:
    blocks: frozenset[frozenset[int]]


SOLUTION_TYPES = {
    SP: Sets, SC: Sets, TS: Sets, SSP: Partition, SB: Basis, HS: Elements,
    X3C: ExactCover, IP: SetVector, CC: Elements, W3DM: Matching,
}

SENSE = {k: Sense.MAXIMIZE for k in ALL_KINDS} | {SC: Sense.MINIMIZE}


def _check_variant(instance, solution) -> None:
    want = SOLUTION_TYPES[instance.kind]
    if not isinstance(solution, want):
        raise TypeError(
            f"{instance.kind} expects a {want.__name__} solution, got {type(solution).__name__}"
        )


# -- feasibility --------------------------------------------------------------


def _is_matching(n: int, triples: frozenset) -> bool:
    if len(triples) != n:
        return False
    for k in range(3):
        if sorted(t[k] for t in triples) != list(range(n)):
            return False
    return True


def _is_exact_cover(n_elements: int, blocks: frozenset) -> bool:
    seen: set[int] = set()
    for b in blocks:
        if len(b) != 3 or seen & b:
            return False
        seen |= b
    return seen == set(range(n_elements))


def feasible(instance, solution) -> bool:
    _check_variant(instance, solution)
    kind = instance.kind
    if kind in (SP, SC, TS):
        idx = solution.indices
        if any(not 0 <= i < len(instance.sets) for i in idx):
            return False
        if kind == SP:
            return len(idx) <= instance.bound
        if kind == TS:
            return 1 <= len(idx) <= instance.bound
        cover = 0
        for i in idx:
            cover |= instance.masks[i]
        return cover == instance.full_mask
    if kind == SSP:
        s1, s2 = solution.side1, solution.side2
        return not (s1 & s2) and (s1 | s2) == frozenset(range(instance.n_elements))
    if kind == HS:
        items = solution.items
        return len(items) <= instance.bound and all(0 <= e < instance.n_elements for e in items)
    if kind == CC:
        return all(0 <= e < instance.n_elements for e in solution.items)
    if kind == SB:
        members = solution.members
        return len(members) == instance.bound and all(
            all(0 <= e < instance.n_elements for e in s) for s in members
        )
    if kind == IP:
        v = solution.indices
        return len(v) == instance.n and all(0 <= i < len(instance.donors) for i in v)
    if kind == X3C:
        return instance.n_elements % 3 == 0 and _is_exact_cover(instance.n_elements, solution.blocks)
    return _is_matching(instance.n, solution.triples)


# -- costs --------------------------------------------------------------------


def cost_sp(instance: SetSystem, s: Sets) -> int:
    """Weight of members that are disjoint from every other member of ``s``."""
    seen = dup = 0
    masks = instance.masks
    for i in s.indices:
        m = masks[i]
        dup |= seen & m
        seen |= m
    total = 0
    for i in s.indices:
        m = masks[i]
        if not m & dup:
            total += instance.weights[i]
    return total


def cost_ssp(instance: SetSystem, p: Partition) -> int:
    one = mask_of(p.side1)
    total = 0
    for m, w in zip(instance.masks, instance.weights):
        if m & one and m & ~one:
            total += w
    return total


def cost_sc(instance: SetSystem, s: Sets) -> int:
    if not feasible(instance, s):
        raise ValueError("SC cost is only defined for covers")
    return sum(instance.weights[i] for i in s.indices)


def cost_ts(instance: SetSystem, s: Sets, separation: str | None = None) -> int:
    mode = separation or instance.separation
    # Element signature: bitmask of the chosen members containing it.
    sig = [0] * instance.n_elements
    for bit, i in enumerate(sorted(s.indices)):
        for e in instance.sets[i]:
            sig[e] |= 1 << bit
    total = 0
    for (i, j), w in instance.pair_weights.items():
        a, b = sig[i], sig[j]
        if mode == TWO_SIDED:
            if a & ~b and b & ~a:
                total += w
        elif a != b:
            total += w
    return total


def expressible(members: Iterable[int], target: int) -> bool:
    union = 0
    for b in members:
        if not b & ~target:
            union |= b
    return union == target


def cost_sb(instance: SetSystem, f: Basis) -> int:
    members = [mask_of(s) for s in f.members]
    return sum(w for m, w in zip(instance.masks, instance.weights) if expressible(members, m))


def cost_hs(instance: SetSystem, s: Elements) -> int:
    hit = mask_of(s.items)
    return sum(w for m, w in zip(instance.masks, instance.weights) if m & hit)


def cost_ip(instance: IpInstance, v: SetVector) -> int:
    masks = [instance.masks[i] for i in v.indices]
    total = 0
    for i in range(instance.n):
        for j in range(i, instance.n):
            if (masks[i] & masks[j]).bit_count() == instance.a[i][j]:
                total += instance.b[i][j]
    return total


def cost_cc(instance: CcInstance, s: Elements) -> int:
    sm = mask_of(s.items)
    plus = sum(w for m, w in zip(instance.m_masks, instance.m_weights) if not sm & ~m)
    minus = sum(w for m, w in zip(instance.n_masks, instance.n_weights) if not sm & ~m)
    return plus - minus + instance.shift


def cost_w3dm(instance: W3dmInstance, s: Matching) -> int:
    if not _is_matching(instance.n, s.triples):
        raise ValueError("W3DM cost is only defined for matchings")
    return sum(instance.weights.get(t, 0) for t in s.triples)


def cost_x3c(instance: SetSystem, s: ExactCover) -> int:
    if not feasible(instance, s):
        raise ValueError("X3C cost is only defined for exact covers")
    table = instance.weight_of_block
    return sum(table.get(b, 0) for b in s.blocks)


_COSTS = {
    SP: cost_sp, SSP: cost_ssp, SC: cost_sc, TS: cost_ts, SB: cost_sb, HS: cost_hs,
    IP: cost_ip, CC: cost_cc, W3DM: cost_w3dm, X3C: cost_x3c,
}


def cost(instance, solution) -> int:
    _check_variant(instance, solution)
    return _COSTS[instance.kind](instance, solution)


# -- initial solutions --------------------------------------------------------


def init_solution(instance):
    kind = instance.kind
    if kind in (SP,):
        return Sets(frozenset())
    if kind in (HS, CC):
        return Elements(frozenset())
    if kind == SC:
        s = Sets(frozenset(range(len(instance.sets))))
        if not feasible(instance, s):
            raise ValueError("the collection does not cover the ground set")
        return s
    if kind == SSP:
        return Partition(frozenset(range(instance.n_elements)), frozenset())
    if kind == TS:
        if not instance.sets:
            raise ValueError("TS instance has no sets")
        return Sets(frozenset({0}))
    if kind == SB:
        if instance.n_elements < instance.bound:
            raise ValueError("ground set smaller than the basis size")
        return Basis(frozenset(frozenset({e}) for e in range(instance.bound)))
    if kind == IP:
        return SetVector((0,) * instance.n)
    if kind == W3DM:
        return Matching(frozenset((i, i, i) for i in range(instance.n)))
    if instance.n_elements % 3:
        raise ValueError("X3C ground set size must be a multiple of 3")
    q = instance.n_elements // 3
    return ExactCover(frozenset(frozenset({i, i + q, i + 2 * q}) for i in range(q)))


# -- neighborhoods ------------------------------------------------------------


def _count_exchanges(inside: int, outside: int, k: int) -> int:
    return sum(
        math.comb(inside, i) * math.comb(outside, j)
        for i in range(k + 1)
        for j in range(k + 1)
    ) - 1


def exchange_moves(
    current: frozenset, universe: Sequence, k: int, cap: int = DEFAULT_CAP
) -> Iterator[tuple[tuple, frozenset]]:
    """Subsets reachable by removing at most ``k`` and adding at most ``k`` items."""
    inside = sorted(current)
    outside = [x for x in universe if x not in current]
    if _count_exchanges(len(inside), len(outside), k) > cap:
        raise NeighborhoodTooLarge(cap, f"{len(inside)} in, {len(outside)} out, k={k}")
    for nr in range(k + 1):
        for removed in itertools.combinations(inside, nr):
            base = current.difference(removed)
            for na in range(k + 1):
                if nr == 0 and na == 0:
                    continue
                for added in itertools.combinations(outside, na):
                    yield (removed, added), base.union(added)


def _subset_neighbors(instance, solution, k, cap):
    if instance.kind in (SP, SC, TS):
        wrap, cur, universe = Sets, solution.indices, range(len(instance.sets))
    else:
        wrap, cur, universe = Elements, solution.items, range(instance.n_elements)
    for move, new in exchange_moves(cur, universe, k, cap):
        t = wrap(new)
        if feasible(instance, t):
            yield move, t


def _partition_neighbors(instance: SetSystem, p: Partition, k: int, cap: int):
    n = instance.n_elements
    if sum(math.comb(n, i) for i in range(1, k + 1)) > cap:
        raise NeighborhoodTooLarge(cap, f"partition of {n} elements, k={k}")
    for size in range(1, k + 1):
        for moved in itertools.combinations(range(n), size):
            ms = frozenset(moved)
            yield ("move", moved), Partition(p.side1 ^ ms, p.side2 ^ ms)


def _vector_neighbors(instance: IpInstance, v: SetVector, k: int, cap: int):
    n, ell = instance.n, len(instance.donors)
    if sum(math.comb(n, i) * (ell - 1) ** i for i in range(1, k + 1)) > cap:
        raise NeighborhoodTooLarge(cap, f"vector of length {n} over {ell} donors, k={k}")
    for size in range(1, k + 1):
        for pos in itertools.combinations(range(n), size):
            choices = [[d for d in range(ell) if d != v.indices[p]] for p in pos]
            for repl in itertools.product(*choices):
                new = list(v.indices)
                for p, d in zip(pos, repl):
                    new[p] = d
                yield ("set", pos, repl), SetVector(tuple(new))


def _basis_neighbors(instance: SetSystem, f: Basis, k: int, cap: int, ground_cap: int):
    n = instance.n_elements
    if n > ground_cap:
        raise NeighborhoodTooLarge(cap, f"ground set of {n} elements exceeds cap {ground_cap}")
    current = sorted(mask_of(s) for s in f.members)
    outside = [m for m in range(1 << n) if m not in set(current)]
    if _count_exchanges(len(current), len(outside), k) > cap:
        raise NeighborhoodTooLarge(cap, f"basis over {n} elements, k={k}")
    for size in range(1, k + 1):
        for removed in itertools.combinations(current, size):
            keep = [m for m in current if m not in removed]
            for added in itertools.combinations(outside, size):
                members = frozenset(items_of(m) for m in keep + list(added))
                yield (removed, added), Basis(members)


def _triple_groupings(elems: list[int]) -> Iterator[list[frozenset[int]]]:
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for pair in itertools.combinations(rest, 2):
        block = frozenset((first,) + pair)
        remaining = [e for e in rest if e not in pair]
        for tail in _triple_groupings(remaining):
            yield [block] + tail


def _x3c_neighbors(instance: SetSystem, s: ExactCover, k: int, cap: int):
    blocks = sorted(s.blocks, key=sorted)
    estimate = sum(
        math.comb(len(blocks), j) * math.factorial(3 * j) // (math.factorial(j) * 6 ** j)
        for j in range(2, k + 1)
    )
    if estimate > cap:
        raise NeighborhoodTooLarge(cap, f"X3C with {len(blocks)} blocks, k={k}")
    for j in range(2, k + 1):
        for removed in itertools.combinations(blocks, j):
            freed = sorted(set().union(*removed))
            old = set(removed)
            for grouping in _triple_groupings(freed):
                if any(b in old for b in grouping):
                    continue
                new = s.blocks.difference(removed).union(grouping)
                yield (tuple(map(tuple, map(sorted, removed))), tuple(map(tuple, map(sorted, grouping)))), ExactCover(new)


def relocations(old: Matching, new: Matching) -> int:
    """Boys plus girls whose home differs between two matchings."""
    home_b = {t[0]: t[2] for t in old.triples}
    home_g = {t[1]: t[2] for t in old.triples}
    moved = 0
    for b, g, h in new.triples:
        moved += (home_b[b] != h) + (home_g[g] != h)
    return moved


def replaced(old: Matching, new: Matching) -> int:
    return len(old.triples - new.triples)


def w3dm_pq_neighbors(
    instance: W3dmInstance, s: Matching, p: int, q: int, cap: int = 16
) -> Iterator[tuple[tuple, Matching]]:
    """Matchings that replace at most ``p`` triples with at most ``q`` relocations.

    Each neighbor is generated once, from the exact set of triples it drops.
    Exhaustive enumeration is only allowed for ``N <= cap``.
    """
    if instance.n > cap:
        raise NeighborhoodTooLarge(cap, f"W3DM with N={instance.n}; use the reduction move catalog")
    triples = sorted(s.triples)
    for j in range(2, min(p, len(triples)) + 1):
        for removed in itertools.combinations(triples, j):
            old = set(removed)
            home_b = {t[0]: t[2] for t in removed}
            home_g = {t[1]: t[2] for t in removed}
            boys = [t[0] for t in removed]
            girls = [t[1] for t in removed]
            homes = [t[2] for t in removed]
            keep = s.triples.difference(removed)
            for gp in itertools.permutations(girls):
                for hp in itertools.permutations(homes):
                    new = list(zip(boys, gp, hp))
                    if any(t in old for t in new):
                        continue
                    moved = sum((home_b[b] != h) + (home_g[g] != h) for b, g, h in new)
                    if moved > q:
                        continue
                    yield (tuple(removed), tuple(new)), Matching(keep.union(new))


def kdiffer_neighbors(instance, solution, k: int, cap: int = DEFAULT_CAP, ground_cap: int = DEFAULT_GROUND_CAP):
    _check_variant(instance, solution)
    if k < 1:
        return iter(())
    kind = instance.kind
    if kind in (SP, SC, TS, HS, CC):
        return _subset_neighbors(instance, solution, k, cap)
    if kind == SSP:
        return _partition_neighbors(instance, solution, k, cap)
    if kind == IP:
        return _vector_neighbors(instance, solution, k, cap)
    if kind == SB:
        return _basis_neighbors(instance, solution, k, cap, ground_cap)
    if kind == X3C:
        return _x3c_neighbors(instance, solution, k, cap)
    raise ValueError("W3DM uses (p,q) neighborhoods; see w3dm_pq_neighbors")


def binding(
    instance,
    k: int = 1,
    *,
    p: int | None = None,
    q: int | None = None,
    cap: int = DEFAULT_CAP,
    ground_cap: int = DEFAULT_GROUND_CAP,
    w3dm_cap: int = 16,
) -> ProblemBinding:
    """Local-search binding for a target instance under the k-differ neighborhood.

    W3DM bindings use the (p, q) neighborhood, defaulting to ``p = k`` and
    ``q = 2 * p``.
    """
    kind = instance.kind
    if kind == W3DM:
        pp = k if p is None else p
        qq = 2 * pp if q is None else q
        neigh = lambda s: w3dm_pq_neighbors(instance, s, pp, qq, w3dm_cap)  # noqa: E731
    else:
        neigh = lambda s: kdiffer_neighbors(instance, s, k, cap, ground_cap)  # noqa: E731
    return ProblemBinding(
        kind=kind,
        instance=instance,
        sense=SENSE[kind],
        feasible=lambda s: feasible(instance, s),
        cost=lambda s: _COSTS[kind](instance, s),
        neighbors=neigh,
        initial=lambda: init_solution(instance),
    )
