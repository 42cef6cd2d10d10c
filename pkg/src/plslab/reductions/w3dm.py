"""Tri-colored MCA to weighted 3-dimensional matching and exact cover by 3-sets.

Element layout (0-based, identical for boys, girls and homes): the indexed
element ``(x, i, s)`` for variable ``x``, value ``i`` in ``1..r`` and copy
``s`` in ``{1, 2}`` sits at ``2 * (x * r + i - 1) + s - 1``. Zero elements
``(x, 0, s)`` follow after ``2 r |X|``, two per variable and only in the
coordinate that matches the variable's color (boys for blue, girls for red,
homes for white). Hence ``N = 2 r |X| + 2 |X| / 3``.

Each gadget ``assign(i, x)`` has two large and two medium triples. A
standard assignment puts both large triples of ``x`` on one gadget and both
medium triples on every other gadget; the two indexed elements left free per
variable are then consumed by one small triple per constraint.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from ..core import Sense
from ..set_problems import W3DM, X3C, ExactCover, Matching, SetSystem, W3dmInstance, relocations, replaced
from ..source_problems import COLORS, Assignment, McaInstance
from .common import STANDARD_ASSIGNMENT, ConsistencyVerdict, ReductionOutput, bad, big_w, ok, require_tricolored

BLUE, RED, WHITE = COLORS
P_BOUND, Q_BOUND = 6, 12


@dataclass(frozen=True)
class GadgetMap:
    r: int
    n_vars: int
    colors: tuple[str, ...]
    zero_slot: tuple[int, ...]  # rank of a variable inside its color class
    # per constraint: ((var, occurrence) for blue, red, white) and scope positions
    occurrences: tuple[tuple[tuple[int, int], ...], ...]
    positions: tuple[tuple[int, int, int], ...]
    large_weight: int
    medium_weight: int

    @property
    def n(self) -> int:
        return 2 * self.r * self.n_vars + 2 * (self.n_vars // 3)

    def elem(self, x: int, i: int, s: int) -> int:
        if i == 0:
            return 2 * self.r * self.n_vars + 2 * self.zero_slot[x] + s - 1
        return 2 * (x * self.r + i - 1) + s - 1

    def large(self, x: int, i: int, s: int) -> tuple[int, int, int]:
        e = self.elem
        color = self.colors[x]
        if color == BLUE:
            return (e(x, 0, s), e(x, i, s), e(x, i, s))
        if color == RED:
            return (e(x, i, s), e(x, 0, s), e(x, i, s))
        return (e(x, i, s), e(x, i, s), e(x, 0, s))

    def medium(self, x: int, i: int, t: int) -> tuple[int, int, int]:
        e = self.elem
        o = 3 - t
        if self.colors[x] == WHITE:
            return (e(x, i, t), e(x, i, o), e(x, i, t))
        return (e(x, i, t), e(x, i, t), e(x, i, o))

    def small(self, k: int, values: tuple[int, int, int]) -> tuple[int, int, int]:
        """Small triple of constraint ``k`` for (blue, red, white) values."""
        (x, s), (y, t), (z, u) = self.occurrences[k]
        i, j, l = values
        return (self.elem(x, i, s), self.elem(y, j, t), self.elem(z, l, u))

    def color_values(self, k: int, a) -> tuple[int, int, int]:
        return tuple(a[v] for v, _ in self.occurrences[k])

    def standard_triples(self, a) -> frozenset:
        out = set()
        for x in range(self.n_vars):
            out.add(self.large(x, a[x], 1))
            out.add(self.large(x, a[x], 2))
            for j in range(1, self.r + 1):
                if j != a[x]:
                    out.add(self.medium(x, j, 1))
                    out.add(self.medium(x, j, 2))
        for k in range(len(self.occurrences)):
            out.add(self.small(k, self.color_values(k, a)))
        return frozenset(out)


def _gadget_map(inst: McaInstance, w: int, medium_factor: int) -> GadgetMap:
    colors = inst.coloring
    slot, seen = [], {c: 0 for c in COLORS}
    for c in colors:
        slot.append(seen[c])
        seen[c] += 1
    incidence = inst.incidence()
    occ, pos = [], []
    for k, con in enumerate(inst.constraints):
        by_color = {}
        for p, v in enumerate(con.scope):
            by_color[colors[v]] = (v, incidence[v].index(k) + 1, p)
        occ.append(tuple(by_color[c][:2] for c in COLORS))
        pos.append(tuple(by_color[c][2] for c in COLORS))
    return GadgetMap(
        inst.domain_size, inst.num_vars, tuple(colors), tuple(slot), tuple(occ), tuple(pos),
        7 * w, medium_factor * w,
    )


def reduce_mca_w3dm(inst: McaInstance, medium_factor: int = 3) -> ReductionOutput:
    """W3DM instance; ``medium_factor`` scales the medium triples (``k * W``)."""
    require_tricolored(inst, Sense.MAXIMIZE)
    if medium_factor < 1:
        raise ValueError("medium_factor must be positive")
    w = big_w(inst)
    gm = _gadget_map(inst, w, medium_factor)
    weights: dict[tuple[int, int, int], int] = {}
    for x in range(inst.num_vars):
        for i in range(1, gm.r + 1):
            for s in (1, 2):
                weights[gm.large(x, i, s)] = gm.large_weight
                weights[gm.medium(x, i, s)] = gm.medium_weight
    for k, con in enumerate(inst.constraints):
        for values in itertools.product(range(1, gm.r + 1), repeat=3):
            key = [0, 0, 0]
            for c, p in enumerate(gm.positions[k]):
                key[p] = values[c]
            weights[gm.small(k, values)] = con.table.get(tuple(key), 0)
    return ReductionOutput(W3DM, W3dmInstance(gm.n, weights), inst, w, {"gadgets": gm})


def paper_n(inst: McaInstance) -> dict[str, int]:
    """Ground-set sizes: the stated formula versus two element inventories."""
    n, r = inst.num_vars, inst.domain_size
    return {
        "formula": 2 * r * n + n // 3,
        "inventory_three_zero_copies": 2 * r * n + n,
        "inventory_two_zero_copies": 2 * r * n + 2 * (n // 3),
    }


# -- consistency, decoding, encoding ----------------------------------------------


def _standard(out: ReductionOutput, triples: frozenset) -> tuple[ConsistencyVerdict, Assignment | None]:
    gm: GadgetMap = out.meta["gadgets"]
    names = out.source.variables
    a = []
    for x in range(gm.n_vars):
        hosts = [i for i in range(1, gm.r + 1) if gm.large(x, i, 1) in triples]
        if len(hosts) != 1 or gm.large(x, hosts[0], 2) not in triples:
            return bad(STANDARD_ASSIGNMENT, f"large triples of {names[x]} not on a single gadget"), None
        i = hosts[0]
        for j in range(1, gm.r + 1):
            if j != i and not (gm.medium(x, j, 1) in triples and gm.medium(x, j, 2) in triples):
                return bad(STANDARD_ASSIGNMENT, f"gadget ({j}, {names[x]}) lacks a medium triple"), None
        a.append(i)
    for k in range(len(gm.occurrences)):
        if gm.small(k, gm.color_values(k, a)) not in triples:
            return bad(STANDARD_ASSIGNMENT, f"constraint {k + 1} misses its small triple"), None
    return ok(STANDARD_ASSIGNMENT), tuple(a)


def _as_matching(out: ReductionOutput, s) -> Matching | None:
    if out.reduction == W3DM:
        return s
    n = out.meta["gadgets"].n
    triples = []
    for block in s.blocks:
        parts = sorted(block)
        if not (parts[0] < n <= parts[1] < 2 * n <= parts[2] < 3 * n):
            return None
        triples.append((parts[0], parts[1] - n, parts[2] - 2 * n))
    return Matching.of(triples)


def _as_cover(n: int, m: Matching) -> ExactCover:
    return ExactCover(frozenset(frozenset({b, n + g, 2 * n + h}) for b, g, h in m.triples))


def consistency(out: ReductionOutput, s) -> ConsistencyVerdict:
    m = _as_matching(out, s)
    if m is None:
        return bad(STANDARD_ASSIGNMENT, "a block is not of boy-girl-home form")
    return _standard(out, m.triples)[0]


def decode(out: ReductionOutput, s) -> Assignment:
    verdict, a = _standard(out, _as_matching(out, s).triples)
    return a


def encode(out: ReductionOutput, a: Assignment):
    gm: GadgetMap = out.meta["gadgets"]
    m = Matching(gm.standard_triples(a))
    return m if out.reduction == W3DM else _as_cover(gm.n, m)


def offset(out: ReductionOutput) -> int:
    gm: GadgetMap = out.meta["gadgets"]
    return gm.n_vars * (2 * gm.large_weight + 2 * gm.medium_weight * (gm.r - 1))


# -- X3C -----------------------------------------------------------------------


def reduce_mca_x3c(inst: McaInstance, medium_factor: int = 3) -> ReductionOutput:
    """X3C instance: the W3DM triples read as 3-sets over boys, girls and homes."""
    base = reduce_mca_w3dm(inst, medium_factor)
    n = base.target.n
    items = sorted(base.target.weights.items())
    sets = tuple(frozenset({b, n + g, 2 * n + h}) for (b, g, h), _ in items)
    labels = tuple(f"{kind}{e + 1}" for kind in "bgh" for e in range(n))
    target = SetSystem(X3C, 3 * n, sets, tuple(w for _, w in items), labels=labels)
    meta = {"gadgets": base.meta["gadgets"], "triple_weights": base.target.weights}
    return ReductionOutput(X3C, target, inst, base.w, meta)


# -- move catalog ----------------------------------------------------------------


def _insert(s: Matching, new: list[tuple[int, int, int]]) -> Matching | None:
    """Add ``new`` triples, drop every triple they touch, regroup leftovers.

    Freed boys, girls and homes that ``new`` does not use are zipped in sorted
    order into fresh triples.
    """
    for k in range(3):
        if len({t[k] for t in new}) != len(new):
            return None
    if all(t in s.triples for t in new):
        return None
    by = [{t[k]: t for t in s.triples} for k in range(3)]
    dropped = {by[k][t[k]] for t in new for k in range(3)}
    left = [sorted({d[k] for d in dropped} - {t[k] for t in new}) for k in range(3)]
    return Matching(s.triples.difference(dropped).union(new, zip(*left)))


def _within_bounds(old: Matching, new: Matching) -> bool:
    return replaced(old, new) <= P_BOUND and relocations(old, new) <= Q_BOUND


def _matching_catalog(out: ReductionOutput, s: Matching) -> Iterator[tuple[tuple, Matching]]:
    gm: GadgetMap = out.meta["gadgets"]
    weights = out.target.weights if out.reduction == W3DM else out.meta["triple_weights"]

    def emit(move, new, strict=True):
        if new is None:
            return None
        if strict:
            assert _within_bounds(s, new), f"catalog move {move} leaves the (6,12) neighborhood"
        elif not _within_bounds(s, new):
            return None
        return move, new

    # single-triple builds (large, medium and small repairs)
    for t in sorted(weights):
        if weights[t] > 0 and t not in s.triples:
            got = emit(("build", t), _insert(s, [t]))
            if got:
                yield got
    r = gm.r
    for x in range(gm.n_vars):
        for i, j in itertools.permutations(range(1, r + 1), 2):
            for ls in (1, 2):
                for mt in (1, 2):
                    # move one large onto gadget i and put a medium on the vacated gadget j
                    got = emit(("consolidate", x, ls, i, j, mt), _insert(s, [gm.large(x, i, ls), gm.medium(x, j, mt)]))
                    if got:
                        yield got
                trio = [gm.large(x, i, ls), gm.medium(x, j, 1), gm.medium(x, j, 2)]
                got = emit(("consolidate_full", x, ls, i, j), _insert(s, trio), strict=False)
                if got:
                    yield got
    verdict, a = _standard(out, s.triples)
    if verdict:
        for x in range(gm.n_vars):
            for j in range(1, r + 1):
                if j != a[x]:
                    b = a[:x] + (j,) + a[x + 1:]
                    got = emit(("reassign", x, j), Matching(gm.standard_triples(b)))
                    yield got


def w3dm_move_catalog(out: ReductionOutput, s) -> Iterator[tuple[tuple, object]]:
    """Structured neighbors of ``s`` used by the consistency argument.

    Every emitted solution is checked against the (6,12) neighborhood. For
    X3C outputs the matching catalog is mapped onto exact covers; covers
    with a block that mixes coordinates have no catalog neighbors.
    """
    if out.reduction == W3DM:
        yield from _matching_catalog(out, s)
        return
    m = _as_matching(out, s)
    if m is None:
        return
    n = out.meta["gadgets"].n
    for move, new in _matching_catalog(out, m):
        yield move, _as_cover(n, new)


HANDLERS = {kind: (consistency, decode, encode, offset) for kind in (W3DM, X3C)}
