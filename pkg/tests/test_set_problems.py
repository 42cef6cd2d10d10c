import itertools
import random
import zlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from plslab import set_problems as sp
from plslab.core import NeighborhoodTooLarge
from plslab.set_problems import (
    Basis,
    CcInstance,
    Elements,
    ExactCover,
    IpInstance,
    Matching,
    Partition,
    SetSystem,
    SetVector,
    Sets,
    W3dmInstance,
)

fs = frozenset
A, B_, C = fs({0, 1}), fs({1, 2}), fs({2})


def toy(kind, **kw):
    return SetSystem(kind, 3, (A, B_, C), (5, 4, 2), **kw)


def test_feasibility_examples():
    sc = toy(sp.SC)
    assert sp.feasible(sc, Sets(fs({0, 1, 2})))
    x3c = SetSystem(sp.X3C, 6, (), ())
    assert not sp.feasible(x3c, ExactCover(fs({fs({0, 1, 2}), fs({2, 3, 4})})))
    spi = toy(sp.SP, bound=2)
    assert not sp.feasible(spi, Sets(fs({0, 1, 2})))
    with pytest.raises(TypeError):
        sp.feasible(spi, Elements(fs()))


def test_cost_sp():
    inst = toy(sp.SP, bound=3)
    assert sp.cost(inst, Sets(fs())) == 0
    assert sp.cost(inst, Sets(fs({0, 1, 2}))) == 0
    assert sp.cost(inst, Sets(fs({0, 2}))) == 7


def test_cost_ssp():
    inst = SetSystem(sp.SSP, 2, (fs({0, 1}),), (3,))
    assert sp.cost(inst, Partition(fs({0, 1}), fs())) == 0
    assert sp.cost(inst, Partition(fs({0}), fs({1}))) == 3
    single = SetSystem(sp.SSP, 2, (fs({0}),), (3,))
    assert sp.cost(single, Partition(fs({0}), fs({1}))) == 0


def test_cost_sc():
    inst = toy(sp.SC)
    assert sp.cost(inst, Sets(fs({0, 1, 2}))) == 11
    assert sp.cost(inst, Sets(fs({0, 2}))) == 7
    assert sp.cost(SetSystem(sp.SC, 0, (), ()), Sets(fs())) == 0
    with pytest.raises(ValueError):
        sp.cost(inst, Sets(fs({0})))


def test_cost_ts_modes():
    inst = SetSystem(sp.TS, 2, (fs({0}), fs({1}), fs({0, 1})), (0, 0, 0), bound=2, pair_weights={(0, 1): 7})
    assert sp.cost_ts(inst, Sets(fs({0, 1})), sp.TWO_SIDED) == 7
    assert sp.cost_ts(inst, Sets(fs({0, 1})), sp.ONE_SIDED) == 7
    assert sp.cost_ts(inst, Sets(fs({0})), sp.TWO_SIDED) == 0
    assert sp.cost_ts(inst, Sets(fs({0})), sp.ONE_SIDED) == 7
    assert sp.cost_ts(inst, Sets(fs({2})), sp.ONE_SIDED) == 0


def test_cost_sb():
    whole = SetSystem(sp.SB, 2, (fs({0, 1}),), (9,), bound=1)
    assert sp.cost(whole, Basis(fs({fs({0, 1})}))) == 9
    inst = SetSystem(sp.SB, 3, (fs({0, 1}), fs({0}), fs({2})), (4, 2, 5), bound=2)
    assert sp.cost(inst, Basis(fs({fs({0}), fs({1})}))) == 6
    assert not sp.feasible(inst, Basis(fs()))


def test_cost_hs():
    # elements: x=0, not-x=1, y=2, not-y=3
    inst = SetSystem(sp.HS, 4, (fs({0, 1}), fs({0, 3})), (4, 3), bound=2)
    assert sp.cost(inst, Elements(fs())) == 0
    assert sp.cost(inst, Elements(fs({0}))) == 7
    assert sp.cost(inst, Elements(fs({3}))) == 3


def test_cost_ip():
    e = fs({0, 1})
    assert sp.cost(IpInstance(((2,),), ((5,),), (e,), 2), SetVector((0,))) == 5
    assert sp.cost(IpInstance(((3,),), ((5,),), (e,), 2), SetVector((0,))) == 0


def test_cost_cc():
    inst = CcInstance(3, (fs({0, 1}),), (3,), (fs({0}),), (2,), 2)
    assert sp.cost(inst, Elements(fs())) == 3
    assert sp.cost(inst, Elements(fs({0}))) == 3
    assert sp.cost(inst, Elements(fs({0, 1, 2}))) == 2
    with pytest.raises(ValueError):
        CcInstance(3, (), (), (fs({0}),), (5,), 2)


def test_cost_w3dm_x3c():
    inst = W3dmInstance(2, {(0, 0, 0): 4})
    assert sp.cost(inst, Matching.of([(0, 0, 0), (1, 1, 1)])) == 4
    assert sp.cost(W3dmInstance(2, {}), Matching.of([(0, 1, 0), (1, 0, 1)])) == 0
    x3c = SetSystem(sp.X3C, 3, (fs({0, 1, 2}),), (6,))
    assert sp.cost(x3c, ExactCover(fs({fs({0, 1, 2})}))) == 6


def test_kdiffer_element_subset_counts():
    inst = SetSystem(sp.HS, 4, (), (), bound=4)
    s = Elements(fs({0, 1}))
    # 2 removals, 2 additions and 4 one-for-one exchanges
    assert len(list(sp.kdiffer_neighbors(inst, s, 1))) == 8
    n2 = {t for _, t in sp.kdiffer_neighbors(inst, s, 2)}
    assert len(n2) == sum(
        1 for k in range(5) for c in itertools.combinations(range(4), k)
        if fs(c) != s.items and max(len(s.items - fs(c)), len(fs(c) - s.items)) <= 2
    )


def test_partition_neighbors_count():
    inst = SetSystem(sp.SSP, 5, (), ())
    p = Partition(fs({0, 1}), fs({2, 3, 4}))
    assert len(list(sp.kdiffer_neighbors(inst, p, 1))) == 5


def test_w3dm_pq_examples():
    inst = W3dmInstance(2, {})
    ident = Matching.of([(0, 0, 0), (1, 1, 1)])
    assert list(sp.w3dm_pq_neighbors(inst, ident, 1, 12)) == []
    got = {t for _, t in sp.w3dm_pq_neighbors(inst, ident, 2, 4)}
    assert got == {
        Matching.of([(0, 0, 1), (1, 1, 0)]),
        Matching.of([(0, 1, 0), (1, 0, 1)]),
        Matching.of([(0, 1, 1), (1, 0, 0)]),
    }
    assert list(sp.w3dm_pq_neighbors(inst, ident, 2, 0)) == []
    big = W3dmInstance(3, {})
    id3 = Matching.of([(i, i, i) for i in range(3)])
    assert list(sp.w3dm_pq_neighbors(big, id3, 2, 0)) == []
    with pytest.raises(NeighborhoodTooLarge):
        list(sp.w3dm_pq_neighbors(W3dmInstance(20, {}), sp.init_solution(W3dmInstance(20, {})), 2, 4))


def test_init_solutions():
    assert sp.init_solution(toy(sp.SP, bound=2)) == Sets(fs())
    assert sp.init_solution(W3dmInstance(3, {})) == Matching.of([(0, 0, 0), (1, 1, 1), (2, 2, 2)])
    sb = SetSystem(sp.SB, 4, (), (), bound=2)
    assert sp.init_solution(sb) == Basis(fs({fs({0}), fs({1})}))
    with pytest.raises(ValueError):
        sp.init_solution(SetSystem(sp.SB, 1, (), (), bound=2))
    with pytest.raises(ValueError):
        sp.init_solution(SetSystem(sp.SC, 3, (A,), (1,)))
    x3c = SetSystem(sp.X3C, 6, (), ())
    assert sp.feasible(x3c, sp.init_solution(x3c))


# -- random instances shared with the acceptance suite -------------------------


def random_instance(kind, rng, n_max=6, sets_max=6):
    n = rng.randint(1, n_max)
    k = rng.randint(0, sets_max)
    sets = tuple(fs(e for e in range(n) if rng.random() < 0.4) for _ in range(k))
    weights = tuple(rng.randint(0, 9) for _ in sets)
    if kind in (sp.SP, sp.SSP, sp.HS, sp.SB, sp.TS):
        bound = rng.randint(1, max(1, n)) if kind in (sp.HS, sp.SB) else rng.randint(1, 4)
        if kind == sp.TS:
            sets = sets or (fs({0}),)
            weights = weights or (0,)
            pw = {(i, j): rng.randint(0, 9) for i in range(n) for j in range(i + 1, n)}
            return SetSystem(kind, n, sets, weights, bound=bound, pair_weights=pw,
                             separation=rng.choice([sp.TWO_SIDED, sp.ONE_SIDED]))
        return SetSystem(kind, n, sets, weights, bound=bound)
    if kind == sp.SC:
        sets = sets + (fs(range(n)),)
        return SetSystem(kind, n, sets, weights + (rng.randint(0, 9),))
    if kind == sp.IP:
        dim = rng.randint(1, 3)
        donors = tuple(fs(e for e in range(n) if rng.random() < 0.5) for _ in range(dim + rng.randint(0, 3)))
        a = [[0] * dim for _ in range(dim)]
        b = [[0] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                a[i][j] = a[j][i] = rng.randint(0, 3)
                b[i][j] = b[j][i] = rng.randint(0, 9)
        return IpInstance(tuple(map(tuple, a)), tuple(map(tuple, b)), donors, n)
    if kind == sp.CC:
        nsets = tuple(fs(e for e in range(n) if rng.random() < 0.5) for _ in range(rng.randint(0, 4)))
        nw = tuple(rng.randint(0, 9) for _ in nsets)
        return CcInstance(n, sets, weights, nsets, nw, sum(nw) + rng.randint(0, 3))
    if kind == sp.W3DM:
        size = rng.randint(1, 3)
        w = {t: rng.randint(0, 9) for t in itertools.product(range(size), repeat=3) if rng.random() < 0.5}
        return W3dmInstance(size, w)
    q = rng.randint(1, 2)
    blocks = {fs(rng.sample(range(3 * q), 3)) for _ in range(rng.randint(0, 5))}
    blocks = sorted(blocks, key=sorted)
    return SetSystem(sp.X3C, 3 * q, tuple(blocks), tuple(rng.randint(0, 9) for _ in blocks))


def random_solution(inst, rng):
    kind = inst.kind
    if kind in (sp.SP, sp.TS, sp.SC):
        while True:
            s = Sets(fs(i for i in range(len(inst.sets)) if rng.random() < 0.5))
            if sp.feasible(inst, s):
                return s
    if kind == sp.SSP:
        side1 = fs(e for e in range(inst.n_elements) if rng.random() < 0.5)
        return Partition(side1, fs(range(inst.n_elements)) - side1)
    if kind == sp.HS:
        return Elements(fs(rng.sample(range(inst.n_elements), rng.randint(0, inst.bound))))
    if kind == sp.CC:
        return Elements(fs(e for e in range(inst.n_elements) if rng.random() < 0.5))
    if kind == sp.SB:
        members = set()
        while len(members) < inst.bound:
            members.add(fs(e for e in range(inst.n_elements) if rng.random() < 0.5))
        return Basis(fs(members))
    if kind == sp.IP:
        return SetVector(tuple(rng.randrange(len(inst.donors)) for _ in range(inst.n)))
    if kind == sp.W3DM:
        g = list(range(inst.n)); h = list(range(inst.n))
        rng.shuffle(g); rng.shuffle(h)
        return Matching.of(zip(range(inst.n), g, h))
    elems = list(range(inst.n_elements))
    rng.shuffle(elems)
    return ExactCover(fs(fs(elems[i:i + 3]) for i in range(0, len(elems), 3)))


def oracle_cost(inst, s):
    kind = inst.kind
    if kind == sp.SP:
        return oracles.sp(inst.sets, inst.weights, s.indices)
    if kind == sp.SSP:
        return oracles.ssp(inst.sets, inst.weights, s.side1, s.side2)
    if kind == sp.SC:
        return oracles.sc(inst.weights, s.indices)
    if kind == sp.TS:
        return oracles.ts(inst.n_elements, inst.sets, inst.pair_weights, s.indices,
                          inst.separation == sp.TWO_SIDED)
    if kind == sp.SB:
        return oracles.sb(inst.sets, inst.weights, s.members)
    if kind == sp.HS:
        return oracles.hs(inst.sets, inst.weights, s.items)
    if kind == sp.IP:
        return oracles.ip(inst.a, inst.b, inst.donors, s.indices)
    if kind == sp.CC:
        return oracles.cc(inst.m_sets, inst.m_weights, inst.n_sets, inst.n_weights, inst.shift, s.items)
    if kind == sp.W3DM:
        return oracles.w3dm(inst.weights, s.triples)
    return oracles.x3c(dict(zip(inst.sets, inst.weights)), s.blocks)


@pytest.mark.parametrize("kind", sp.ALL_KINDS)
def test_cost_matches_oracle(kind):
    rng = random.Random(zlib.crc32(kind.encode()))
    for _ in range(150):
        inst = random_instance(kind, rng)
        s = random_solution(inst, rng)
        assert sp.feasible(inst, s)
        c = sp.cost(inst, s)
        assert c >= 0
        assert c == oracle_cost(inst, s)


@pytest.mark.parametrize("kind", [k for k in sp.ALL_KINDS if k not in (sp.W3DM, sp.X3C)])
def test_neighbor_symmetry_and_monotonicity(kind):
    rng = random.Random(7)
    for _ in range(25):
        inst = random_instance(kind, rng, n_max=4, sets_max=4)
        s = random_solution(inst, rng)
        n1 = {t for _, t in sp.kdiffer_neighbors(inst, s, 1)}
        n2 = {t for _, t in sp.kdiffer_neighbors(inst, s, 2)}
        assert n1 <= n2 and s not in n2
        for t in n1:
            assert sp.feasible(inst, t)
            assert s in {u for _, u in sp.kdiffer_neighbors(inst, t, 1)}


def test_w3dm_pq_monotone_and_symmetric():
    rng = random.Random(3)
    inst = W3dmInstance(3, {})
    for _ in range(10):
        s = random_solution(inst, rng)
        small = {t for _, t in sp.w3dm_pq_neighbors(inst, s, 2, 2)}
        large = {t for _, t in sp.w3dm_pq_neighbors(inst, s, 3, 6)}
        assert small <= large
        for t in small:
            assert s in {u for _, u in sp.w3dm_pq_neighbors(inst, t, 2, 2)}
            assert sp.replaced(s, t) <= 2 and sp.relocations(s, t) <= 2


def test_x3c_neighbors_stay_exact_covers():
    inst = SetSystem(sp.X3C, 6, (), ())
    s = sp.init_solution(inst)
    ns = [t for _, t in sp.kdiffer_neighbors(inst, s, 2)]
    assert len(ns) == 9  # 10 groupings of 6 elements minus the current one
    assert all(sp.feasible(inst, t) for t in ns)
    assert list(sp.kdiffer_neighbors(inst, s, 1)) == []


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sp_cost_at_most_weight_sum(data):
    rng = random.Random(data.draw(st.integers(0, 2**30)))
    inst = random_instance(sp.SP, rng)
    s = random_solution(inst, rng)
    total = sum(inst.weights[i] for i in s.indices)
    pairwise_disjoint = all(not (inst.sets[i] & inst.sets[j]) for i, j in itertools.combinations(s.indices, 2))
    assert sp.cost(inst, s) <= total
    if pairwise_disjoint:
        assert sp.cost(inst, s) == total


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_sb_expressible_monotone(data):
    rng = random.Random(data.draw(st.integers(0, 2**30)))
    n = rng.randint(1, 5)
    fam = [sp.mask_of(e for e in range(n) if rng.random() < 0.5) for _ in range(rng.randint(0, 4))]
    extra = sp.mask_of(e for e in range(n) if rng.random() < 0.5)
    for target in range(1 << n):
        if sp.expressible(fam, target):
            assert sp.expressible(fam + [extra], target)


def test_basis_ground_cap():
    inst = SetSystem(sp.SB, 6, (), (), bound=2)
    with pytest.raises(NeighborhoodTooLarge):
        list(sp.kdiffer_neighbors(inst, sp.init_solution(inst), 1, ground_cap=4))
