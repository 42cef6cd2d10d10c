import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plslab.core import Sense
from plslab.source_problems import (
    COLORS,
    Constraint,
    McaInstance,
    all_assignments,
    as_minimization,
    flip_neighbors,
    gen_cnf,
    gen_posnae,
    gen_tricolored_mca,
    is_local_opt_source,
    normalize,
    source_cost,
)


def test_costs_of_fixtures(i0, i1, i2):
    assert source_cost(i0, (2, 2, 2)) == 8
    assert source_cost(i1, (1, 1)) == 0
    assert source_cost(i2, (1, 2)) == 0  # x false, y true
    assert source_cost(i2, (2, 2)) == 3


def test_partial_assignment_rejected(i0):
    with pytest.raises(ValueError, match="partial"):
        source_cost(i0, (1, 2))


def test_flip_counts(i1):
    three = McaInstance(("a", "b", "c"), 2, ())
    assert len(list(flip_neighbors(three, (1, 1, 1)))) == 3
    two = McaInstance(("a", "b"), 3, ())
    assert len(list(flip_neighbors(two, (1, 1)))) == 4
    ns = [b for _, b in flip_neighbors(i1, (1, 1))]
    assert ns == [(2, 1), (1, 2)]
    assert [source_cost(i1, b) for b in ns] == [3, 3]


def test_local_opt_examples(i1):
    assert is_local_opt_source(i1, (1, 2))
    assert not is_local_opt_source(i1, (1, 1))
    flat = McaInstance(("a",), 2, (Constraint((0,), {(1,): 0, (2,): 0}),))
    assert is_local_opt_source(flat, (1,)) and is_local_opt_source(flat, (2,))


def test_generator_shapes():
    inst = gen_tricolored_mca(2, r=2, seed=1)
    assert inst.num_vars == 3
    assert [inst.coloring.count(c) for c in COLORS] == [1, 1, 1]
    assert set(inst.constraints[0].scope) == set(inst.constraints[1].scope) == {0, 1, 2}
    inst4 = gen_tricolored_mca(4, r=2, seed=3)
    assert inst4.num_vars == 6
    assert all(len(c.table) == 8 for c in inst4.constraints)
    assert gen_tricolored_mca(4, r=3, seed=9) == gen_tricolored_mca(4, r=3, seed=9)
    with pytest.raises(ValueError):
        gen_tricolored_mca(3)
    with pytest.raises(ValueError):
        gen_tricolored_mca(4, weight_low=1)


def test_posnae_cnf_shapes():
    assert len(gen_posnae(2, 1, False, 10, 5).constraints) == 1
    closed = gen_posnae(3, 1, True, 10, 5)
    assert len(closed.constraints) == 3
    assert {c.scope for c in closed.constraints} == {(0, 1), (0, 2), (1, 2)}
    cnf = gen_cnf(4, 3, 3, 10, 7)
    assert len(cnf.constraints) == 3
    assert all(1 <= len(c.scope) <= 3 for c in cnf.constraints)
    assert all(v < 4 for c in cnf.constraints for v in c.scope)
    with pytest.raises(ValueError):
        gen_cnf(4, 3, 0, 10, 7)


@settings(max_examples=40, deadline=None)
@given(m=st.sampled_from([2, 4, 6, 8]), r=st.integers(2, 3), seed=st.integers(0, 10_000),
       zf=st.sampled_from([0.0, 0.3]))
def test_tricolored_profile(m, r, seed, zf):
    inst = gen_tricolored_mca(m, r, 2, 9, zf, seed)
    assert inst.is_tricolored()
    assert inst.occurrences() == [2] * inst.num_vars
    for c in inst.constraints:
        assert sorted(inst.coloring[v] for v in c.scope) == sorted(COLORS)
        assert all(w == 0 or 2 <= w <= 9 for w in c.table.values())


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 5), k=st.integers(1, 6), seed=st.integers(0, 10_000))
def test_nae_swap_symmetry(n, k, seed):
    inst = gen_posnae(n, k, False, 9, seed)
    for a in all_assignments(inst):
        swapped = tuple(3 - x for x in a)
        assert source_cost(inst, a) == source_cost(inst, swapped)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), r=st.integers(2, 3))
def test_cost_bounded_by_total(seed, r):
    inst = gen_tricolored_mca(2, r, 2, 9, 0.2, seed)
    total = inst.total_weight()
    for a in all_assignments(inst):
        assert source_cost(inst, a) <= total


def _brute_local_opt(inst, a):
    base = source_cost(inst, a)
    for b in all_assignments(inst):
        if sum(x != y for x, y in zip(a, b)) == 1:
            c = source_cost(inst, b)
            if (c > base) if inst.sense is Sense.MAXIMIZE else (c < base):
                return False
    return True


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), which=st.sampled_from(["mca", "minca", "nae", "cnf"]))
def test_local_opt_matches_brute_force(seed, which):
    if which in ("mca", "minca"):
        inst = gen_tricolored_mca(2, 2, 2, 6, 0.3, seed)
        if which == "minca":
            inst = as_minimization(inst)
    elif which == "nae":
        inst = gen_posnae(5, 6, False, 5, seed)
    else:
        inst = gen_cnf(6, 7, 3, 5, seed)
    for a in itertools.islice(all_assignments(inst), 64):
        assert is_local_opt_source(inst, a) == _brute_local_opt(inst, a)


def test_normalize_preserves_flip_relation():
    inst = gen_tricolored_mca(4, 2, 2, 9, 0.5, seed=4)
    norm = normalize(inst)
    assert min(w for c in norm.constraints for w in c.table.values()) >= 2
    shift = None
    for a in all_assignments(inst):
        d = source_cost(norm, a) - source_cost(inst, a)
        shift = d if shift is None else shift
        assert d == shift
        assert is_local_opt_source(norm, a) == is_local_opt_source(inst, a)
