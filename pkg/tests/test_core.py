import pytest

from plslab import set_problems as sp
from plslab.core import (
    BEST,
    FIRST,
    InfeasibleStart,
    NeighborhoodTooLarge,
    PivotRule,
    Termination,
    Verdict,
    improvement_step,
    local_search,
    verify_local_optimum,
)
from plslab.set_problems import Elements, Partition, Sets


def test_first_improvement_adds_heaviest_first_listed(sp_toy):
    b = sp.binding(sp_toy, k=1)
    move, s, c = improvement_step(b, Sets(frozenset()), FIRST)
    assert s == Sets(frozenset({0})) and c == 5


def test_step_at_local_optimum_is_absent(sp_toy):
    b = sp.binding(sp_toy, k=2)
    assert improvement_step(b, Sets(frozenset({0})), FIRST) is None


def test_ssp_toy_single_move(ssp_toy):
    b = sp.binding(ssp_toy, k=1)
    move, s, c = improvement_step(b, Partition(frozenset({0, 1}), frozenset()), FIRST)
    assert c == 3
    assert len(s.side1) == 1 and len(s.side2) == 1


def test_infeasible_start_rejected(sp_toy):
    b = sp.binding(sp_toy, k=1)
    with pytest.raises(InfeasibleStart, match="infeasible start"):
        improvement_step(b, Sets(frozenset({0, 1, 5})), FIRST)
    with pytest.raises(InfeasibleStart):
        local_search(b, Sets(frozenset({7})))


def test_budget_zero(sp_toy):
    b = sp.binding(sp_toy, k=1)
    rep = local_search(b, Sets(frozenset()), FIRST, budget=0)
    assert rep.steps == 0 and rep.terminated is Termination.BUDGET_EXHAUSTED
    rep = local_search(b, Sets(frozenset({0})), FIRST, budget=0)
    assert rep.steps == 0 and rep.terminated is Termination.LOCAL_OPT


def test_ssp_toy_search(ssp_toy):
    rep = local_search(sp.binding(ssp_toy), Partition(frozenset({0, 1}), frozenset()), FIRST)
    assert rep.final_cost == 3 and rep.steps == 1


def test_sp_toy_best_improvement(sp_toy):
    rep = local_search(sp.binding(sp_toy, k=1), Sets(frozenset()), BEST)
    assert rep.final == Sets(frozenset({0})) and rep.final_cost == 5 and rep.steps == 1
    assert rep.terminated is Termination.LOCAL_OPT


def test_verify_examples(sp_toy, ssp_toy):
    cert = verify_local_optimum(sp.binding(sp_toy, k=2), Sets(frozenset({0})))
    assert cert.verdict is Verdict.LOCALLY_OPTIMAL and cert.witness is None
    assert cert.neighborhood_size_scanned > 0
    cert = verify_local_optimum(sp.binding(ssp_toy), Partition(frozenset({0}), frozenset({1})))
    assert cert.locally_optimal and cert.cost == 3
    cert = verify_local_optimum(sp.binding(sp_toy, k=1), Sets(frozenset()))
    assert cert.verdict is Verdict.IMPROVABLE
    move, sol, c = cert.witness
    assert sol == Sets(frozenset({0})) and c == 5


def test_verify_cap_is_loud(sp_toy):
    with pytest.raises(NeighborhoodTooLarge, match="neighborhood too large"):
        verify_local_optimum(sp.binding(sp_toy, k=2), Sets(frozenset({0})), cap=1)


def test_random_pivot_reproducible():
    inst = sp.SetSystem(sp.HS, 6, tuple(frozenset({i, (i + 1) % 6}) for i in range(6)), (3, 1, 4, 1, 5, 9), bound=3)
    rule = PivotRule("random_improvement", seed=11)
    a = local_search(sp.binding(inst), Elements(frozenset()), rule)
    b = local_search(sp.binding(inst), Elements(frozenset()), rule)
    assert a.trajectory == b.trajectory and a.final == b.final


def test_pivot_rule_parse():
    assert PivotRule.parse("best-improvement") == BEST
    with pytest.raises(ValueError):
        PivotRule("steepest")
