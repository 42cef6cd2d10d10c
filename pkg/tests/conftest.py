import pytest

from plslab.source_problems import CNF, NAE, Constraint, McaInstance
from plslab.set_problems import SP, SSP, SetSystem


@pytest.fixture
def i0():
    """Tri-colored MCA with one variable per color and two constraints."""
    c1 = Constraint((0, 1, 2), {(1, 1, 1): 2, (2, 2, 2): 5})
    c2 = Constraint((0, 1, 2), {(2, 2, 2): 3})
    return McaInstance(("x", "y", "z"), 2, (c1, c2), coloring=("blue", "red", "white"), occurrence_bound=2)


@pytest.fixture
def i1():
    return McaInstance(("x", "y"), 2, (Constraint((0, 1), weight=3),), NAE)


@pytest.fixture
def i2():
    """Single clause x OR NOT y of weight 3."""
    return McaInstance(("x", "y"), 2, (Constraint((0, 1), weight=3, polarity=(True, False)),), CNF, max_clause_len=3)


@pytest.fixture
def sp_toy():
    return SetSystem(SP, 3, (frozenset({0, 1}), frozenset({1, 2})), (5, 4), bound=2)


@pytest.fixture
def ssp_toy():
    return SetSystem(SSP, 2, (frozenset({0, 1}),), (3,))
