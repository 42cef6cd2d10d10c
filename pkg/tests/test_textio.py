import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plslab import set_problems as sp
from plslab.core import Sense
from plslab.harness.textio import (
    ASSIGNMENT,
    ParseError,
    digest,
    iter_documents,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from plslab.reductions import encode, reduce
from plslab.source_problems import gen_cnf, gen_posnae, gen_tricolored_mca

KINDS = (sp.SP, sp.SC, sp.W3DM, sp.X3C, sp.SSP, sp.TS, sp.IP, sp.SB, sp.HS, sp.CC)


def _source(kind, seed):
    if kind in (sp.SP, sp.SC, sp.W3DM, sp.X3C):
        sense = Sense.MINIMIZE if kind == sp.SC else Sense.MAXIMIZE
        return gen_tricolored_mca(2, 2 + seed % 2, 2, 9, 0.3, seed, sense)
    if kind in (sp.SSP, sp.TS, sp.IP):
        return gen_posnae(2 + seed % 3, 1 + seed % 5, kind == sp.IP, 9, seed)
    return gen_cnf(1 + seed % 4, 1 + seed % 6, 3, 9, seed)


def test_i0_round_trip(i0):
    text = serialize_instance(i0)
    assert text.startswith("problem MCA\n")
    assert parse_instance(text) == i0


def test_examples_round_trip(i1, i2, sp_toy, ssp_toy):
    for inst in (i1, i2, sp_toy, ssp_toy):
        assert parse_instance(serialize_instance(inst)) == inst


@settings(max_examples=60, deadline=None)
@given(kind=st.sampled_from(KINDS), seed=st.integers(0, 10**6))
def test_generated_round_trip(kind, seed):
    src = _source(kind, seed)
    assert parse_instance(serialize_instance(src)) == src
    out = reduce(kind, src)
    text = serialize_instance(out.target)
    assert parse_instance(text) == out.target
    sol = encode(out, (1,) * src.num_vars)
    assert parse_solution(serialize_solution(kind, sol)) == (kind, sol)


def test_assignment_round_trip(i0):
    text = serialize_solution(ASSIGNMENT, (2, 1, 2), i0.variables)
    assert parse_solution(text, i0.variables) == (ASSIGNMENT, (2, 1, 2))


def test_digest_is_stable(i0):
    assert digest(i0) == digest(parse_instance(serialize_instance(i0)))
    assert len(digest(i0)) == 64


def test_comments_and_blank_lines():
    text = "# header\nproblem SSP\n\nground 2   # two elements\nset 1 3 : 1 2\n"
    inst = parse_instance(text)
    assert inst.kind == sp.SSP and inst.sets == (frozenset({0, 1}),)


@pytest.mark.parametrize(
    "text, line, column, fragment",
    [
        ("problem XYZ\n", 1, 9, "unknown problem tag"),
        ("problem SP\nground 3\nbound mC 1\nset 1 -2 : 1\n", 4, 7, "negative"),
        ("problem SP\nground 3\nbound mC 1\nset 1 2 : 1 9\n", 4, 13, "outside 1..3"),
        ("problem SP\nset 1 2 : 1\n", 2, 1, "'ground' must come before"),
        ("problem SP\nground 3\nbound mC 1\nset 2 2 : 1\n", 4, 5, "consecutive"),
        ("problem SP\nground 3\nfrobnicate\n", 3, 1, "unknown keyword"),
        ("problem SP\nground 3\nbound mC 1\nset 1 2 1\n", 4, 10, "expected ':'"),
        ("problem MCA\nvar x blue\nconstraint 1 : y\n", 3, 16, "unknown variable"),
        ("problem CNF\nvar x\nclause -1 : x\n", 3, 8, "negative"),
        ("", 1, 1, "must start with"),
    ],
)
def test_parse_errors_carry_position(text, line, column, fragment):
    with pytest.raises(ParseError) as info:
        parse_instance(text)
    err = info.value
    assert (err.line, err.column) == (line, column)
    assert fragment in str(err)


def test_semantic_errors_are_parse_errors():
    with pytest.raises(ParseError, match="positive bound"):
        parse_instance("problem SP\nground 2\nset 1 1 : 1\n")
    with pytest.raises(ParseError, match="offset"):
        parse_instance("problem CC\nground 2\nset 1 1 : 1\n")


def test_solution_errors():
    with pytest.raises(ParseError, match="unknown solution tag"):
        parse_solution("solution NOPE\n")
    with pytest.raises(ParseError, match="unexpected keyword"):
        parse_solution("solution HS\nsets 1\n")
    with pytest.raises(ParseError, match="three ids"):
        parse_solution("solution W3DM\ntriple 1 2\n")
    with pytest.raises(ParseError, match="every variable"):
        parse_solution("solution ASSIGNMENT\nvalue x 1\n", ("x", "y"))


def test_empty_solutions():
    assert parse_solution("solution HS\nelements\n") == (sp.HS, sp.Elements(frozenset()))
    assert parse_solution("solution SP\n") == (sp.SP, sp.Sets(frozenset()))
    basis = sp.Basis(frozenset({frozenset()}))
    assert parse_solution(serialize_solution(sp.SB, basis)) == (sp.SB, basis)


def test_iter_documents():
    docs = list(iter_documents("problem SSP\nground 1\n---\nsolution SSP\nside1 1\n---\n"))
    assert len(docs) == 2 and docs[1].startswith("solution SSP")


def test_unwritable_names_rejected():
    bad = sp.SetSystem(sp.SSP, 1, (), (), labels=("two words",))
    with pytest.raises(ValueError):
        serialize_instance(bad)
