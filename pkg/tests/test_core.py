import pytest
from hypothesis import given, settings, strategies as st

from qbflab.core import (
    EXISTS,
    FORALL,
    QCNF,
    SATISFIED,
    Block,
    enumerate_assignments,
    eval_matrix,
    parse_qdimacs,
    restrict_clause,
    restrict_qcnf,
    sorted_lits,
    write_qdimacs,
)
from qbflab.errors import FormatError, OracleScaleError, QBFError
from qbflab.generators import gen_equality, gen_random_q

from oracles import matrix_true

X1, U1, T1 = 1, 2, 3


def test_restrict_clause_examples():
    c = frozenset({X1, U1, -T1})
    assert restrict_clause(c, {X1: 0}) == frozenset({U1, -T1})
    assert restrict_clause(c, {X1: 1}) is SATISFIED
    assert restrict_clause(frozenset({T1}), {}) == frozenset({T1})


def test_restrict_eq1():
    phi = gen_equality(1)
    r = restrict_qcnf(phi, {X1: 1, U1: 1})
    assert set(r.matrix) == {frozenset({-T1}), frozenset({T1})}
    assert r.prefix == (Block(EXISTS, {T1}),)
    assert restrict_qcnf(phi, {}) is phi
    assert restrict_qcnf(phi, {X1: 1, U1: 0, T1: 1}).matrix == ()


def test_restrict_unknown_var():
    with pytest.raises(QBFError):
        restrict_qcnf(gen_equality(1), {9: 0})


def test_restriction_keeps_block_identity():
    phi = QCNF((Block(EXISTS, [1]), Block(FORALL, [2]), Block(EXISTS, [3])), [frozenset({1, 2, 3})])
    r = phi.restrict({2: 0})
    assert len(r.prefix) == 2  # two existential blocks, not merged
    assert len(r.normalize().prefix) == 1


def test_eval_matrix():
    m = gen_equality(1).matrix
    assert eval_matrix(m, {X1: 0, U1: 0, T1: 1}) is False
    assert eval_matrix(m, {X1: 0, U1: 1, T1: 1}) is True
    assert eval_matrix([], {}) is True
    with pytest.raises(QBFError):
        eval_matrix(m, {X1: 0})


def test_enumerate_assignments():
    assert list(enumerate_assignments([U1])) == [{U1: 0}, {U1: 1}]
    assert list(enumerate_assignments([])) == [{}]
    rows = list(enumerate_assignments([5, 1, 3]))
    assert len(rows) == 8 and len({tuple(sorted(r.items())) for r in rows}) == 8
    assert rows[1] == {1: 0, 3: 0, 5: 1}
    with pytest.raises(OracleScaleError):
        list(enumerate_assignments(range(1, 30), cap=24))


def test_literal_order():
    assert sorted_lits({3, -1, 1, -2}) == [1, -1, -2, 3]


def test_write_eq1():
    text = write_qdimacs(gen_equality(1))
    lines = text.splitlines()
    assert lines[0] == "p cnf 3 3"
    assert lines[1:4] == ["e 1 0", "a 2 0", "e 3 0"]
    assert len(lines) == 7


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("p cnf 2 1\ne 1 2 0\n3 0\n", "out of range"),
        ("p cnf 2 1\nx 1 0\n", "line 2"),
        ("1 2 0\n", "before header"),
        ("p cnf 2 2\ne 1 2 0\n1 2 0\n", "announces 2 clauses"),
        ("p cnf 2 1\ne 1 0\n1 2 0\n", "free"),
        ("p cnf 2 1\ne 1 2 0\n1 2\n", ""),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(FormatError) as e:
        parse_qdimacs(text)
    assert fragment in str(e.value)


def test_comments_allowed():
    text = "c hi\np cnf 2 1\nc mid\ne 1 0\na 2 0\n1 2 0\n"
    phi = parse_qdimacs(text)
    assert phi.forall_vars == {2}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 24))
def test_qdimacs_round_trip(seed, cn):
    phi, _ = gen_random_q(3, 1, cn, seed)
    text = write_qdimacs(phi)
    back = parse_qdimacs(text)
    assert write_qdimacs(back) == text
    assert set(back.matrix) == set(phi.matrix)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.data())
def test_restriction_composes(seed, data):
    phi, _ = gen_random_q(2, 1, 6, seed)
    vs = sorted(phi.vars)
    picked = data.draw(st.lists(st.sampled_from(vs), unique=True, max_size=len(vs)))
    cut = data.draw(st.integers(0, len(picked)))
    bits = data.draw(st.lists(st.integers(0, 1), min_size=len(picked), max_size=len(picked)))
    tau = dict(zip(picked, bits))
    t1 = {v: tau[v] for v in picked[:cut]}
    t2 = {v: tau[v] for v in picked[cut:]}
    a = restrict_qcnf(restrict_qcnf(phi, t1), t2)
    b = restrict_qcnf(phi, tau)
    assert set(a.matrix) == set(b.matrix)
    assert [blk.vars for blk in a.prefix] == [blk.vars for blk in b.prefix]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 2**15 - 1))
def test_total_restriction_matches_eval(seed, bits):
    phi, _ = gen_random_q(2, 1, 5, seed)
    vs = sorted(phi.vars)
    tau = {v: (bits >> i) & 1 for i, v in enumerate(vs)}
    r = restrict_qcnf(phi, tau)
    ok = eval_matrix(phi.matrix, tau)
    assert ok == matrix_true(phi.matrix, tau)
    assert ok == (r.matrix == ())
    assert (not ok) == (frozenset() in r.matrix)
