import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from qbflab.cover import min_hitting_set
from qbflab.errors import OracleScaleError, QBFError
from qbflab.generators import component_sigma2, gen_random_q
from qbflab.qures import check_qures, prefix_all_exists
from qbflab.semantics import psi_false
from qbflab.twosat import refute_2sat, refute_sigma2, solve_2sat

from oracles import matrix_true, naive_2sat


def fs(*lits):
    return frozenset(lits)


two_cnf = st.lists(
    st.tuples(st.integers(1, 5), st.integers(1, 5), st.booleans(), st.booleans())
    .filter(lambda t: t[0] != t[1])
    .map(lambda t: fs(t[0] if t[2] else -t[0], t[1] if t[3] else -t[1])),
    max_size=14,
)


def test_four_clause_core():
    cls = [fs(1, 2), fs(1, -2), fs(-1, 2), fs(-1, -2)]
    sat, _ = solve_2sat(cls)
    assert not sat
    proof = refute_2sat(cls)
    assert check_qures(prefix_all_exists(cls), proof)
    assert len(proof) == 7


def test_single_clause_sat():
    sat, model = solve_2sat([fs(1, 2)])
    assert sat and (model[1] or model[2])


def test_units_allowed():
    cls = [fs(1), fs(-1, 2), fs(-2)]
    assert solve_2sat(cls)[0] is False
    assert check_qures(prefix_all_exists(cls), refute_2sat(cls))


@settings(max_examples=300, deadline=None)
@given(two_cnf)
def test_solver_agrees_with_brute_force(cls):
    sat, model = solve_2sat(cls)
    assert sat == naive_2sat(cls, 5)
    if sat:
        full = {v: model.get(v, 0) for v in range(1, 6)}
        assert matrix_true(cls, full)
    else:
        proof = refute_2sat(cls)
        assert check_qures(prefix_all_exists(cls), proof)
        assert len(proof) <= 8 * len(cls) + 8


def test_wide_clause_rejected():
    with pytest.raises(QBFError):
        solve_2sat([fs(1, 2, 3)])


def _false_components(count, n, m, cn, seed=0):
    out = []
    while len(out) < count:
        _, meta = gen_random_q(n, m, cn, seed)
        seed += 1
        for i in range(n):
            if psi_false(meta.component_clauses(i), meta.x_blocks[i]):
                out.append(component_sigma2(meta, i))
    return out[:count]


def test_sigma2_refutations():
    for psi in _false_components(20, 6, 1, 9):
        proof = refute_sigma2(psi)
        assert check_qures(psi, proof)
        assert len(proof) <= 4 * len(psi.matrix)


def test_sigma2_on_satisfiable_projection():
    psi = component_sigma2(gen_random_q(4, 1, 1, 0)[1], 0)
    with pytest.raises(QBFError):
        refute_sigma2(psi)


# hitting sets


def brute_min_hit(sets, universe):
    for k in range(0, len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            if all(set(combo) & s for s in sets):
                return list(combo)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sets(st.integers(0, 6), min_size=1), max_size=8))
def test_min_hitting_set_matches_brute(sets):
    universe = list(range(7))
    got = min_hitting_set(sets, universe)
    want = brute_min_hit(sets, universe)
    assert len(got) == len(want)
    assert all(set(got) & s for s in sets)


def test_min_hitting_set_tie_break():
    assert min_hitting_set([{1, 2}, {2, 3}, {1, 3}], [3, 2, 1]) == [3, 2]
    assert min_hitting_set([], [1, 2]) == []


def test_min_hitting_set_errors():
    with pytest.raises(ValueError):
        min_hitting_set([set()], [1])
    rng = random.Random(0)
    sets = [set(rng.sample(range(40), 2)) for _ in range(60)]
    with pytest.raises(OracleScaleError):
        min_hitting_set(sets, list(range(40)), budget=100)
