import pytest

from qbflab.core import EXISTS, FORALL, write_qdimacs
from qbflab.errors import QBFError
from qbflab.generators import (
    RandomQMeta,
    SplitMix64,
    component_sigma2,
    decode_12,
    gen_equality,
    gen_kbkf,
    gen_kbkf_doubled,
    gen_kbkf_weak,
    gen_random_12qcnf,
    gen_random_2sat,
    gen_random_q,
    sample_distinct,
    universe_12,
)


def fs(*lits):
    return frozenset(lits)


def test_splitmix_reference_value():
    # first output of the reference SplitMix64 seeded with 0
    assert SplitMix64(0).next() == 0xE220A8397B1DCDAF


def test_substreams_differ():
    a = [SplitMix64.substream(7, i).next() for i in range(4)]
    assert len(set(a)) == 4


def test_below_in_range():
    rng = SplitMix64(3)
    assert all(0 <= rng.below(5) < 5 for _ in range(200))
    with pytest.raises(ValueError):
        rng.below(0)


def test_sample_distinct():
    s = sample_distinct(SplitMix64(1), 10, 10)
    assert sorted(s) == list(range(10))


def test_equality_layout():
    phi = gen_equality(1)
    assert set(phi.matrix) == {fs(1, 2, -3), fs(-1, -2, -3), fs(3)}
    phi2 = gen_equality(2)
    assert len(phi2.matrix) == 5 and len(phi2.vars) == 6
    assert [b.quant for b in phi2.prefix] == [EXISTS, FORALL, EXISTS]
    assert phi2.prefix[1].vars == {3, 4}
    for n in (1, 2, 3, 4):
        m = gen_equality(n).matrix
        assert len(m) == 2 * n + 1
        assert frozenset(range(2 * n + 1, 3 * n + 1)) in m
    with pytest.raises(QBFError):
        gen_equality(0)


def test_kbkf1_clauses():
    # y0=1, y1=2, y1'=3, u1=4, y2=5
    phi = gen_kbkf(1)
    assert set(phi.matrix) == {
        fs(-1),
        fs(1, -2, -3),
        fs(2, -4, -5),
        fs(3, 4, -5),
        fs(-4, 5),
        fs(4, 5),
    }


def test_kbkf_weak1():
    # y0=1, y1=2, y1'=3, u1=4, v1=5, y2=6
    phi = gen_kbkf_weak(1)
    assert {fs(2, -4, -5, -6), fs(3, 4, 5, -6), fs(-4, -5, 6), fs(4, 5, 6)} <= set(phi.matrix)
    assert [(b.quant, b.vars) for b in phi.prefix] == [
        (EXISTS, {1, 2, 3}),
        (FORALL, {4, 5}),
        (EXISTS, {6}),
    ]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lambda_variants_share_matrix(n):
    a, b = gen_kbkf_doubled(n), gen_kbkf_weak(n)
    assert set(a.matrix) == set(b.matrix)
    assert a.forall_vars == b.forall_vars
    last = b.universal_blocks()[-1]
    vs = {v for v, name in b.names.items() if name.startswith("v")}
    assert vs <= b.prefix[last].vars
    assert all(len(a.prefix[i].vars) == 2 for i in a.universal_blocks())


def test_kbkf_rejects_zero():
    for f in (gen_kbkf, gen_kbkf_doubled, gen_kbkf_weak):
        with pytest.raises(QBFError):
            f(0)


def test_random_q_deterministic():
    a, ma = gen_random_q(4, 1, 6, 7)
    b, mb = gen_random_q(4, 1, 6, 7)
    assert write_qdimacs(a) == write_qdimacs(b)
    assert ma.to_json() == mb.to_json()
    assert write_qdimacs(gen_random_q(4, 1, 6, 8)[0]) != write_qdimacs(a)


def test_random_q_structure():
    phi, meta = gen_random_q(4, 1, 6, 7)
    assert len(phi.matrix) == 4 * 6 + 1
    for i in range(4):
        comp = meta.component_clauses(i)
        assert len(set(comp)) == 6
        X, Y = set(meta.x_blocks[i]), set(meta.y_blocks[i])
        for c in comp:
            assert sum(abs(l) in X for l in c) == 1
            ys = [abs(l) for l in c if abs(l) in Y]
            assert len(ys) == 2 and ys[0] != ys[1]
    # numbering: Y blocks, then X blocks, then t
    assert meta.y_blocks[0][0] == 1 and meta.x_blocks[0][0] == 17 and meta.t_vars == [21, 22, 23, 24]


def test_random_q_universe():
    assert universe_12(3, 1) == 24
    gen_random_q(3, 1, 24, 0)
    with pytest.raises(QBFError):
        gen_random_q(3, 1, 25, 0)
    with pytest.raises(QBFError):
        gen_random_q(1, 1, 1, 0)


def test_universe_decoding_is_bijective():
    xs, ys = [10, 11], [1, 2, 3]
    seen = {decode_12(k, xs, ys) for k in range(universe_12(3, 2))}
    assert len(seen) == universe_12(3, 2)


def test_meta_json_round_trip():
    _, meta = gen_random_q(3, 2, 5, 11)
    back = RandomQMeta.from_json(meta.to_json())
    assert back.to_json() == meta.to_json()


def test_component_sigma2():
    _, meta = gen_random_q(3, 1, 5, 2)
    psi = component_sigma2(meta, 1)
    assert [b.quant for b in psi.prefix] == [EXISTS, FORALL]
    assert set(psi.matrix) == {frozenset(c) for c in meta.component_clauses(1)}


def test_12qcnf():
    a = gen_random_12qcnf(2, 4, 6, 1)
    assert write_qdimacs(a) == write_qdimacs(gen_random_12qcnf(2, 4, 6, 1))
    assert [b.quant for b in a.prefix] == [FORALL, EXISTS]
    for c in a.matrix:
        assert sum(abs(l) in a.forall_vars for l in c) == 1 and len(c) == 3
    empty = gen_random_12qcnf(2, 4, 0, 1)
    assert empty.matrix == ()


def test_2sat():
    a = gen_random_2sat(5, 3, 2)
    assert a == gen_random_2sat(5, 3, 2)
    assert len(set(a)) == 3
    assert all(len({abs(l) for l in c}) == 2 for c in a)
