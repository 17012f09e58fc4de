import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from aspolylog.errors import TowerMismatch
from aspolylog.ffield import (GF, FieldTower, FqElem, embedding_matrix, ff_arith,
                              ff_extend_constants, ff_qth_root)


def elem(tw, *c):
    return FqElem(tw, c)


def test_add_in_f5():
    tw = FieldTower(5, 1, 1, 4)
    assert ff_arith(elem(tw, 1), elem(tw, 1), "add") == elem(tw, 2)


def test_x_squared_in_f4():
    tw = FieldTower(2, 2, 2, 3)
    assert tuple(tw.modulus) in ((1, 1, 1),)
    x = elem(tw, 0, 1)
    assert ff_arith(x, x, "mul") == elem(tw, 1, 1)


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 4), (3, 2), (5, 2), (3, 4)])
def test_inverse_every_element(p, m):
    F = GF(p, m)
    for v in itertools.islice(F.elements(), 1, None):
        assert np.array_equal(F.mul(v, F.inv(v)), F.one())


@given(st.integers(1, 80))
def test_inverse_random_f81(n):
    tw = FieldTower(3, 1, 4, 2)
    a = FqElem(tw, tuple(int(c) for c in GF(3, 4).from_index(n)))
    assert a * a.inverse() == 1


def test_qth_root_trivial():
    tw = FieldTower(3, 1, 2, 2)
    assert ff_qth_root(elem(tw, 0)) == elem(tw, 0)
    assert ff_qth_root(elem(tw, 1)) == elem(tw, 1)


def test_qth_root_exhaustive_f9():
    tw = FieldTower(3, 1, 2, 2)
    F = tw.field
    for v in F.elements():
        a = FqElem(tw, tuple(v))
        r = ff_qth_root(a)
        assert r**3 == a
        roots = [w for w in F.elements() if np.array_equal(F.power(w, 3), v)]
        assert len(roots) == 1


def test_extend_constants():
    tw = FieldTower(2, 1, 1, 1)
    assert ff_extend_constants(tw, 1) is tw
    big = ff_extend_constants(tw, 2)
    assert big.field.order == 4
    emb = embedding_matrix(tw.field, big.field)
    img = {tuple((emb @ v) % 2) for v in tw.field.elements()}
    assert img == {(0, 0), (1, 0)}


def test_extend_f3_preserves_minimal_polynomial():
    src = GF(3, 1)
    dst = GF(3, 2)
    emb = embedding_matrix(src, dst)
    two = (emb @ src.from_int_scalar(2)) % 3
    one = (emb @ src.one()) % 3
    assert not dst.add(two, one).any()


@pytest.mark.parametrize("p,m,k", [(2, 2, 4), (3, 2, 4), (2, 1, 6), (5, 1, 2)])
def test_embedding_is_a_ring_map(p, m, k):
    src, dst = GF(p, m), GF(p, k)
    emb = embedding_matrix(src, dst)
    for a in src.elements():
        for b in itertools.islice(src.elements(), 0, 7):
            lhs = (emb @ src.mul(a, b)) % p
            rhs = dst.mul((emb @ a) % p, (emb @ b) % p)
            assert np.array_equal(lhs, rhs)


def test_embeddings_compose():
    a, b, c = GF(2, 1), GF(2, 2), GF(2, 4)
    assert np.array_equal(embedding_matrix(a, c), (embedding_matrix(b, c) @ embedding_matrix(a, b)) % 2)


def test_frobenius_fixes_subfield():
    F = GF(3, 4)
    for v in F.subfield_elements(2):
        assert F.in_subfield(v, 2)
    assert sum(1 for _ in F.subfield_elements(2)) == 9


def test_tower_validation():
    with pytest.raises(ValueError):
        FieldTower(4, 1, 1, 3)
    with pytest.raises(ValueError):
        FieldTower(3, 2, 3, 8)
    with pytest.raises(ValueError):
        FieldTower(3, 1, 2, 3)
    tw = FieldTower.for_q(9)
    assert (tw.p, tw.mq, tw.e) == (3, 2, 8)
    assert FieldTower.from_json(tw.to_json()) == tw


def test_mixed_towers_rejected():
    a = FqElem(FieldTower(2, 1, 1, 1), (1,))
    b = FqElem(FieldTower(2, 1, 2, 1), (1,))
    with pytest.raises(TowerMismatch):
        ff_arith(a, b, "add")
