from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from aspolylog.cinf import CInf, cinf_arith, cinf_frobenius, cinf_norm, cinf_qth_root, minus_theta_root
from aspolylog.context import precision
from aspolylog.errors import DivisionByZero, ZeroNorm
from aspolylog.ffield import FieldTower

from conftest import rand_cinf


def th(tw, k=1):
    return CInf.theta(tw, k)


def same(a, b, tol=Fraction(-32)):
    return a.agrees(b, tol)


def test_theta_plus_theta_q5():
    tw = FieldTower.for_q(5)
    assert same(cinf_arith(th(tw), th(tw), "add"), CInf.const(tw, 2) * th(tw))


def test_theta_times_inverse(tower):
    assert same(th(tower) * th(tower, -1), CInf.one(tower))


def test_geometric_expansion(tower):
    one = CInf.one(tower)
    x = cinf_arith(one, th(tower) - one, "div")
    digits = x.digits()
    assert [j for j, _ in digits] == [-k * tower.e for k in range(1, 65)]
    back = x * (th(tower) - one)
    assert back.agrees(one, Fraction(-60))


def test_norms(tower):
    q = tower.q
    assert cinf_norm(th(tower)) == 1
    assert minus_theta_root(tower).norm() == Fraction(1, q - 1)
    assert (minus_theta_root(tower) ** q).norm() == Fraction(q, q - 1)
    assert cinf_norm(CInf.one(tower) / (th(tower, 2) + CInf.one(tower))) == -2


def test_minus_theta_root_power(tower):
    r = minus_theta_root(tower)
    assert same(r ** (tower.q - 1), -th(tower))


def test_qth_root_examples():
    tw = FieldTower.for_q(2)
    assert same(cinf_qth_root(th(tw, 2)), th(tw))
    r = cinf_qth_root(th(tw))
    assert r.e == 2 and r.norm() == Fraction(1, 2)
    x = th(tw, 2) + th(tw)
    r = cinf_qth_root(x)
    assert r.norm() == 1
    assert (r * r).agrees(x.retower(r.tower), Fraction(-30))


def test_frobenius_examples():
    tw = FieldTower.for_q(3)
    one = CInf.one(tw)
    assert same(cinf_frobenius(one, 4), one)
    assert same(cinf_frobenius(th(tw), 1), th(tw, 3))
    assert same(cinf_frobenius(th(tw) + one, 1), th(tw, 3) + one)


@given(st.integers(0, 10_000))
def test_field_axioms(seed):
    import random

    rng = random.Random(seed)
    tw = FieldTower.for_q(rng.choice((2, 3, 4, 5)))
    a = rand_cinf(tw, rng, -4, 3)
    b = rand_cinf(tw, rng, -4, 3)
    c = rand_cinf(tw, rng, -4, 3)
    tol = Fraction(-50)
    assert (a * (b + c)).agrees(a * b + a * c, tol)
    assert (a + b - b).agrees(a, tol)
    if not b.is_zero():
        assert (a / b * b).agrees(a, tol)


@given(st.integers(0, 10_000))
def test_frobenius_is_multiplicative(seed):
    import random

    rng = random.Random(seed)
    tw = FieldTower.for_q(rng.choice((2, 3, 4)))
    a = rand_cinf(tw, rng, -3, 2)
    b = rand_cinf(tw, rng, -3, 2)
    with precision(cap=40):
        lhs = (a * b).frobenius(1)
        rhs = a.frobenius(1) * b.frobenius(1)
        assert lhs.agrees(rhs, Fraction(-30))
        if not a.is_zero():
            assert a.frobenius(1).qth_root().agrees(a, Fraction(-(40 // tw.q)))


def test_zero_to_precision(tower):
    z = CInf.zero(tower)
    assert z.is_zero()
    with pytest.raises(ZeroNorm):
        z.norm()
    with pytest.raises(DivisionByZero):
        CInf.one(tower) / z
    assert z.bound() == -64


def test_floor_tracks_window(tower):
    with precision(cap=20):
        x = CInf.one(tower) / (th(tower) - CInf.one(tower))
        assert x.floor() <= -20 and x.floor() > -21


def test_json_round_trip(tower, rng):
    x = rand_cinf(tower, rng, -10, 4) + minus_theta_root(tower)
    y = CInf.from_json(tower, x.to_json())
    assert y == x.retower(y.tower)


def test_mixed_ramification_merges():
    tw = FieldTower.for_q(2)
    a = cinf_qth_root(th(tw))
    s = a + th(tw)
    assert s.e == 2 and s.norm() == 1
