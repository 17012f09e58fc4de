import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from aspolylog.cinf import CInf
from aspolylog.context import precision
from aspolylog.errors import DivergentEvaluation, NotAUnit
from aspolylog.ffield import FieldTower
from aspolylog.special import build_omega
from aspolylog.tate import TateSeries

from conftest import rand_cinf

T = 16


def series(tw, coeffs):
    return TateSeries.from_coeffs(tw, coeffs, T)


def small(rs, tol=-30):
    return rs.bound() < tol


def test_difference_of_squares(tower):
    f = series(tower, [1, 1]) * series(tower, [1, -1])
    assert small(f - series(tower, [1, 0, -1]))


def test_times_zero(tower, rng):
    f = series(tower, [rand_cinf(tower, rng, -3, 2) for _ in range(4)])
    assert (f * TateSeries.zero(tower, T)).is_zero()


def test_square_of_geometric_q5():
    tw = FieldTower.for_q(5)
    th = CInf.theta(tw)
    f = series(tw, [th ** (-i) for i in range(T + 1)])
    c2 = (f * f)[2]
    assert c2.agrees(CInf.const(tw, 3) * th ** -2, Fraction(-30))


def test_one_minus_t_is_not_a_unit(tower):
    with pytest.raises(NotAUnit):
        series(tower, [1, -1]).invert()


def test_invert_one_minus_t_over_theta(tower):
    th = CInf.theta(tower)
    g = series(tower, [1, -(th ** -1)]).invert()
    assert small(g - series(tower, [th ** -k for k in range(T + 1)]))


def test_invert_constant(tower):
    c = CInf.theta(tower) + CInf.one(tower)
    g = TateSeries.const(c, T).invert()
    assert g[0].agrees(CInf.one(tower) / c, Fraction(-30))


def test_omega_times_inverse(tower):
    om = build_omega(tower, T)
    assert small(om * om.invert() - TateSeries.one(tower, T))


def test_twist_fixes_fq_polynomials(tower):
    f = series(tower, [1, 0, 2 % tower.p, 1])
    assert small(f.twist(3) - f)


def test_twist_of_theta_t(tower):
    th = CInf.theta(tower)
    f = series(tower, [0, th]).twist(1)
    assert small(f - series(tower, [0, th.frobenius(1)]))


@given(st.integers(0, 10_000))
def test_twist_is_multiplicative(seed):
    rng = random.Random(seed)
    tw = FieldTower.for_q(rng.choice((2, 3, 4, 5)))
    f = series(tw, [rand_cinf(tw, rng, -3, 1) for _ in range(3)])
    g = series(tw, [rand_cinf(tw, rng, -3, 1) for _ in range(3)])
    lhs = (f * g).twist(1)
    rhs = f.twist(1) * g.twist(1)
    assert (lhs - rhs).bound() < -25


def test_eval_linear(tower):
    th = CInf.theta(tower)
    v = series(tower, [1, 1]).eval(th)
    assert v.agrees(th + CInf.one(tower), Fraction(-30))


def test_omega_vanishes_at_theta_q(tower):
    with precision(rho=tower.q):
        om = build_omega(tower, 32)
        v = om.eval(CInf.theta(tower, tower.q))
    assert v.bound() < -30


def test_eval_geometric_counts_terms(tower):
    th = CInf.theta(tower)
    f = series(tower, [th ** (-k) for k in range(T + 1)])
    v = f.eval(th, strict=False)
    assert v.agrees(CInf.const(tower, (T + 1) % tower.p), Fraction(-30))
    with pytest.raises(DivergentEvaluation):
        f.eval(th)


def test_eval_diverges_outside_disk(tower):
    f = series(tower, [1] * (T + 1))
    with pytest.raises(DivergentEvaluation):
        f.eval(CInf.theta(tower))


def test_theta_expand_t(tower):
    th = CInf.theta(tower)
    c1, c0 = TateSeries.tvar(tower, T).theta_expand(2)
    assert c1.agrees(CInf.one(tower), Fraction(-30))
    assert c0.agrees(th, Fraction(-30))


def test_theta_expand_square(tower):
    th = CInf.theta(tower)
    s = series(tower, [-th, 1])
    c1, c0 = (s * s).theta_expand(2)
    assert c1.bound() < -30 and c0.bound() < -30


def test_theta_expand_cubic(tower, rng):
    th = CInf.theta(tower)
    a = [rand_cinf(tower, rng, -2, 1) for _ in range(4)]
    got = series(tower, a).theta_expand(3)
    # binomial re-expansion of Σ a_k t^k about t = θ
    from math import comb

    want = []
    for i in (2, 1, 0):
        acc = CInf.zero(tower)
        for k in range(i, 4):
            acc = acc + CInf.const(tower, comb(k, i) % tower.p) * a[k] * th ** (k - i)
        want.append(acc)
    for g, w in zip(got, want):
        assert g.agrees(w, Fraction(-30))


def test_gauss_norm(tower):
    th = CInf.theta(tower)
    f = series(tower, [th ** -2, th, CInf.one(tower)])
    assert f.gauss_norm() == 1


def test_fq_polynomial_detection(tower):
    assert series(tower, [1, 0, 1]).in_Fq_poly()
    assert not series(tower, [CInf.theta(tower)]).in_Fq_poly()
