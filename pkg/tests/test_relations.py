import itertools
from fractions import Fraction

import pytest

from aspolylog.cinf import CInf
from aspolylog.context import precision
from aspolylog.ffield import FieldTower
from aspolylog.polylog import cmpl_series, matmul, psi_matrix
from aspolylog.relations import (build_phi, chang_mishiba_check, eulerian_check, matrix_residual,
                                 orthogonality_check, recognize_rational, zeta_brute)
from aspolylog.special import pi_tilde
from aspolylog.tate import TateSeries

TOL = Fraction(-32)


def th(tw, k=1):
    return CInf.theta(tw, k)


def one(tw):
    return CInf.one(tw)


def ints(poly):
    return [int(v[0]) for v in poly]


def test_phi_depth_one_pattern(tower):
    z = th(tower)
    P = build_phi((2,), [z], T=8)
    s = TateSeries.from_coeffs(tower, [-th(tower), 1], 8)
    assert (P[0][0] - s * s).bound() < -50
    assert P[0][1].is_zero() and (P[1][1] - TateSeries.one(tower, 8)).bound() < -50
    zq = z.frobenius(-1)
    # a q-th root keeps 1/q of the window
    assert (P[1][0] - (s * s).scale(zq)).bound() < Fraction(-64, tower.q) + 4


@pytest.mark.parametrize("star", [False, True])
def test_phi_zero_points_block_diagonal(tower, star):
    P = build_phi((1, 2), [CInf.zero(tower)] * 2, star=star, T=8)
    for r, c in itertools.product(range(3), repeat=2):
        if r != c:
            assert P[r][c].is_zero()


def test_star_phi_alternating_products(tower):
    z1, z2 = th(tower), th(tower) + one(tower)
    P = build_phi((1, 1), [z1, z2], star=True, T=8, twisted=True)
    s = TateSeries.from_coeffs(tower, [-th(tower, tower.q), 1], 8)
    assert (P[1][0] + (s * s).scale(z2)).bound() < -50
    assert (P[2][0] - (s * s).scale(z1 * z2)).bound() < -50
    assert (P[2][1] + s.scale(z1)).bound() < -50


def test_psi_inverse_twist_identity():
    tw = FieldTower.for_q(2)
    with precision(cap=32):
        zs = [th(tw), th(tw) + one(tw)]
        w = (1, 1)
        P = psi_matrix(w, zs, 16)
        lhs = [[x.twist(-1) for x in row] for row in P]
        rhs = matmul(build_phi(w, zs, T=16), P)
        assert matrix_residual(lhs, rhs) < -12


def test_orthogonality_depth_one(tower):
    rep = orthogonality_check((2,), [th(tower)])
    assert rep.verdict and rep.twist_residual < TOL


def test_orthogonality_depth_two(tower):
    rep = orthogonality_check((1, 2), [th(tower), th(tower) + one(tower)])
    assert rep.verdict
    assert rep.twist_residual < TOL
    assert len(rep.product) == 3 and rep.corner is rep.product[2][0]


def test_chang_mishiba_zero_points(tower):
    rep = chang_mishiba_check((1, 1), [CInf.zero(tower)] * 2)
    assert rep.coefficient.is_zero() and rep.verdict


def test_chang_mishiba_depth_one(tower):
    rep = chang_mishiba_check((2,), [th(tower)])
    assert rep.verdict and rep.coefficient.is_zero()


def test_chang_mishiba_inside_both_regions(tower):
    rep = chang_mishiba_check((1, 2), [th(tower), th(tower) + one(tower)])
    assert rep.verdict
    assert rep.series_residual is not None and rep.series_residual < TOL
    assert rep.series_coefficient_match


def test_chang_mishiba_shifted_branch_moves_coefficient(tower):
    rep = chang_mishiba_check((1, 1), [th(tower), one(tower)], shifts=[[1], [0, 1]])
    assert rep.verdict and not rep.coefficient.is_zero()


def test_recognize_geometric(tower):
    r = recognize_rational(one(tower) / (th(tower) - one(tower)))
    assert ints(r.numerator) == [1]
    assert ints(r.denominator) == [tower.p - 1, 1]


def test_recognize_polynomial_q5():
    tw = FieldTower.for_q(5)
    r = recognize_rational(th(tw, 2) + CInf.const(tw, 3))
    assert ints(r.numerator) == [3, 0, 1] and ints(r.denominator) == [1]


def test_recognize_from_forty_digits():
    tw = FieldTower.for_q(3)
    with precision(cap=40):
        x = (th(tw) + one(tw)) / (th(tw, 2) + th(tw) + one(tw))
        r = recognize_rational(x)
    assert ints(r.numerator) == [1, 1] and ints(r.denominator) == [1, 1, 1]
    assert r.order <= -36


def test_recognize_rejects_fractional_exponents(tower):
    assert recognize_rational(pi_tilde(tower)) is None


def test_recognize_is_sound(tower):
    x = cmpl_series((1,), [th(tower)])
    r = recognize_rational(x, degbound=4)
    if r is not None:
        back = CInf.from_poly(tower, r.denominator) * x - CInf.from_poly(tower, r.numerator)
        assert back.is_zero()


def test_eulerian_zeta_value(tower):
    q = tower.q
    rep = eulerian_check((q - 1,), [one(tower)], [[[1, 1]], [[0, 0, 1]]])
    assert rep.verdicts == [True, True, True] and rep.consistent and all(rep.assumptions)


def test_eulerian_negative_is_consistent(tower):
    # θ+1 would not do for q = 2: there θ+1 = C_θ(1) and Li_1(1)/π̃ is rational
    z = th(tower, -1) + th(tower, -3)
    rep = eulerian_check((1,), [z], [[[1]], [[0, 1]]])
    assert rep.verdicts == [False, False, False] and rep.consistent


def _zeta_loops(tw, n, deg):
    from aspolylog.aschreier import fq_elements

    el = list(fq_elements(tw))
    acc = CInf.zero(tw)
    for d in range(deg + 1):
        for cs in itertools.product(range(len(el)), repeat=d):
            a = th(tw, d)
            for k, i in enumerate(cs):
                a = a + CInf.const(tw, el[i]) * th(tw, k)
            acc = acc + a ** (-n)
    return acc


@pytest.mark.parametrize("q,n,deg", [(2, 1, 5), (3, 2, 3), (4, 3, 2), (5, 1, 2)])
def test_zeta_brute_matches_loops(q, n, deg):
    tw = FieldTower.for_q(q)
    assert (zeta_brute(tw, n, deg) - _zeta_loops(tw, n, deg)).bound() < -60


def test_zeta_one_equals_li1(tower):
    z = zeta_brute(tower, 1, 4)
    assert (z - cmpl_series((1,), [one(tower)])).bound() < TOL
