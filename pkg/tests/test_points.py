import pytest
from hypothesis import given, strategies as st

from aspolylog.errors import UsageError
from aspolylog.ffield import FieldTower
from aspolylog.points import parse_point, parse_points, parse_poly, zeta_degree


@pytest.mark.parametrize("text,p,want", [
    ("θ", 3, [0, 1]),
    ("theta^2 + 3", 5, [3, 0, 1]),
    ("(θ - 1)*(θ + 1)", 3, [2, 0, 1]),
    ("2θ", 3, [0, 2]),
    ("-θ**3", 5, [0, 0, 0, 4]),
    ("(θ+1)^2", 2, [1, 0, 1]),
    ("0", 2, []),
    ("7", 7, []),
])
def test_grammar(text, p, want):
    assert parse_poly(text, p) == want


@pytest.mark.parametrize("bad", ["θ+", "((θ)", "x", "θ^θ", ""])
def test_errors(bad):
    with pytest.raises(UsageError):
        parse_points(bad, FieldTower.for_q(3)) if bad == "" else parse_poly(bad, 3)


@given(st.lists(st.integers(0, 4), min_size=1, max_size=5))
def test_round_trip_through_text(coeffs):
    text = " + ".join(f"{c}*θ^{k}" for k, c in enumerate(coeffs))
    want = list(coeffs)
    while want and want[-1] == 0:
        want.pop()
    assert parse_poly(text, 5) == want


def test_points_list():
    tw = FieldTower.for_q(4)
    zs = parse_points("θ, θ+1; 1", tw)
    assert len(zs) == 3 and zs[0].norm() == 1 and zs[2].norm() == 0
    assert parse_point("θ^2", tw).norm() == 2


def test_feasible_zeta_degree():
    assert [zeta_degree(q) for q in (2, 3, 4, 5)] == [12, 10, 8, 7]
