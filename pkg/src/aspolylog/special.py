"""Ω, the Carlitz period π̃ and the Carlitz factorial-type products."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .cinf import CInf, minus_theta_root
from .context import current_cap, current_rho
from .ffield import FieldTower
from .tate import TateSeries

__all__ = ["build_omega", "pi_tilde", "carlitz_factorials", "omega_depth", "SpecialCache",
           "special_cache", "carlitz_L", "carlitz_L_inv", "carlitz_D", "carlitz_D_inv",
           "carlitz_LL", "omega_constant"]


def omega_depth(q: int, T: int, cap: int, rho: int) -> int:
    """Smallest I whose first omitted factor 1 - t/θ^{q^{I+1}} is invisible at every t^k."""
    I = 1
    while q ** (I + 1) <= cap + rho * T + 2:
        I += 1
    return I


def omega_constant(tower: FieldTower) -> CInf:
    """Ω(0) = (-θ)^{-q/(q-1)} with the fixed root of -θ."""
    return minus_theta_root(tower) ** (-tower.q)


@lru_cache(maxsize=64)
def _omega(tower: FieldTower, T: int, cap: int, rho: int, depth: Optional[int]) -> TateSeries:
    q = tower.q
    I = depth if depth is not None else omega_depth(q, T, cap, rho)
    prod = TateSeries.one(tower, T)
    th = CInf.theta(tower)
    for i in range(1, I + 1):
        inv = CInf.theta(tower, -(q**i)) if q**i <= cap + rho * T + q else CInf.zero(tower)
        prod = prod * TateSeries.from_coeffs(tower, [1, -inv], T)
    del th
    return prod.scale(omega_constant(tower))


def build_omega(tower: FieldTower, T: int = 32, depth: Optional[int] = None) -> TateSeries:
    """Ω(t) = (-θ)^{-q/(q-1)} Π_{i≥1} (1 - t/θ^{q^i}) to the current precision."""
    return _omega(tower, T, current_cap(), current_rho(), depth)


@lru_cache(maxsize=64)
def _pi(tower: FieldTower, T: int, cap: int, depth: Optional[int]) -> CInf:
    from .context import precision

    with precision(cap=cap, rho=1):
        om = build_omega(tower, T, depth)
        return om.eval(CInf.theta(tower)).inverse()


def pi_tilde(tower: FieldTower, T: int = 32, depth: Optional[int] = None) -> CInf:
    """π̃ = 1/Ω(θ)."""
    return _pi(tower, T, current_cap(), depth)


def _theta_q(tower, j):
    return CInf.theta(tower).frobenius(j)


def carlitz_L(tower: FieldTower, i: int) -> CInf:
    """L_i = (θ - θ^q)(θ - θ^{q^2})…(θ - θ^{q^i}), L_0 = 1."""
    th = CInf.theta(tower)
    acc = CInf.one(tower)
    for j in range(1, i + 1):
        acc = acc * (th - _theta_q(tower, j))
    return acc


def _factor_inv(tower, a_pow, b_pow):
    """1/(θ^{q^a} - θ^{q^b}) for a < b, computed without forming θ^{q^b}."""
    # = -θ^{-q^b} Σ_k θ^{k(q^a - q^b)}, written down digit by digit
    q, e = tower.q, tower.e
    cap = current_cap()
    hi = -(q**b_pow)
    if hi < -cap:
        return CInf.zero(tower)
    gap = q**a_pow - q**b_pow
    minus_one = (-tower.field.one()) % tower.p
    digits = {}
    x = hi
    while x >= -cap:
        digits[x * e] = minus_one
        x += gap
    return CInf.from_digits(tower, digits)


def carlitz_L_inv(tower: FieldTower, i: int) -> CInf:
    """1/L_i computed factor by factor (stays small in norm)."""
    return _L_inv(tower, i, current_cap())


@lru_cache(maxsize=512)
def _L_inv(tower, i, cap):
    acc = CInf.one(tower)
    for j in range(1, i + 1):
        acc = acc * _factor_inv(tower, 0, j)
    return acc


def carlitz_D(tower: FieldTower, i: int) -> CInf:
    """D_i = Π_{j<i} (θ^{q^i} - θ^{q^j}), D_0 = 1."""
    acc = CInf.one(tower)
    if i == 0:
        return acc
    ti = _theta_q(tower, i)
    for j in range(i):
        acc = acc * (ti - _theta_q(tower, j))
    return acc


def carlitz_D_inv(tower: FieldTower, i: int) -> CInf:
    acc = CInf.one(tower)
    for j in range(i):
        acc = acc * (-_factor_inv(tower, j, i))
    return acc


def carlitz_LL(tower: FieldTower, i: int, T: int = 32) -> TateSeries:
    """𝕃_i = (t - θ^q)(t - θ^{q^2})…(t - θ^{q^i}), 𝕃_0 = 1."""
    acc = TateSeries.one(tower, T)
    for j in range(1, i + 1):
        acc = acc * TateSeries.from_coeffs(tower, [-_theta_q(tower, j), 1], T)
    return acc


def carlitz_factorials(tower: FieldTower, i_max: int, T: int = 32):
    """Lists (L_0..L_imax, D_0..D_imax, 𝕃_0..𝕃_imax)."""
    L = [carlitz_L(tower, i) for i in range(i_max + 1)]
    D = [carlitz_D(tower, i) for i in range(i_max + 1)]
    LL = [carlitz_LL(tower, i, T) for i in range(i_max + 1)]
    return L, D, LL


@dataclass
class SpecialCache:
    """Precomputed special values for one tower and precision."""

    tower: FieldTower
    T: int
    product_depth: int
    omega: TateSeries
    omega_inv: TateSeries
    pi_tilde: CInf
    L: list
    Lt: list

    def to_json(self):
        return {"T": self.T, "product_depth": self.product_depth,
                "pi_tilde": self.pi_tilde.to_json(),
                "omega": self.omega.to_json()}


def special_cache(tower: FieldTower, T: int = 32, i_max: int = 3, depth: Optional[int] = None) -> SpecialCache:
    om = build_omega(tower, T, depth)
    I = depth if depth is not None else omega_depth(tower.q, T, current_cap(), current_rho())
    return SpecialCache(tower, T, I, om, om.invert(), pi_tilde(tower, T, depth),
                        [carlitz_L(tower, i) for i in range(i_max + 1)],
                        [carlitz_LL(tower, i, T) for i in range(i_max + 1)])
