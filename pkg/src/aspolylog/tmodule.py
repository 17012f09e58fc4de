"""Tensor powers C^⊗n of the Carlitz module: Exp, Log, δ₀ⁿ and the continued vec-Log.

``ρ_n(t) = θI + N + Eτ`` with N the superdiagonal nilpotent and E the single
unit in the bottom-left corner.  Exp and Log coefficients satisfy

    α_i (θ^{q^i} I + N) - (θI + N) α_i = E α_{i-1}^{(1)},
    β_i (θ^{q^i} I + N) - (θI + N) β_i = -β_{i-1} E,

which is solved exactly by a finite Neumann series since ``X ↦ XN - NX`` is
nilpotent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence

import numpy as np

from .aschreier import fq_component, wp_inv
from .cinf import CInf
from .context import current_cap
from .errors import DepthInsufficient, DivergentEvaluation, SingularRecursion
from .ffield import FieldTower
from .polylog import omega_power
from .special import _factor_inv, build_omega, pi_tilde
from .tate import TateSeries, _cap_ctx

__all__ = ["TModuleCn", "LatticeLn", "build_cn", "delta0n", "delta0n_omega", "l_operator",
           "l_operator_direct", "vec_log_n", "exp_n", "lambda_reduce", "drho_apply", "rho_t_apply",
           "drho_poly_apply", "log_series_n", "lattice_ln"]


# small matrix helpers over CInf --------------------------------------------------


def _zeros(tower, n, m=None):
    m = n if m is None else m
    return [[CInf.zero(tower) for _ in range(m)] for _ in range(n)]


def _ident(tower, n):
    M = _zeros(tower, n)
    for i in range(n):
        M[i][i] = CInf.one(tower)
    return M


def _madd(A, B, sign=1):
    return [[a + b if sign > 0 else a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def _mscale(A, c):
    return [[a * c for a in r] for r in A]


def _mfrob(A, k=1):
    return [[a.frobenius(k) for a in r] for r in A]


def _mmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    tower = A[0][0].tower
    out = _zeros(tower, n, p)
    for i in range(n):
        for j in range(p):
            acc = CInf.zero(tower)
            for k in range(m):
                if not A[i][k].is_zero() and not B[k][j].is_zero():
                    acc = acc + A[i][k] * B[k][j]
            out[i][j] = acc
    return out


def _ad_N(X):
    """X N - N X for the superdiagonal N."""
    n = len(X)
    tower = X[0][0].tower
    out = _zeros(tower, n)
    for i in range(n):
        for j in range(n):
            xn = X[i][j - 1] if j >= 1 else CInf.zero(tower)
            nx = X[i + 1][j] if i + 1 < n else CInf.zero(tower)
            out[i][j] = xn - nx
    return out


def _E_left(X):
    """E X: the first row of X moved to the last row."""
    n = len(X)
    tower = X[0][0].tower
    out = _zeros(tower, n)
    out[n - 1] = list(X[0])
    return out


def _X_E(X):
    """X E: the last column of X moved to the first column."""
    n = len(X)
    tower = X[0][0].tower
    out = _zeros(tower, n)
    for i in range(n):
        out[i][0] = X[i][n - 1]
    return out


def _sylvester(rhs, inv_d):
    """X with (θ^{q^i}-θ) X + X N - N X = rhs, given inv_d = 1/(θ^{q^i}-θ)."""
    n = len(rhs)
    X = _mscale(rhs, inv_d)
    term = X
    for _ in range(2 * n):
        term = _mscale(_ad_N(term), -inv_d)
        if all(x.is_zero() for r in term for x in r):
            return X
        X = _madd(X, term)
    if not all(x.is_zero() for r in _ad_N(term) for x in r):
        raise SingularRecursion("Sylvester iteration did not terminate")
    return X


@dataclass
class TModuleCn:
    """C^⊗n with Exp/Log coefficient matrices up to τ-depth R."""

    tower: FieldTower
    n: int
    R: int
    exp_coeffs: list
    log_coeffs: list

    @property
    def drho_t(self):
        M = _ident(self.tower, self.n)
        th = CInf.theta(self.tower)
        M = _mscale(M, th)
        for i in range(self.n - 1):
            M[i][i + 1] = CInf.one(self.tower)
        return M

    @property
    def tau_part(self):
        M = _zeros(self.tower, self.n)
        M[self.n - 1][0] = CInf.one(self.tower)
        return M

    def functional_residual(self, upto=None):
        """log_q of the largest entry of α_i(θ^{q^i}I+N) - (θI+N)α_i - Eα_{i-1}^{(1)}."""
        q = self.tower.q
        worst = None
        upto = self.R if upto is None else upto
        for i in range(1, upto + 1):
            if q**i > current_cap():
                break
            a = self.exp_coeffs[i]
            th_i = CInf.theta(self.tower, q**i)
            lhs = _madd(_mscale(a, th_i - CInf.theta(self.tower)), _ad_N(a))
            r = _madd(lhs, _E_left(_mfrob(self.exp_coeffs[i - 1])), -1)
            for row in r:
                for x in row:
                    b = x.bound()
                    worst = b if worst is None else max(worst, b)
        return worst

    def compose_exp_log(self):
        """Coefficient matrices of Exp∘Log (should be I, 0, 0, …)."""
        out = []
        for k in range(self.R + 1):
            acc = _zeros(self.tower, self.n)
            for i in range(k + 1):
                acc = _madd(acc, _mmul(self.exp_coeffs[i], _mfrob(self.log_coeffs[k - i], i)))
            out.append(acc)
        return out


def build_cn(n: int, R: int = 24, tower: FieldTower = None) -> TModuleCn:
    if n < 1 or R < 1:
        raise ValueError("n and R must be positive")
    if tower is None:
        raise ValueError("tower is required")
    alpha = [_ident(tower, n)]
    beta = [_ident(tower, n)]
    for i in range(1, R + 1):
        inv_d = -_factor_inv(tower, 0, i)
        alpha.append(_sylvester(_E_left(_mfrob(alpha[-1])), inv_d))
        beta.append(_sylvester(_mscale(_X_E(beta[-1]), CInf.const(tower, -1)), inv_d))
    return TModuleCn(tower, n, R, alpha, beta)


# actions ---------------------------------------------------------------------------


def drho_apply(x: Sequence[CInf]) -> list:
    """(θI + N) x."""
    n = len(x)
    th = CInf.theta(x[0].tower)
    return [th * x[i] + (x[i + 1] if i + 1 < n else 0) for i in range(n)]


def rho_t_apply(x: Sequence[CInf]) -> list:
    """(θI + N + Eτ) x."""
    out = drho_apply(x)
    out[-1] = out[-1] + x[0].frobenius(1)
    return out


def _drho_inv_apply(x):
    """(θI + N)^{-1} x by back substitution from the last coordinate."""
    n = len(x)
    ti = CInf.theta(x[0].tower, -1)
    out = [None] * n
    for i in range(n - 1, -1, -1):
        v = x[i] - (out[i + 1] if i + 1 < n else 0)
        out[i] = v * ti
    return out


def drho_poly_apply(a: Sequence, lam: Sequence[CInf]) -> list:
    """dρ_n(a)·λ for a ∈ F_q[t] given by coefficient vectors (low degree first), by Horner."""
    tower = lam[0].tower
    coeffs = [CInf.const(tower, c) for c in a]
    if not coeffs:
        return [CInf.zero(tower) for _ in lam]
    r = [coeffs[-1] * x for x in lam]
    for c in reversed(coeffs[:-1]):
        r = [u + c * x for u, x in zip(drho_apply(r), lam)]
    return r


def _max_log(x):
    nz = [c.norm() for c in x if not c.is_zero()]
    return max(nz) if nz else None


def exp_n(z: Sequence[CInf], tm: TModuleCn) -> list:
    """Exp_{C^⊗n}(z) via Exp(z) = ρ(t)^m Exp((θI+N)^{-m} z)."""
    z = [c.retower(tm.tower) if c.tower != tm.tower else c for c in z]
    n = tm.n
    tower = tm.tower
    if all(c.is_zero() for c in z):
        return [CInf.zero(tower) for _ in z]
    cap = current_cap()
    top = _max_log(z)
    m = max(0, int(np.ceil(float(top))) + n)
    with _cap_ctx(cap + m + n + 4):
        y = list(z)
        for _ in range(m):
            y = _drho_inv_apply(y)
        acc = [CInf.zero(tower) for _ in range(n)]
        last = None
        for i, a in enumerate(tm.exp_coeffs):
            yi = [c.frobenius(i) for c in y]
            term = [sum((a[r][s] * yi[s] for s in range(n)), CInf.zero(tower)) for r in range(n)]
            acc = [u + v for u, v in zip(acc, term)]
            last = term
        tail = _max_log(last) if last is not None else None
        if tail is not None and tail > -(cap + m + n + 4):
            raise DepthInsufficient(f"τ-depth {tm.R} leaves a tail of size q^{tail}", required=tm.R + 4)
        for _ in range(m):
            acc = rho_t_apply(acc)
    return [CInf.make(c.tower, c.hi, c.lo, c.c) if not c.is_zero() else CInf.zero(c.tower, c.lo) for c in acc]


def log_series_n(z: Sequence[CInf], tm: TModuleCn) -> list:
    """The classical Log power series (convergent inside the region)."""
    n = tm.n
    tower = tm.tower
    acc = [CInf.zero(tower) for _ in range(n)]
    for i, b in enumerate(tm.log_coeffs):
        zi = [c.frobenius(i) for c in z]
        term = [sum((b[r][s] * zi[s] for s in range(n)), CInf.zero(tower)) for r in range(n)]
        acc = [u + v for u, v in zip(acc, term)]
    tail = _max_log(term)
    if tail is not None and tail > -current_cap() / 2:
        raise DivergentEvaluation("Log series has not converged at this depth")
    return acc


# δ₀ⁿ ---------------------------------------------------------------------------------


def delta0n(f: TateSeries, n: int) -> list:
    """(c_{n-1}, …, c_0) with f = Σ c_i (t-θ)^i."""
    return f.theta_expand(n)


def _s_mul(a, b, n):
    tower = a[0].tower
    out = [CInf.zero(tower) for _ in range(n)]
    for i in range(n):
        for j in range(n - i):
            out[i + j] = out[i + j] + a[i] * b[j]
    return out


def _s_inv(a, n):
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = CInf.zero(a[0].tower)
        for j in range(1, k + 1):
            acc = acc + a[j] * out[k - j]
        out.append(-(acc * inv0))
    return out


def delta0n_omega(g: TateSeries, n: int, k: int) -> list:
    """δ₀ⁿ(Ω^{-k} g) for entire g, from the (t-θ)-expansions of Ω and g."""
    T = g.T
    om = build_omega(g.tower, T)
    eo = list(reversed(om.theta_expand(n)))
    eo_inv = _s_inv(eo, n)
    p = [CInf.one(g.tower)] + [CInf.zero(g.tower)] * (n - 1)
    for _ in range(k):
        p = _s_mul(p, eo_inv, n)
    eg = list(reversed(g.theta_expand(n)))
    return list(reversed(_s_mul(p, eg, n)))


@dataclass
class LatticeLn:
    """Λ_n = dρ_n(A)·λ with λ = δ₀ⁿ(Ω^{-n})."""

    n: int
    generator: list

    def element(self, a) -> list:
        return drho_poly_apply(a, self.generator)

    def to_json(self):
        return {"n": self.n, "generator": [c.to_json() for c in self.generator]}


def lattice_ln(tower: FieldTower, n: int, T: int = 32) -> LatticeLn:
    one = TateSeries.one(tower, T)
    return LatticeLn(n, delta0n_omega(one, n, n))


def _combined_argument(z: Sequence[CInf], T: int) -> TateSeries:
    """Σ_k (t-θ)^{n-k} z_k."""
    n = len(z)
    tower = z[0].tower
    s = TateSeries.from_coeffs(tower, [-CInf.theta(tower), 1], T)
    acc = TateSeries.zero(tower, T)
    for k in range(1, n + 1):
        acc = acc + (s ** (n - k)).scale(z[k - 1])
    return acc


def _branch_raw(Z: TateSeries, n: int) -> TateSeries:
    return wp_inv(omega_power(Z.tower, Z.T, n) * Z)


def vec_log_n(z: Sequence[CInf], T: int = 32):
    """Continued Log of C^⊗n: δ₀ⁿ of the canonical branch of 𝔏i_n at Σ(t-θ)^{n-k} z_k."""
    z = list(z)
    n = len(z)
    tower = z[0].tower
    for c in z[1:]:
        if c.tower != tower:
            from .cinf import _merge_towers
            tower = _merge_towers(tower, c.tower)
    z = [c.retower(tower) for c in z]
    lat = lattice_ln(tower, n, T)
    if all(c.is_zero() for c in z):
        return [CInf.zero(tower) for _ in z], lat
    raw = _branch_raw(_combined_argument(z, T), n)
    val = delta0n_omega(raw, n, n)
    if raw.tower != tower:
        lat = lattice_ln(raw.tower, n, T)
    return val, lat


def l_operator(z: CInf, n: int, i: int = 1, T: int = 32) -> TateSeries:
    """Canonical branch Ω^n·𝔏i_n((t-θ)^i z) (times Ω^n), the right side of the L-congruence."""
    tower = z.tower
    s = TateSeries.from_coeffs(tower, [-CInf.theta(tower), 1], T)
    return _branch_raw((s**i).scale(z), n)


def l_operator_direct(z: CInf, n: int, T: int = 32) -> TateSeries:
    """Ω^n·(t𝔏i_n(z) - 𝔏i_n(θz)) from two canonical branches."""
    tower = z.tower
    t = TateSeries.tvar(tower, T)
    a = _branch_raw(TateSeries.const(z, T), n)
    b = _branch_raw(TateSeries.const(z * CInf.theta(tower), T), n)
    return t * a - b


def lambda_reduce(v: Sequence[CInf], lat: LatticeLn):
    """(a, residual) with v = dρ_n(a)λ + residual; a is determined by the last coordinate."""
    v = list(v)
    tower = v[0].tower
    lam = [c.retower(tower) if c.tower != tower else c for c in lat.generator]
    ratio = v[-1] / lam[-1]
    coeffs = []
    if not ratio.is_zero() and ratio.hi >= 0:
        e = ratio.e
        top = ratio.hi // e
        for k in range(top + 1):
            num = k * e
            d = ratio.coeff(num) if num >= ratio.lo else np.zeros(tower.m, dtype=np.int64)
            coeffs.append(fq_component(tower, d))
        while coeffs and not np.any(coeffs[-1]):
            coeffs.pop()
    res = [x - y for x, y in zip(v, drho_poly_apply(coeffs, lam))] if coeffs else v
    return coeffs, res
