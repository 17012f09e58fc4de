"""Carlitz multiple (star) polylogarithms: series, continuation and branches.

Conventions used throughout.  For a weight ``n = (n_1, …, n_d)`` and points
``Z_1, …, Z_d`` put ``W_j = Ω^{n_j} Z_j`` and ``w_k = n_1 + … + n_k``.

* Non-star chains: ``ℓ(j..k)`` solves ``℘ ℓ(j..k) = W_j · ℓ(j+1..k)^{(1)}`` with
  ``ℓ(k+1..k) = 1``.  The branch vector is ``Ω^{-w}(ℓ(d..d), ℓ(d-1..d), …, ℓ(1..d))``.
* Star chains: ``ℓ⋆(j..k)`` solves ``℘ ℓ⋆(j..k) = W_j · ℓ⋆(j+1..k)``.  The branch
  vector is ``Ω^{-w}(ℓ⋆(1..d), ℓ⋆(2..d), …, ℓ⋆(d..d))``.

Every chain stage uses the canonical section of ℘.  Since each ``ℓ`` is entire,
evaluation at ``t = θ`` is ``π̃^w · ℓ(θ)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np

from .aschreier import wp, wp_inv
from .cinf import CInf
from .context import current_cap, current_rho
from .errors import NotReducible, OutOfRegion, PrecisionExhausted, ZeroNorm
from .ffield import FieldTower
from .special import build_omega, carlitz_L_inv, pi_tilde
from .tate import TateSeries, _cap_ctx

__all__ = [
    "Weight", "BranchVector", "MonodromyBasis", "cmpl_series", "region_test", "tmotivic_series",
    "li0_branch", "vec_li_branch", "monodromy_basis", "evaluate_branch", "lattice_reduce",
    "series_vector", "shift_branch", "difference_residual", "psi_matrix", "psi_star_matrix",
    "phi_matrix", "omega_power", "INSIDE_DPRIME", "INSIDE_D", "INSIDE_DSTAR", "OUTSIDE",
]

INSIDE_DPRIME = "inside_D_prime"
INSIDE_D = "inside_D"
INSIDE_DSTAR = "inside_D_star"
OUTSIDE = "outside"

_HORIZON = 12
_MAX_TERMS = 48


@dataclass(frozen=True)
class Weight:
    """Index tuple (n_1, …, n_d)."""

    n: tuple

    def __post_init__(self):
        n = tuple(int(x) for x in self.n)
        object.__setattr__(self, "n", n)
        if not n:
            raise ValueError("depth must be at least 1")
        if any(x < 0 for x in n):
            raise ValueError("weights must be nonnegative")

    @classmethod
    def parse(cls, s) -> "Weight":
        if isinstance(s, Weight):
            return s
        if isinstance(s, str):
            return cls(tuple(int(x) for x in s.replace(" ", "").split(",") if x))
        return cls(tuple(s))

    @property
    def d(self) -> int:
        return len(self.n)

    @property
    def w(self) -> int:
        return sum(self.n)

    def partial(self, k: int) -> int:
        """n_1 + … + n_k."""
        return sum(self.n[:k])

    def check_entry(self):
        if any(x < 1 for x in self.n):
            raise ValueError("continuation needs every n_i >= 1")

    def sub(self, i: int, j: int) -> "Weight":
        """(n_i, …, n_j), 1-based inclusive."""
        return Weight(self.n[i - 1 : j])

    def reversed(self) -> "Weight":
        return Weight(tuple(reversed(self.n)))

    def to_json(self):
        return list(self.n)


# ---------------------------------------------------------------------------
# Ω powers


@lru_cache(maxsize=128)
def _omega_power(tower: FieldTower, T: int, cap: int, rho: int, k: int) -> TateSeries:
    om = build_omega(tower, T)
    if k == 0:
        return TateSeries.one(tower, T)
    if k < 0:
        return _omega_power(tower, T, cap, rho, -1) ** (-k) if k != -1 else om.invert()
    return om**k


def omega_power(tower: FieldTower, T: int, k: int) -> TateSeries:
    """Ω^k (k may be negative) at the current precision."""
    return _omega_power(tower, T, current_cap(), current_rho(), k)


def _as_series(Z, T: int, tower: Optional[FieldTower] = None) -> TateSeries:
    if isinstance(Z, TateSeries):
        return Z
    if isinstance(Z, CInf):
        return TateSeries.const(Z, T)
    if tower is None:
        raise TypeError("integer point needs a tower")
    return TateSeries.const(CInf.const(tower, int(Z)), T)


def _rewindow(f: TateSeries) -> TateSeries:
    return TateSeries._build(f.tower, f.H, f.A, f.lo)


# ---------------------------------------------------------------------------
# nested sums and region tests


def _log_term(q: int, a: Fraction, n: int, i: int) -> Fraction:
    """log_q |z^{q^i} / L_i^n| for log_q |z| = a."""
    return a * q**i - Fraction(n * (q ** (i + 1) - q), q - 1)


def _mx(a, b):
    if a is None:
        return b
    return a if b is None else max(a, b)


def _dp_best(q, logs, nvec, I, star):
    """best[j][i]: log of the largest product over tuples of depth j+1 ending at index i."""
    d = len(nvec)
    best = []
    prev = None
    for j in range(d):
        row = []
        run = None
        for i in range(I):
            own = _log_term(q, logs[j], nvec[j], i)
            if j == 0:
                row.append(own)
                continue
            if star:
                run = _mx(run, prev[i])
                row.append(None if run is None else own + run)
            else:
                row.append(None if run is None else own + run)
                run = _mx(run, prev[i])
        best.append(row)
        prev = row
    return best


def region_test(weight, norms: Sequence, star: bool = False, q: Optional[int] = None) -> str:
    """Classify a point by the log_q norms of its coordinates (None for a zero coordinate).

    Exact polydisk test first; otherwise a decay witness for the summand norm
    ``C - Σ δ_j q^{i_j}`` along every way the top indices can run off to infinity.
    """
    weight = Weight.parse(weight)
    if q is None:
        raise ValueError("q is required")
    if len(norms) != weight.d:
        raise ValueError("one norm per coordinate")
    if any(a is None for a in norms):
        return INSIDE_DPRIME
    a = [Fraction(x) for x in norms]
    delta = [Fraction(n * q, q - 1) - x for n, x in zip(weight.n, a)]
    if all(x > 0 for x in delta):
        return INSIDE_DPRIME
    d = weight.d
    margin = max(abs(x) for x in delta) * d * Fraction(1, q**_HORIZON)
    for k in range(d):
        # suffix k..d-1 grows; offsets o_{d-1} = 0 and o_j > o_{j+1} (>= for star)
        best = _min_offset_sum(delta[k:], q, star)
        if best <= margin:
            return OUTSIDE
    return INSIDE_DSTAR if star else INSIDE_D


def _min_offset_sum(delta, q, star):
    """min over offsets of Σ δ_j q^{-o_j}, last offset 0, offsets growing toward the front."""
    L = len(delta)
    # dynamic programming from the back: f[o] = best sum for the processed tail with current offset o
    f = {0: delta[-1]}
    for j in range(L - 2, -1, -1):
        g = {}
        for o, val in f.items():
            start = o if star else o + 1
            for o2 in range(start, _HORIZON + 1):
                v = val + delta[j] * Fraction(1, q**o2)
                if o2 not in g or v < g[o2]:
                    g[o2] = v
        f = g
        if not f:
            return Fraction(-1)
    return min(f.values())


def _nested(u, strict: bool, zero, one):
    """Σ over i_1 < … < i_d (or ≤) of u[0][i_1] ⋯ u[d-1][i_d]."""
    d = len(u)
    I = len(u[0])
    prev = [one] * I
    for j in range(d):
        cur = []
        run = zero
        for i in range(I):
            if strict:
                cur.append(u[j][i] * prev[i] if j == 0 else u[j][i] * run)
                run = run + prev[i] if j else run
            else:
                run = run + prev[i] if j else run
                cur.append(u[j][i] * (prev[i] if j == 0 else run))
        if j == 0:
            prev = cur
            continue
        prev = cur
    total = zero
    for x in prev:
        total = total + x
    return total


def _cutoff(q, logs, nvec, star, cap):
    """Number of indices to sum and the extra window needed for the partial products."""
    for I in range(4, _MAX_TERMS + 1):
        best = _dp_best(q, logs, nvec, I + 4, star)
        last = [b for b in best[-1][I:] if b is not None]
        if last and all(b < -cap - 1 for b in last) and _decreasing(last):
            # z^{q^i} is formed before dividing by L_i^n, so its norm counts too
            peak = max(_flat_max(best), max(logs[j] * q**i for j in range(len(nvec)) for i in range(I)))
            return I, max(0, math.ceil(peak)) + 2
    raise OutOfRegion("summand norms do not fall below the floor within the index limit")


def _decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


def _flat_max(best):
    return max(b for row in best for b in row if b is not None)


def cmpl_series(weight, zs: Sequence[CInf], star: bool = False) -> CInf:
    """Li_{n}(z) or Li⋆_{n}(z) by direct summation."""
    weight = Weight.parse(weight)
    weight.check_entry()
    zs = list(zs)
    if len(zs) != weight.d:
        raise ValueError("one point per weight entry")
    tower = zs[0].tower
    for z in zs[1:]:
        if z.tower != tower:
            from .cinf import _merge_towers
            tower = _merge_towers(tower, z.tower)
    zs = [z.retower(tower) for z in zs]
    if any(z.is_zero() for z in zs):
        return CInf.zero(tower)
    q = tower.q
    logs = [z.norm() for z in zs]
    if region_test(weight, logs, star, q) == OUTSIDE:
        raise OutOfRegion(f"point with log-norms {[str(x) for x in logs]} lies outside the region")
    cap = current_cap()
    I, extra = _cutoff(q, logs, weight.n, star, cap)
    with _cap_ctx(cap + extra):
        Linv = [carlitz_L_inv(tower, i) for i in range(I)]
        u = [[z.frobenius(i) * (Linv[i] ** n) for i in range(I)] for z, n in zip(zs, weight.n)]
        s = _nested(u, not star, CInf.zero(tower), CInf.one(tower))
    return s.truncate(-cap * s.e) if not s.is_zero() else CInf.zero(s.tower)


def _LL_inv(tower: FieldTower, i: int, T: int) -> TateSeries:
    """1/𝕃_i as a power series in t."""
    acc = TateSeries.one(tower, T)
    q = tower.q
    cap = current_cap()
    for j in range(1, i + 1):
        # 1/(t - θ^{q^j}) = -Σ_k θ^{-q^j (k+1)} t^k
        cs = []
        for k in range(T + 1):
            ex = q**j * (k + 1)
            cs.append(-CInf.theta(tower, -ex) if ex <= cap + current_rho() * k + 1 else CInf.zero(tower))
        acc = acc * TateSeries.from_coeffs(tower, cs, T)
    return acc


def tmotivic_series(weight, Zs: Sequence, star: bool = False, T: Optional[int] = None) -> TateSeries:
    """The t-motivic series Σ Π Z_j^{(i_j)} / 𝕃_{i_j}^{n_j} (strict or weak index order)."""
    weight = Weight.parse(weight)
    weight.check_entry()
    if T is None:
        T = next((Z.T for Z in Zs if isinstance(Z, TateSeries)), 32)
    tower = next(Z.tower for Z in Zs if isinstance(Z, (TateSeries, CInf)))
    Zs = [_as_series(Z, T, tower) for Z in Zs]
    if any(Z.is_zero() for Z in Zs):
        return TateSeries.zero(Zs[0].tower, T)
    tower = Zs[0].tower
    q = tower.q
    logs = [Z.gauss_norm() for Z in Zs]
    if region_test(weight, logs, star, q) == OUTSIDE:
        raise OutOfRegion("Gauss norms violate the convergence condition")
    cap = current_cap()
    I, extra = _cutoff(q, logs, weight.n, star, cap)
    with _cap_ctx(cap + extra):
        Li = [_LL_inv(tower, i, T) for i in range(I)]
        u = [[Z.twist(i) * (Li[i] ** n) for i in range(I)] for Z, n in zip(Zs, weight.n)]
        s = _nested(u, not star, TateSeries.zero(tower, T), TateSeries.one(tower, T))
    return _rewindow(s)


# ---------------------------------------------------------------------------
# continuation


def li0_branch(Z: TateSeries) -> TateSeries:
    """Canonical solution of ℘(X) = Z."""
    return wp_inv(Z)


def _chain(W: List[TateSeries], star: bool):
    """ℓ(j..d) for j = d..1 (index j-1 in the returned list)."""
    d = len(W)
    out = [None] * d
    nxt = None
    for j in range(d - 1, -1, -1):
        if nxt is None:
            rhs = W[j]
        else:
            rhs = W[j] * (nxt if star else nxt.twist(1))
        out[j] = wp_inv(rhs)
        nxt = out[j]
    return out


@dataclass
class BranchVector:
    """A branch of the continued (star) multiple polylogarithm as a vector in 𝕋^d.

    ``raw[i]`` is component ``i`` multiplied by Ω^w; it is entire.
    """

    weight: Weight
    star: bool
    points: list
    raw: list
    _comp: Optional[list] = field(default=None, repr=False)

    @property
    def tower(self):
        return self.raw[0].tower

    @property
    def T(self):
        return self.raw[0].T

    @property
    def components(self) -> list:
        if self._comp is None:
            oi = omega_power(self.tower, self.T, -self.weight.w)
            self._comp = [oi * r for r in self.raw]
        return self._comp

    def depth_value(self) -> TateSeries:
        return self.components[0 if self.star else -1]

    def to_json(self):
        return {"weight": self.weight.to_json(), "star": self.star,
                "raw": [r.to_json() for r in self.raw]}


def _points(weight, Zs, T, tower=None):
    if tower is None:
        tower = next(Z.tower for Z in Zs if isinstance(Z, (TateSeries, CInf)))
    return [_as_series(Z, T, tower) for Z in Zs]


def _W(weight: Weight, Zs):
    tower = Zs[0].tower
    T = Zs[0].T
    return [omega_power(tower, T, n) * Z for n, Z in zip(weight.n, Zs)]


def vec_li_branch(weight, Zs: Sequence, star: bool = False, T: int = 32) -> BranchVector:
    """The canonical branch vector."""
    weight = Weight.parse(weight)
    weight.check_entry()
    if len(Zs) != weight.d:
        raise ValueError("one point per weight entry")
    Zs = _points(weight, Zs, T)
    W = _W(weight, Zs)
    ch = _chain(W, star)
    raw = ch if star else list(reversed(ch))
    return BranchVector(weight, star, Zs, raw)


@dataclass
class MonodromyBasis:
    """Generators of the monodromy module (columns), before or after evaluation.

    ``raw[c]`` is column ``c`` times Ω^w; columns are ordered so the matrix is
    lower triangular (non-star) or upper triangular (star).
    """

    weight: Weight
    star: bool
    raw: list
    psi: Optional[list] = None

    @property
    def tower(self):
        return self.raw[0][0].tower

    @property
    def T(self):
        return self.raw[0][0].T

    @property
    def generators(self) -> list:
        oi = omega_power(self.tower, self.T, -self.weight.w)
        return [[oi * x for x in col] for col in self.raw]

    def to_json(self):
        return {"weight": self.weight.to_json(), "star": self.star,
                "columns": [[x.to_json() for x in col] for col in self.raw]}


def monodromy_basis(weight, Zs: Sequence, star: bool = False, T: int = 32,
                    z_last=None, tower: Optional[FieldTower] = None) -> MonodromyBasis:
    """The d generators built from Z_1..Z_{d-1}; with ``z_last`` also the matrix Ψ (or Ψ⋆)."""
    weight = Weight.parse(weight)
    weight.check_entry()
    d = weight.d
    if len(Zs) != d - 1:
        raise ValueError("monodromy basis takes d-1 points")
    if tower is None:
        tower = next((Z.tower for Z in list(Zs) + [z_last] if isinstance(Z, (TateSeries, CInf))), None)
    if tower is None:
        raise ValueError("at least one point must carry a tower")
    Zs = _points(weight, list(Zs), T, tower)
    one = TateSeries.one(tower, T)
    zero = TateSeries.zero(tower, T)
    W = _W(weight, Zs) if Zs else []
    cols = []
    for k in range(d):
        ch = _chain(W[:k], star) if k else []
        if star:
            col = list(ch) + [one] + [zero] * (d - k - 1)
        else:
            col = [zero] * (d - k - 1) + [one] + list(reversed(ch))
        cols.append(col)
    # column c has its unit at row c
    cols = cols if star else list(reversed(cols))
    psi = None
    if z_last is not None:
        pts = Zs + [_as_series(z_last, T, tower)]
        psi = psi_star_matrix(weight, pts, T) if star else psi_matrix(weight, pts, T)
    return MonodromyBasis(weight, star, cols, psi)


def shift_branch(bv: BranchVector, alphas) -> BranchVector:
    """bv + Σ α_k · generator_k with α_k ∈ F_q[t] given as coefficient lists."""
    mb = monodromy_basis(bv.weight, bv.points[:-1], bv.star, bv.T, tower=bv.tower)
    raw = list(bv.raw)
    tower = bv.tower
    for col, alpha in zip(mb.raw, alphas):
        a = TateSeries.from_coeffs(tower, list(alpha), bv.T)
        raw = [r + a * x for r, x in zip(raw, col)]
    return BranchVector(bv.weight, bv.star, bv.points, raw)


def difference_residual(bv: BranchVector) -> Fraction:
    """log_q of the largest residual of the defining difference system, computed from components."""
    w = bv.weight
    d = w.d
    tower, T = bv.tower, bv.T
    ow = omega_power(tower, T, w.w)
    raw = [ow * c for c in bv.components]
    W = _W(w, bv.points)
    worst = None
    for i in range(d):
        if bv.star:
            # raw[i] = ℓ⋆(i+1..d), ℘ raw[i] = W_{i+1} raw[i+1]
            rhs = W[i] * (raw[i + 1] if i + 1 < d else TateSeries.one(tower, T))
        else:
            # raw[i] = ℓ(d-i..d), ℘ raw[i] = W_{d-i} raw[i-1]^{(1)}
            rhs = W[d - 1 - i] * (raw[i - 1].twist(1) if i else TateSeries.one(tower, T))
        r = wp(raw[i]) - rhs
        b = r.bound()
        worst = b if worst is None else max(worst, b)
    return worst


def series_vector(weight, zs: Sequence[CInf], star: bool = False) -> list:
    """Convergent-series representative of an evaluated branch vector."""
    weight = Weight.parse(weight)
    d = weight.d
    tower = zs[0].tower
    pi = pi_tilde(tower)
    out = []
    for i in range(1, d + 1):
        if star:
            sub = weight.sub(i, d)
            out.append(pi ** weight.partial(i - 1) * cmpl_series(sub, zs[i - 1 :], True))
        else:
            sub = weight.sub(d - i + 1, d)
            out.append(pi ** weight.partial(d - i) * cmpl_series(sub, zs[d - i :], False))
    return out


def evaluate_branch(obj, strict: bool = True):
    """Substitute t = θ: a list for a branch vector, a list of columns for a basis."""
    if isinstance(obj, BranchVector):
        tower = obj.tower
        pw = pi_tilde(tower) ** obj.weight.w
        th = CInf.theta(tower)
        return [pw * r.eval(th, strict=strict) for r in obj.raw]
    if isinstance(obj, MonodromyBasis):
        tower = obj.tower
        pw = pi_tilde(tower) ** obj.weight.w
        th = CInf.theta(tower)
        return [[pw * x.eval(th, strict=strict) for x in col] for col in obj.raw]
    raise TypeError("expected a BranchVector or MonodromyBasis")


# ---------------------------------------------------------------------------
# lattice reduction


def _round_A(x: CInf):
    """Polynomial part of a Laurent element, which must have F_q digits on integer exponents."""
    if x.is_zero():
        if x.lo > 0:
            raise PrecisionExhausted("quotient known only above θ^0")
        return CInf.zero(x.tower)
    if x.lo > 0:
        raise PrecisionExhausted("quotient known only above θ^0")
    e = x.e
    digits = {}
    F = x.field
    for j, v in x.digits():
        if j < 0:
            break
        if j % e or not F.in_subfield(v, x.tower.mq):
            raise NotReducible(f"digit at θ^({j}/{e}) is not in F_q[θ]")
        digits[j] = v
    return CInf.from_digits(x.tower, digits) if digits else CInf.zero(x.tower)


def _lower(M):
    d = len(M)
    return all(M[c][r].is_zero() for c in range(d) for r in range(c))


def lattice_reduce(v: Sequence[CInf], M):
    """Reduce ``v`` modulo the lattice spanned by the columns of ``M``.

    Returns ``(coeffs, residual)`` with ``v = Σ coeffs[c]·M[c] + residual``.
    """
    if isinstance(M, MonodromyBasis):
        M = evaluate_branch(M)
    d = len(M)
    v = list(v)
    order = range(d) if _lower(M) else range(d - 1, -1, -1)
    coeffs = [None] * d
    for c in order:
        piv = M[c][c]
        if piv.is_zero():
            raise NotReducible("zero diagonal entry")
        a = _round_A(v[c] / piv)
        coeffs[c] = a
        if not a.is_zero():
            v = [x - a * y for x, y in zip(v, M[c])]
    return coeffs, v


# ---------------------------------------------------------------------------
# the matrices Ψ, Ψ⋆ and Φ


def _ell_nonstar(W, T, tower):
    """ell[(j, k)] = ℓ(j..k) for 1 <= j <= k+1 <= d+1 (ℓ(k+1..k) = 1)."""
    d = len(W)
    one = TateSeries.one(tower, T)
    ell = {}
    for k in range(0, d + 1):
        ell[(k + 1, k)] = one
        for j in range(k, 0, -1):
            ell[(j, k)] = wp_inv(W[j - 1] * ell[(j + 1, k)].twist(1))
    return ell


def _sigma(W, T, tower):
    """sig[(a, b)] for a >= b-1: star chain on (-W_a, -W_{a-1}, …, -W_b)."""
    d = len(W)
    one = TateSeries.one(tower, T)
    sig = {}
    for b in range(1, d + 2):
        sig[(b - 1, b)] = one
        for a in range(b, d + 1):
            sig[(a, b)] = wp_inv(-(W[a - 1] * sig[(a - 1, b)]))
    return sig


def psi_matrix(weight, Zs, T: int = 32):
    """Ψ as rows of TateSeries: Ψ[r][c] = Ω^{w_{d-r}} ℓ(d-r+1..d-c) for r >= c."""
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    W = _W(weight, Zs)
    ell = _ell_nonstar(W, T, tower)
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        for c in range(r + 1):
            P[r][c] = omega_power(tower, T, weight.partial(d - r)) * ell[(d - r + 1, d - c)]
    return P


def psi_star_matrix(weight, Zs, T: int = 32):
    """Ψ⋆ as rows: Ψ⋆[r][c] = Ω^{-w_{d-c}} σ(d-c ↓ d-r+1) for r >= c."""
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    sig = _sigma(_W(weight, Zs), T, tower)
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        for c in range(r + 1):
            P[r][c] = omega_power(tower, T, -weight.partial(d - c)) * sig[(d - c, d - r + 1)]
    return P


def phi_matrix(weight, Zs, T: int = 32):
    """Φ with Ψ^{(-1)} = ΦΨ; entries (t-θ)^{w} and Z^{(-1)}(t-θ)^{w} on the subdiagonal."""
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    tt = TateSeries.from_coeffs(tower, [-CInf.theta(tower), 1], T)
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    P[0][0] = tt ** weight.partial(d)
    for r in range(1, d + 1):
        P[r][r] = tt ** weight.partial(d - r)
        P[r][r - 1] = Zs[d - r].twist(-1) * tt ** weight.partial(d - r + 1)
    return P


def matmul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = None
            for k in range(m):
                if A[i][k].is_zero() or B[k][j].is_zero():
                    continue
                term = A[i][k] * B[k][j]
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else A[i][0] * 0)
        out.append(row)
    return out


def twist_matrix(A, n=1):
    return [[x.twist(n) for x in row] for row in A]


def psi_star_psi(weight, Zs, T: int = 32):
    """Ψ⋆Ψ from the chains directly: entry (r, c) = Σ_s σ(d-s ↓ d-r+1) ℓ(d-s+1..d-c)."""
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    W = _W(weight, Zs)
    ell = _ell_nonstar(W, T, tower)
    sig = _sigma(W, T, tower)
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        for c in range(r + 1):
            acc = zero
            for s in range(c, r + 1):
                acc = acc + sig[(d - s, d - r + 1)] * ell[(d - s + 1, d - c)]
            P[r][c] = acc
    return P


__all__ += ["matmul", "twist_matrix", "psi_star_psi"]
