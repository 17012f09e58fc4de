"""Orthogonality, Chang-Mishiba congruences, Eulerian detection and zeta oracles."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .aschreier import wp_inv
from .cinf import CInf
from .context import current_cap
from .errors import NotReducible, PrecisionExhausted
from .ffield import GF, FieldTower, embedding_matrix
from .polylog import (OUTSIDE, BranchVector, Weight, _W, _as_series, _points, _round_A,
                      cmpl_series, evaluate_branch, matmul, monodromy_basis, omega_power,
                      psi_matrix, psi_star_matrix, region_test, series_vector, shift_branch,
                      twist_matrix, vec_li_branch)
from .special import pi_tilde
from .tate import TateSeries

__all__ = ["build_phi", "psi_gn_star", "orthogonality_check", "chang_mishiba_check",
           "RationalRecon", "recognize_rational", "eulerian_check", "zeta_brute", "fq_rounding",
           "OrthogonalityReport", "ChangMishibaReport", "EulerianReport", "matrix_residual"]


# ---------------------------------------------------------------------------
# Φ and the star matrices


def build_phi(weight, Zs, star: bool = False, T: int = 32, twisted: bool = False):
    """Φ (or Φ⋆) as rows; with ``twisted`` the Frobenius twist Φ^{(1)} built directly.

    Φ^{(1)} uses Z and (t - θ^q), which avoids taking q-th roots of the points.
    """
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    th = CInf.theta(tower)
    if twisted:
        th = th.frobenius(1)
        Zt = list(Zs)
    else:
        Zt = [Z.twist(-1) for Z in Zs]
    tt = TateSeries.from_coeffs(tower, [-th, 1], T)
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    P[0][0] = tt ** weight.partial(d)
    for r in range(1, d + 1):
        P[r][r] = tt ** weight.partial(d - r)
    for r in range(1, d + 1):
        if not star:
            P[r][r - 1] = Zt[d - r] * tt ** weight.partial(d - r + 1)
            continue
        for c in range(r):
            prod = TateSeries.one(tower, T)
            for j in range(d - r + 1, d - c + 1):
                prod = prod * Zt[j - 1]
            sign = -1 if (r - c) % 2 else 1
            P[r][c] = (prod * tt ** weight.partial(d - c)).scale(CInf.const(tower, sign))
    return P


def psi_gn_star(weight, Zs, T: int = 32):
    """The Ψ-shaped matrix of star values at -Z: entry (r, c) = Ω^{w_{d-r}} ℓ⋆(d-r+1..d-c) on -W."""
    weight = Weight.parse(weight)
    Zs = _points(weight, Zs, T)
    tower = Zs[0].tower
    d = weight.d
    W = [-x for x in _W(weight, Zs)]
    one = TateSeries.one(tower, T)
    ch = {}
    for b in range(0, d + 1):
        ch[(b + 1, b)] = one
        for a in range(b, 0, -1):
            ch[(a, b)] = wp_inv(W[a - 1] * ch[(a + 1, b)])
    zero = TateSeries.zero(tower, T)
    P = [[zero] * (d + 1) for _ in range(d + 1)]
    for r in range(d + 1):
        for c in range(r + 1):
            P[r][c] = omega_power(tower, T, weight.partial(d - r)) * ch[(d - r + 1, d - c)]
    return P


def matrix_residual(A, B) -> Fraction:
    """log_q of the largest entry bound of A - B."""
    return max((a - b).bound() for ra, rb in zip(A, B) for a, b in zip(ra, rb))


# ---------------------------------------------------------------------------
# orthogonality


def fq_rounding(c: CInf):
    """(F_q constant, distance) for one coefficient; distance is None when impossible."""
    tower = c.tower
    if c.lo > 0:
        return None, None
    d0 = c.coeff(0)
    if not tower.field.in_subfield(d0, tower.mq):
        return None, None
    r = c - CInf.const(tower, d0)
    return d0, r.bound()


@dataclass
class OrthogonalityReport:
    weight: Weight
    product: list
    verdict: bool
    worst_distance: Fraction
    twist_residual: Fraction
    corner: TateSeries

    def to_json(self):
        return {"weight": self.weight.to_json(), "verdict": self.verdict,
                "worst_distance": str(self.worst_distance),
                "twist_residual": str(self.twist_residual),
                "corner": [fq_rounding(c)[0].tolist() if fq_rounding(c)[0] is not None else None
                           for c in self.corner.coeffs]}


def orthogonality_check(weight, Zs, T: int = 32, tol: Optional[Fraction] = None) -> OrthogonalityReport:
    """Ψ⋆Ψ from the two matrices; every t-coefficient must be an F_q constant within ``tol``."""
    weight = Weight.parse(weight)
    if tol is None:
        tol = Fraction(-current_cap(), 2)
    P = psi_matrix(weight, Zs, T)
    S = psi_star_matrix(weight, Zs, T)
    M = matmul(S, P)
    worst = None
    ok = True
    for row in M:
        for entry in row:
            for c in entry.coeffs:
                if c.is_zero() and c.floor() <= tol:
                    continue
                _, dist = fq_rounding(c)
                if dist is None:
                    ok = False
                    continue
                worst = dist if worst is None else max(worst, dist)
                if dist >= tol:
                    ok = False
    tw = matrix_residual([[x.twist(1) for x in row] for row in M], M)
    if worst is None:
        worst = Fraction(-current_cap())
    return OrthogonalityReport(weight, M, ok and tw < tol, worst, tw, M[weight.d][0])


# ---------------------------------------------------------------------------
# Chang-Mishiba


@dataclass
class ChangMishibaReport:
    weight: Weight
    coefficient: CInf
    residual: Fraction
    series_residual: Optional[Fraction]
    series_coefficient_match: Optional[bool]
    verdict: bool

    def to_json(self):
        return {"weight": self.weight.to_json(), "coefficient": self.coefficient.to_json(),
                "residual": str(self.residual),
                "series_residual": None if self.series_residual is None else str(self.series_residual),
                "series_coefficient_match": self.series_coefficient_match,
                "verdict": self.verdict}


def _bilinear(star_vals, vals, pw):
    """(s_1, …, s_d, π̃^w)·(π̃^w, v_1, …, v_d)."""
    acc = star_vals[0] * pw
    for s, v in zip(star_vals[1:], vals[:-1]):
        acc = acc + s * v
    return acc + pw * vals[-1]


def chang_mishiba_check(weight, zs: Sequence[CInf], T: int = 32, shifts=None,
                        star_shifts=None, tol: Optional[Fraction] = None) -> ChangMishibaReport:
    """The bordered bilinear form of the two branch vectors, divided by π̃^{2w}, rounded to A."""
    weight = Weight.parse(weight)
    zs = list(zs)
    if tol is None:
        tol = Fraction(-current_cap(), 2)
    tower = zs[0].tower
    d = weight.d
    bv = vec_li_branch(weight, zs, False, T)
    rev = weight.reversed()
    mz = [-z for z in reversed(zs)]
    bs = vec_li_branch(rev, mz, True, T)
    if shifts is not None:
        bv = shift_branch(bv, shifts)
    if star_shifts is not None:
        bs = shift_branch(bs, star_shifts)
    pw = pi_tilde(tower) ** weight.w
    v = evaluate_branch(bv)
    s = evaluate_branch(bs)
    x = _bilinear(s, v, pw) / (pw * pw)
    a = _round_A(x)
    res = (x - a).bound()
    sres = None
    smatch = None
    q = tower.q
    if all(not z.is_zero() for z in zs):
        norms = [z.norm() for z in zs]
        inside = all(region_test(weight.sub(i, j), norms[i - 1 : j], False, q) != OUTSIDE
                     for i in range(1, d + 1) for j in range(i, d + 1))
        inside = inside and all(region_test(rev.sub(i, j), list(reversed(norms))[i - 1 : j], True, q) != OUTSIDE
                                for i in range(1, d + 1) for j in range(i, d + 1))
    else:
        inside = False
    if inside:
        sv = series_vector(weight, zs, False)
        ss = series_vector(rev, mz, True)
        xs = _bilinear(ss, sv, pw) / (pw * pw)
        sres = xs.bound()
        # the series form vanishes, so the branch coefficient is the rounding of the difference
        diff = _round_A(x - xs)
        smatch = bool((diff - a).is_zero() or (diff - a).norm() < tol)
    verdict = res < tol and (sres is None or (sres < tol and smatch))
    return ChangMishibaReport(weight, a, res, sres, smatch, verdict)


# ---------------------------------------------------------------------------
# rational reconstruction


def _pstrip(a):
    while a and not np.any(a[-1]):
        a.pop()
    return a


class _PolyRing:
    """Polynomials over F_{p^m} as lists of coefficient vectors, low degree first."""

    def __init__(self, F: GF):
        self.F = F

    def zero(self):
        return []

    def add(self, a, b):
        n = max(len(a), len(b))
        z = self.F.zero()
        return _pstrip([self.F.add(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)])

    def sub(self, a, b):
        return self.add(a, [self.F.neg(x) for x in b])

    def mul(self, a, b):
        if not a or not b:
            return []
        out = [self.F.zero() for _ in range(len(a) + len(b) - 1)]
        for i, x in enumerate(a):
            if not np.any(x):
                continue
            for j, y in enumerate(b):
                out[i + j] = self.F.add(out[i + j], self.F.mul(x, y))
        return _pstrip(out)

    def divmod(self, a, b):
        a = list(a)
        inv = self.F.inv(b[-1])
        qt = [self.F.zero() for _ in range(max(0, len(a) - len(b) + 1))]
        while len(a) >= len(b) and a:
            c = self.F.mul(a[-1], inv)
            k = len(a) - len(b)
            qt[k] = c
            for i, y in enumerate(b):
                a[i + k] = self.F.sub(a[i + k], self.F.mul(c, y))
            _pstrip(a)
        return _pstrip(qt), a

    def gcd(self, a, b):
        while b:
            _, r = self.divmod(a, b)
            a, b = b, r
        return a


@dataclass
class RationalRecon:
    numerator: list
    denominator: list
    degbound: int
    order: Fraction

    def to_cinf(self, tower: FieldTower) -> CInf:
        return CInf.from_poly(tower, self.numerator) / CInf.from_poly(tower, self.denominator)

    def to_json(self):
        return {"numerator": [v.tolist() for v in self.numerator],
                "denominator": [v.tolist() for v in self.denominator],
                "degbound": self.degbound, "order": str(self.order)}


def recognize_rational(x: CInf, degbound: int = 8, slack: int = 4) -> Optional[RationalRecon]:
    """P/Q ∈ F_q(θ) with deg Q ≤ degbound agreeing with every known digit of x, or None."""
    tower = x.tower
    F = tower.field
    e = x.e
    if x.is_zero():
        return RationalRecon([], [F.one()], degbound, x.floor())
    Hn = x.hi
    if Hn % e:
        return None
    for j, v in x.digits():
        if j % e or not F.in_subfield(v, tower.mq):
            return None
    H = Hn // e
    lo_int = -((-x.lo) // e)
    K = H - lo_int  # digits u^0..u^{K-1} known
    if K <= 0:
        return None
    y = [x.coeff(H * e - k * e) for k in range(K)]
    R = _PolyRing(F)
    bound = degbound
    while True:
        L = bound + max(H, 0)
        if L + bound + 1 + slack > K:
            return None
        got = _pade(R, y, K, L, bound)
        if got is not None:
            break
        bound *= 2
        if bound > K:
            return None
    Pt, Qt = got
    s = max(len(Qt) - 1, len(Pt) - 1 - H, 0)
    # P(θ) = θ^{H+s} P̃(1/θ), Q(θ) = θ^s Q̃(1/θ)
    P = [F.zero() for _ in range(H + s + 1)] if H + s >= 0 else None
    if P is None:
        return None
    for i, c in enumerate(Pt):
        P[H + s - i] = c
    Q = [F.zero() for _ in range(s + 1)]
    for i, c in enumerate(Qt):
        Q[s - i] = c
    P, Q = _pstrip(P), _pstrip(Q)
    g = R.gcd(Q, P) if P else Q
    if len(g) > 1:
        P, _ = R.divmod(P, g)
        Q, _ = R.divmod(Q, g)
    lead = F.inv(Q[-1])
    P = [F.mul(c, lead) for c in P]
    Q = [F.mul(c, lead) for c in Q]
    if len(Q) - 1 > degbound * 8:
        return None
    # back-multiplication over every available digit
    chk = CInf.from_poly(tower, Q) * x - CInf.from_poly(tower, P)
    if not chk.is_zero():
        return None
    return RationalRecon(P, Q, degbound, chk.floor())


def _pade(R: _PolyRing, y, K, L, M):
    """Extended Euclid on (u^K, y): first remainder of degree ≤ L with cofactor of degree ≤ M."""
    F = R.F
    r0 = [F.zero() for _ in range(K)] + [F.one()]
    r1 = _pstrip([np.asarray(c) for c in y])
    t0, t1 = [], [F.one()]
    if not r1:
        return [], [F.one()]
    while r1 and len(r1) - 1 > L:
        qt, rem = R.divmod(r0, r1)
        r0, r1 = r1, rem
        t0, t1 = t1, R.sub(t0, R.mul(qt, t1))
    if not t1 or len(t1) - 1 > M or not np.any(t1[0]):
        return None
    return r1, t1


# ---------------------------------------------------------------------------
# Eulerian detection


@dataclass
class EulerianReport:
    weight: Weight
    star: bool
    verdicts: list
    assumptions: list
    consistent: bool
    recons: list

    def to_json(self):
        return {"weight": self.weight.to_json(), "star": self.star, "verdicts": self.verdicts,
                "assumptions": self.assumptions, "consistent": self.consistent,
                "recognized": [r.to_json() if r is not None else None for r in self.recons]}


def eulerian_check(weight, zs: Sequence[CInf], branch_shifts=(), star: bool = False,
                   T: int = 32, degbound: int = 8) -> EulerianReport:
    """Try to recognize Li^o(z)/π̃^w in K for the canonical branch and each shifted one."""
    weight = Weight.parse(weight)
    tower = zs[0].tower
    bv = vec_li_branch(weight, zs, star, T)
    branches = [bv] + [shift_branch(bv, s) for s in branch_shifts]
    pw = pi_tilde(tower) ** weight.w
    verdicts, assumptions, recons = [], [], []
    for b in branches:
        vals = evaluate_branch(b)
        assumptions.append(all(not v.is_zero() for v in vals))
        top = vals[0] if star else vals[-1]
        r = recognize_rational(top / pw, degbound)
        recons.append(r)
        verdicts.append(r is not None)
    consistent = len(set(verdicts)) <= 1
    return EulerianReport(weight, star, verdicts, assumptions, consistent, recons)


# ---------------------------------------------------------------------------
# brute-force Carlitz zeta values


def _fq_tables(p, mq):
    F = GF(p, mq)
    q = p**mq
    elems = [F.from_index(i) for i in range(q)]
    add = np.array([[F.to_index(F.add(a, b)) for b in elems] for a in elems], dtype=np.int64)
    mul = np.array([[F.to_index(F.mul(a, b)) for b in elems] for a in elems], dtype=np.int64)
    neg = np.array([F.to_index(F.neg(a)) for a in elems], dtype=np.int64)
    return F, elems, add, mul, neg


def zeta_brute(tower: FieldTower, n: int, deg: int) -> CInf:
    """Σ over monic a ∈ F_q[θ] of degree ≤ deg of a^{-n}, summed term by term.

    Each a^{-n} is expanded in u = 1/θ to the window; all polynomials of one
    degree are processed together as index arrays over F_q.
    """
    p, mq = tower.p, tower.mq
    q = tower.q
    F, elems, add, mul, neg = _fq_tables(p, mq)
    cap = current_cap()
    emb = embedding_matrix(F, tower.field)
    total = CInf.zero(tower)
    for d in range(deg + 1):
        # monic a = θ^d + c_{d-1} θ^{d-1} + … : columns c_1..c_d of 1 + c_1 u + … + c_d u^d
        N = q**d
        idx = np.arange(N, dtype=np.int64)
        cols = np.zeros((N, d + 1), dtype=np.int64)
        cols[:, 0] = F.to_index(F.one())
        for j in range(1, d + 1):
            cols[:, j] = (idx // q ** (j - 1)) % q
        # a^n as a polynomial in u of degree n·d
        pw = np.zeros((N, n * d + 1), dtype=np.int64)
        pw[:, 0] = cols[:, 0]
        cur_len = 1
        for _ in range(n):
            new = np.zeros_like(pw)
            for i in range(cur_len):
                for j in range(d + 1):
                    new[:, i + j] = add[new[:, i + j], mul[pw[:, i], cols[:, j]]]
            pw = new
            cur_len += d
        K = cap + 1 - n * d  # u-digits needed: exponents -n d .. -cap
        if K <= 0:
            break
        inv = np.zeros((N, K), dtype=np.int64)
        inv[:, 0] = cols[:, 0]
        for k in range(1, K):
            acc = np.zeros(N, dtype=np.int64)
            for j in range(1, min(k, n * d) + 1):
                acc = add[acc, mul[pw[:, j], inv[:, k - j]]]
            inv[:, k] = neg[acc]
        # sum over all a of each u-digit, as F_q elements
        digits = {}
        for k in range(K):
            s = 0
            col = inv[:, k]
            counts = np.bincount(col, minlength=q)
            for v, cnt in enumerate(counts):
                for _ in range(int(cnt) % p):
                    s = add[s, v]
            if s:
                vec = (emb @ elems[s]) % p
                digits[(-n * d - k) * tower.e] = vec
        total = total + CInf.from_digits(tower, digits)
    return total
