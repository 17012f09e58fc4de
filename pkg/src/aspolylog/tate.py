"""Truncated Tate-algebra series Σ_{k≤T} f_k t^k with coefficients in C∞.

A series is stored densely: a common top exponent numerator ``H``, an array
``A`` of shape ``(T+1, N, m)`` with ``A[k, i]`` the digit of ``f_k`` at
``θ^{(H-i)/e}``, and a floor ``lo[k]`` per coefficient.  Products are a single
FFT convolution over (t, θ-digit, constant-field) axes.

Coefficient ``k`` is kept in the precision window ``cap + rho*k`` (values
from :func:`aspolylog.context.precision`).  With ``rho = 1`` the substitution
``t = θ`` keeps the full window ``cap``; ``rho = q`` does the same for
``t = θ^q``.
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil

import numpy as np
from scipy.signal import fftconvolve

from .cinf import CInf, _merge_towers, _reduce_cols
from .context import current_cap, current_rho
from .errors import DivergentEvaluation, NotAUnit, PrecisionExhausted, ZeroNorm
from .ffield import FieldTower, embed_rows

__all__ = ["TateSeries", "tate_arith", "tate_invert", "tate_twist", "tate_eval",
           "tate_theta_expand", "window_floors"]

_NOCAP = 10**15
_WIDE = 10**6
# floor value marking a coefficient that is exactly zero (no window applies)
EXACT = -(2**40)


def _apply_window(lo, W):
    lo = np.maximum(np.asarray(lo, dtype=np.int64), EXACT)
    return np.where(lo <= EXACT // 2, EXACT, np.maximum(lo, W))


def _finite_min(lo, default):
    fin = lo[lo > EXACT // 2]
    return int(fin.min()) if fin.size else default


def window_floors(tower: FieldTower, n: int):
    """Floor numerators of the precision windows of coefficients 0..n-1."""
    base, rho = current_cap(), current_rho()
    return -(base + rho * np.arange(n, dtype=np.int64)) * tower.e


def _exact_conv(a, b):
    """Exact integer convolution over all axes (entries are small residues)."""
    if a.size * b.size <= 40000:
        out = np.zeros(tuple(x + y - 1 for x, y in zip(a.shape, b.shape)), dtype=np.int64)
        # direct sum over the smaller operand's nonzeros
        small, big = (a, b) if np.count_nonzero(a) <= np.count_nonzero(b) else (b, a)
        for idx in zip(*np.nonzero(small)):
            sl = tuple(slice(i, i + s) for i, s in zip(idx, big.shape))
            out[sl] += small[idx] * big
        return out
    return np.rint(fftconvolve(a.astype(np.float64), b.astype(np.float64))).astype(np.int64)


def _mul_floor(hf, lf, hg, lg):
    """Floor of a product given (top-or-floor, floor) of both factors."""
    return max(hf + lg, hg + lf)


class TateSeries:
    """Immutable truncated power series in t over C∞."""

    __slots__ = ("tower", "H", "A", "lo", "_views")

    def __init__(self, tower: FieldTower, H: int, A, lo):
        self.tower = tower
        self.H = int(H)
        self.A = A
        self.lo = np.asarray(lo, dtype=np.int64)
        self._views = None

    # normalisation -----------------------------------------------------------
    @classmethod
    def _build(cls, tower, H, A, lo, window=True):
        """Apply windows, clear digits below floors and trim to the top digit."""
        p = tower.p
        lo = np.maximum(np.asarray(lo, dtype=np.int64), EXACT)
        T1 = A.shape[0]
        if window:
            lo = _apply_window(lo, window_floors(tower, T1))
        A = A % p
        N = A.shape[1]
        if N:
            rows = np.arange(N)
            keep = rows[None, :] <= (H - lo)[:, None]
            A = A * keep[:, :, None]
            nzr = np.flatnonzero(A.any(axis=(0, 2)))
        else:
            nzr = np.empty(0, dtype=np.int64)
        if nzr.size == 0:
            H = int(lo.max()) - 1
            return cls(tower, H, np.zeros((T1, 0, tower.m), dtype=np.int64), lo)
        s = int(nzr[0])
        H = H - s
        n = H - _finite_min(lo, H + 1) + 1
        A = A[:, s : s + n]
        if A.shape[1] < n:
            A = np.concatenate([A, np.zeros((T1, n - A.shape[1], tower.m), dtype=np.int64)], axis=1)
        return cls(tower, H, A, lo)

    @classmethod
    def from_cinfs(cls, coeffs, window=False) -> "TateSeries":
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs at least one coefficient")
        tower = coeffs[0].tower
        for c in coeffs[1:]:
            tower = _merge_towers(tower, c.tower)
        coeffs = [c.retower(tower) for c in coeffs]
        lo = np.array([c.lo for c in coeffs], dtype=np.int64)
        nz = [c for c in coeffs if not c.is_zero()]
        H = max(c.hi for c in nz) if nz else int(lo.max()) - 1
        n = max(0, H - _finite_min(lo, H + 1) + 1)
        A = np.zeros((len(coeffs), n, tower.m), dtype=np.int64)
        for k, c in enumerate(coeffs):
            if not c.is_zero():
                s = H - c.hi
                A[k, s : s + c.c.shape[0]] = c.c
        return cls._build(tower, H, A, lo, window=window)

    # constructors -------------------------------------------------------------
    @classmethod
    def zero(cls, tower: FieldTower, T: int) -> "TateSeries":
        """The exact zero series."""
        return cls(tower, EXACT - 1, np.zeros((T + 1, 0, tower.m), dtype=np.int64),
                   np.full(T + 1, EXACT, dtype=np.int64))

    @classmethod
    def const(cls, c: CInf, T: int) -> "TateSeries":
        return cls.from_coeffs(c.tower, [c], T)

    @classmethod
    def one(cls, tower, T):
        return cls.const(CInf.one(tower), T)

    @classmethod
    def tvar(cls, tower, T):
        """The series t."""
        return cls.from_coeffs(tower, [0, 1], T)

    @classmethod
    def from_coeffs(cls, tower, coeffs, T) -> "TateSeries":
        """Polynomial in t with the given coefficients (CInf or int); exact zeros beyond."""
        coeffs = [c if isinstance(c, CInf) else CInf.const(tower, c) for c in list(coeffs)[: T + 1]]
        for c in coeffs:
            tower = _merge_towers(tower, c.tower)
        coeffs = [c.retower(tower) for c in coeffs]
        lo = np.full(T + 1, EXACT, dtype=np.int64)
        nz = [c for c in coeffs if not c.is_zero()]
        H = max(c.hi for c in nz) if nz else EXACT - 1
        for k, c in enumerate(coeffs):
            lo[k] = c.lo
        n = max(0, H - _finite_min(lo, H + 1) + 1)
        A = np.zeros((T + 1, n, tower.m), dtype=np.int64)
        for k, c in enumerate(coeffs):
            if not c.is_zero():
                A[k, H - c.hi : H - c.hi + c.c.shape[0]] = c.c
        return cls._build(tower, H, A, lo, window=False)

    @classmethod
    def linear(cls, tower, a, b, T) -> "TateSeries":
        """a + b t."""
        return cls.from_coeffs(tower, [a, b], T)

    # views --------------------------------------------------------------------
    @property
    def T(self) -> int:
        return self.A.shape[0] - 1

    @property
    def coeffs(self):
        if self._views is None:
            self._views = tuple(
                CInf.make(self.tower, self.H, int(self.lo[k]), self.A[k], cap=_NOCAP)
                for k in range(self.A.shape[0])
            )
        return self._views

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __len__(self):
        return self.A.shape[0]

    def _tops(self):
        """Per-coefficient top numerator (floor for zero coefficients) and nonzero mask."""
        if self.A.shape[1] == 0:
            return self.lo.copy(), np.zeros(len(self), dtype=bool)
        nzrow = self.A.any(axis=2)
        has = nzrow.any(axis=1)
        first = np.argmax(nzrow, axis=1)
        tops = np.where(has, self.H - first, self.lo)
        return tops, has

    def is_zero(self) -> bool:
        return not self.A.any()

    def gauss_norm(self) -> Fraction:
        """log_q of the Gauss norm."""
        tops, has = self._tops()
        if not has.any():
            raise ZeroNorm("Gauss norm of a series that is zero to precision")
        return Fraction(int(tops[has].max()), self.tower.e)

    def bound(self) -> Fraction:
        """log_q of a strict upper bound on the Gauss norm."""
        tops, _ = self._tops()
        return Fraction(int(tops.max()), self.tower.e)

    def floor(self) -> Fraction:
        """Worst (largest) coefficient floor."""
        return Fraction(int(self.lo.max()), self.tower.e)

    def in_Fq_poly(self) -> bool:
        """Every coefficient is, within its floor, an element of F_q."""
        return all(c.in_Fq() for c in self.coeffs)

    def is_entire_certified(self, env=None) -> bool:
        """Coefficients decay faster than q^{-env·k} at the truncation.

        The terms of the series at |t| = q^{env} (default env = q) must
        decrease at the tail: every nonzero coefficient beyond T/2 lies
        strictly below the largest head term.
        """
        if env is None:
            env = self.tower.q
        tops, has = self._tops()
        e = self.tower.e
        s = tops + env * e * np.arange(len(self))
        half = self.T // 2
        if not has[: half + 1].any():
            return not has.any()
        top = s[: half + 1][has[: half + 1]].max()
        tail = s[half + 1 :][has[half + 1 :]]
        return bool(tail.size == 0 or tail.max() < top)

    # arithmetic ---------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, (CInf, int, np.integer)):
            other = TateSeries.const(_as_cinf(other, self.tower), self.T)
        if not isinstance(other, TateSeries):
            return None, None
        if other.tower == self.tower:
            return self, other
        t = _merge_towers(self.tower, other.tower)
        return self.retower(t), other.retower(t)

    def _addsub(self, other, sign):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        n = min(len(a), len(b))
        H = max(a.H, b.H)
        lo = np.maximum(a.lo[:n], b.lo[:n])
        N = max(0, H - _finite_min(lo, H + 1) + 1)
        A = np.zeros((n, N, a.tower.m), dtype=np.int64)
        for x, s in ((a, 1), (b, sign)):
            off = H - x.H
            k = min(x.A.shape[1], N - off)
            if k > 0:
                A[:, off : off + k] += s * x.A[:n, :k]
        return TateSeries._build(a.tower, H, A, lo)

    def __add__(self, other):
        return self._addsub(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._addsub(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TateSeries(self.tower, self.H, (-self.A) % self.tower.p, self.lo)

    def __mul__(self, other):
        a, b = self._coerce(other)
        if a is None:
            return NotImplemented
        n = min(len(a), len(b))
        t = a.tower
        ta, _ = a._tops()
        tb, _ = b._tops()
        # floors: max over i+j=k of max(top_a_i + lo_b_j, top_b_j + lo_a_i)
        M = np.maximum(ta[:n, None] + b.lo[None, :n], tb[None, :n] + a.lo[:n, None])
        lo = np.full(n, 4 * EXACT, dtype=np.int64)
        for i in range(n):
            lo[i:] = np.maximum(lo[i:], M[i, : n - i])
        lo = _apply_window(lo, window_floors(t, n))
        H = a.H + b.H
        N = max(0, H - _finite_min(lo, H + 1) + 1)
        if a.A.shape[1] == 0 or b.A.shape[1] == 0 or N == 0:
            return TateSeries._build(t, H, np.zeros((n, N, t.m), dtype=np.int64), lo)
        C = _exact_conv(a.A[:n, :N], b.A[:n, :N])[:n, :N]
        C = _reduce_axis(C, t)
        if C.shape[1] < N:
            C = np.concatenate([C, np.zeros((n, N - C.shape[1], t.m), dtype=np.int64)], axis=1)
        return TateSeries._build(t, H, C, lo)

    __rmul__ = __mul__

    def scale(self, c) -> "TateSeries":
        """Multiply by a t-constant."""
        c = _as_cinf(c, self.tower)
        return self.map(lambda x: x * c)

    def __pow__(self, k: int):
        if k < 0:
            return self.invert() ** (-k)
        result = TateSeries.one(self.tower, self.T)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert(self) -> "TateSeries":
        """Inverse of a unit (constant term strictly dominating)."""
        f0 = self.coeffs[0]
        if f0.is_zero():
            raise NotAUnit("constant term is zero to precision")
        tops, has = self._tops()
        bad = np.flatnonzero(has[1:] & (tops[1:] >= f0.hi))
        if bad.size:
            raise NotAUnit(f"coefficient t^{int(bad[0]) + 1} is not dominated by the constant term")
        t = self.tower
        T1 = len(self)
        W = window_floors(t, T1)
        with _cap_ctx(_WIDE):
            inv0 = f0.inverse()
            u = [c * inv0 for c in self.coeffs]
        # v = 1/u with u_0 = 1: v_k = -sum_{j>=1} u_j v_{k-j}; digit rows start at θ^0
        N = max(1, -_finite_min(W, 0) - f0.hi + 1)
        U = np.zeros((T1, N, t.m), dtype=np.int64)
        ut = np.full(T1, EXACT, dtype=np.int64)
        ul = np.array([c.lo for c in u], dtype=np.int64)
        for k, c in enumerate(u):
            if not c.is_zero():
                ut[k] = c.hi
                if -c.hi < N:
                    L = min(c.c.shape[0], N + c.hi)
                    U[k, -c.hi : -c.hi + L] = c.c[:L]
            elif self.lo[k] <= EXACT // 2:
                ul[k] = EXACT
            else:
                ut[k] = c.lo
        V = np.zeros_like(U)
        V[0, 0, 0] = 1
        vt = np.full(T1, EXACT, dtype=np.int64)
        vl = np.full(T1, EXACT, dtype=np.int64)
        vt[0] = 0
        vl[0] = max(int(ul[0]), int(W[0]) + f0.hi)
        shape = (2 * N, 2 * t.m - 1)
        Uf = np.fft.rfftn(U.astype(np.float64), s=shape, axes=(1, 2))
        Vf = np.zeros_like(Uf)
        Vf[0] = np.fft.rfftn(V[0].astype(np.float64), s=shape, axes=(0, 1))
        for k in range(1, T1):
            floor = 4 * EXACT
            for j in range(1, k + 1):
                floor = max(floor, _mul_floor(int(ut[j]), int(ul[j]), int(vt[k - j]), int(vl[k - j])))
            if floor <= EXACT // 2:
                continue
            acc = np.einsum("jab,jab->ab", Uf[1 : k + 1], Vf[k - 1 :: -1][:k])
            S = np.rint(np.fft.irfftn(acc, s=shape, axes=(0, 1))).astype(np.int64)[:N]
            S = _reduce_cols(S, t.field)
            floor = max(floor, int(W[k]) + f0.hi)
            S = (-S) % t.p
            S[max(0, -floor + 1) :] = 0
            V[k] = S
            Vf[k] = np.fft.rfftn(S.astype(np.float64), s=shape, axes=(0, 1))
            nz = np.flatnonzero(S.any(axis=1))
            vt[k] = -int(nz[0]) if nz.size else floor
            vl[k] = floor
        cs = []
        exact = vl <= EXACT // 2
        for k in range(T1):
            if exact[k]:
                cs.append(CInf.zero(t, 0))
                continue
            vk = CInf.make(t, 0, int(vl[k]), V[k], cap=_NOCAP)
            with _cap_ctx(-int(W[k]) // t.e):
                cs.append(vk * inv0)
        r = TateSeries.from_cinfs(cs)
        return TateSeries._build(r.tower, r.H, r.A, np.where(exact, EXACT, r.lo), window=False)

    def twist(self, n: int = 1) -> "TateSeries":
        """Coefficient-wise Frobenius f ↦ f^{(n)}."""
        if n == 0:
            return self
        if n < 0:
            r = self
            for _ in range(-n):
                r = r._qth_root()
            return r
        t = self.tower
        Q = t.q**n
        W = window_floors(t, len(self))
        lo = _apply_window(self.lo * Q, W)
        if self.A.shape[1] == 0:
            return TateSeries._build(t, int(lo.max()) - 1, np.zeros((len(self), 0, t.m), dtype=np.int64), lo)
        H = self.H * Q
        N = H - _finite_min(lo, H + 1) + 1
        if N <= 0:
            return TateSeries._build(t, H, np.zeros((len(self), 0, t.m), dtype=np.int64), lo)
        if N * len(self) * t.m > 50_000_000:
            raise PrecisionExhausted("Frobenius twist exceeds the digit array limit")
        rows = (N - 1) // Q + 1
        src = self.A[:, :rows]
        src = (src @ t.field.frob_matrix(t.mq * n).T) % t.p
        A = np.zeros((len(self), N, t.m), dtype=np.int64)
        A[:, ::Q][:, : src.shape[1]] = src
        return TateSeries._build(t, H, A, lo)

    def _qth_root(self):
        t = self.tower
        q = t.q
        Fi = t.field.frob_matrix(-t.mq).T
        if not self.A.any():
            lo = np.where(self.lo <= EXACT // 2, EXACT, -((-self.lo) // q))
            return TateSeries._build(t, int(lo.max()) - 1, np.zeros((len(self), 0, t.m), dtype=np.int64), lo, window=False)
        nzr = np.flatnonzero(self.A.any(axis=(0, 2)))
        exps = self.H - nzr
        A = (self.A @ Fi) % t.p
        if np.all(exps % q == 0):
            H = self.H - int(nzr[0])
            A = A[:, int(nzr[0]) :]
            lo = np.where(self.lo <= EXACT // 2, EXACT, -((-self.lo) // q))
            Hn = H // q
            N = Hn - _finite_min(lo, Hn + 1) + 1
            B = A[:, ::q][:, :N]
            return TateSeries._build(t, Hn, B, lo, window=False)
        nt = FieldTower(t.p, t.mq, t.m, t.e * q)
        return TateSeries._build(nt, self.H, A, self.lo, window=False)

    def retower(self, tower) -> "TateSeries":
        if tower == self.tower:
            return self
        return TateSeries.from_cinfs([c.retower(tower) for c in self.coeffs])

    def shift(self, s: int) -> "TateSeries":
        """Multiply by t^s (s ≥ 0), dropping terms beyond T."""
        return self * TateSeries.from_coeffs(self.tower, [0] * s + [1], self.T)

    def truncate_T(self, T: int) -> "TateSeries":
        return TateSeries(self.tower, self.H, self.A[: T + 1], self.lo[: T + 1])

    def map(self, fn) -> "TateSeries":
        """Apply fn to every coefficient, each inside its own window."""
        out = []
        W = window_floors(self.tower, len(self))
        for k, c in enumerate(self.coeffs):
            with _cap_ctx(int(-W[k] // self.tower.e)):
                out.append(fn(c))
        return TateSeries.from_cinfs(out)

    def coeff_cap(self, k: int) -> int:
        """Window (in θ-exponent units) of coefficient k."""
        return current_cap() + current_rho() * k

    # evaluation ---------------------------------------------------------------
    def eval(self, x: CInf, strict: bool = True) -> CInf:
        """Σ f_k x^k with the truncation tail folded into the floor.

        With b_k = log_q(bound of f_k) + k·log_q|x|, the tail beyond T is
        estimated by the largest b_k over the last quarter of coefficients.
        If that is not strictly below some earlier nonzero term the series is
        treated as divergent at x (unless ``strict`` is False, in which case the
        truncated polynomial is evaluated as is).
        """
        f = self.coeffs
        xb = x.bound()
        tops, has = self._tops()
        e = self.tower.e
        b = [Fraction(int(tops[k]), e) + k * xb for k in range(len(f))]
        start = len(f) - max(1, len(f) // 4)
        tail = max(b[start:])
        head_nz = [b[k] for k in range(start) if has[k]]
        if strict:
            if head_nz and tail >= max(head_nz) and has[start:].any():
                k = start + int(np.argmax([b[j] if has[j] else -10**9 for j in range(start, len(f))]))
                raise DivergentEvaluation(f"terms do not decay at t = x (index {k})", index=k)
            if not head_nz and has[start:].any():
                k = start + int(np.flatnonzero(has[start:])[0])
                raise DivergentEvaluation(f"only tail terms are nonzero (index {k})", index=k)
        fin = np.flatnonzero(self.lo > EXACT // 2)
        if fin.size == 0:
            return CInf.zero(self.tower)
        outer = current_cap()
        with _cap_ctx(_eval_cap(self, x)):
            x = _widen_exact(x, outer)
            acc = f[int(fin[-1])]
            for k in range(int(fin[-1]) - 1, -1, -1):
                acc = acc * x + f[k] if self.lo[k] > EXACT // 2 else acc * x
        if strict:
            acc = acc.truncate(max(ceil(tail * acc.e), acc.lo))
        with _cap_ctx(current_cap()):
            return CInf.make(acc.tower, acc.hi, acc.lo, acc.c) if not acc.is_zero() else CInf.zero(acc.tower, acc.lo)

    def theta_expand(self, n: int):
        """(c_{n-1}, …, c_1, c_0) with f = Σ c_i (t-θ)^i."""
        if n > self.T:
            raise ValueError("n must not exceed T")
        th = CInf.theta(self.tower)
        cs = []
        g = self
        for _ in range(n):
            cs.append(g.eval(th))
            g = _divide_t_minus(g, th)
        return list(reversed(cs))

    # serialisation ------------------------------------------------------------
    def to_json(self):
        return {"T": self.T, "coeffs": [c.to_json() for c in self.coeffs]}

    def to_text(self, max_terms: int = 4, coeff_terms: int = 3) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            parts.append(f"({c.to_text(coeff_terms)})·t^{k}")
            if len(parts) >= max_terms:
                parts.append("…")
                break
        return " + ".join(parts) if parts else "0"

    def __repr__(self):
        return f"TateSeries({self.to_text()})"


def _cap_ctx(cap):
    from .context import precision

    return precision(cap=int(cap))


def _widen_exact(x: CInf, outer: int) -> CInf:
    """A single monomial known to exactly the outer window is taken as exact."""
    if x.is_zero() or x.c.shape[0] == 0 or np.count_nonzero(x.c.any(axis=1)) != 1:
        return x
    if x.lo != -outer * x.e:
        return x
    return CInf.monomial(x.tower, x.hi, x.c[0])


def _eval_cap(f: TateSeries, x: CInf) -> int:
    """Working window for Horner: wide enough never to cut below the true floor."""
    e = f.tower.e
    lo_min = _finite_min(f.lo, 0)
    xb = x.bound()
    need = -Fraction(lo_min, e) + max(0, -xb) * f.T + 2
    return int(ceil(max(need, current_cap())))


def _reduce_axis(C, tower):
    """Reduce the constant-field axis (length 2m-1) of a 3D product array."""
    T1, N, w = C.shape
    flat = _reduce_cols(C.reshape(T1 * N, w), tower.field)
    return flat.reshape(T1, N, tower.m)


def _poly_rows(a, b, n, tower):
    """First n rows of the product of two digit arrays over F_{p^m}."""
    from .cinf import _polymul

    return _polymul(a, b, n, tower.field)


def _as_cinf(c, tower):
    if isinstance(c, CInf):
        return c
    if isinstance(c, (int, np.integer)):
        return CInf.const(tower, int(c))
    raise TypeError(f"cannot use {type(c).__name__} as a series constant")


def _divide_t_minus(f: TateSeries, x: CInf) -> TateSeries:
    """(f - f(x)) / (t - x) by synthetic division, truncated to the same T."""
    T = f.T
    xb = x.bound()
    tops, _ = f._tops()
    e = f.tower.e
    start = len(f) - max(1, len(f) // 4)
    tail = max(Fraction(int(tops[k]), e) + k * xb for k in range(start, len(f)))
    W = window_floors(f.tower, T + 1)
    fin = np.flatnonzero(f.lo > EXACT // 2)
    g = [None] * (T + 1)
    lo = np.full(T + 1, EXACT, dtype=np.int64)
    top = int(fin[-1]) if fin.size else 0
    acc = None
    outer = current_cap()
    with _cap_ctx(_eval_cap(f, x)):
        x = _widen_exact(x, outer)
        for i in range(top - 1, -1, -1):
            ci = f.coeffs[i + 1]
            if acc is None:
                acc = ci
            elif f.lo[i + 1] > EXACT // 2:
                acc = ci + x * acc
            else:
                acc = x * acc
            g[i] = acc
    out = []
    for i, c in enumerate(g):
        if c is None:
            out.append(CInf.zero(f.tower, 0))
            continue
        err = tail - (i + 1) * xb
        with _cap_ctx(-int(W[i]) // c.e):
            c = c.truncate(max(ceil(err * c.e), int(W[i])))
            c = CInf.make(c.tower, c.hi, c.lo, c.c) if not c.is_zero() else c
        out.append(c)
        lo[i] = c.lo
    r = TateSeries.from_cinfs(out)
    return TateSeries._build(r.tower, r.H, r.A, np.where(lo <= EXACT // 2, EXACT, r.lo), window=False)


# ---------------------------------------------------------------------------
# functional API


def tate_arith(f: TateSeries, g: TateSeries, op: str) -> TateSeries:
    if op == "add":
        return f + g
    if op == "sub":
        return f - g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")


def tate_invert(f: TateSeries) -> TateSeries:
    return f.invert()


def tate_twist(f: TateSeries, n: int) -> TateSeries:
    return f.twist(n)


def tate_eval(f: TateSeries, x: CInf) -> CInf:
    return f.eval(x)


def tate_theta_expand(f: TateSeries, n: int):
    return f.theta_expand(n)
