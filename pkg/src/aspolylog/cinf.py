"""Truncated Laurent expansions in θ^{-1/e}: desk-scale elements of C∞.

An element is stored as its top exponent numerator ``hi``, a precision floor
``lo`` and the dense descending digit array ``c`` of shape ``(hi - lo + 1, m)``::

    x = Σ_{i} c[i] · θ^{(hi - i)/e}   +   (error of norm < q^{lo/e})

Exponents are normalised so that ``|θ| = q``.  Every operation computes the
floor of its result from the floors of its inputs.  A global window (see
:func:`aspolylog.context.precision`) additionally discards digits below
``θ^{-cap}``; that window is part of the stated floor, never silent.

A value whose known digits are all zero is a *zero to precision*: its array
is empty, ``hi == lo - 1``, and all that is known is ``|x| < q^{lo/e}``.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction

import numpy as np
from scipy.signal import convolve2d, fftconvolve

from .context import current_cap
from .errors import DivisionByZero, PrecisionExhausted, TowerMismatch, ZeroNorm
from .ffield import GF, FieldTower, embed_rows, embedding_matrix

__all__ = ["CInf", "cinf_arith", "cinf_norm", "cinf_qth_root", "cinf_frobenius",
           "minus_theta_root", "gamma"]

_MAX_ROWS = 5_000_000
_FFT_THRESHOLD = 3000


def _reduce_cols(arr, F: GF):
    """Reduce an (N, 2m-1) product array modulo the field modulus."""
    m, p = F.m, F.p
    arr = arr % p
    if arr.shape[1] <= m:
        out = np.zeros((arr.shape[0], m), dtype=np.int64)
        out[:, : arr.shape[1]] = arr
        return out
    f = np.array(F.modulus[:m], dtype=np.int64)
    for k in range(arr.shape[1] - 1, m - 1, -1):
        v = arr[:, k]
        if v.any():
            arr[:, k - m : k] = (arr[:, k - m : k] - v[:, None] * f[None, :]) % p
    return arr[:, :m]


def _polymul(a, b, n, F: GF):
    """First n rows of the product of two digit arrays (power series in θ^{-1/e})."""
    a = a[:n]
    b = b[:n]
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((n, F.m), dtype=np.int64)
    big = min(a.shape[0], b.shape[0]) > _FFT_THRESHOLD
    if F.m == 1:
        if big:
            r = np.rint(fftconvolve(a[:, 0].astype(float), b[:, 0].astype(float))).astype(np.int64)
        else:
            r = np.convolve(a[:, 0], b[:, 0])
        r = r[:n] % F.p
        out = np.zeros((n, 1), dtype=np.int64)
        out[: r.shape[0], 0] = r
        return out
    if big:
        r = np.rint(fftconvolve(a.astype(float), b.astype(float))).astype(np.int64)
    else:
        r = convolve2d(a, b)
    r = _reduce_cols(r[:n], F)
    if r.shape[0] < n:
        r = np.vstack([r, np.zeros((n - r.shape[0], F.m), dtype=np.int64)])
    return r


def _series_inverse(u, n, F: GF):
    """Inverse of a power series with unit constant term 1, to n terms (Newton)."""
    x = np.zeros((1, F.m), dtype=np.int64)
    x[0, 0] = 1
    k = 1
    two = np.zeros((1, F.m), dtype=np.int64)
    two[0, 0] = 2 % F.p
    while k < n:
        k = min(2 * k, n)
        ux = _polymul(u, x, k, F)
        corr = (-ux) % F.p
        corr[0] = (corr[0] + two[0]) % F.p
        x = _polymul(x, corr, k, F)
    return x[:n]


def _merge_towers(t1: FieldTower, t2: FieldTower) -> FieldTower:
    if t1 == t2:
        return t1
    if t1.p != t2.p or t1.mq != t2.mq:
        raise TowerMismatch(f"incompatible towers {t1} and {t2}")
    m = t1.m * t2.m // math.gcd(t1.m, t2.m)
    e = t1.e * t2.e // math.gcd(t1.e, t2.e)
    return FieldTower(t1.p, t1.mq, m, e)


class CInf:
    """Immutable truncated element of C∞ (see module docstring)."""

    __slots__ = ("tower", "hi", "lo", "c")

    def __init__(self, tower: FieldTower, hi: int, lo: int, c):
        self.tower = tower
        self.hi = hi
        self.lo = lo
        self.c = c

    # construction -----------------------------------------------------------
    @classmethod
    def make(cls, tower: FieldTower, hi: int, lo: int, c, cap=None) -> "CInf":
        """Normalise: apply the precision window and strip leading zero digits."""
        if cap is None:
            cap = current_cap()
        floor = max(lo, -cap * tower.e)
        n = hi - floor + 1
        if n <= 0:
            return cls.zero(tower, floor, cap)
        c = c[:n]
        nz = np.flatnonzero(c.any(axis=1)) if c.shape[0] else np.empty(0, dtype=np.int64)
        if nz.size == 0:
            return cls.zero(tower, floor, cap)
        s = int(nz[0])
        return cls(tower, hi - s, floor, c[s:n])

    @classmethod
    def zero(cls, tower: FieldTower, lo=None, cap=None) -> "CInf":
        """Zero known down to the floor ``lo`` (default: the window floor)."""
        if cap is None:
            cap = current_cap()
        if lo is None:
            lo = -cap * tower.e
        else:
            lo = max(lo, -cap * tower.e)
        return cls(tower, lo - 1, lo, np.zeros((0, tower.m), dtype=np.int64))

    @classmethod
    def const(cls, tower: FieldTower, value) -> "CInf":
        """A constant-field element (int or coefficient vector)."""
        vec = np.zeros(tower.m, dtype=np.int64)
        if isinstance(value, (int, np.integer)):
            vec[0] = int(value) % tower.p
        else:
            v = np.asarray(value, dtype=np.int64) % tower.p
            vec[: v.shape[0]] = v
        return cls.monomial(tower, 0, vec)

    @classmethod
    def one(cls, tower):
        return cls.const(tower, 1)

    @classmethod
    def monomial(cls, tower: FieldTower, num: int, vec=None) -> "CInf":
        """vec · θ^{num/e}, exact to the window."""
        if vec is None:
            vec = tower.field.one()
        vec = np.asarray(vec, dtype=np.int64) % tower.p
        floor = -current_cap() * tower.e
        n = num - floor + 1
        if n > _MAX_ROWS:
            raise PrecisionExhausted(f"exponent {num}/{tower.e} too large for the digit array")
        if n <= 0 or not vec.any():
            return cls.zero(tower)
        c = np.zeros((n, tower.m), dtype=np.int64)
        c[0] = vec
        return cls(tower, num, floor, c)

    @classmethod
    def theta(cls, tower: FieldTower, power=1) -> "CInf":
        """θ^power for an integer or Fraction power (denominator must divide e)."""
        fr = Fraction(power) * tower.e
        if fr.denominator != 1:
            raise TowerMismatch(f"θ^{power} is not on the θ^(1/{tower.e}) grid")
        return cls.monomial(tower, int(fr))

    @classmethod
    def from_poly(cls, tower: FieldTower, coeffs) -> "CInf":
        """Σ coeffs[k] θ^k for integer (or vector) coefficients."""
        acc = cls.zero(tower)
        for k, a in enumerate(coeffs):
            term = cls.const(tower, a)
            if not term.is_zero():
                acc = acc + term * cls.theta(tower, k)
        return acc

    @classmethod
    def from_digits(cls, tower: FieldTower, digits, lo=None) -> "CInf":
        """Build from a mapping ``numerator -> coefficient``."""
        digits = {int(j): v for j, v in dict(digits).items()}
        if lo is None:
            lo = -current_cap() * tower.e
        if not digits:
            return cls.zero(tower, lo)
        hi = max(digits)
        n = hi - lo + 1
        if n <= 0:
            return cls.zero(tower, lo)
        c = np.zeros((n, tower.m), dtype=np.int64)
        for j, v in digits.items():
            if j >= lo:
                vec = np.zeros(tower.m, dtype=np.int64)
                if isinstance(v, (int, np.integer)):
                    vec[0] = v
                else:
                    vv = np.asarray(v, dtype=np.int64)
                    vec[: vv.shape[0]] = vv
                c[hi - j] = vec % tower.p
        return cls.make(tower, hi, lo, c)

    # basic queries ------------------------------------------------------------
    @property
    def field(self) -> GF:
        return self.tower.field

    @property
    def e(self) -> int:
        return self.tower.e

    @property
    def q(self) -> int:
        return self.tower.q

    def is_zero(self) -> bool:
        """True when every known digit vanishes (zero to precision)."""
        return self.c.shape[0] == 0

    def norm(self) -> Fraction:
        """log_q |x|."""
        if self.is_zero():
            raise ZeroNorm("norm of an element that is zero to precision")
        return Fraction(self.hi, self.e)

    def floor(self) -> Fraction:
        """log_q of the error bound."""
        return Fraction(self.lo, self.e)

    def bound(self) -> Fraction:
        """log_q of a strict upper bound on |x| (top exponent, or the floor for zero)."""
        return self.norm() if not self.is_zero() else self.floor()

    def leading(self):
        if self.is_zero():
            raise ZeroNorm("leading coefficient of zero")
        return self.c[0].copy()

    def digits(self):
        """Nonzero known digits as ``[(numerator, vector), ...]`` in descending order."""
        out = []
        for i in np.flatnonzero(self.c.any(axis=1)):
            out.append((self.hi - int(i), self.c[i]))
        return out

    def coeff(self, num: int):
        """Digit at exponent ``num/e`` (must be at or above the floor)."""
        if num < self.lo:
            raise PrecisionExhausted(f"digit {num}/{self.e} lies below the floor {self.lo}/{self.e}")
        if num > self.hi:
            return np.zeros(self.tower.m, dtype=np.int64)
        return self.c[self.hi - num].copy()

    def in_Fq(self) -> bool:
        """Known digits form a single constant lying in F_q."""
        if self.is_zero():
            return True
        if self.hi != 0 or len(self.digits()) != 1:
            return False
        return self.field.in_subfield(self.c[0], self.tower.mq)

    # re-indexing --------------------------------------------------------------
    def retower(self, tower: FieldTower) -> "CInf":
        """Re-express in a larger tower (e and m multiples of the current ones)."""
        if tower == self.tower:
            return self
        if tower.e % self.e or tower.m % self.tower.m or tower.p != self.tower.p:
            raise TowerMismatch(f"cannot move {self.tower} into {tower}")
        k = tower.e // self.e
        c = self.c
        if tower.m != self.tower.m:
            c = embed_rows(c, self.field, tower.field)
        if self.is_zero():
            return CInf.zero(tower, self.lo * k)
        if k > 1:
            n = (c.shape[0] - 1) * k + 1
            cc = np.zeros((n, tower.m), dtype=np.int64)
            cc[::k] = c
            c = cc
        return CInf.make(tower, self.hi * k, self.lo * k, c)

    def _pair(self, other):
        if not isinstance(other, CInf):
            other = CInf.const(self.tower, other) if isinstance(other, (int, np.integer)) else NotImplemented
            if other is NotImplemented:
                return None, None
        if other.tower == self.tower:
            return self, other
        t = _merge_towers(self.tower, other.tower)
        return self.retower(t), other.retower(t)

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return _add(a, b, 1)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return _add(a, b, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return CInf(self.tower, self.hi, self.lo, (-self.c) % self.tower.p)

    def __mul__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return _mul(a, b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._pair(other)
        if a is None:
            return NotImplemented
        return _mul(a, b.inverse())

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = CInf.one(self.tower)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, vec) -> "CInf":
        """Multiply by a constant-field element given as a vector."""
        vec = np.asarray(vec, dtype=np.int64) % self.tower.p
        if self.is_zero():
            return self
        c = self.field.scale_rows(self.c, vec)
        return CInf.make(self.tower, self.hi, self.lo, c)

    def inverse(self) -> "CInf":
        if self.is_zero():
            raise DivisionByZero("division by an element that is zero to precision")
        F = self.field
        h, lo = self.hi, self.lo
        floor = max(lo - 2 * h, -current_cap() * self.e)
        n = -h - floor + 1
        if n <= 0:
            return CInf.zero(self.tower, floor)
        inv0 = F.inv(self.c[0])
        u = F.scale_rows(self.c[:n], inv0)
        if u.shape[0] < n:
            u = np.vstack([u, np.zeros((n - u.shape[0], F.m), dtype=np.int64)])
        x = _series_inverse(u, n, F)
        x = F.scale_rows(x, inv0)
        return CInf.make(self.tower, -h, floor, x)

    def truncate(self, floor_num: int) -> "CInf":
        """Forget digits below ``θ^{floor_num/e}``."""
        if floor_num <= self.lo:
            return self
        return CInf.make(self.tower, self.hi, floor_num, self.c)

    def frobenius(self, n: int = 1) -> "CInf":
        """x^{q^n}; negative n takes iterated q-th roots."""
        if n == 0:
            return self
        if n < 0:
            r = self
            for _ in range(-n):
                r = r.qth_root()
            return r
        Q = self.q**n
        t = self.tower
        capfloor = -current_cap() * t.e
        floor = max(self.lo * Q, capfloor)
        if self.is_zero():
            return CInf.zero(t, floor)
        hi = self.hi * Q
        size = hi - floor + 1
        if size <= 0:
            return CInf.zero(t, floor)
        if size > _MAX_ROWS:
            raise PrecisionExhausted(f"Frobenius image θ^({hi}/{t.e}) too large for the digit array")
        rows = (size - 1) // Q + 1
        src = self.field.frob_rows(self.c[:rows], t.mq * n)
        c = np.zeros((size, t.m), dtype=np.int64)
        c[::Q] = src
        return CInf.make(t, hi, floor, c)

    def qth_root(self) -> "CInf":
        """The unique q-th root; ramifies (e -> e*q) when exponents demand it."""
        t = self.tower
        q = self.q
        if self.is_zero():
            return CInf.zero(t, -((-self.lo) // q))
        nz = np.flatnonzero(self.c.any(axis=1))
        exps = self.hi - nz
        c = self.field.frob_rows(self.c, -t.mq)
        if np.all(exps % q == 0):
            hi = self.hi // q
            floor = -((-self.lo) // q)
            rows = hi - floor + 1
            cc = c[::q][:rows]
            return CInf.make(t, hi, floor, cc)
        nt = FieldTower(t.p, t.mq, t.m, t.e * q)
        return CInf.make(nt, self.hi, self.lo, c)

    # comparison helpers -------------------------------------------------------
    def agrees(self, other, tol: Fraction) -> bool:
        """|self - other| < q^tol, with both floors at or below tol."""
        d = self - other
        return d.floor() <= tol and (d.is_zero() or d.norm() < tol)

    def __eq__(self, other):
        if not isinstance(other, CInf):
            if isinstance(other, (int, np.integer)):
                other = CInf.const(self.tower, other)
            else:
                return NotImplemented
        a, b = self._pair(other)
        return a.lo == b.lo and a.hi == b.hi and np.array_equal(a.c, b.c)

    def __hash__(self):
        return hash((self.tower, self.hi, self.lo, self.c.tobytes()))

    # serialisation ------------------------------------------------------------
    def to_json(self):
        return {
            "e": self.e,
            "m": self.tower.m,
            "j_hi": int(self.hi),
            "j_lo": int(self.lo),
            "coeffs": [[int(j), [int(x) for x in v]] for j, v in self.digits()],
        }

    @classmethod
    def from_json(cls, tower_base: FieldTower, data) -> "CInf":
        t = FieldTower(tower_base.p, tower_base.mq, data.get("m", tower_base.m), data["e"])
        return cls.from_digits(t, {j: v for j, v in data["coeffs"]}, lo=data["j_lo"])

    def to_text(self, max_terms: int = 8) -> str:
        ds = self.digits()
        if not ds:
            return f"O(θ^{Fraction(self.lo, self.e)})"
        parts = []
        for j, v in ds[:max_terms]:
            coeff = _vec_text(v)
            ex = Fraction(int(j), self.e)
            if ex == 0:
                parts.append(coeff)
            else:
                parts.append(f"{coeff}·θ^{ex}" if coeff != "1" else f"θ^{ex}")
        more = " + …" if len(ds) > max_terms else ""
        return " + ".join(parts) + more + f" + O(θ^{Fraction(self.lo, self.e)})"

    def __repr__(self):
        return f"CInf({self.to_text(4)})"


def _vec_text(v):
    terms = []
    for i, x in enumerate(v):
        if x:
            if i == 0:
                terms.append(str(int(x)))
            else:
                mono = "x" if i == 1 else f"x^{i}"
                terms.append(mono if x == 1 else f"{int(x)}{mono}")
    s = "+".join(terms) or "0"
    return s if len(terms) <= 1 else f"({s})"


def _add(a: CInf, b: CInf, sign: int) -> CInf:
    t = a.tower
    floor = max(a.lo, b.lo, -current_cap() * t.e)
    top = max(a.hi, b.hi)
    if top < floor:
        return CInf.zero(t, floor)
    n = top - floor + 1
    c = np.zeros((n, t.m), dtype=np.int64)
    for x, s in ((a, 1), (b, sign)):
        if x.is_zero() or x.hi < floor:
            continue
        start = top - x.hi
        k = min(x.c.shape[0], n - start)
        if s == 1:
            c[start : start + k] += x.c[:k]
        else:
            c[start : start + k] -= x.c[:k]
    return CInf.make(t, top, floor, c % t.p)


def _mul(a: CInf, b: CInf) -> CInf:
    t = a.tower
    ha = a.hi if not a.is_zero() else a.lo
    hb = b.hi if not b.is_zero() else b.lo
    floor = max(ha + b.lo, hb + a.lo, -current_cap() * t.e)
    if a.is_zero() or b.is_zero():
        return CInf.zero(t, floor)
    top = a.hi + b.hi
    n = top - floor + 1
    if n <= 0:
        return CInf.zero(t, floor)
    c = _polymul(a.c, b.c, n, t.field)
    return CInf.make(t, top, floor, c)


# ---------------------------------------------------------------------------
# functional API


def cinf_arith(a: CInf, b: CInf, op: str) -> CInf:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def cinf_norm(a: CInf) -> Fraction:
    return a.norm()


def cinf_qth_root(a: CInf) -> CInf:
    return a.qth_root()


def cinf_frobenius(a: CInf, n: int) -> CInf:
    return a.frobenius(n)


def gamma(tower: FieldTower):
    """The lexicographically least (q-1)-th root of -1 in the base constant field, embedded."""
    return _gamma(tower.p, tower.mq, tower.m).copy()


@functools.lru_cache(maxsize=None)
def _gamma(p, mq, m):
    base = FieldTower.for_q(p**mq).m
    if m % base:
        base = m
    F = GF(p, base)
    q = p**mq
    target = F.from_int_scalar(-1)
    for v in F.elements():
        if not F.is_zero(v) and np.array_equal(F.power(v, q - 1), target):
            return (embedding_matrix(F, GF(p, m)) @ v) % p
    raise TowerMismatch(f"{F!r} has no (q-1)-th root of -1")


def minus_theta_root(tower: FieldTower) -> CInf:
    """The fixed (q-1)-th root of -θ, namely γ·θ^{1/(q-1)}."""
    num = tower.e // (tower.q - 1)
    return CInf.monomial(tower, num, gamma(tower))
