"""Finite fields F_{p^m} in a polynomial basis, with F_p-linear algebra helpers.

An element is a length-``m`` vector of residues mod ``p``: the coefficients
``(a_0, ..., a_{m-1})`` of ``a_0 + a_1 x + ... + a_{m-1} x^{m-1}`` modulo the
field's fixed irreducible polynomial.  Frobenius, multiplication by an element
and the Artin-Schreier operator ``x - x^q`` are all F_p-linear, so they are
carried out as ``m x m`` matrices mod ``p``.  This keeps every field the same
code path regardless of size (no log tables).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionByZero, TowerMismatch

__all__ = [
    "GF",
    "FieldTower",
    "FqElem",
    "ff_arith",
    "ff_qth_root",
    "ff_extend_constants",
    "is_prime",
    "embedding_matrix",
    "embed_rows",
    "common_field",
    "rref_mod_p",
    "solve_mod_p",
    "nullspace_mod_p",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


# ---------------------------------------------------------------------------
# linear algebra mod p


def rref_mod_p(a, p):
    """Reduced row echelon form of ``a`` over F_p; returns (matrix, pivots)."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * pow(int(a[r, c]), -1, p)) % p
        others = np.nonzero(a[:, c])[0]
        for i in others:
            if i != r:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return a, pivots


def solve_mod_p(a, b, p):
    """One solution x of ``a @ x = b`` over F_p, or None if inconsistent.

    Free variables are set to zero, so the answer is deterministic.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    aug, piv = rref_mod_p(np.hstack([a, b]), p)
    n = a.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for r, c in enumerate(piv):
        x[c] = aug[r, n]
    return x


def nullspace_mod_p(a, p):
    """Basis (rows) of the right kernel of ``a`` over F_p."""
    a = np.asarray(a, dtype=np.int64)
    n = a.shape[1]
    red, piv = rref_mod_p(a, p)
    free = [c for c in range(n) if c not in piv]
    basis = []
    for f in free:
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        for r, c in enumerate(piv):
            v[c] = (-red[r, f]) % p
        basis.append(v)
    return np.array(basis, dtype=np.int64).reshape(len(basis), n)


def _matpow(mat, k, p):
    n = mat.shape[0]
    result = np.eye(n, dtype=np.int64)
    base = mat % p
    while k:
        if k & 1:
            result = (result @ base) % p
        base = (base @ base) % p
        k >>= 1
    return result


# ---------------------------------------------------------------------------
# polynomials over F_p as python lists, low degree first


def _ptrim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmulmod(a, b, f, p):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _pmod(out, f, p)


def _pmod(a, f, p):
    a = list(a)
    m = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    for k in range(len(a) - 1, m - 1, -1):
        c = a[k] * inv_lead % p
        if c:
            for i in range(m + 1):
                a[k - m + i] = (a[k - m + i] - c * f[i]) % p
    return _ptrim(a[:m] if len(a) > m else a)


def _pgcd(a, b, p):
    a, b = _ptrim(list(a)), _ptrim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _ppowx(k, f, p):
    """x^(p^k) mod f."""
    r = [0, 1]
    r = _pmod(r, f, p)
    for _ in range(k):
        acc = [1]
        base = r
        e = p
        while e:
            if e & 1:
                acc = _pmulmod(acc, base, f, p)
            base = _pmulmod(base, base, f, p)
            e >>= 1
        r = acc
    return r


def _is_irreducible(f, p):
    m = len(f) - 1
    if m == 1:
        return True
    if f[0] == 0:
        return False
    x = [0, 1]
    if _ppowx(m, f, p) != _pmod(x, f, p):
        return False
    for r in {d for d in range(2, m + 1) if m % d == 0 and is_prime(d)}:
        h = _ppowx(m // r, f, p)
        h = h + [0] * (2 - len(h)) if len(h) < 2 else list(h)
        h[1] = (h[1] - 1) % p
        g = _pgcd(f, _ptrim(h), p)
        if len(g) > 1:
            return False
    return True


@functools.lru_cache(maxsize=None)
def lowest_irreducible(p: int, m: int) -> tuple:
    """Lowest monic irreducible polynomial of degree m over F_p.

    Candidates are ordered by the integer ``sum a_i p^i`` of their lower
    coefficients, i.e. lexicographically from the top coefficient down.
    """
    for n in range(p**m):
        low = [(n // p**i) % p for i in range(m)]
        f = low + [1]
        if _is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")


# ---------------------------------------------------------------------------


class GF:
    """The field F_{p^m}; one cached instance per (p, m)."""

    _cache: dict = {}

    def __new__(cls, p: int, m: int):
        key = (p, m)
        inst = cls._cache.get(key)
        if inst is None:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if m < 1:
                raise ValueError("degree must be positive")
            inst = super().__new__(cls)
            inst._setup(p, m)
            cls._cache[key] = inst
        return inst

    def __reduce__(self):
        return (GF, (self.p, self.m))

    def _setup(self, p, m):
        self.p = p
        self.m = m
        self.order = p**m
        self.modulus = lowest_irreducible(p, m)
        comp = np.zeros((m, m), dtype=np.int64)
        for i in range(m - 1):
            comp[i + 1, i] = 1
        comp[:, m - 1] = [(-c) % p for c in self.modulus[:m]]
        self.companion = comp
        # powers of x as vectors, used by multiplication matrices
        self._xpow = [np.eye(m, dtype=np.int64)[:, 0]]
        for _ in range(2 * m):
            self._xpow.append((comp @ self._xpow[-1]) % p)
        frob = np.zeros((m, m), dtype=np.int64)
        for j in range(m):
            frob[:, j] = self.power(self.basis(j), p)
        self.frobenius = frob
        self._frob_pows = {0: np.eye(m, dtype=np.int64), 1: frob}
        self._frob_inv = None

    def __repr__(self):
        return f"GF({self.p}^{self.m})"

    # element helpers -------------------------------------------------------
    def zero(self):
        return np.zeros(self.m, dtype=np.int64)

    def one(self):
        v = self.zero()
        v[0] = 1
        return v

    def basis(self, j):
        v = self.zero()
        v[j] = 1
        return v

    def from_int_scalar(self, n):
        v = self.zero()
        v[0] = n % self.p
        return v

    def from_index(self, n):
        return np.array([(n // self.p**i) % self.p for i in range(self.m)], dtype=np.int64)

    def to_index(self, v):
        return int(sum(int(c) * self.p**i for i, c in enumerate(v)))

    def elements(self):
        for n in range(self.order):
            yield self.from_index(n)

    def mul_matrix(self, a):
        """Matrix of y -> a*y."""
        m = self.m
        mat = np.zeros((m, m), dtype=np.int64)
        for j in range(m):
            col = self.zero()
            for i in range(m):
                if a[i]:
                    col = col + a[i] * self._xpow[i + j]
            mat[:, j] = col % self.p
        return mat

    def mul(self, a, b):
        return (self.mul_matrix(a) @ b) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def is_zero(self, a):
        return not np.any(a)

    def inv(self, a):
        if self.is_zero(a):
            raise DivisionByZero("inverse of zero in " + repr(self))
        x = solve_mod_p(self.mul_matrix(a), self.one(), self.p)
        return x

    def power(self, a, k):
        if k < 0:
            return self.power(self.inv(a), -k)
        result = self.one()
        base = np.array(a, dtype=np.int64) % self.p
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def frob_matrix(self, k):
        """Matrix of x -> x^(p^k); negative k gives the inverse map."""
        k %= self.m
        mat = self._frob_pows.get(k)
        if mat is None:
            mat = _matpow(self.frobenius, k, self.p)
            self._frob_pows[k] = mat
        return mat

    def frob(self, a, k):
        return (self.frob_matrix(k) @ a) % self.p

    def frob_rows(self, arr, k):
        """Apply x -> x^(p^k) to each row of an (L, m) array."""
        if k % self.m == 0 or arr.size == 0:
            return arr
        return (arr @ self.frob_matrix(k).T) % self.p

    def scale_rows(self, arr, c):
        """Multiply each row of an (L, m) array by the scalar c."""
        if self.m == 1:
            return (arr * int(c[0])) % self.p
        return (arr @ self.mul_matrix(c).T) % self.p

    def lex_key(self, a):
        return self.to_index(a)

    # subfields -------------------------------------------------------------
    @functools.lru_cache(maxsize=None)
    def subfield_basis(self, k):
        """F_p basis (rows) of the subfield F_{p^k}, k | m."""
        if self.m % k:
            raise TowerMismatch(f"F_{{p^{k}}} is not a subfield of {self!r}")
        a = (self.frob_matrix(k) - np.eye(self.m, dtype=np.int64)) % self.p
        return nullspace_mod_p(a, self.p)

    def subfield_elements(self, k):
        basis = self.subfield_basis(k)
        for coeffs in itertools.product(range(self.p), repeat=basis.shape[0]):
            yield (np.array(coeffs, dtype=np.int64) @ basis) % self.p

    def in_subfield(self, a, k):
        return np.array_equal(self.frob(a, k), np.asarray(a) % self.p)


@functools.lru_cache(maxsize=None)
def _step_embedding(src: GF, dst: GF):
    """Embedding sending the generator of src to its lex-least root in dst."""
    if src.m == 1:
        mat = np.zeros((dst.m, 1), dtype=np.int64)
        mat[0, 0] = 1
        return mat
    best = None
    for alpha in dst.subfield_elements(src.m):
        acc = dst.zero()
        for c in reversed(src.modulus):
            acc = (dst.mul(acc, alpha) + c * dst.one()) % dst.p
        if dst.is_zero(acc):
            key = dst.to_index(alpha)
            if best is None or key < best[0]:
                best = (key, alpha)
    alpha = best[1]
    cols = [dst.one()]
    for _ in range(src.m - 1):
        cols.append(dst.mul(cols[-1], alpha))
    return np.array(cols, dtype=np.int64).T.copy()


def _smallest_prime_factor(n):
    return next(d for d in range(2, n + 1) if n % d == 0)


@functools.lru_cache(maxsize=None)
def embedding_matrix(src: GF, dst: GF):
    """F_p-linear matrix (dst.m x src.m) of the fixed embedding src -> dst.

    Embeddings are built one prime step at a time (smallest prime first),
    each step sending the generator to its lexicographically least root.
    Going up a chain m, m*p, m*p^2, ... therefore composes consistently.
    """
    if src is dst:
        return np.eye(src.m, dtype=np.int64)
    if src.p != dst.p or dst.m % src.m:
        raise TowerMismatch(f"cannot embed {src!r} into {dst!r}")
    r = _smallest_prime_factor(dst.m // src.m)
    mid = GF(src.p, src.m * r)
    step = _step_embedding(src, mid)
    if mid is dst:
        return step
    return (embedding_matrix(mid, dst) @ step) % src.p


def embed_rows(arr, src: GF, dst: GF):
    if src is dst:
        return arr
    return (arr @ embedding_matrix(src, dst).T) % dst.p


def common_field(a: GF, b: GF) -> GF:
    if a is b:
        return a
    if a.p != b.p:
        raise TowerMismatch(f"characteristics differ: {a!r}, {b!r}")
    return GF(a.p, a.m * b.m // math.gcd(a.m, b.m))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldTower:
    """Constant field F_{p^m} containing F_q (q = p^mq) plus ramification e."""

    p: int
    mq: int
    m: int
    e: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.mq < 1 or self.m % self.mq:
            raise ValueError("mq must divide m")
        if self.e < 1 or self.e % (self.q - 1):
            raise ValueError("q - 1 must divide e")

    @classmethod
    def for_q(cls, q: int) -> "FieldTower":
        """Smallest tower for F_q that contains a (q-1)-th root of -1."""
        p = _prime_of(q)
        mq = round(math.log(q, p))
        m = mq if p == 2 else 2 * mq
        return cls(p, mq, m, q - 1)

    @property
    def q(self) -> int:
        return self.p**self.mq

    @property
    def field(self) -> GF:
        return GF(self.p, self.m)

    @property
    def modulus(self):
        return self.field.modulus

    @property
    def embed(self):
        return embedding_matrix(GF(self.p, self.mq), self.field)

    def to_json(self):
        return {"p": self.p, "mq": self.mq, "m": self.m, "e": self.e,
                "modulus": [int(c) for c in self.modulus]}

    @classmethod
    def from_json(cls, data):
        tower = cls(data["p"], data["mq"], data["m"], data["e"])
        if "modulus" in data and tuple(data["modulus"]) != tuple(tower.modulus):
            raise ValueError("modulus does not match the canonical choice")
        return tower


def _prime_of(q):
    for p in range(2, q + 1):
        if q % p == 0:
            k = q
            while k % p == 0:
                k //= p
            if k != 1:
                raise ValueError(f"{q} is not a prime power")
            return p
    raise ValueError(f"{q} is not a prime power")


def ff_extend_constants(tower: FieldTower, factor: int) -> FieldTower:
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return tower
    return FieldTower(tower.p, tower.mq, tower.m * factor, tower.e)


@dataclass(frozen=True, eq=False)
class FqElem:
    """A standalone element of a tower's constant field."""

    tower: FieldTower
    coeffs: tuple = field(default=())

    def __post_init__(self):
        c = tuple(int(x) % self.tower.p for x in self.coeffs)
        c = c + (0,) * (self.tower.m - len(c))
        if len(c) != self.tower.m:
            raise ValueError("coefficient vector has wrong length")
        object.__setattr__(self, "coeffs", c)

    @property
    def vec(self):
        return np.array(self.coeffs, dtype=np.int64)

    @classmethod
    def _wrap(cls, tower, vec):
        return cls(tower, tuple(int(x) for x in vec))

    def _check(self, other):
        if not isinstance(other, FqElem):
            return FqElem(self.tower, (other,))
        if other.tower != self.tower:
            raise TowerMismatch("elements live in different towers")
        return other

    def __add__(self, other):
        other = self._check(other)
        return self._wrap(self.tower, self.tower.field.add(self.vec, other.vec))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return self._wrap(self.tower, self.tower.field.sub(self.vec, other.vec))

    def __neg__(self):
        return self._wrap(self.tower, self.tower.field.neg(self.vec))

    def __mul__(self, other):
        other = self._check(other)
        return self._wrap(self.tower, self.tower.field.mul(self.vec, other.vec))

    __rmul__ = __mul__

    def inverse(self):
        return self._wrap(self.tower, self.tower.field.inv(self.vec))

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, k):
        return self._wrap(self.tower, self.tower.field.power(self.vec, k))

    def __eq__(self, other):
        if isinstance(other, int):
            other = FqElem(self.tower, (other,))
        return isinstance(other, FqElem) and other.tower == self.tower and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.tower, self.coeffs))

    def __repr__(self):
        return f"FqElem({list(self.coeffs)})"


def ff_arith(a: FqElem, b: FqElem, op: str) -> FqElem:
    if a.tower != b.tower:
        raise TowerMismatch("elements live in different towers")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "sub":
        return a - b
    if op == "inv":
        return a.inverse()
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def ff_qth_root(a: FqElem) -> FqElem:
    """The unique r with r^q = a (Frobenius is bijective on F_{p^m})."""
    f = a.tower.field
    return FqElem._wrap(a.tower, f.frob(a.vec, -a.tower.mq))
