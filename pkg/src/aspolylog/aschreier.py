"""The Artin-Schreier map ℘(f) = f - f^{(1)} on Tate series and its canonical section.

Coefficient by coefficient ℘⁻¹ solves ``b - b^q = a`` in C∞:

* terms of ``a`` with norm below 1 are absorbed by the convergent tail
  ``Σ_k a^{q^k}``;
* a leading term ``c·θ^{h/e}`` with ``h > 0`` is peeled: with ``r^q = -c θ^{h/e}``
  one has ``b = r + b'`` and ``b' - b'^q = a + r^q - r``, which has a smaller
  top exponent;
* a constant digit is removed by solving ``x - x^q = c`` in the constant field,
  extending it by a factor p when the F_p-linear system is inconsistent.

The solution is unique up to F_q.  The canonical choice makes the θ^0 digit of
every coefficient zero on the pivot coordinates of F_q inside F_{p^m}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cinf import CInf
from .context import current_cap
from .errors import PrecisionExhausted
from .ffield import GF, FieldTower, embedding_matrix, ff_extend_constants, rref_mod_p, solve_mod_p
from .tate import EXACT, TateSeries, _cap_ctx, window_floors

__all__ = ["wp", "wp_inv", "wp_inv_all_branches", "as_solve", "fq_component", "BranchCoset",
           "fq_elements"]

MAX_RAMIFY = 2
MAX_CONST_EXT = 3


@lru_cache(maxsize=None)
def _fq_rref(tower_p, mq, m):
    """RREF basis of F_q inside F_{p^m} and its pivot columns."""
    sub = GF(tower_p, m).subfield_basis(mq)
    red, piv = rref_mod_p(sub, tower_p)
    return red[: len(piv)], tuple(piv)


def fq_component(tower: FieldTower, vec):
    """The F_q element agreeing with ``vec`` on the pivot coordinates."""
    red, piv = _fq_rref(tower.p, tower.mq, tower.m)
    coeffs = np.array([vec[c] for c in piv], dtype=np.int64)
    return (coeffs @ red) % tower.p


def fq_elements(tower: FieldTower):
    """All elements of F_q as vectors in the tower's constant field."""
    F = tower.field
    return [v for v in F.subfield_elements(tower.mq)]


def _solve_constant(tower: FieldTower, c):
    """x with x - x^q = c in F_{p^m}, extending m by factors of p if needed."""
    for _ in range(MAX_CONST_EXT + 1):
        F = tower.field
        A = (np.eye(F.m, dtype=np.int64) - F.frob_matrix(tower.mq)) % F.p
        x = solve_mod_p(A, c, F.p)
        if x is not None:
            return tower, x
        new = ff_extend_constants(tower, tower.p)
        c = (embedding_matrix(F, new.field) @ c) % F.p
        tower = new
    raise PrecisionExhausted("constant Artin-Schreier equation unsolvable within the extension limit")


def as_solve(a: CInf, normalize: bool = True) -> CInf:
    """Canonical b with b - b^q = a (to the precision of a and the window)."""
    b = CInf.zero(a.tower, a.lo)
    ramified = 0
    guard = 0
    while not a.is_zero():
        guard += 1
        if guard > 10_000:
            raise PrecisionExhausted("Artin-Schreier peeling does not terminate")
        h = a.hi
        if h < 0:
            tail = term = a
            while True:
                term = term.frobenius(1)
                if term.is_zero():
                    break
                tail = tail + term
            b = b + tail
            break
        q = a.q
        if h == 0:
            tower, x = _solve_constant(a.tower, a.leading())
            if tower != a.tower:
                a = a.retower(tower)
                b = b.retower(tower)
            xr = CInf.const(tower, x)
            b = b + xr
            a = a - (xr - xr.frobenius(1))
            continue
        c = (-a.leading()) % a.tower.p
        root = a.field.frob(c, -a.tower.mq)
        if h % q:
            ramified += 1
            if ramified > MAX_RAMIFY:
                raise PrecisionExhausted(
                    f"peeling θ^({h}/{a.e}) needs unbounded ramification; no solution in the tower")
            t = a.tower
            nt = FieldTower(t.p, t.mq, t.m, t.e * q)
            a = a.retower(nt)
            b = b.retower(nt)
            continue
        r = CInf.monomial(a.tower, h // q, root)
        b = b + r
        a = a - r + r.frobenius(1)
    if normalize and not b.is_zero() and b.hi >= 0 and b.lo <= 0:
        d0 = b.coeff(0)
        comp = fq_component(b.tower, d0)
        if comp.any():
            b = b - CInf.const(b.tower, comp)
    return b


def wp(f: TateSeries) -> TateSeries:
    return f - f.twist(1)


def wp_inv(g: TateSeries) -> TateSeries:
    """Canonical ℘⁻¹, coefficient by coefficient inside each precision window."""
    W = window_floors(g.tower, len(g))
    out = []
    for k, a in enumerate(g.coeffs):
        with _cap_ctx(int(-W[k]) // g.tower.e):
            out.append(as_solve(a) if g.lo[k] > EXACT // 2 else CInf.zero(g.tower, 0))
    r = TateSeries.from_cinfs(out)
    exact = g.lo <= EXACT // 2
    return TateSeries._build(r.tower, r.H, r.A, np.where(exact, EXACT, r.lo), window=False)


@dataclass(frozen=True)
class BranchCoset:
    """The coset b + F_q[t]_{≤deg} of solutions of ℘(x) = g."""

    canonical: TateSeries
    deg: int

    def __iter__(self):
        tower = self.canonical.tower
        elems = fq_elements(tower)
        T = self.canonical.T
        for combo in itertools.product(range(len(elems)), repeat=self.deg + 1):
            poly = [CInf.const(tower, elems[i]) for i in combo]
            yield self.canonical + TateSeries.from_coeffs(tower, poly, T)

    def __len__(self):
        return self.canonical.tower.q ** (self.deg + 1)

    def contains(self, f: TateSeries) -> bool:
        return (f - self.canonical).in_Fq_poly()


def wp_inv_all_branches(g: TateSeries, deg: int) -> BranchCoset:
    return BranchCoset(wp_inv(g), deg)
