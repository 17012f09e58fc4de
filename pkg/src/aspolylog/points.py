"""Polynomial expressions in θ over F_p, used for point inputs."""

from __future__ import annotations

import re
from typing import List

from .cinf import CInf
from .errors import UsageError
from .ffield import FieldTower

__all__ = ["parse_poly", "parse_point", "parse_points", "zeta_degree"]

_TOKEN = re.compile(r"\s*(?:(\d+)|(θ|theta)|(\*\*|[-+*^()]))")


def _tokens(text: str):
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise UsageError(f"cannot parse point expression at {text[pos:]!r}")
        num, var, op = m.groups()
        if num is not None:
            out.append(("num", int(num)))
        elif var is not None:
            out.append(("var", None))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


class _Parser:
    """expr := term (('+'|'-') term)* ; term := factor ('*'? factor)* ; factor := ('-') factor | atom ('^' int)?"""

    def __init__(self, toks, p):
        self.toks, self.i, self.p = toks, 0, p

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def add(self, a, b, s=1):
        n = max(len(a), len(b))
        a = a + [0] * (n - len(a))
        b = b + [0] * (n - len(b))
        return _trim([(x + s * y) % self.p for x, y in zip(a, b)])

    def mul(self, a, b):
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % self.p
        return _trim(out)

    def expr(self):
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            s = 1 if self.take()[1] == "+" else -1
            acc = self.add(acc, self.term(), s)
        return acc

    def term(self):
        acc = self.factor()
        while True:
            kind, val = self.peek()
            if (kind, val) == ("op", "*"):
                self.take()
            elif not (kind in ("num", "var") or (kind, val) == ("op", "(")):
                return acc
            acc = self.mul(acc, self.factor())

    def factor(self):
        if self.peek() == ("op", "-"):
            self.take()
            return self.add([], self.factor(), -1)
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            kind, val = self.take()
            if kind != "num":
                raise UsageError("exponent must be a nonnegative integer")
            out = [1]
            for _ in range(val):
                out = self.mul(out, base)
            return out
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            return _trim([val % self.p])
        if kind == "var":
            return [0, 1]
        if (kind, val) == ("op", "("):
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise UsageError("unbalanced parentheses")
            return inner
        raise UsageError("unexpected end of point expression")


def parse_poly(text: str, p: int) -> List[int]:
    """Coefficients (low degree first, reduced mod p) of a θ-polynomial expression."""
    ps = _Parser(_tokens(text), p)
    out = ps.expr()
    if ps.i != len(ps.toks):
        raise UsageError(f"trailing input in point expression {text!r}")
    return out


def parse_point(text: str, tower: FieldTower) -> CInf:
    return CInf.from_poly(tower, parse_poly(text, tower.p))


def parse_points(text: str, tower: FieldTower) -> List[CInf]:
    """Comma- or semicolon-separated list of expressions."""
    parts = [s for s in re.split(r"[;,]", text) if s.strip()]
    if not parts:
        raise UsageError("no points given")
    return [parse_point(s, tower) for s in parts]


def zeta_degree(q: int, budget: int = 100_000, cap: int = 12) -> int:
    """Largest degree ≤ cap whose brute-force term count q^deg stays within budget."""
    d = 1
    while d < cap and q ** (d + 1) <= budget:
        d += 1
    return d
