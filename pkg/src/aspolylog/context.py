"""Run configuration and the precision window shared by all series arithmetic."""

from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass, replace
from typing import Optional

from .ffield import FieldTower, is_prime

__all__ = ["Config", "precision", "current_cap", "current_rho", "current_config", "use_config"]

_CAP = contextvars.ContextVar("aspolylog_cap", default=64)
_RHO = contextvars.ContextVar("aspolylog_rho", default=1)
_CONFIG = contextvars.ContextVar("aspolylog_config", default=None)


@dataclass(frozen=True)
class Config:
    """Parameters of one computation.

    ``P`` is the absolute precision window: digits of θ-exponent below ``-P``
    are discarded.  Tate-series coefficient ``k`` keeps ``P + rho*k`` so that
    substituting ``t = θ`` loses nothing (see :mod:`aspolylog.tate`).
    """

    p: int = 2
    mq: int = 1
    T: int = 32
    P: int = 64
    R: int = 24
    product_depth: Optional[int] = None
    fmt: str = "json"

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.mq < 1:
            raise ValueError("mq must be >= 1")
        if self.T < 4:
            raise ValueError("T must be >= 4")
        if self.P < 8:
            raise ValueError("P must be >= 8")
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if self.fmt not in ("json", "text"):
            raise ValueError("fmt must be json or text")

    @classmethod
    def for_q(cls, q: int, **kw) -> "Config":
        tower = FieldTower.for_q(q)
        return cls(p=tower.p, mq=tower.mq, **kw)

    @property
    def q(self) -> int:
        return self.p**self.mq

    @property
    def tower(self) -> FieldTower:
        return FieldTower.for_q(self.q)

    def with_(self, **kw) -> "Config":
        return replace(self, **kw)

    def to_json(self):
        return {"p": self.p, "mq": self.mq, "q": self.q, "T": self.T, "P": self.P,
                "R": self.R, "product_depth": self.product_depth}


def current_cap() -> int:
    return _CAP.get()


def current_rho() -> int:
    return _RHO.get()


def current_config() -> Optional[Config]:
    return _CONFIG.get()


@contextlib.contextmanager
def precision(cap: Optional[int] = None, rho: Optional[int] = None):
    """Temporarily change the precision window (and Tate weighting)."""
    tokens = []
    if cap is not None:
        tokens.append((_CAP, _CAP.set(cap)))
    if rho is not None:
        tokens.append((_RHO, _RHO.set(rho)))
    try:
        yield
    finally:
        for var, tok in reversed(tokens):
            var.reset(tok)


@contextlib.contextmanager
def use_config(cfg: Config):
    tok = _CONFIG.set(cfg)
    try:
        with precision(cap=cfg.P, rho=1):
            yield cfg
    finally:
        _CONFIG.reset(tok)
