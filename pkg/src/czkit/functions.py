from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .space import MetricMeasureSpace


def _parse_exponent(q) -> float:
    if isinstance(q, str):
        if q.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        q = float(q)
    q = float(q)
    if not q >= 1:
        raise ValueError(f"exponent must be >= 1, got {q}")
    return q


@dataclass(frozen=True, eq=False)
class FunctionOnSpace:
    """A vector-valued function, one row per point.

    ``vec_norm`` is the exponent ``q`` of the coordinate norm used for
    ``|f(x)|`` (``math.inf`` for the sup norm).
    """

    values: np.ndarray
    vec_norm: float = 2.0

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2:
            raise ValueError(f"function values must be a vector or an n x m matrix, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "vec_norm", _parse_exponent(self.vec_norm))

    @classmethod
    def zeros(cls, n: int, m: int = 1, vec_norm: float = 2.0) -> FunctionOnSpace:
        return cls(np.zeros((n, m)), vec_norm)

    @classmethod
    def indicator(cls, n: int, idx, scale: float = 1.0) -> FunctionOnSpace:
        v = np.zeros(n)
        v[np.asarray(idx, dtype=np.int64)] = scale
        return cls(v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def abs(self) -> np.ndarray:
        """``|f|(x)``: the coordinate norm of each row."""
        v = self.values
        if self.m == 1:
            return np.abs(v[:, 0])
        q = self.vec_norm
        if q == math.inf:
            return np.abs(v).max(axis=1)
        if q == 1:
            return np.abs(v).sum(axis=1)
        if q == 2:
            return np.sqrt((v * v).sum(axis=1))
        return (np.abs(v) ** q).sum(axis=1) ** (1.0 / q)

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(np.any(self.values != 0, axis=1))

    def lp_norm(self, space: MetricMeasureSpace, p) -> float:
        return lp_norm(self.abs(), space.weight, p)

    def restrict(self, idx) -> FunctionOnSpace:
        """``chi_S f``."""
        mask = np.zeros(self.n, dtype=bool)
        mask[np.asarray(idx, dtype=np.int64)] = True
        return FunctionOnSpace(np.where(mask[:, None], self.values, 0.0), self.vec_norm)

    def __add__(self, other: FunctionOnSpace) -> FunctionOnSpace:
        return FunctionOnSpace(self.values + other.values, self.vec_norm)

    def __sub__(self, other: FunctionOnSpace) -> FunctionOnSpace:
        return FunctionOnSpace(self.values - other.values, self.vec_norm)

    def scale(self, c: float) -> FunctionOnSpace:
        return FunctionOnSpace(c * self.values, self.vec_norm)


def as_function(f, n: int | None = None) -> FunctionOnSpace:
    if isinstance(f, FunctionOnSpace):
        out = f
    else:
        out = FunctionOnSpace(np.asarray(f, dtype=np.float64))
    if n is not None and out.n != n:
        raise ValueError(f"function has {out.n} rows, space has {n} points")
    return out


def lp_norm(absf: np.ndarray, weight: np.ndarray, p) -> float:
    """``(sum |f|^p w)^(1/p)``, or ``max |f|`` over the support for ``p = inf``."""
    p = _parse_exponent(p)
    absf = np.asarray(absf, dtype=np.float64)
    if p == math.inf:
        return float(absf.max()) if absf.size else 0.0
    if p == 1:
        return float(np.dot(absf, weight))
    return float(np.dot(absf**p, weight) ** (1.0 / p))
