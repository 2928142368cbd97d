"""Mixed Lebesgue norms on ``Y_1 x ... x Y_k x X`` and the slice-wise maximal bound."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .interp import conjugate, phi
from .maximal import maximal_batch
from .reports import BoundReport
from .space import MetricMeasureSpace, doubling_constant


@dataclass(frozen=True, eq=False)
class MixedNormTensor:
    """A function on ``Y_1 x ... x Y_k x X`` with one weight vector per axis.

    ``values`` has shape ``axes``; the last axis indexes ``X``.  The norm
    takes ``exponents[0]`` over ``Y_1`` first and ``exponents[-1]`` over
    ``X`` last.
    """

    axes: tuple[int, ...]
    weights: tuple[np.ndarray, ...]
    exponents: tuple[float, ...]
    values: np.ndarray

    def __post_init__(self):
        axes = tuple(int(a) for a in self.axes)
        if len(axes) < 2:
            raise ValueError("need at least one Y factor and the X axis")
        if any(a < 1 for a in axes):
            raise ValueError(f"axis sizes must be positive, got {axes}")
        if len(self.weights) != len(axes) or len(self.exponents) != len(axes):
            raise ValueError("weights and exponents need one entry per axis")
        weights = []
        for a, w in zip(axes, self.weights):
            w = np.asarray(w, dtype=np.float64)
            if w.shape != (a,):
                raise ValueError(f"weight vector of shape {w.shape} does not match axis size {a}")
            if not np.all(np.isfinite(w) & (w > 0)):
                raise ValueError("weights must be finite and positive")
            w.setflags(write=False)
            weights.append(w)
        exps = tuple(float(p) for p in self.exponents)
        if not all(1 < p < math.inf for p in exps):
            raise ValueError(f"exponents must lie in (1, inf), got {exps}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != math.prod(axes):
            raise ValueError(f"{vals.size} values do not fill axes {axes}")
        vals = vals.reshape(axes).copy()
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "weights", tuple(weights))
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "values", vals)

    @property
    def k(self) -> int:
        return len(self.axes) - 1

    def with_values(self, values) -> "MixedNormTensor":
        return MixedNormTensor(self.axes, self.weights, self.exponents, values)

    @classmethod
    def from_dict(cls, data: dict) -> "MixedNormTensor":
        try:
            return cls(tuple(data["axes"]), tuple(data["weights"]), tuple(data["exponents"]), data["values"])
        except KeyError as exc:
            raise ValueError(f"tensor description lacks {exc.args[0]!r}") from None

    def to_dict(self) -> dict:
        return {
            "axes": list(self.axes),
            "weights": [w.tolist() for w in self.weights],
            "exponents": list(self.exponents),
            "values": self.values.ravel().tolist(),
        }


def mixed_norm(tensor: MixedNormTensor) -> float:
    """Iterated weighted norm, innermost axis (``Y_1``) first."""
    a = np.abs(tensor.values)
    for w, p in zip(tensor.weights, tensor.exponents):
        a = np.tensordot(w, a**p, axes=(0, 0)) ** (1.0 / p)
    return float(a)


def mixed_constant(D_R: float, exponents) -> float:
    """``(1 + 16^{k+1}) D_R^{25+16k} p_1'^{1/p_1} prod_j phi(p_j, p_{j+1})``."""
    exps = [float(p) for p in exponents]
    k = len(exps) - 1
    prod = 1.0
    for pj, pn in zip(exps[:-1], exps[1:]):
        prod *= phi(pj, pn)
    return (1.0 + 16.0 ** (k + 1)) * D_R ** (25 + 16 * k) * conjugate(exps[0]) ** (1.0 / exps[0]) * prod


def slicewise_maximal(space: MetricMeasureSpace, tensor: MixedNormTensor, R: float) -> MixedNormTensor:
    """``M~_R`` applied along ``X`` for every multi-index of the ``Y`` factors."""
    if tensor.axes[-1] != space.n:
        raise ValueError(f"last axis has size {tensor.axes[-1]}, the space has {space.n} points")
    cols = np.abs(tensor.values).reshape(-1, space.n).T
    out = maximal_batch(space, cols, R, True)
    return tensor.with_values(out.T.reshape(tensor.axes))


def check_mixed_maximal(space: MetricMeasureSpace, tensor: MixedNormTensor, R: float,
                        trials: int = 0, seed: int = 0) -> BoundReport:
    """Mixed norm of ``M~_{2R} f`` against the mixed norm of ``f``.

    The tensor itself is always checked.  ``trials`` further tensors with the
    same axes, weights and exponents are drawn from a seeded generator; the
    worst ratio is reported, with witness ``-1`` for the supplied tensor.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    if tensor.axes[-1] != space.n:
        raise ValueError(f"last axis has size {tensor.axes[-1]}, the space has {space.n} points")
    if not np.array_equal(tensor.weights[-1], space.weight):
        raise ValueError("the weights of the X axis must be the point masses of the space")
    D = doubling_constant(space, R)
    if not math.isfinite(D):
        raise ValueError("D_R is not finite")
    C = mixed_constant(D, tensor.exponents)
    rng = np.random.default_rng(seed)
    cands = [tensor] + [tensor.with_values(rng.standard_normal(tensor.axes)) for _ in range(trials)]
    best = None
    for i, t in enumerate(cands):
        lhs = mixed_norm(slicewise_maximal(space, t, 2 * R))
        rhs = mixed_norm(t)
        rep = BoundReport.inequality(f"mixed.maximal[k={tensor.k}]", C, lhs, rhs, witness=i - 1,
                                     exponents=list(tensor.exponents), D_R=D)
        if best is None or (not rep.passed, rep.ratio) > (not best.passed, best.ratio):
            best = rep
    best.details["trials"] = trials
    return best
