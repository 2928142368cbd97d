"""Calderon-Zygmund tools on finite metric measure spaces.

Covering lemmas, truncated maximal operators, the local Calderon-Zygmund
decomposition, interpolation constants, smooth normalised kernels and
checks of the quantitative operator bounds, all with explicit constants.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .backend import BACKEND
from .reports import BoundReport
from .space import (
    MetricMeasureSpace,
    SpaceError,
    ball_measure,
    ball_members,
    build_space,
    doubling_constant,
    doubling_profile,
    separated_net,
)
from .generators import generate_space
from .functions import FunctionOnSpace

__all__ = [
    "__version__",
    "BACKEND",
    "BoundReport",
    "FunctionOnSpace",
    "MetricMeasureSpace",
    "SpaceError",
    "ball_measure",
    "ball_members",
    "build_space",
    "doubling_constant",
    "doubling_profile",
    "generate_space",
    "separated_net",
]
