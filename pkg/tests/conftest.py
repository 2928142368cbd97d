from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from czkit import generators as gen  # noqa: E402

settings.register_profile(
    "czkit", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("czkit")


@pytest.fixture
def line5():
    return gen.line(5)


@pytest.fixture
def two_point():
    return gen.line(2)


@st.composite
def spaces(draw, max_n: int = 30):
    """Small spaces of every generator kind, unit or random weights."""
    kind = draw(st.sampled_from(["line", "grid", "ultra", "snowflake", "random", "graph"]))
    seed = draw(st.integers(0, 2**31 - 1))
    weights = draw(st.sampled_from(["unit", "random"]))
    if kind == "line":
        return gen.line(draw(st.integers(1, max_n)), weights=weights, seed=seed)
    if kind == "grid":
        r = draw(st.integers(1, 5))
        c = draw(st.integers(1, max(1, max_n // r)))
        return gen.grid(r, c, weights=weights, seed=seed)
    if kind == "ultra":
        return gen.ultrametric_dyadic(draw(st.integers(0, 4)), weights=weights, seed=seed)
    if kind == "snowflake":
        base = gen.line(draw(st.integers(2, max_n)))
        return gen.snowflake(base, draw(st.sampled_from([0.3, 0.5, 0.75])))
    if kind == "graph":
        n = draw(st.integers(2, max_n))
        rng = np.random.default_rng(seed)
        edges = [[i, i + 1, float(rng.integers(1, 4))] for i in range(n - 1)]
        edges += [[int(a), int(b), float(rng.integers(1, 6))] for a, b in rng.integers(0, n, size=(n // 2, 2)) if a != b]
        return gen.graph_space(n, edges, weights=weights, seed=seed)
    return gen.random_points(draw(st.integers(1, max_n)), seed=seed, weights=weights)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
