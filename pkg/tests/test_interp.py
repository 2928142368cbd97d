from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from czkit.interp import (
    conjugate,
    in_region,
    marcinkiewicz_constant,
    phi,
    phi_many,
    phi_query,
    phi_region_sup,
    phi_upper_bounds,
)

INF = math.inf

# dense-grid oracle value, frozen
PHI_2_15 = 2.3121392018607967


class TestClosedForms:
    def test_r_infinite(self):
        assert phi(INF, 2) == pytest.approx(math.sqrt(2), rel=1e-15)
        assert phi_query(INF, 2).method == "closed_form"

    @pytest.mark.parametrize("r", [1.01, 1.5, 2.0, 7.0, 1e4])
    def test_diagonal_is_one(self, r):
        assert phi(r, r) == 1.0

    def test_conjugate(self):
        assert conjugate(2.0) == 2.0
        assert conjugate(INF) == 1.0
        assert conjugate(1.0) == INF
        assert conjugate(3.0) == 1.5

    @pytest.mark.parametrize("r, p", [(1.0, 2.0), (2.0, 1.0), (2.0, INF), (0.5, 2.0)])
    def test_domain(self, r, p):
        with pytest.raises(ValueError):
            phi(r, p)


def test_frozen_value():
    assert phi(2, 1.5) == pytest.approx(PHI_2_15, rel=1e-12)
    q = phi_query(2, 1.5)
    assert q.method == "minimized" and 1 < q.minimizer_q <= 1.5


def test_duality():
    # p > r maps to the conjugate pair
    assert phi(1.5, 3.0) == phi(3.0, 1.5)
    assert phi_query(1.5, 3.0).method == "symmetry"


class TestUpperBounds:
    def test_square_root_regime(self):
        first, second = phi_upper_bounds(4, 2)
        # p = sqrt(r) sits on both regimes and both reduce to sqrt(3)
        assert first == pytest.approx(math.sqrt(3), rel=1e-15)
        assert second == pytest.approx(math.sqrt(3), rel=1e-15)
        assert phi(4, 2) <= min(first, second)

    def test_small_p_regime(self):
        first, second = phi_upper_bounds(9, 1.5)
        assert math.isnan(first)
        assert phi(9, 1.5) <= second * (1 + 1e-12)

    def test_rejects_p_above_r(self):
        with pytest.raises(ValueError):
            phi_upper_bounds(2, 3)

    @given(st.floats(1.05, 400), st.floats(0.0, 1.0))
    def test_dominate(self, r, t):
        p = 1.0 + 1e-6 + t * (r - 1.0 - 1e-6)
        first, second = phi_upper_bounds(r, p)
        v = phi(r, p)
        for b in (first, second):
            if not math.isnan(b):
                assert v <= b * (1 + 1e-12)


class TestMarcinkiewicz:
    def test_unit_constants(self):
        assert marcinkiewicz_constant(1, 1, INF, 2) == pytest.approx(2 * math.sqrt(2), rel=1e-15)

    def test_scaled(self):
        assert marcinkiewicz_constant(2, 2, INF, 2) == pytest.approx(4 * math.sqrt(2), rel=1e-15)

    def test_rejects(self):
        with pytest.raises(ValueError):
            marcinkiewicz_constant(0, 1, INF, 2)
        with pytest.raises(ValueError):
            marcinkiewicz_constant(1, 1, 2, 3)


class TestRegion:
    def test_membership(self):
        assert in_region(INF, 5, 2, 2)
        assert not in_region(1.5, 5, 2, 2)
        assert in_region(100, 150, 2, 2)
        assert not in_region(100, 300, 2, 2)

    def test_sup_finite(self):
        out = phi_region_sup(2, 2, grid_size=60)
        assert math.isfinite(out["sup"]) and out["sup"] >= 1
        assert in_region(out["r"], out["p"], 2, 2)
        assert out["points"] > 0

    def test_single_point(self):
        out = phi_region_sup(2, 2, grid_size=1)
        assert out["sup"] == 1.0 and out["points"] == 1

    def test_rejects(self):
        with pytest.raises(ValueError):
            phi_region_sup(1, 2)


@pytest.mark.parametrize("seed", range(10))
def test_dense_grid_oracle(seed):
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(np.log(1.05), np.log(200), 20))
    p = 1.0 + rng.random(20) * (2 * r - 1.0)
    got = phi_many(r, p)
    for i in range(20):
        assert got[i] == pytest.approx(oracles.phi_grid(r[i], p[i]), rel=1e-9)
        assert got[i] == phi(r[i], p[i])


def test_phi_many_broadcast():
    out = phi_many(np.array([[INF], [3.0]]), np.array([1.5, 3.0]))
    assert out.shape == (2, 2)
    assert out[1, 1] == 1.0
    with pytest.raises(ValueError):
        phi_many([2.0], [INF])
