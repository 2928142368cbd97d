from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import spaces
from czkit import generators as gen
from czkit.covering import ESCAPE_KAPPA, check_vitali, check_whitney, vitali_cover, whitney_cover
from czkit.space import SpaceError, ball_members, doubling_constant


def _all_pass(reports):
    return all(r.passed for r in reports), [r.line() for r in reports if not r.passed]


class TestVitali:
    def test_line_trace(self, line5):
        # the target has diameter 4 = 2R, outside the guarded regime but a valid greedy run
        cover = vitali_cover(line5, range(5), 1.0, 1.0, enforce_diameter=False)
        assert cover.centers == (0, 3)
        assert cover.radii == (1.0, 1.0)
        ok, bad = _all_pass(check_vitali(line5, cover, 1.0))
        assert ok, bad

    def test_line_trace_diameter_guard(self, line5):
        with pytest.raises(ValueError, match="diam"):
            vitali_cover(line5, range(5), 1.0, 1.0)

    def test_single_point(self, line5):
        cover = vitali_cover(line5, [3], 0.7, 1.0)
        assert cover.centers == (3,)

    def test_tiny_radii_select_everything(self, line5):
        cover = vitali_cover(line5, [0, 1, 2], 0.1, 1.5)
        assert cover.centers == (0, 1, 2)

    def test_largest_radius_first(self, line5):
        r = np.array([0.2, 0.9, 0.4, 0.9, 0.1])
        cover = vitali_cover(line5, range(5), r, 1.0, enforce_diameter=False)
        assert cover.centers[0] == 1
        assert cover.step_max[0] == 0.9

    @pytest.mark.parametrize("r", [0.0, -1.0, 1.5])
    def test_radius_range(self, line5, r):
        with pytest.raises(ValueError, match="outside"):
            vitali_cover(line5, [1, 2], r, 1.0)

    def test_empty(self, line5):
        with pytest.raises(ValueError):
            vitali_cover(line5, [], 1.0, 1.0)

    @given(spaces(), st.data())
    def test_invariants(self, s, data):
        R = data.draw(st.floats(0.1, 5.0))
        x0 = data.draw(st.integers(0, s.n - 1))
        E = ball_members(s, x0, R)
        seed = data.draw(st.integers(0, 2**32 - 1))
        r = R * (1.0 - np.random.default_rng(seed).random(E.size))
        cover = vitali_cover(s, E, r, R)
        ok, bad = _all_pass(check_vitali(s, cover, r))
        assert ok, bad


class TestWhitney:
    def test_line_trace(self, line5):
        cover = whitney_cover(line5, [1, 2, 3], 3.0)
        assert cover.centers == (2, 1, 3)
        assert cover.radii == (1.0, 0.5, 0.5)
        assert cover.overlap_bound == doubling_constant(line5, 3.0) ** 5
        reps = {r.name: r for r in check_whitney(line5, cover)}
        assert reps["whitney.overlap"].measured_lhs == 1.0
        assert all(r.passed for r in reps.values())
        assert 0 in ball_members(line5, 2, ESCAPE_KAPPA * 1.0)

    def test_single_point(self, line5):
        cover = whitney_cover(line5, [2], 3.0)
        assert cover.centers == (2,)
        assert cover.radii == (0.5,)
        assert list(ball_members(line5, 2, 0.5)) == [2]

    def test_whole_space(self, line5):
        with pytest.raises(SpaceError, match="proper subset"):
            whitney_cover(line5, range(5), 10.0)

    def test_diameter(self, line5):
        with pytest.raises(ValueError, match="diam"):
            whitney_cover(line5, [0, 1, 2], 2.0)

    def test_boundary_condition_names_point(self):
        s = gen.line(30)
        # d(0, X \ U) = 11 exceeds R while diam(U) = 10 < R
        with pytest.raises(ValueError, match="boundary condition fails at point 0"):
            whitney_cover(s, range(0, 11), 10.5)

    @given(spaces(), st.data())
    def test_invariants(self, s, data):
        if s.n < 2:
            return
        R = data.draw(st.floats(0.2, 6.0))
        x0 = data.draw(st.integers(0, s.n - 1))
        U = ball_members(s, x0, R / 2)
        if U.size == s.n:
            return
        try:
            cover = whitney_cover(s, U, R)
        except ValueError as exc:
            assert "boundary condition" in str(exc)
            return
        ok, bad = _all_pass(check_whitney(s, cover))
        assert ok, bad
