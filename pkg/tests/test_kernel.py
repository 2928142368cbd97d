from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import spaces
from czkit import generators as gen
from czkit.kernel import (
    BumpProfile,
    build_kernel,
    certify_kernel,
    check_majorization,
    kernel_family,
    t_r_apply,
)
from czkit.space import ball_measures


def _certified(space, K):
    reps = certify_kernel(space, K)
    bad = [r.line() for r in reps if not r.passed]
    assert not bad, bad
    return reps


class TestProfile:
    def test_values(self):
        h = BumpProfile()
        assert h(0.0) == 1.0 and h(1.0) == 1.0
        assert h(7 / 6) == 0.0 and h(5.0) == 0.0
        assert h(1 + 1 / 12) == pytest.approx(0.5)

    def test_monotone_and_lipschitz(self):
        h = BumpProfile()
        t = np.linspace(0, 2, 20001)
        v = h(t)
        assert np.all(np.diff(v) <= 0)
        assert np.max(np.abs(np.diff(v)) / np.diff(t)) <= h.lipschitz_bound * (1 + 1e-9)

    @pytest.mark.parametrize("eta", [1.0, 1.2])
    def test_eta_range(self, eta):
        with pytest.raises(ValueError):
            BumpProfile(eta)


def test_two_point_identity(two_point):
    K = build_kernel(two_point, None, 0.1, 1.0)
    assert K.identity
    assert np.array_equal(K.S, np.diag(1.0 / two_point.weight))
    _certified(two_point, K)


def test_t_r_examples(line5):
    h = BumpProfile()
    ones = t_r_apply(line5, h, 1.5, np.ones(5)).values[:, 0]
    # h(1/1.5) = 1 and h(2/1.5) = 0
    assert ones.tolist() == [2.0, 3.0, 3.0, 3.0, 2.0]
    e2 = np.zeros(5)
    e2[2] = 1.0
    assert t_r_apply(line5, h, 0.5, e2).values[:, 0].tolist() == e2.tolist()
    with pytest.raises(ValueError):
        t_r_apply(line5, h, 0.0, e2)


def test_line_kernel(line5):
    K = build_kernel(line5, None, 2.0, 2.0)
    assert not K.identity
    assert np.array_equal(K.S, K.S.T)
    np.testing.assert_allclose(K.S @ line5.weight, 1.0, rtol=0, atol=1e-12)
    _certified(line5, K)


def test_bad_scale(line5):
    with pytest.raises(ValueError):
        build_kernel(line5, None, 3.0, 2.0)


@pytest.mark.parametrize("seed", range(24))
def test_random_spaces(seed):
    rng = np.random.default_rng(seed)
    kind = seed % 4
    if kind == 0:
        s = gen.line(int(rng.integers(2, 80)), weights="random", seed=seed)
    elif kind == 1:
        s = gen.grid(int(rng.integers(2, 9)), int(rng.integers(2, 9)), weights="random", seed=seed)
    elif kind == 2:
        s = gen.ultrametric_dyadic(int(rng.integers(1, 6)), weights="random", seed=seed)
    else:
        s = gen.random_points(int(rng.integers(2, 60)), dim=2, seed=seed, weights="random")
    R = float(rng.uniform(0.1, 1.0) * s.diameter)
    r = float(rng.uniform(0.05, 1.0) * R)
    K = build_kernel(s, None, r, R)
    _certified(s, K)
    # T_r 1 sandwich, stated directly
    Veta = ball_measures(s, K.eta * r)
    assert np.all(K.V_r <= K.T1 * (1 + 1e-12))
    assert np.all(K.T1 <= Veta * (1 + 1e-12))


@given(spaces(max_n=25), st.floats(0.05, 1.0), st.floats(0.1, 6.0))
def test_certify_property(s, frac, R):
    K = build_kernel(s, None, frac * R, R)
    _certified(s, K)


def test_c6_stable():
    s = gen.random_points(40, dim=2, seed=11, weights="random")
    a = build_kernel(s, None, 0.3, 0.6).empirical_C6
    b = build_kernel(s, None, 0.3, 0.6).empirical_C6
    assert math.isfinite(a) and a == b


class TestFamily:
    def test_stops_at_identity(self):
        s = gen.line(16)
        fam = kernel_family(s, None, 8.0)
        assert [K.r for K in fam] == [8.0, 4.0, 2.0, 1.0, 0.5]
        assert fam[-1].identity and not fam[-2].identity
        assert all(K.R == 8.0 for K in fam)

    def test_explicit_j_max(self, line5):
        assert len(kernel_family(line5, None, 2.0, j_max=0)) == 1
        with pytest.raises(ValueError):
            kernel_family(line5, None, 2.0, j_max=-1)
        with pytest.raises(ValueError):
            kernel_family(line5, None, 0.0)

    @pytest.mark.parametrize("seed", range(6))
    def test_majorization(self, seed):
        s = gen.line(int(10 + 7 * seed), weights="random", seed=seed)
        fam = kernel_family(s, None, s.diameter / 3)
        f = np.random.default_rng(seed).standard_normal(s.n)
        rep = check_majorization(s, fam, f)
        assert rep.passed, rep.line()
