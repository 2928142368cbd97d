from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from czkit import generators as gen
from czkit.functions import lp_norm
from czkit.interp import phi
from czkit.io import load_tensor, save_tensor
from czkit.maximal import maximal_centred
from czkit.mixed import MixedNormTensor, check_mixed_maximal, mixed_constant, mixed_norm, slicewise_maximal
from czkit.space import doubling_constant


def _tensor(axes, exponents, seed=0, x_weight=None):
    rng = np.random.default_rng(seed)
    weights = [rng.uniform(0.5, 2.0, a) for a in axes]
    if x_weight is not None:
        weights[-1] = x_weight
    return MixedNormTensor(tuple(axes), tuple(weights), tuple(exponents), rng.standard_normal(axes))


class TestMixedNorm:
    def test_nested_loop_oracle(self):
        t = _tensor((3, 4), (2, 3))
        want = oracles.mixed_norm_loops(t.values, t.weights, t.exponents)
        assert mixed_norm(t) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_oracle_random_shapes(self, seed):
        rng = np.random.default_rng(seed)
        axes = tuple(int(a) for a in rng.integers(1, 5, size=int(rng.integers(2, 5))))
        exps = tuple(float(p) for p in rng.uniform(1.1, 6, len(axes)))
        t = _tensor(axes, exps, seed)
        assert mixed_norm(t) == pytest.approx(oracles.mixed_norm_loops(t.values, t.weights, exps), rel=1e-12)

    def test_singleton_y_is_lp(self):
        t = _tensor((1, 6), (4, 2.5))
        t = MixedNormTensor((1, 6), (np.ones(1), t.weights[1]), t.exponents, t.values)
        assert mixed_norm(t) == pytest.approx(lp_norm(np.abs(t.values[0]), t.weights[1], 2.5), rel=1e-14)

    def test_equal_exponents_product_measure(self):
        t = _tensor((3, 5), (3, 3))
        w = np.outer(t.weights[0], t.weights[1]).ravel()
        assert mixed_norm(t) == pytest.approx(lp_norm(np.abs(t.values.ravel()), w, 3), rel=1e-13)

    def test_zero(self):
        assert mixed_norm(_tensor((2, 3), (2, 2)).with_values(np.zeros((2, 3)))) == 0.0


class TestValidation:
    def test_shapes(self):
        with pytest.raises(ValueError, match="do not fill"):
            MixedNormTensor((2, 3), (np.ones(2), np.ones(3)), (2, 2), np.ones(5))
        with pytest.raises(ValueError, match="does not match"):
            MixedNormTensor((2, 3), (np.ones(3), np.ones(3)), (2, 2), np.ones(6))
        with pytest.raises(ValueError, match="one entry per axis"):
            MixedNormTensor((2, 3), (np.ones(2),), (2, 2), np.ones(6))
        with pytest.raises(ValueError, match="at least one Y"):
            MixedNormTensor((3,), (np.ones(3),), (2,), np.ones(3))

    def test_exponents_and_weights(self):
        with pytest.raises(ValueError, match="exponents"):
            MixedNormTensor((1, 2), (np.ones(1), np.ones(2)), (1.0, 2.0), np.ones(2))
        with pytest.raises(ValueError, match="positive"):
            MixedNormTensor((1, 2), (np.ones(1), np.array([1.0, 0.0])), (2, 2), np.ones(2))

    def test_readonly(self):
        t = _tensor((2, 2), (2, 2))
        with pytest.raises(ValueError):
            t.values[0, 0] = 1.0

    def test_round_trip(self, tmp_path):
        t = _tensor((2, 3, 4), (2, 3, 2))
        save_tensor(t, tmp_path / "t.json")
        u = load_tensor(tmp_path / "t.json")
        assert u.axes == t.axes and u.exponents == t.exponents
        assert np.array_equal(u.values, t.values)
        assert all(np.array_equal(a, b) for a, b in zip(u.weights, t.weights))
        with pytest.raises(ValueError, match="lacks"):
            MixedNormTensor.from_dict({"axes": [1, 2]})
        with pytest.raises(FileNotFoundError):
            load_tensor(tmp_path / "missing.json")


def test_constant():
    c = mixed_constant(2.0, (2.0, 3.0))
    assert c == pytest.approx((1 + 16**2) * 2.0**41 * math.sqrt(2) * phi(2, 3), rel=1e-14)
    assert mixed_constant(1.0, (2.0, 2.0, 2.0)) == pytest.approx((1 + 16**3) * math.sqrt(2), rel=1e-14)


def test_k1_reduces_to_scalar_maximal():
    s = gen.line(30, weights="random", seed=5)
    f = np.random.default_rng(5).standard_normal(30)
    t = MixedNormTensor((1, 30), (np.ones(1), s.weight), (3.0, 2.0), f)
    M = slicewise_maximal(s, t, 4.0)
    assert np.array_equal(M.values[0], maximal_centred(s, f, 4.0))
    assert mixed_norm(M) == pytest.approx(lp_norm(maximal_centred(s, f, 4.0), s.weight, 2.0), rel=1e-14)
    rep = check_mixed_maximal(s, t, 2.0)
    assert rep.passed and rep.witness == -1
    assert rep.claimed_constant == mixed_constant(doubling_constant(s, 2.0), (3.0, 2.0))


@pytest.mark.parametrize("k", [1, 2])
def test_check_passes_on_50_points(k):
    s = gen.grid(5, 10)
    axes = (3, 4, 50)[-(k + 1):]
    exps = (2.0, 3.0, 2.0)[-(k + 1):]
    t = _tensor(axes, exps, seed=k, x_weight=s.weight)
    rep = check_mixed_maximal(s, t, 1.5, trials=10, seed=3)
    assert rep.passed, rep.line()
    assert rep.details["trials"] == 10


def test_check_rejects():
    s = gen.line(4)
    t = _tensor((2, 4), (2, 2))
    with pytest.raises(ValueError, match="point masses"):
        check_mixed_maximal(s, t, 1.0)
    with pytest.raises(ValueError, match="the space has"):
        check_mixed_maximal(gen.line(5), t, 1.0)
    with pytest.raises(ValueError, match="positive"):
        check_mixed_maximal(s, t, 0.0)
