import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kktnet.errors import DimensionMismatch, OutOfRange
from kktnet.fuzz import random_params
from kktnet.model import (
    SIGMOID,
    SOFTPLUS,
    TANH,
    Dataset,
    NoHidden,
    OneHidden,
    Unit,
    batch_evaluate,
    evaluate,
    get_activation,
    network_eval,
    network_param_gradient,
    param_gradients,
)

ALL_ACTS = [SIGMOID, TANH, SOFTPLUS]


class TestActivationValues:
    def test_sigmoid_at_zero(self):
        assert SIGMOID(0.0) == 0.5

    def test_tanh_at_zero(self):
        assert TANH(0.0) == 0.0

    def test_sigmoid_at_one(self):
        # 1 / (1 + e^{-1}) to 20 digits
        assert SIGMOID(1.0) == pytest.approx(0.73105857863000487925, abs=1e-15)

    def test_derivatives_at_zero(self):
        assert SIGMOID.derivative(0.0) == 0.25
        assert TANH.derivative(0.0) == 1.0
        assert SOFTPLUS.derivative(0.0) == 0.5

    def test_inverse_examples(self):
        assert SIGMOID.inverse(0.5) == 0.0
        assert TANH.inverse(0.0) == 0.0
        assert SIGMOID.inverse(0.7310585786) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("act,y", [
        (SIGMOID, 0.0), (SIGMOID, 1.0), (SIGMOID, 1.5),
        (TANH, -1.0), (TANH, 1.0), (SOFTPLUS, 0.0), (SOFTPLUS, -0.3),
    ])
    def test_inverse_out_of_range(self, act, y):
        with pytest.raises(OutOfRange):
            act.inverse(y)

    def test_extreme_inputs_stay_finite(self):
        x = np.array([-800.0, -40.0, 40.0, 800.0])
        for act in ALL_ACTS:
            assert np.all(np.isfinite(act(x)))
            d = act.derivative(x)
            assert np.all(np.isfinite(d)) and np.all(d >= 0)

    def test_get_activation(self):
        assert get_activation("Tanh") is TANH
        with pytest.raises(ValueError):
            get_activation("relu")


class TestActivationProperties:
    @pytest.mark.parametrize("act", ALL_ACTS, ids=lambda a: a.kind)
    def test_derivative_matches_central_difference(self, act):
        x = np.random.default_rng(0).uniform(-10, 10, 1000)
        h = 1e-5
        numeric = (act(x + h) - act(x - h)) / (2 * h)
        analytic = act.derivative(x)
        assert np.all(np.abs(analytic - numeric) <= 1e-6 * np.maximum(1.0, np.abs(analytic)))

    @pytest.mark.parametrize("act", ALL_ACTS, ids=lambda a: a.kind)
    def test_strictly_increasing_with_positive_derivative(self, act):
        x = np.linspace(-15, 15, 2001)
        assert np.all(np.diff(act(x)) > 0)
        assert np.all(act.derivative(x) > 0)

    @pytest.mark.parametrize("act", ALL_ACTS, ids=lambda a: a.kind)
    def test_round_trip(self, act):
        rng = np.random.default_rng(1)
        lo = act.range_low
        hi = act.range_high if math.isfinite(act.range_high) else 20.0
        y = rng.uniform(lo, hi, 1000)
        y = y[(y > lo) & (y < hi)]
        back = act(act.inverse(y))
        assert np.max(np.abs(back - y)) <= 1e-10
        np.testing.assert_allclose(back, y, rtol=1e-12, atol=0)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(ALL_ACTS), st.floats(-30, 30))
    def test_value_inside_range(self, act, x):
        v = act(x)
        assert act.range_low <= v <= act.range_high


class TestParams:
    def test_flat_layouts(self):
        p = NoHidden(w=[2.0, 3.0], w0=1.0)
        np.testing.assert_array_equal(p.to_vector(), [1.0, 2.0, 3.0])
        q = OneHidden((Unit([1, 2], 3, 4), Unit([5, 6], 7, 8)))
        np.testing.assert_array_equal(q.to_vector(), [3, 1, 2, 7, 5, 6, 4, 8])
        assert q.n_params == 2 * 3 + 2

    def test_with_vector_round_trip(self, rng):
        for _ in range(20):
            p = random_params(rng, int(rng.integers(1, 5)))
            x = rng.normal(size=p.n_params)
            np.testing.assert_array_equal(p.with_vector(x).to_vector(), x)

    def test_with_vector_rejects_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            NoHidden([0.0], 0.0).with_vector([1.0, 2.0, 3.0])

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            NoHidden([math.nan], 0.0)
        with pytest.raises(ValueError):
            OneHidden(())
        with pytest.raises(DimensionMismatch):
            OneHidden((Unit([1.0], 0, 1), Unit([1.0, 2.0], 0, 1)))

    def test_dataset_validation(self):
        with pytest.raises(DimensionMismatch):
            Dataset([[0.0], [1.0]], [0.5])
        with pytest.raises(ValueError):
            Dataset([[0.0]], [math.inf])
        data = Dataset([0.0, 1.0], [0.5, 0.4])
        assert (data.n_points, data.dim) == (2, 1)
        with pytest.raises(ValueError):
            data.points[0, 0] = 3.0


class TestEvaluation:
    def test_zero_network(self):
        assert network_eval(NoHidden([0.0, 0.0], 0.0), SIGMOID, [3.0, -7.0]) == 0.5

    def test_cancelling_units(self):
        u = dict(w=[0.3, -1.2], w0=0.7)
        p = OneHidden((Unit(a=1.0, **u), Unit(a=-1.0, **u)))
        assert network_eval(p, TANH, [0.4, 2.0]) == 0.0

    def test_matches_activation_example(self):
        assert network_eval(NoHidden([1.0], 0.0), SIGMOID, [1.0]) == pytest.approx(0.7310585786, abs=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            network_eval(NoHidden([1.0], 0.0), SIGMOID, [1.0, 2.0])

    def test_single_unit_equals_no_hidden(self, rng):
        for act in ALL_ACTS:
            for _ in range(20):
                d = int(rng.integers(1, 5))
                w, w0 = rng.normal(size=d), rng.normal()
                T = rng.normal(size=(10, d))
                a = evaluate(NoHidden(w, w0), act, T)
                b = evaluate(OneHidden((Unit(w, w0, 1.0),)), act, T)
                np.testing.assert_array_equal(a, b)

    def test_batch_evaluate_matches_loop(self, rng):
        for act in ALL_ACTS:
            p = random_params(rng, 2, "one_hidden")
            T = rng.normal(size=(7, 2))
            X = rng.normal(size=(5, p.n_params))
            batch = batch_evaluate(p, X, act, T)
            loop = np.array([evaluate(p.with_vector(x), act, T) for x in X])
            np.testing.assert_allclose(batch, loop, rtol=1e-14, atol=1e-14)


class TestParamGradient:
    def test_zero_network_examples(self):
        np.testing.assert_array_equal(network_param_gradient(NoHidden([0.0], 0.0), SIGMOID, [0.0]), [0.25, 0.0])
        one = OneHidden((Unit([0.0], 0.0, 1.0),))
        np.testing.assert_array_equal(network_param_gradient(one, SIGMOID, [0.0]), [0.25, 0.0, 0.5])

    def test_matches_finite_differences(self, rng):
        h = 1e-5
        for _ in range(100):
            act = ALL_ACTS[int(rng.integers(3))]
            d = int(rng.integers(1, 5))
            p = random_params(rng, d)
            T = rng.uniform(-1, 1, (4, d))
            x = p.to_vector()
            G = param_gradients(p, act, T)
            for k in range(x.size):
                e = np.zeros_like(x)
                e[k] = h
                fd = (evaluate(p.with_vector(x + e), act, T) - evaluate(p.with_vector(x - e), act, T)) / (2 * h)
                assert np.all(np.abs(G[:, k] - fd) <= 1e-6 * np.maximum(1.0, np.abs(G[:, k])))

    def test_single_point_matches_rows(self, rng):
        p = random_params(rng, 3, "one_hidden")
        T = rng.normal(size=(4, 3))
        G = param_gradients(p, TANH, T)
        for i in range(4):
            np.testing.assert_allclose(network_param_gradient(p, TANH, T[i]), G[i], rtol=1e-14, atol=1e-15)
