# -*- coding=utf-8 -*-
import math

import numpy as np
import pytest

from hypothesis import given, settings, strategies as st

from opeflow.covariance import (
    DEFAULT_MAX_ORDER,
    active_derivative_order_limit,
    covariance_derivative_bound,
    covariance_lambda_derivative,
    covariance_matrix_momentum,
    derivative_order_limit,
    eval_covariance,
    eval_covariance_deriv,
    heat_kernel_covariance,
    heat_kernel_derivative,
    heat_kernel_derivative_bound,
    propagator_bound_ratio,
    regulator,
    regulator_lambda_derivative,
)
from opeflow.exceptions import DegenerateCutoffError, DerivativeOrderError, SingularPointError
from opeflow.operators import MultiIndex

from .strategies import four_vectors, multi_indices

X = np.array([0.7, -0.2, 0.4, 0.1])


def test_closed_form():
    x2 = float(X @ X)
    expected = math.exp(-0.25 * 4.0 * x2) / (4.0 * math.pi ** 2 * x2)
    assert eval_covariance(X, 2.0) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(four_vectors(min_norm=0.1, max_norm=4.0), st.sampled_from([0.5, 1.0, 2.0]))
def test_heat_kernel_form_agrees(x, mu):
    assert heat_kernel_covariance(x, mu) == pytest.approx(float(eval_covariance(x, mu)), rel=1e-9)


def test_vectorised_points():
    points = np.stack([X, 2.0 * X, -X])
    values = eval_covariance(points, 1.0)
    assert values.shape == (3,)
    assert values[0] == pytest.approx(values[2])
    assert values[1] < values[0]


def test_coincident_points_raise():
    with pytest.raises(SingularPointError):
        eval_covariance(np.zeros(4), 1.0)
    with pytest.raises(SingularPointError):
        eval_covariance_deriv((1, 0, 0, 0), np.zeros((2, 4)), 1.0)
    with pytest.raises(SingularPointError):
        heat_kernel_covariance(np.zeros(4), 1.0)


@pytest.mark.parametrize("axis", range(4))
def test_first_derivative_matches_difference_quotient(axis):
    step = 1e-5
    shift = step * np.eye(4)[axis]
    expected = (eval_covariance(X + shift, 1.0) - eval_covariance(X - shift, 1.0)) / (2 * step)
    value = eval_covariance_deriv(MultiIndex.unit(axis), X, 1.0)
    assert value == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("u, axis", [((1, 0, 0, 0), 0), ((1, 0, 0, 0), 2), ((0, 1, 1, 0), 3)])
def test_higher_derivative_matches_difference_quotient(u, axis):
    step = 1e-5
    shift = step * np.eye(4)[axis]
    lower = eval_covariance_deriv(u, X + shift, 1.0) - eval_covariance_deriv(u, X - shift, 1.0)
    raised = MultiIndex(u) + MultiIndex.unit(axis)
    assert eval_covariance_deriv(raised, X, 1.0) == pytest.approx(lower / (2 * step), rel=1e-5)


def test_derivative_order_limit_applies_to_the_block():
    u = (1, 1, 0, 0)
    with derivative_order_limit(1):
        assert active_derivative_order_limit() == 1
        with pytest.raises(DerivativeOrderError):
            eval_covariance_deriv(u, X, 1.0)
        assert np.isfinite(eval_covariance_deriv(u, X, 1.0, max_order=2))
        with derivative_order_limit(None):
            assert np.isfinite(eval_covariance_deriv((3, 3, 3, 0), X, 1.0))
    assert active_derivative_order_limit() == DEFAULT_MAX_ORDER


def test_zeroth_derivative_is_the_covariance():
    assert eval_covariance_deriv(MultiIndex.zero(), X, 1.5) == pytest.approx(eval_covariance(X, 1.5))


def test_derivative_order_limit():
    with pytest.raises(ValueError):
        eval_covariance_deriv((3, 3, 3, 0), X, 1.0)
    assert np.isfinite(eval_covariance_deriv((3, 3, 3, 0), X, 1.0, max_order=None))


def test_derivatives_have_the_parity_of_their_order():
    u = MultiIndex((2, 1, 0, 0))
    assert eval_covariance_deriv(u, -X, 1.0) == pytest.approx(-eval_covariance_deriv(u, X, 1.0))


@settings(max_examples=60, deadline=None)
@given(multi_indices(max_order=4), four_vectors(min_norm=0.1, max_norm=5.0))
def test_derivative_bound(u, x):
    value = abs(float(eval_covariance_deriv(u, x, 1.0)))
    assert value <= covariance_derivative_bound(u.order, x, 1.0, delta=0.5)


@settings(max_examples=60, deadline=None)
@given(
    multi_indices(max_order=4),
    four_vectors(min_norm=0.0, max_norm=3.0),
    st.floats(min_value=0.05, max_value=4.0),
)
def test_heat_kernel_derivative_bound(u, x, t):
    value = abs(float(heat_kernel_derivative(u, x, t)))
    assert value <= heat_kernel_derivative_bound(u, x, t) * (1 + 1e-12)


def test_heat_kernel_first_derivative():
    t = 0.3
    expected = -X[0] / (2 * t) * math.exp(-float(X @ X) / (4 * t))
    assert heat_kernel_derivative((1, 0, 0, 0), X, t) == pytest.approx(expected)


def test_regulator_limits():
    p = np.array([1.0, 0.5, 0.0, 0.0])
    assert regulator(p, 0) == 0.0
    assert regulator(p, math.inf) == 1.0
    assert regulator(p, 2.0) == pytest.approx(math.exp(-1.25 / 4.0))
    step = 1e-6
    expected = (regulator(p, 2.0 + step) - regulator(p, 2.0 - step)) / (2 * step)
    assert regulator_lambda_derivative(p, 2.0) == pytest.approx(expected, rel=1e-6)


def test_momentum_matrix_feynman_gauge():
    p = np.array([0.6, 0.0, 0.8, 0.0])
    lam = 2.0
    matrix = covariance_matrix_momentum(p, 1.0, lam, math.inf)
    scalar = (1.0 - math.exp(-1.0 / lam ** 2)) / 1.0
    assert matrix.shape == (7, 7)
    np.testing.assert_allclose(matrix[:4, :4], scalar * np.eye(4))
    assert matrix[4, 5] == pytest.approx(-scalar)
    assert matrix[5, 4] == pytest.approx(scalar)
    assert matrix[6, 6] == pytest.approx(scalar)
    assert matrix[4, 4] == matrix[5, 5] == 0.0


def test_momentum_matrix_gauge_parameter():
    p = np.array([0.3, -0.4, 1.2, 0.5])
    lam, xi = 1.5, 0.5
    matrix = covariance_matrix_momentum(p, xi, lam, math.inf)
    scalar = (1.0 - math.exp(-float(p @ p) / lam ** 2)) / float(p @ p)
    np.testing.assert_allclose(matrix[:4, :4] @ p, scalar * p / xi)
    transverse = np.array([0.4, 0.3, 0.0, 0.0])
    np.testing.assert_allclose(matrix[:4, :4] @ transverse, scalar * transverse, atol=1e-15)
    with pytest.raises(ValueError):
        covariance_matrix_momentum(p, 0.0, lam, math.inf)


def test_momentum_matrix_at_zero_momentum():
    lam, lam0 = 1.0, 4.0
    matrix = covariance_matrix_momentum(np.zeros(4), 1.0, lam, lam0)
    limit = covariance_matrix_momentum(np.full(4, 1e-3), 1.0, lam, lam0)
    np.testing.assert_allclose(matrix[:6, :6], limit[:6, :6], rtol=1e-5)
    assert matrix[0, 0] == pytest.approx(1.0 - 1.0 / 16.0)
    with pytest.raises(SingularPointError):
        covariance_matrix_momentum(np.zeros(4), 1.0, 0.0, lam0)


def test_degenerate_cutoffs():
    p = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(DegenerateCutoffError):
        covariance_matrix_momentum(p, 1.0, 2.0, 2.0)
    with pytest.raises(DegenerateCutoffError):
        covariance_matrix_momentum(p, 1.0, 3.0, 2.0)
    assert not covariance_matrix_momentum(p, 1.0, 2.0, 2.0, allow_degenerate=True).any()
    with pytest.raises(DegenerateCutoffError):
        covariance_lambda_derivative(p, 1.0, 0.0)


def test_lambda_derivative_matches_difference_quotient():
    p = np.array([0.5, 1.0, -0.3, 0.2])
    lam, step = 1.2, 1e-6
    upper = covariance_matrix_momentum(p, 1.0, lam + step, math.inf)
    lower = covariance_matrix_momentum(p, 1.0, lam - step, math.inf)
    np.testing.assert_allclose(
        covariance_lambda_derivative(p, 1.0, lam), (upper - lower) / (2 * step), rtol=1e-6, atol=1e-12
    )


def test_propagator_bound_constant_is_moderate():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(200):
        lam = rng.uniform(0.5, 3.0)
        p = rng.normal(size=4)
        p *= rng.uniform(0.0, 5.0) * lam / np.linalg.norm(p)
        for w in ((0, 0, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0)):
            worst = max(worst, propagator_bound_ratio(p, w, 1.0, lam))
    assert 0.0 < worst < 30.0
