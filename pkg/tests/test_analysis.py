# -*- coding=utf-8 -*-
import csv
import io
import math

import numpy as np
import pytest

from opeflow.analysis import (
    DEFAULT_GRID,
    FIT_POINTS,
    PlaneWave,
    background_value,
    check_associativity,
    expected_degree,
    remainder,
    scaling_degree,
    taylor_operator,
    write_scaling_csv,
)
from opeflow.covariance import eval_covariance
from opeflow.exceptions import DomainViolationError
from opeflow.operators import UNIT, MultiIndex
from opeflow.wick import free_ope_coefficient, target_operators

from .oracles import log_log_slope

X = np.array([0.7, -0.2, 0.4, 0.1])
ORIGIN = np.zeros(4)
ASSOCIATIVE = np.array([[10.0, 0.1, 0.0, 0.0], [10.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]])
WAVE = {"phi": PlaneWave(1.0, (0.3, -0.2, 0.1, 0.4))}


def _op(theory, text):
    return theory.parse(text).items()[0][0]


def test_covariance_scales_like_its_dimension(scalar):
    phi = _op(scalar, "phi")
    coefficient = free_ope_coefficient([phi, phi], UNIT, theory=scalar)
    fit = scaling_degree(coefficient, np.array([X, ORIGIN]), expected=expected_degree([phi, phi], UNIT))
    assert fit.slope == pytest.approx(-2.0, abs=0.02)
    assert fit.confidence[0] <= fit.slope <= fit.confidence[1]
    assert fit.passed
    assert len(fit.tau_grid) == 12
    assert fit.tau_grid[0] == 1.0
    assert fit.tau_grid[-1] == pytest.approx(1e-3)


def test_constant_has_zero_slope():
    fit = scaling_degree(lambda points: 3.0, np.array([X, ORIGIN]), expected=0)
    assert fit.slope == pytest.approx(0.0, abs=1e-12)
    assert fit.passed


def test_composite_squares(scalar):
    square = _op(scalar, "phi^2")
    coefficient = free_ope_coefficient([square, square], square, theory=scalar)
    assert coefficient.evaluate([X, ORIGIN]) == pytest.approx(4 * eval_covariance(X, 1.0))
    fit = scaling_degree(coefficient, np.array([X, ORIGIN]), expected=expected_degree([square, square], square))
    assert fit.slope == pytest.approx(-2.0, abs=0.05)
    assert fit.passed


def test_failing_bound_is_reported(scalar):
    phi = _op(scalar, "phi")
    coefficient = free_ope_coefficient([phi, phi], UNIT, theory=scalar)
    fit = scaling_degree(coefficient, np.array([X, ORIGIN]), expected=0)
    assert not fit.passed
    assert fit.as_dict()["passed"] is False


def test_underflow_is_flagged():
    fit = scaling_degree(lambda points: 0.0, np.array([X, ORIGIN]))
    assert fit.underflow
    assert not fit.passed


def test_grid_validation():
    with pytest.raises(ValueError):
        scaling_degree(lambda points: 1.0, np.array([X, ORIGIN]), grid=[1.0, 0.5, 0.7, 0.1, 0.05, 0.01])
    with pytest.raises(ValueError):
        scaling_degree(lambda points: 1.0, np.array([X, ORIGIN]), grid=[1.0, 0.1, 0.01])
    with pytest.raises(ValueError):
        scaling_degree(lambda points: 1.0, np.array([X, ORIGIN]), grid=[2.0, 1.0, 0.5, 0.2, 0.1, 0.05])


def test_fits_are_rotation_invariant(scalar):
    square = _op(scalar, "phi^2")
    coefficient = free_ope_coefficient([square, square], UNIT, theory=scalar)
    rotation, _ = np.linalg.qr(np.random.default_rng(3).normal(size=(4, 4)))
    plain = scaling_degree(coefficient, np.array([X, ORIGIN]))
    rotated = scaling_degree(coefficient, np.array([rotation.dot(X), ORIGIN]))
    assert rotated.slope == pytest.approx(plain.slope, abs=1e-9)
    np.testing.assert_allclose(rotated.values, plain.values, rtol=1e-9)


def test_free_coefficients_respect_the_scaling_bound(scalar):
    operators = [_op(scalar, text) for text in ("phi", "phi^2", "d1phi")]
    checked = 0
    for left in operators:
        for right in operators:
            for B in target_operators([left, right], scalar, 4):
                coefficient = free_ope_coefficient([left, right], B, theory=scalar)
                if coefficient.is_zero:
                    continue
                fit = scaling_degree(
                    coefficient, np.array([X, ORIGIN]), expected=expected_degree([left, right], B)
                )
                assert fit.passed, (left, right, B, fit.slope)
                checked += 1
    assert checked > 10


def test_scaling_rows_export():
    fit = scaling_degree(lambda points: float(np.sum(points ** 2)), np.array([X, ORIGIN]))
    rows = list(csv.reader(io.StringIO(write_scaling_csv(fit))))
    assert rows[0] == ["tau", "value"]
    assert len(rows) == len(DEFAULT_GRID) + 1
    assert float(rows[1][0]) == 1.0
    stream = io.StringIO()
    assert write_scaling_csv(fit, stream) == ""
    assert stream.getvalue().startswith("tau,value\n")


def test_scaling_fit_agrees_with_a_polyfit():
    def coefficient(points):
        return 0.5 * float(np.sum((points[0] - points[1]) ** 2)) ** -1.5 + 2.0

    fit = scaling_degree(coefficient, np.array([X, ORIGIN]))
    tail_tau = np.asarray(fit.tau_grid[-FIT_POINTS:])
    slope, intercept, residual = log_log_slope(tail_tau, fit.values[-FIT_POINTS:])
    assert fit.slope == pytest.approx(slope, rel=1e-9)
    assert fit.intercept == pytest.approx(intercept, rel=1e-9)
    assert fit.slope == pytest.approx(-3.0, abs=0.05)
    assert residual >= 0.0


def test_oracle_fit_of_a_pure_power():
    scales = np.geomspace(1.0, 1e-3, 10)
    slope, intercept, residual = log_log_slope(scales, 3.0 * scales ** -2)
    assert slope == pytest.approx(-2.0)
    assert intercept == pytest.approx(math.log(3.0))
    assert residual < 1e-10


def test_unit_operators_are_associative(scalar):
    result = check_associativity(UNIT, UNIT, UNIT, UNIT, ASSOCIATIVE, 4, scalar)
    assert result.lhs == 1.0
    assert result.residual == 0.0
    assert result.relative == 0.0


def test_associativity_converges(scalar):
    phi, square = _op(scalar, "phi"), _op(scalar, "phi^2")
    x1, x2, x3 = ASSOCIATIVE
    residuals = []
    for d_trunc in (2, 4, 6, 8):
        result = check_associativity(phi, phi, square, UNIT, ASSOCIATIVE, d_trunc, scalar)
        residuals.append(result.residual)
        if d_trunc == 6:
            assert result.relative < 1e-4
    expected = 2 * eval_covariance(x1 - x3, 1.0) * eval_covariance(x2 - x3, 1.0)
    assert result.lhs == pytest.approx(expected, rel=1e-12)
    assert all(later <= earlier for earlier, later in zip(residuals, residuals[1:]))
    assert result.as_dict()["d_trunc"] == "8"


def test_associativity_domain(scalar):
    phi = _op(scalar, "phi")
    swapped = ASSOCIATIVE[[2, 1, 0]]
    with pytest.raises(DomainViolationError):
        check_associativity(phi, phi, phi, phi, swapped, 4, scalar)
    with pytest.raises(ValueError):
        check_associativity(phi, phi, phi, phi, ASSOCIATIVE[:2], 4, scalar)


def test_taylor_terms_sum_to_the_function():
    k = np.array([0.3, -0.2, 0.1, 0.4])

    def derivatives(w, y):
        return float(w.monomial(k) * np.exp(k.dot(y)))

    x, y = np.array([0.5, 0.2, -0.1, 0.3]), np.array([0.1, 0.0, 0.2, -0.2])
    assert taylor_operator(derivatives, x, y, 0) == pytest.approx(math.exp(k.dot(y)))
    assert taylor_operator(derivatives, x, y, 1) == pytest.approx(k.dot(x - y) * math.exp(k.dot(y)))
    total = sum(taylor_operator(derivatives, x, y, n) for n in range(10))
    assert total == pytest.approx(math.exp(k.dot(x)), rel=1e-10)


def test_plane_wave_background(scalar):
    wave = WAVE["phi"]
    assert wave.derivative(MultiIndex.unit(3), ORIGIN) == pytest.approx(0.4)
    assert background_value(_op(scalar, "phi^2"), WAVE, X) == pytest.approx(
        math.exp(2 * np.dot(wave.wave_vector, X))
    )
    assert background_value(UNIT, WAVE, X) == 1.0


@pytest.mark.parametrize("D", [2, 3, 4])
def test_remainder_vanishes_with_the_cutoff(scalar, D):
    phi = _op(scalar, "phi")

    def functional(points):
        return remainder([phi, phi], D, points, WAVE, scalar)

    fit = scaling_degree(functional, np.array([X, ORIGIN]), expected=D - 2)
    assert fit.passed
    assert fit.slope == pytest.approx(D - 2, abs=0.05)


def test_remainder_of_the_leading_term(scalar):
    phi = _op(scalar, "phi")
    # only the unit is subtracted below dimension two
    value = remainder([phi, phi], 2, np.array([X, ORIGIN]), WAVE, scalar)
    assert value == pytest.approx(math.exp(np.dot(WAVE["phi"].wave_vector, X)))


def test_remainder_needs_bosonic_scalars(maxwell):
    A = _op(maxwell, "A_1")
    with pytest.raises(ValueError):
        remainder([A, A], 3, np.array([X, ORIGIN]), {"A": PlaneWave(1.0, (0, 0, 0, 0))}, maxwell)
