# -*- coding=utf-8 -*-
import math

import numpy as np
import pytest

from hypothesis import given, settings

from opeflow.kinematics import (
    MAX_MOMENTA,
    Kinematics,
    eta,
    eta_bar,
    eta_i,
    momentum_norm,
    subset_sums,
)

from .strategies import momenta


def _vectors(*rows):
    return np.array(rows, dtype=float)


def test_empty_set():
    assert momentum_norm([]) == 0.0
    assert eta([]) == 0.0
    assert eta_bar([], 2.5) == 2.5


def test_single_momentum():
    q = _vectors([3.0, 4.0, 0.0, 0.0])
    assert eta(q) == pytest.approx(5.0)
    assert eta_i(q, 0) == pytest.approx(5.0)
    assert eta_bar(q, 1.0) == pytest.approx(5.0)
    assert momentum_norm(q) == pytest.approx(5.0)


def test_exceptional_pair():
    q = _vectors([1, 0, 0, 0], [-1, 0, 0, 0])
    assert eta(q) == pytest.approx(1.0)
    assert eta_bar(q, 1.0) == 0.0
    assert momentum_norm(q) == pytest.approx(1.0)


def test_three_momenta():
    q = _vectors([1, 0, 0, 0], [0, 2, 0, 0], [-1, -2, 0, 0])
    assert momentum_norm(q) == pytest.approx(math.sqrt(5))
    assert eta_i(q, 0) == pytest.approx(1.0)
    assert eta_i(q, 1) == pytest.approx(2.0)
    assert eta(q) == pytest.approx(1.0)
    # the full sum vanishes
    assert eta_bar(q, 10.0) == pytest.approx(0.0)
    assert eta_bar(q[:2], 10.0) == pytest.approx(1.0)


def test_subset_sums_include_empty_sum():
    q = _vectors([1, 0, 0, 0], [0, 1, 0, 0])
    sums = subset_sums(q)
    assert sums.shape == (4, 4)
    assert any(np.allclose(row, 0) for row in sums)
    assert any(np.allclose(row, [1, 1, 0, 0]) for row in sums)


def test_subset_scan_is_guarded():
    with pytest.raises(ValueError):
        momentum_norm(np.ones((MAX_MOMENTA + 1, 4)))
    with pytest.raises(ValueError):
        momentum_norm(np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(q=momenta(min_size=1, max_size=5))
def test_norm_dominates_every_momentum(q):
    norm = momentum_norm(q)
    assert all(norm >= np.linalg.norm(p) - 1e-12 for p in q)


@settings(max_examples=60, deadline=None)
@given(q=momenta(min_size=1, max_size=5))
def test_eta_bar_below_eta(q):
    assert eta_bar(q, 1.0) <= eta(q) + 1e-12
    assert eta(q) <= momentum_norm(q) + 1e-12


def test_kinematics_scaling():
    q = _vectors([1, 2, 0, 0], [0, -1, 3, 0], [-1, -1, -3, 0])
    kinematics = Kinematics(q, mu=0.5)
    assert kinematics.is_conserving
    scaled = kinematics.scaled(0.1)
    assert scaled.norm == pytest.approx(0.1 * kinematics.norm)
    assert scaled.eta == pytest.approx(0.1 * kinematics.eta)
    assert len(kinematics.eta_values) == 3
    assert kinematics.eta_bar <= kinematics.eta
    assert not Kinematics(q[:2]).is_conserving
