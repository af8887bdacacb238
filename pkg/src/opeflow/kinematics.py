# -*- coding=utf-8 -*-
"""Subset-sum kinematics of a set of external momenta.

For momenta ``q_1 ... q_n``:

* ``|q|``: the largest norm of any partial sum,
* ``eta_i``: the smallest norm of ``q_i`` plus a partial sum of the other
  momenta, the last momentum excluded,
* ``eta``: the smallest ``eta_i`` over ``i < n``,
* ``eta_bar_i`` and ``eta_bar``: the same with the last momentum included.

With one momentum ``eta_1 = |q_1|``; with none, ``|q| = eta = 0`` and
``eta_bar = mu``.
"""
import functools
import itertools

from typing import Sequence

import numpy as np

from .misc import _get_logger
from .operators import AXES

__all__ = [
    "MAX_MOMENTA",
    "subset_masks",
    "subset_sums",
    "momentum_norm",
    "eta_i",
    "eta",
    "eta_bar_i",
    "eta_bar",
    "Kinematics",
]

logger = _get_logger(__name__)

MAX_MOMENTA = 12


def _as_momenta(momenta):
    q = np.asarray(momenta, dtype=float)
    if q.size == 0:
        return q.reshape(0, AXES)
    if q.ndim != 2 or q.shape[1] != AXES:
        raise ValueError("expected an (n, 4) array of momenta, got shape {0}".format(q.shape))
    if len(q) > MAX_MOMENTA:
        raise ValueError(
            "subset scans are limited to {0} momenta, got {1}".format(MAX_MOMENTA, len(q))
        )
    return q


@functools.lru_cache(maxsize=None)
def subset_masks(n):
    # type: (int) -> np.ndarray
    """The ``(2**n, n)`` 0/1 matrix whose rows enumerate every subset."""
    if n == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product((0.0, 1.0), repeat=n)))


def subset_sums(momenta):
    """Every partial sum of ``momenta``, including the empty one."""
    q = _as_momenta(momenta)
    return subset_masks(len(q)) @ q if len(q) else np.zeros((1, AXES))


def momentum_norm(momenta):
    # type: (Sequence) -> float
    """``|q| = sup_Q |sum_{q in Q} q|``."""
    q = _as_momenta(momenta)
    if not len(q):
        return 0.0
    return float(np.max(np.linalg.norm(subset_sums(q), axis=1)))


def _smallest_shifted_sum(q, i, pool):
    others = np.delete(q[pool], [k for k, j in enumerate(pool) if j == i], axis=0)
    shifted = subset_sums(others) + q[i]
    return float(np.min(np.linalg.norm(shifted, axis=1)))


def eta_i(momenta, i):
    # type: (Sequence, int) -> float
    q = _as_momenta(momenta)
    if len(q) == 1:
        return float(np.linalg.norm(q[0]))
    return _smallest_shifted_sum(q, i, list(range(len(q) - 1)))


def eta(momenta):
    # type: (Sequence) -> float
    q = _as_momenta(momenta)
    if not len(q):
        return 0.0
    if len(q) == 1:
        return eta_i(q, 0)
    return min(eta_i(q, i) for i in range(len(q) - 1))


def eta_bar_i(momenta, i):
    # type: (Sequence, int) -> float
    q = _as_momenta(momenta)
    return _smallest_shifted_sum(q, i, list(range(len(q))))


def eta_bar(momenta, mu):
    # type: (Sequence, float) -> float
    q = _as_momenta(momenta)
    if not len(q):
        return float(mu)
    return min(eta_bar_i(q, i) for i in range(len(q)))


class Kinematics(object):
    """Cached kinematic quantities of one momentum configuration."""

    def __init__(self, momenta, mu=1.0):
        self.momenta = _as_momenta(momenta)
        self.mu = float(mu)

    def __len__(self):
        return len(self.momenta)

    @property
    def total(self):
        return self.momenta.sum(axis=0) if len(self) else np.zeros(AXES)

    @property
    def is_conserving(self):
        # type: () -> bool
        scale = max(1.0, float(np.max(np.abs(self.momenta)))) if len(self) else 1.0
        return bool(np.allclose(self.total, 0.0, atol=1e-9 * scale))

    @functools.cached_property
    def norm(self):
        # type: () -> float
        return momentum_norm(self.momenta)

    @functools.cached_property
    def eta(self):
        # type: () -> float
        return eta(self.momenta)

    @functools.cached_property
    def eta_bar(self):
        # type: () -> float
        return eta_bar(self.momenta, self.mu)

    @functools.cached_property
    def eta_values(self):
        return [eta_i(self.momenta, i) for i in range(len(self))]

    @functools.cached_property
    def eta_bar_values(self):
        return [eta_bar_i(self.momenta, i) for i in range(len(self))]

    def scaled(self, t):
        # type: (float) -> Kinematics
        return Kinematics(self.momenta * t, self.mu)
