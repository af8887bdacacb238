# -*- coding=utf-8 -*-
"""Position space factors controlling the decay of the bounds in the insertion points.

All functions take the points ``x_1 ... x_s`` as an ``(s, 4)`` array; the
last point is the expansion point and every point is measured from it.
"""
import numpy as np

from .exceptions import DomainViolationError, SingularPointError
from .misc import _get_logger
from .operators import AXES

__all__ = ["separations", "xi_one", "xi_two", "xi", "varxi_one", "varxi"]

logger = _get_logger(__name__)


def _points(points):
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[1] != AXES or len(x) < 2:
        raise ValueError("expected at least two points as an (s, 4) array")
    return x - x[-1]


def _check_scales(mu, lam1, rho):
    if not 0 < lam1 <= mu:
        raise DomainViolationError("the factors need 0 < lam1 <= mu", lam1=lam1, mu=mu)
    if rho < 0:
        raise DomainViolationError("rho must be non-negative", rho=rho)


def separations(points):
    """``(sup_i |x_i - x_s|, inf_{k<k'} |x_k - x_k'|)``.

    :raises SingularPointError: If two points coincide
    """
    x = _points(points)
    outer = float(np.max(np.linalg.norm(x, axis=1)))
    i, j = np.triu_indices(len(x), k=1)
    inner = float(np.min(np.linalg.norm(x[i] - x[j], axis=1)))
    if inner == 0:
        raise SingularPointError("coincident points in the position factor")
    return outer, inner


def xi_one(points, mu, lam1, p, p_prime, rho=0.0):
    """``(sup/inf)**p (mu inf)**(-p'-rho) (mu/lam1)**(p'+rho)``."""
    _check_scales(mu, lam1, rho)
    outer, inner = separations(points)
    return (
        (outer / inner) ** p
        * (mu * inner) ** (-p_prime - rho)
        * (mu / lam1) ** (p_prime + rho)
    )


def xi_two(points, mu, p):
    outer, _ = separations(points)
    return max(1.0, mu * outer) ** p


def xi(points, lam, lam1, mu, p, p_prime, rho=0.0):
    """The position factor at cutoff ``lam``.

    Above ``lam1`` only the first factor enters; below it the larger of both.
    """
    first = xi_one(points, mu, lam1, p, p_prime, rho)
    if lam >= lam1:
        return first
    return max(first, xi_two(points, mu, p))


def varxi_one(points, split, mu, lam1, p, rho=0.0):
    """``(mu/lam1)**(p+rho) sup_{k <= split < k'} (mu |x_k - x_k'|)**(-p-rho)``.

    ``split`` counts the points of the first group, ``1 <= split < s``.
    """
    _check_scales(mu, lam1, rho)
    x = _points(points)
    if not 1 <= split < len(x):
        raise ValueError("split must leave both groups non-empty")
    gaps = np.linalg.norm(x[:split, None, :] - x[None, split:, :], axis=-1)
    closest = float(np.min(gaps))
    if closest == 0:
        raise SingularPointError("coincident points in the position factor")
    return (mu / lam1) ** (p + rho) * (mu * closest) ** (-p - rho)


def varxi(points, split, lam, lam1, mu, p, rho=0.0):
    first = varxi_one(points, split, mu, lam1, p, rho)
    if lam >= lam1:
        return first
    return max(1.0, first)
