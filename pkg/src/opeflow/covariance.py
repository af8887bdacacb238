# -*- coding=utf-8 -*-
"""The IR-regulated massless covariance and the momentum space gauge covariance.

Position space::

    C(x) = exp(-mu**2 x**2 / 4) / (4 pi**2 x**2)

is a function ``h(t)`` of ``t = x**2`` only, so its derivatives follow from the
derivatives of ``h`` and the multivariate chain rule for ``x -> x**2``.
"""
import contextvars
import functools
import math

from contextlib import contextmanager
from typing import Iterator, List, Optional, Tuple

import numpy as np

from scipy import integrate, special

from .exceptions import DegenerateCutoffError, DerivativeOrderError, SingularPointError
from .misc import _get_logger
from .operators import AXES, MultiIndex

__all__ = [
    "regulator",
    "regulator_lambda_derivative",
    "eval_covariance",
    "eval_covariance_deriv",
    "derivative_order_limit",
    "active_derivative_order_limit",
    "ACTIVE_LIMIT",
    "heat_kernel_covariance",
    "heat_kernel_derivative",
    "heat_kernel_derivative_bound",
    "covariance_derivative_bound",
    "covariance_matrix_momentum",
    "covariance_lambda_derivative",
    "propagator_bound_ratio",
    "DEFAULT_MAX_ORDER",
    "MOMENTUM_COMPONENTS",
    "COMPONENT_DIMENSIONS",
]

logger = _get_logger(__name__)

DEFAULT_MAX_ORDER = 8
FOUR_PI_SQUARED = 4.0 * math.pi ** 2

_ORDER_LIMIT = contextvars.ContextVar("opeflow_derivative_order_limit", default=DEFAULT_MAX_ORDER)
# default of ``max_order``: use the limit of the current context
ACTIVE_LIMIT = object()
MOMENTUM_COMPONENTS = ("A1", "A2", "A3", "A4", "cbar", "c", "B")
COMPONENT_DIMENSIONS = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0])


def _square(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != AXES:
        raise ValueError("expected 4-vectors, got shape {0}".format(x.shape))
    return np.einsum("...a,...a->...", x, x)


def regulator(p, lam):
    """``R^lam(p) = exp(-p**2/lam**2)`` with the limits ``R^0 = 0`` and ``R^inf = 1``."""
    p2 = _square(p)
    if lam == 0:
        return np.zeros_like(p2)
    if math.isinf(lam):
        return np.ones_like(p2)
    return np.exp(-p2 / lam ** 2)


def regulator_lambda_derivative(p, lam):
    """``d/dlam R^lam(p) = 2 p**2 / lam**3 exp(-p**2/lam**2)``."""
    p2 = _square(p)
    if lam == 0 or math.isinf(lam):
        return np.zeros_like(p2)
    return 2.0 * p2 / lam ** 3 * np.exp(-p2 / lam ** 2)


def _check_nonsingular(t):
    if np.any(t == 0):
        raise SingularPointError("covariance evaluated at coinciding points")


def eval_covariance(x, mu):
    """Evaluate ``C(x) = exp(-mu**2 x**2/4)/(4 pi**2 x**2)`` for ``x`` of shape ``(..., 4)``.

    :raises SingularPointError: If any ``x`` vanishes
    """
    t = _square(x)
    _check_nonsingular(t)
    return np.exp(-0.25 * mu ** 2 * t) / (FOUR_PI_SQUARED * t)


@functools.lru_cache(maxsize=None)
def _chain_rule_terms(u):
    # type: (Tuple[int, ...]) -> List[Tuple[float, Tuple[int, ...], int]]
    """Terms ``(weight, powers of 2x_a, order of h)`` of ``d^u h(x**2)``."""
    terms = []
    for k in MultiIndex(u).sub_indices():
        if any(2 * ka > ua for ka, ua in zip(k, u)):
            continue
        weight = 1.0
        for ka, ua in zip(k, u):
            weight *= math.factorial(ua) / (math.factorial(ka) * math.factorial(ua - 2 * ka))
        powers = tuple(ua - 2 * ka for ka, ua in zip(k, u))
        terms.append((weight, powers, sum(u) - sum(k)))
    return terms


def _h_derivative(order, t, a):
    """``d^order/dt^order`` of ``exp(-a t)/(4 pi**2 t)``."""
    total = np.zeros_like(t)
    for j in range(order + 1):
        coefficient = math.comb(order, j) * (-a) ** (order - j) * (-1) ** j * math.factorial(j)
        total = total + coefficient * t ** (-j - 1)
    return total * np.exp(-a * t) / FOUR_PI_SQUARED


@contextmanager
def derivative_order_limit(max_order):
    # type: (Optional[int]) -> Iterator[None]
    """Bound ``|u|`` in :func:`eval_covariance_deriv` for the block; ``None`` lifts the bound."""
    token = _ORDER_LIMIT.set(max_order)
    try:
        yield
    finally:
        _ORDER_LIMIT.reset(token)


def active_derivative_order_limit():
    # type: () -> Optional[int]
    return _ORDER_LIMIT.get()


def eval_covariance_deriv(u, x, mu, max_order=ACTIVE_LIMIT):
    """Exact ``d^u C(x)`` for a multi-index ``u``.

    :param u: Derivative multi-index
    :param x: Points of shape ``(..., 4)``
    :param float mu: IR scale
    :param max_order: Largest accepted ``|u|``; ``None`` disables the check.  By
        default the limit set with :func:`derivative_order_limit` applies.
    :raises SingularPointError: If any ``x`` vanishes
    :raises DerivativeOrderError: If ``|u|`` exceeds the limit
    """
    u = MultiIndex(u)
    if max_order is ACTIVE_LIMIT:
        max_order = _ORDER_LIMIT.get()
    if max_order is not None and u.order > max_order:
        raise DerivativeOrderError(
            "derivative order {0} exceeds the configured maximum {1}".format(u.order, max_order),
            order=u.order,
            limit=max_order,
        )
    x = np.asarray(x, dtype=float)
    t = _square(x)
    _check_nonsingular(t)
    a = 0.25 * mu ** 2
    h_cache = {}
    total = np.zeros_like(t)
    for weight, powers, order in _chain_rule_terms(tuple(u)):
        if order not in h_cache:
            h_cache[order] = _h_derivative(order, t, a)
        total = total + weight * MultiIndex(powers).monomial(2.0 * x) * h_cache[order]
    return total


def heat_kernel_covariance(x, mu):
    # type: (np.ndarray, float) -> float
    """``1/(16 pi**2) int_0^{1/mu**2} t**-2 exp(-x**2/4t) dt`` by adaptive quadrature."""
    x2 = float(_square(x))
    if x2 == 0:
        raise SingularPointError("covariance evaluated at coinciding points")
    upper = mu ** -2

    def integrand(t):
        if t == 0:
            return 0.0
        return t ** -2 * math.exp(-x2 / (4.0 * t))

    points = [x2 / 8.0] if x2 / 8.0 < upper else None
    value, _ = integrate.quad(
        integrand, 0.0, upper, points=points, epsabs=0.0, epsrel=1e-13, limit=500
    )
    return value / (16.0 * math.pi ** 2)


def heat_kernel_derivative(u, x, t):
    """Exact ``d^u exp(-x**2/4t)`` through Hermite polynomials."""
    u = MultiIndex(u)
    x = np.asarray(x, dtype=float)
    scale = math.sqrt(4.0 * t)
    result = np.exp(-_square(x) / (4.0 * t))
    for axis, order in enumerate(u):
        if order:
            result = result * (-1) ** order * scale ** -order * special.eval_hermite(
                order, x[..., axis] / scale
            )
    return result


def heat_kernel_derivative_bound(u, x, t):
    """``2 (2t)**(-|u|/2) sqrt(|u|!) exp(-x**2/8t)``."""
    order = MultiIndex(u).order
    return (
        2.0
        * (2.0 * t) ** (-order / 2.0)
        * math.sqrt(math.factorial(order))
        * np.exp(-_square(x) / (8.0 * t))
    )


def covariance_derivative_bound(order, x, mu, delta=0.5):
    """Right hand side ``(4/x**2)**((|u|+delta)/2+1) Gamma(|u|+delta+1)/(4 pi**2 mu**delta)``."""
    t = _square(x)
    _check_nonsingular(t)
    exponent = (order + delta) / 2.0 + 1.0
    return (4.0 / t) ** exponent * special.gamma(order + delta + 1.0) / (
        FOUR_PI_SQUARED * mu ** delta
    )


def _numerator_matrix(p, xi):
    p = np.asarray(p, dtype=float)
    p2 = float(_square(p))
    matrix = np.zeros((7, 7))
    matrix[:4, :4] = np.eye(4)
    if xi != 1.0:
        if p2 == 0:
            raise SingularPointError("longitudinal projector undefined at p = 0")
        matrix[:4, :4] += (1.0 / xi - 1.0) * np.outer(p, p) / p2
    matrix[4, 5] = -1.0
    matrix[5, 4] = 1.0
    matrix[6, 6] = p2
    return matrix


def _check_cutoffs(lam, lam0, allow_degenerate):
    if lam < 0 or lam > lam0:
        raise DegenerateCutoffError("cutoffs must satisfy 0 <= lam <= lam0", lam=lam, lam0=lam0)
    if lam == lam0 and not allow_degenerate:
        raise DegenerateCutoffError("lam equals lam0", lam=lam, lam0=lam0)


def covariance_matrix_momentum(p, xi, lam, lam0, allow_degenerate=False):
    """The regularised covariance matrix in component order ``A1..A4, cbar, c, B``.

    :param p: Momentum 4-vector
    :param float xi: Gauge parameter
    :param float lam: IR cutoff
    :param float lam0: UV cutoff, may be ``math.inf``
    :param bool allow_degenerate: Return the zero matrix for ``lam == lam0``
        instead of raising
    :rtype: numpy.ndarray
    """
    if xi <= 0:
        raise ValueError("gauge parameter must be positive")
    _check_cutoffs(lam, lam0, allow_degenerate)
    if lam == lam0:
        return np.zeros((7, 7))
    p = np.asarray(p, dtype=float)
    p2 = float(_square(p))
    if p2 == 0:
        if lam == 0:
            raise SingularPointError("covariance at p = 0 needs a positive IR cutoff")
        upper = 0.0 if math.isinf(lam0) else 1.0 / lam0 ** 2
        scalar = 1.0 / lam ** 2 - upper
        matrix = _numerator_matrix(p, xi)
        matrix[6, 6] = 0.0
        return matrix * scalar
    scalar = (float(regulator(p, lam0)) - float(regulator(p, lam))) / p2
    return _numerator_matrix(p, xi) * scalar


def covariance_lambda_derivative(p, xi, lam):
    """``d/dlam`` of the covariance matrix, ``-M(p) (2/lam**3) exp(-p**2/lam**2)``."""
    if lam <= 0:
        raise DegenerateCutoffError("lam must be positive", lam=lam)
    p = np.asarray(p, dtype=float)
    p2 = float(_square(p))
    return -_numerator_matrix(p, xi) * (2.0 / lam ** 3) * math.exp(-p2 / lam ** 2)


def propagator_bound_ratio(p, w, xi, lam, step=1e-4):
    """Ratio of ``|d^w d_lam C_KL(p)|`` to ``sup(|p|,lam)**(-5+[K]+[L]-|w|) exp(-p**2/2lam**2)``.

    Momentum derivatives are taken by central finite differences.  The largest
    entry over all ``K, L`` is returned; its supremum over a sample is the
    constant of the propagator bound.
    """
    w = MultiIndex(w)
    p = np.asarray(p, dtype=float)

    def derivative(point, remaining):
        if remaining.order == 0:
            return covariance_lambda_derivative(point, xi, lam)
        axis = next(i for i, c in enumerate(remaining) if c)
        shift = np.zeros(AXES)
        shift[axis] = step * max(1.0, lam)
        lowered = remaining - MultiIndex.unit(axis)
        return (derivative(point + shift, lowered) - derivative(point - shift, lowered)) / (
            2.0 * shift[axis]
        )

    values = np.abs(derivative(p, w))
    scale = max(math.sqrt(float(_square(p))), lam)
    exponents = -5.0 + COMPONENT_DIMENSIONS[:, None] + COMPONENT_DIMENSIONS[None, :] - w.order
    bound = scale ** exponents * math.exp(-float(_square(p)) / (2.0 * lam ** 2))
    return float(np.max(values / bound))
