# -*- coding=utf-8 -*-
"""Integration over ``R^4`` of integrands that are singular at a few points.

Every insertion point ``x_k`` owns the ball ``|y - x_k| <= rho`` where
``rho`` is half the smallest separation of the points, so the balls are
disjoint.  A smooth bump equal to one on the inner half of each ball and
zero outside of it splits the integrand into one piece per ball and a
remainder which vanishes near every point.  Ball pieces are integrated in
spherical coordinates around their centre on geometrically shrinking
radial panels.  The remainder is integrated around the expansion point
(the last point, normally the origin) with panel breakpoints at the ball
shells, and its tail is mapped onto a finite interval by ``r = R / t``.

Refinement levels raise every node count until two successive levels agree
within the requested tolerance relative to the integral of ``|f|``.
"""
import functools
import math

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import DomainViolationError, SingularPointError
from .misc import _get_logger
from .operators import AXES

__all__ = [
    "LEVELS",
    "DEFAULT_TOL",
    "QuadratureResult",
    "smooth_step",
    "bump",
    "region_radius",
    "region_of",
    "sphere_rule",
    "integrate_regions",
    "integrate_exterior",
]

logger = _get_logger(__name__)

LEVELS = (8, 12, 16, 24)
DEFAULT_TOL = 1e-6
CHUNK = 1 << 16
TINY = 1e-300
# polar angle panels, refined towards the pole that faces a neighbouring point
_POLAR_EDGES = (0.0, math.pi / 16, math.pi / 8, math.pi / 4, math.pi / 2, math.pi)
_TAIL_EDGES = (0.0, 0.25, 0.5, 0.75, 1.0)
_BALL_FRACTIONS = (0.25, 0.5, 0.75, 1.0)
# Gaussian IR decay is below double precision beyond this many 1/mu
_IR_REACH = 12.0


@dataclass
class QuadratureResult:
    """Value and bookkeeping of one region-split integration."""

    value: float
    error: float
    absolute: float
    converged: bool
    level: int
    regions: Dict[int, float] = field(default_factory=dict)
    diagnostics: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def zero(cls):
        return cls(0.0, 0.0, 0.0, True, 0)

    def scaled(self, factor):
        # type: (float) -> QuadratureResult
        return QuadratureResult(
            self.value * factor,
            self.error * abs(factor),
            self.absolute * abs(factor),
            self.converged,
            self.level,
            {k: v * factor for k, v in self.regions.items()},
            dict(self.diagnostics),
        )

    def __add__(self, other):
        regions = dict(self.regions)
        for key, value in other.regions.items():
            regions[key] = regions.get(key, 0.0) + value
        return QuadratureResult(
            self.value + other.value,
            self.error + other.error,
            self.absolute + other.absolute,
            self.converged and other.converged,
            max(self.level, other.level),
            regions,
            dict(self.diagnostics, **other.diagnostics),
        )

    def as_dict(self):
        return {
            "value": self.value,
            "error": self.error,
            "absolute": self.absolute,
            "converged": self.converged,
            "level": self.level,
            "regions": {str(k): v for k, v in sorted(self.regions.items())},
            "diagnostics": {k: v for k, v in sorted(self.diagnostics.items())},
        }


def smooth_step(t):
    """A C-infinity step: ``0`` for ``t <= 0``, ``1`` for ``t >= 1``."""
    t = np.clip(np.asarray(t, dtype=float), 0.0, 1.0)
    inner = np.where(t > 0, t, 1.0)
    outer = np.where(t < 1, 1.0 - t, 1.0)
    rising = np.where(t > 0, np.exp(-1.0 / inner), 0.0)
    falling = np.where(t < 1, np.exp(-1.0 / outer), 0.0)
    return rising / (rising + falling)


def bump(distance, radius):
    """Equal to one for ``distance <= radius/2`` and zero beyond ``radius``."""
    half = 0.5 * radius
    return 1.0 - smooth_step((np.asarray(distance, dtype=float) - half) / half)


def _as_points(points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.ndim != 2 or points.shape[1] != AXES or not len(points):
        raise ValueError("expected a non-empty (s, 4) array of points")
    return points


def region_radius(points, radius=1.0):
    # type: (np.ndarray, float) -> float
    """Half the smallest separation of *points*, or *radius* for a single point.

    :raises SingularPointError: If two points coincide
    """
    points = _as_points(points)
    if len(points) == 1:
        if radius <= 0:
            raise ValueError("the single point radius must be positive")
        return float(radius)
    difference = points[:, None, :] - points[None, :, :]
    distances = np.sqrt(np.einsum("ija,ija->ij", difference, difference))
    closest = distances[np.triu_indices(len(points), 1)].min()
    if closest == 0:
        raise SingularPointError("insertion points must be pairwise distinct")
    return 0.5 * float(closest)


def region_of(y, points, radius=1.0):
    """Index of the region containing *y*: ``k`` for the ball around the ``k``-th
    point (counting from one) and ``0`` for the IR region.

    *y* may be a single 4-vector or an ``(N, 4)`` array.
    """
    points = _as_points(points)
    rho = region_radius(points, radius)
    y = np.asarray(y, dtype=float)
    difference = y[..., None, :] - points
    distances = np.sqrt(np.einsum("...ka,...ka->...k", difference, difference))
    inside = distances <= rho
    index = np.where(inside.any(axis=-1), inside.argmax(axis=-1) + 1, 0)
    if index.ndim == 0:
        return int(index)
    return index


@functools.lru_cache(maxsize=None)
def _gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def _composite(edges, n):
    # type: (Sequence[float], int) -> Tuple[np.ndarray, np.ndarray]
    x, w = _gauss_legendre(n)
    edges = np.asarray(sorted(set(edges)), dtype=float)
    low, high = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (high - low) * x + 0.5 * (high + low)
    weights = 0.5 * (high - low) * w
    return nodes.ravel(), weights.ravel()


@functools.lru_cache(maxsize=None)
def sphere_rule(n):
    # type: (int) -> Tuple[np.ndarray, np.ndarray]
    """Directions and weights on the unit three-sphere.

    Composite Gauss-Legendre in the polar angle, Gauss-Legendre in the
    second angle and the trapezoid rule in the azimuth; the weights carry
    ``sin(chi)**2 sin(theta)`` and add up to ``2 pi**2``.
    """
    chi, w_chi = _composite(_POLAR_EDGES, max(2, n // 2))
    theta, w_theta = _composite((0.0, math.pi), max(2, n // 2))
    phi = 2 * math.pi * np.arange(n) / n
    w_phi = np.full(n, 2 * math.pi / n)
    c, t, p = np.meshgrid(chi, theta, phi, indexing="ij")
    directions = np.stack(
        [
            np.cos(c),
            np.sin(c) * np.cos(t),
            np.sin(c) * np.sin(t) * np.cos(p),
            np.sin(c) * np.sin(t) * np.sin(p),
        ],
        axis=-1,
    ).reshape(-1, AXES)
    weights = (
        (w_chi * np.sin(chi) ** 2)[:, None, None]
        * (w_theta * np.sin(theta))[None, :, None]
        * w_phi[None, None, :]
    ).ravel()
    return directions, weights


def _frame(axis):
    # type: (np.ndarray) -> np.ndarray
    """Orthogonal reflection sending the first unit vector onto *axis*."""
    norm = np.linalg.norm(axis)
    if norm == 0:
        return np.eye(AXES)
    axis = axis / norm
    v = np.eye(AXES)[0] - axis
    if np.allclose(v, 0):
        return np.eye(AXES)
    return np.eye(AXES) - 2.0 * np.outer(v, v) / v.dot(v)


def _ball_radial(rho, n):
    panels = 6 + n
    edges = [0.0] + [rho * 0.5 ** j for j in range(panels, 0, -1)]
    edges += [rho * f for f in _BALL_FRACTIONS]
    r, w = _composite(edges, max(2, n // 2))
    return r, w * r ** 3


def _remainder_radial(distances, rho, reach, n):
    edges = {0.5 * rho}
    for distance in distances:
        for fraction in (0.0,) + _BALL_FRACTIONS:
            for sign in (-1, 1):
                edge = distance + sign * fraction * rho
                if edge > 0.5 * rho:
                    edges.add(edge)
    inner = max(edges)
    outer = inner + reach
    edges.update(np.linspace(inner, outer, 7)[1:].tolist())
    r, w = _composite(sorted(edges), max(2, n // 2))
    t, w_t = _composite(_TAIL_EDGES, max(2, n // 2))
    tail_r = outer / t
    tail_w = w_t * outer / t ** 2
    r = np.concatenate([r, tail_r])
    w = np.concatenate([w, tail_w])
    return r, w * r ** 3


def _accumulate(function, nodes, weights):
    # type: (Callable, np.ndarray, np.ndarray) -> Tuple[float, float]
    value = 0.0
    absolute = 0.0
    for start in range(0, len(nodes), CHUNK):
        stop = start + CHUNK
        samples = np.asarray(function(nodes[start:stop]), dtype=float)
        weighted = samples * weights[start:stop]
        value += float(weighted.sum())
        absolute += float(np.abs(weighted).sum())
    return value, absolute


def _ball_piece(function, centre, rho, n):
    directions, w_dir = sphere_rule(n)
    r, w_r = _ball_radial(rho, n)
    weights = (w_r * bump(r, rho))[:, None] * w_dir[None, :]
    nodes = centre + r[:, None, None] * directions[None, :, :]
    keep = weights.ravel() != 0
    return _accumulate(function, nodes.reshape(-1, AXES)[keep], weights.ravel()[keep])


def _remainder_piece(function, points, rho, reach, n):
    centre = points[-1]
    offsets = points[:-1] - centre
    distances = np.linalg.norm(offsets, axis=1)
    axis = offsets[np.argmax(distances)] if len(offsets) else np.eye(AXES)[0]
    directions, w_dir = sphere_rule(n)
    directions = directions.dot(_frame(axis))
    r, w_r = _remainder_radial(np.concatenate([[0.0], distances]), rho, reach, n)
    nodes = (centre + r[:, None, None] * directions[None, :, :]).reshape(-1, AXES)
    weights = (w_r[:, None] * w_dir[None, :]).ravel()
    covered = np.zeros(len(nodes))
    for point in points:
        covered += bump(np.linalg.norm(nodes - point, axis=1), rho)
    weights = weights * (1.0 - covered)
    keep = weights != 0
    return _accumulate(function, nodes[keep], weights[keep])


def integrate_regions(function, points, tol=DEFAULT_TOL, radius=1.0, mu=1.0, levels=LEVELS):
    # type: (Callable[[np.ndarray], np.ndarray], np.ndarray, float, float, float, Sequence[int]) -> QuadratureResult
    """Integrate *function* over ``R^4`` with singularities at *points*.

    :param function: Vectorised integrand, maps ``(N, 4)`` arrays to ``(N,)``
    :param points: The ``(s, 4)`` insertion points, the last one being the
        expansion point
    :param float tol: Relative tolerance with respect to the integral of ``|f|``
    :param float radius: Ball radius used when there is a single point
    :param float mu: IR scale, sets how far the remainder panels reach
    :param levels: Increasing refinement levels
    :return: A :class:`QuadratureResult`; ``converged`` is false when no two
        successive levels agree
    """
    if tol <= 0:
        raise ValueError("the tolerance must be positive")
    points = _as_points(points)
    rho = region_radius(points, radius)
    reach = _IR_REACH / mu
    history = []  # type: List[Tuple[int, float, float, Dict[int, float]]]
    for level in levels:
        regions = {}
        absolute = 0.0
        for k, centre in enumerate(points):
            regions[k + 1], size = _ball_piece(function, centre, rho, level)
            absolute += size
        regions[0], size = _remainder_piece(function, points, rho, reach, level)
        absolute += size
        total = math.fsum(regions.values())
        logger.debug("level %d: %.12g (|f| %.6g)", level, total, absolute)
        history.append((level, total, absolute, regions))
        if len(history) < 2:
            continue
        error = abs(total - history[-2][1])
        if not math.isfinite(total):
            break
        if error <= tol * max(absolute, TINY):
            return QuadratureResult(total, error, absolute, True, level, regions)
    level, total, absolute, regions = history[-1]
    previous = history[-2][3] if len(history) > 1 else regions
    changes = {k: abs(regions[k] - previous[k]) for k in regions}
    worst = max(changes, key=lambda k: changes[k])
    error = abs(total - history[-2][1]) if len(history) > 1 else math.inf
    logger.warning(
        "quadrature did not converge: worst region %d, last values %r",
        worst,
        [h[1] for h in history[-2:]],
    )
    diagnostics = {
        "worst_region": worst,
        "last_values": [h[1] for h in history[-2:]],
    }
    return QuadratureResult(total, error, absolute, False, level, regions, diagnostics)


def integrate_exterior(function, radius, centre=None, tol=DEFAULT_TOL, levels=LEVELS, points=None):
    # type: (Callable[[np.ndarray], np.ndarray], float, Optional[np.ndarray], float, Sequence[int], Optional[np.ndarray]) -> QuadratureResult
    """Integrate *function* over ``|y - centre| > radius``.

    :raises DomainViolationError: If one of *points* lies outside the ball
    """
    centre = np.zeros(AXES) if centre is None else np.asarray(centre, dtype=float)
    if radius <= 0:
        raise ValueError("the radius must be positive")
    if points is not None:
        reach = np.linalg.norm(_as_points(points) - centre, axis=1).max()
        if reach >= radius:
            raise DomainViolationError(
                "the exterior region must not contain insertion points",
                radius=radius,
                reach=reach,
            )
    history = []
    for level in levels:
        directions, w_dir = sphere_rule(level)
        t, w_t = _composite(_TAIL_EDGES, max(2, level // 2))
        r = radius / t
        w_r = w_t * radius / t ** 2 * r ** 3
        nodes = (centre + r[:, None, None] * directions[None, :, :]).reshape(-1, AXES)
        weights = (w_r[:, None] * w_dir[None, :]).ravel()
        value, absolute = _accumulate(function, nodes, weights)
        history.append((level, value, absolute))
        if len(history) > 1:
            error = abs(value - history[-2][1])
            if error <= tol * max(absolute, TINY):
                return QuadratureResult(value, error, absolute, True, level, {0: value})
    level, value, absolute = history[-1]
    error = abs(value - history[-2][1]) if len(history) > 1 else math.inf
    return QuadratureResult(
        value,
        error,
        absolute,
        False,
        level,
        {0: value},
        {"worst_region": 0, "last_values": [h[1] for h in history[-2:]]},
    )
