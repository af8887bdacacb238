# -*- coding=utf-8 -*-
"""Scaling degrees, associativity and remainders of OPE coefficients."""
import csv
import dataclasses
import io
import math

from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from scipy import stats

from .exceptions import DomainViolationError
from .expressions import SymbolicCoefficient
from .misc import _get_logger
from .operators import (
    AXES,
    CompositeOperator,
    MultiIndex,
    multi_indices,
)
from .theories import Theory, scalar_theory
from .wick import PropagatorEdge, free_ope_coefficient, partial_matchings, target_operators

__all__ = [
    "DEFAULT_GRID",
    "FIT_POINTS",
    "SCALING_MARGIN",
    "ScalingFit",
    "scaling_degree",
    "expected_degree",
    "AssociativityResult",
    "check_associativity",
    "associativity_domain",
    "taylor_operator",
    "PlaneWave",
    "background_value",
    "remainder",
    "write_scaling_csv",
]

logger = _get_logger(__name__)

DEFAULT_GRID = tuple(np.geomspace(1.0, 1e-3, 12).tolist())
FIT_POINTS = 8
MIN_FIT_POINTS = 6
SCALING_MARGIN = 0.05
UNDERFLOW = 1e-300
RESIDUAL_FLOOR = 1e-30

Evaluable = Union[SymbolicCoefficient, Callable[[np.ndarray], float]]


@dataclasses.dataclass
class ScalingFit:
    """Log-log fit of ``|f(tau x)|`` against ``tau``."""

    tau_grid: Tuple[float, ...]
    values: Tuple[float, ...]
    slope: float
    intercept: float
    confidence: Tuple[float, float]
    expected: Optional[float] = None
    margin: float = SCALING_MARGIN
    underflow: bool = False

    @property
    def passed(self):
        # type: () -> bool
        if self.underflow or not math.isfinite(self.slope):
            return False
        if self.expected is None:
            return True
        return self.slope >= self.expected - self.margin

    def rows(self):
        return list(zip(self.tau_grid, self.values))

    def as_dict(self):
        payload = dataclasses.asdict(self)
        payload["tau_grid"] = list(self.tau_grid)
        payload["values"] = list(self.values)
        payload["confidence"] = list(self.confidence)
        payload["passed"] = self.passed
        return payload


def _evaluate(coefficient, points):
    # type: (Evaluable, np.ndarray) -> float
    if isinstance(coefficient, SymbolicCoefficient):
        return float(coefficient.evaluate(list(points)))
    return float(coefficient(points))


def expected_degree(A, B):
    # type: (Sequence[CompositeOperator], CompositeOperator) -> Fraction
    """The scaling bound ``[O_B] - sum_k [O_{A_k}]``."""
    return B.dimension - sum((a.dimension for a in A), Fraction(0))


def scaling_degree(coefficient, points, grid=DEFAULT_GRID, expected=None, fit_points=FIT_POINTS):
    # type: (Evaluable, np.ndarray, Sequence[float], Optional[float], int) -> ScalingFit
    """Fit the slope of ``log |f(tau x)|`` over the smallest ``tau`` of *grid*.

    The points are scaled towards the origin, so the expansion point should
    sit there.

    :param expected: The bound the slope must reach, ``[O_B] - [O_A]``
    :raises ValueError: If the grid is not strictly decreasing in ``(0, 1]``
        or too short for a fit
    """
    grid = tuple(float(t) for t in grid)
    if any(not 0 < t <= 1 for t in grid) or any(b >= a for a, b in zip(grid, grid[1:])):
        raise ValueError("the tau grid must be strictly decreasing in (0, 1]")
    fit_points = min(fit_points, len(grid))
    if fit_points < MIN_FIT_POINTS:
        raise ValueError("a scaling fit needs at least {0} points".format(MIN_FIT_POINTS))
    points = np.atleast_2d(np.asarray(points, dtype=float))
    values = tuple(abs(_evaluate(coefficient, tau * points)) for tau in grid)
    tail_tau = np.asarray(grid[-fit_points:])
    tail = np.asarray(values[-fit_points:])
    underflow = bool(np.any(tail < UNDERFLOW))
    if underflow:
        logger.warning("scaling fit hit the floating point floor")
        tail = np.maximum(tail, UNDERFLOW)
    fit = stats.linregress(np.log(tail_tau), np.log(tail))
    quantile = stats.t.ppf(0.975, fit_points - 2)
    spread = quantile * fit.stderr
    expected = None if expected is None else float(expected)
    return ScalingFit(
        grid,
        values,
        float(fit.slope),
        float(fit.intercept),
        (float(fit.slope - spread), float(fit.slope + spread)),
        expected,
        underflow=underflow,
    )


def write_scaling_csv(fit, stream=None):
    # type: (ScalingFit, Optional[io.TextIOBase]) -> str
    """Write ``tau,value`` rows; returns the text when no stream is given."""
    target = stream if stream is not None else io.StringIO()
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(["tau", "value"])
    for tau, value in fit.rows():
        writer.writerow(["{0:.12e}".format(tau), "{0:.12e}".format(value)])
    if stream is None:
        return target.getvalue()
    return ""


@dataclasses.dataclass
class AssociativityResult:
    lhs: float
    rhs: float
    residual: float
    d_trunc: Fraction
    terms: int

    @property
    def relative(self):
        # type: () -> float
        return self.residual / max(abs(self.lhs), abs(self.rhs), RESIDUAL_FLOOR)

    def as_dict(self):
        payload = dataclasses.asdict(self)
        payload["d_trunc"] = str(self.d_trunc)
        payload["relative"] = self.relative
        return payload


def associativity_domain(points, k=2):
    # type: (np.ndarray, int) -> bool
    """``max_{i<k} |x_i - x_k| < min_{j>k} |x_j - x_k|`` with ``k`` counted from one."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    centre = points[k - 1]
    inner = np.linalg.norm(points[: k - 1] - centre, axis=1)
    outer = np.linalg.norm(points[k:] - centre, axis=1)
    if not len(inner) or not len(outer):
        raise ValueError("the split must leave points on both sides")
    return bool(inner.max() < outer.min())


def check_associativity(A1, A2, A3, B, points, d_trunc, theory=None, mu=1.0):
    # type: (CompositeOperator, CompositeOperator, CompositeOperator, CompositeOperator, np.ndarray, Union[int, Fraction], Optional[Theory], float) -> AssociativityResult
    """Compare ``C^B_{A1 A2 A3}`` with ``sum_C C^C_{A1 A2}(x1, x2) C^B_{C A3}(x2, x3)``.

    The sum runs over every ``O_C`` with ``[O_C] <= d_trunc``.

    :raises DomainViolationError: If ``|x1 - x2| >= |x3 - x2|``
    """
    theory = theory or scalar_theory()
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape != (3, AXES):
        raise ValueError("expected three 4-vectors")
    if not associativity_domain(points, 2):
        raise DomainViolationError(
            "the inner pair must be closer than the third point",
            inner=float(np.linalg.norm(points[0] - points[1])),
            outer=float(np.linalg.norm(points[2] - points[1])),
        )
    x1, x2, x3 = points
    lhs = _evaluate(free_ope_coefficient((A1, A2, A3), B, mu, theory), points)
    rhs = 0.0
    terms = 0
    for C in target_operators((A1, A2), theory, d_trunc):
        inner = free_ope_coefficient((A1, A2), C, mu, theory)
        outer = free_ope_coefficient((C, A3), B, mu, theory)
        if inner.is_zero or outer.is_zero:
            continue
        rhs += _evaluate(inner, [x1, x2]) * _evaluate(outer, [x2, x3])
        terms += 1
    residual = abs(lhs - rhs)
    logger.debug("associativity at d_trunc %s: %d terms, residual %.3e", d_trunc, terms, residual)
    return AssociativityResult(lhs, rhs, residual, Fraction(d_trunc), terms)


def taylor_operator(derivatives, x, y, n):
    # type: (Callable[[MultiIndex, np.ndarray], float], np.ndarray, np.ndarray, int) -> float
    """The degree *n* Taylor term ``sum_{|w| = n} (x - y)^w / w! d^w f(y)``."""
    displacement = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return float(
        sum(
            w.monomial(displacement) / w.factorial() * derivatives(w, np.asarray(y, dtype=float))
            for w in multi_indices(n)
        )
    )


@dataclasses.dataclass(frozen=True)
class PlaneWave:
    """The classical background ``amplitude * exp(k . x)`` with real ``k``."""

    amplitude: float
    wave_vector: Tuple[float, ...]

    def derivative(self, w, x):
        # type: (MultiIndex, np.ndarray) -> float
        k = np.asarray(self.wave_vector, dtype=float)
        return float(self.amplitude * w.monomial(k) * np.exp(k.dot(x)))


def background_value(op, background, x):
    # type: (CompositeOperator, Mapping[str, PlaneWave], np.ndarray) -> float
    """``O[phi_cl](x)`` for a monomial in bosonic fields without indices."""
    value = 1.0
    for factor in op.factors:
        if factor.parity or factor.indices:
            raise ValueError("backgrounds are only defined for bosonic scalars, got {0}".format(factor))
        value *= background[factor.field.name].derivative(factor.derivative, x)
    return value


def _matching_value(edges, sign, n_points, mu, points):
    # type: (Sequence[PropagatorEdge], int, int, float, np.ndarray) -> float
    value = SymbolicCoefficient.one(n_points, mu).scale(sign)
    for edge in edges:
        value = value * edge.value(n_points, mu)
    return _evaluate(value, points)


def remainder(A, D, points, background, theory=None, mu=1.0):
    # type: (Sequence[CompositeOperator], Union[int, Fraction], np.ndarray, Mapping[str, PlaneWave], Optional[Theory], float) -> float
    """``G(A) - sum_{[O_C] < D} C^C_A(x) O_C[phi_cl](x_s)`` in the free theory.

    ``G`` is the product of the operators by Wick's theorem, with every
    uncontracted field replaced by the background.
    """
    theory = theory or scalar_theory()
    operators = tuple(A)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n_points = len(operators)
    total = 0.0
    for sign, edges, unmatched in partial_matchings(operators, theory):
        contracted = _matching_value(edges, sign, n_points, mu, points)
        if not contracted:
            continue
        for slot in unmatched:
            factor = slot.factor
            if factor.parity or factor.indices:
                raise ValueError("backgrounds are only defined for bosonic scalars")
            contracted *= background[factor.field.name].derivative(
                factor.derivative, points[slot.vertex]
            )
        total += contracted
    subtracted = 0.0
    D = Fraction(D)
    for C in target_operators(operators, theory, D):
        if C.dimension >= D:
            continue
        coefficient = free_ope_coefficient(operators, C, mu, theory)
        if coefficient.is_zero:
            continue
        subtracted += _evaluate(coefficient, points) * background_value(C, background, points[-1])
    return total - subtracted
