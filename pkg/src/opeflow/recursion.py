# -*- coding=utf-8 -*-
"""Recursion in the coupling constant for OPE coefficients and the BRST matrices.

The derivative of a coefficient with respect to ``g`` is an integral over
the position ``y`` of the interaction operator::

    d_g C^B_A(x) = int sum_E I^E [ - C^B_{E A}(y, x)
                                   + sum_{[C] < [B]} C^C_A(x) C^B_{E C}(y, x_s)
                                   + sum_k sum_{[C] <= [A_k]} C^C_{E A_k}(y, x_k) C^B_{..C..}(x) ] dy

with every coefficient on the right taken at lower order.  The subtractions
make the integrand integrable at every ``x_k`` and at infinity.  At the
lowest order all coefficients are free ones, so the integrand is a finite
sum of products of covariances in ``y`` times numbers computed once.

The hbar on the left of the recursion is absorbed into the loop counting:
an integral over inputs of order ``(n, l)`` contributes to order
``(n + 1, l)``; the explicit contact term of the Slavnov-Taylor recursion
contributes to ``(n + 1, l + 1)``.
"""
import threading
import warnings

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .brst import (
    QMatrix,
    ReducedBMatrix,
    apply_free_brst,
    has_antifields,
)
from .exceptions import ClosureWarning, DimensionViolationError, MissingCoefficientError
from .expressions import SymbolicCoefficient
from .misc import _get_logger, fraction_to_json
from .operators import (
    AXES,
    CompositeOperator,
    OperatorBasis,
    OperatorSum,
    is_total_derivative,
)
from .quadrature import (
    DEFAULT_TOL,
    LEVELS,
    QuadratureResult,
    integrate_exterior,
    integrate_regions,
    region_of,
)
from .theories import InteractionTerm, Theory, scalar_theory
from .wick import DEFAULT_GRAPH_LIMIT, free_ope_coefficient, target_operators

__all__ = [
    "InteractionOperator",
    "build_interaction_operator",
    "check_closure",
    "FreeCoefficients",
    "RecursionIntegrand",
    "recursion_integrand",
    "FirstOrderResult",
    "integrate_first_order",
    "ir_tail",
    "region_of",
    "QuadratureFunction",
    "PerturbativeCoefficient",
    "first_order_coefficient",
    "stq_recursion_step",
    "bvq_recursion_step",
]

logger = _get_logger(__name__)

Order = Tuple[int, int]
MAX_INTERACTION_DIMENSION = 4


class InteractionOperator(object):
    """``O_I = sum_E I^E O_E`` as a power series in ``g``.

    Only operators with ``1 <= [O_E] <= 4`` may appear.
    """

    def __init__(self, layers=None):
        # type: (Optional[Mapping[int, OperatorSum]]) -> None
        self._layers = {}  # type: Dict[int, OperatorSum]
        for order, value in (layers or {}).items():
            self.add(order, value)

    @classmethod
    def from_operator_sum(cls, value, order=0):
        # type: (Union[CompositeOperator, OperatorSum], int) -> InteractionOperator
        if isinstance(value, CompositeOperator):
            value = OperatorSum.from_operator(value)
        return cls({order: value})

    def add(self, order, value):
        # type: (int, OperatorSum) -> None
        for op, _ in value.items():
            if not 1 <= op.dimension <= MAX_INTERACTION_DIMENSION:
                raise DimensionViolationError(
                    "interaction operators must have dimension between 1 and 4",
                    operator=op,
                    dimension=op.dimension,
                )
            if op.parity:
                raise ValueError("interaction operator {0} is Grassmann odd".format(op))
        total = self._layers.get(order, OperatorSum()) + value
        if total.is_zero:
            self._layers.pop(order, None)
        else:
            self._layers[order] = total

    def at(self, order=0):
        # type: (int) -> OperatorSum
        return self._layers.get(order, OperatorSum())

    def items(self, order=0):
        # type: (int) -> List[Tuple[CompositeOperator, Fraction]]
        return self.at(order).items()

    def orders(self):
        # type: () -> List[int]
        return sorted(self._layers)

    @property
    def is_zero(self):
        # type: () -> bool
        return not self._layers

    def __add__(self, other):
        result = InteractionOperator(self._layers)
        for order in other.orders():
            result.add(order, other.at(order))
        return result

    def as_dict(self):
        return {
            str(order): [[str(op), fraction_to_json(c)] for op, c in self.at(order).items()]
            for order in self.orders()
        }

    def __repr__(self):
        return "InteractionOperator({0})".format(
            ", ".join("g^{0}: {1}".format(k, self.at(k)) for k in self.orders())
        )


def check_closure(theory, interaction, order=0):
    # type: (Theory, InteractionOperator, int) -> bool
    """Whether ``s0 O_I`` is a total derivative at the given ``g`` order.

    Antifield terms are left out.  Emits :class:`ClosureWarning` when the
    condition fails; the failure is not fatal since higher orders may correct it.
    """
    if not theory.has_brst:
        return True
    value = OperatorSum(
        (op, c) for op, c in interaction.items(order) if not has_antifields(op)
    )
    image = apply_free_brst(theory, value)
    closed = image.is_zero or is_total_derivative(image)
    if not closed:
        message = "s0 of the interaction operator is not a total derivative: {0}".format(image)
        logger.warning(message)
        warnings.warn(message, ClosureWarning, stacklevel=2)
    return closed


def build_interaction_operator(lagrangian, theory=None):
    # type: (Union[Theory, Sequence[InteractionTerm]], Optional[Theory]) -> InteractionOperator
    """``O_I = d_g L`` order by order, without field independent terms.

    :param lagrangian: A theory, whose Lagrangian is used, or its terms
    :param theory: Used for the closure check when *lagrangian* is a list
    :raises DimensionViolationError: If a term has dimension above four
    """
    if isinstance(lagrangian, Theory):
        theory, lagrangian = lagrangian, lagrangian.lagrangian
    result = InteractionOperator()
    for term in lagrangian:
        for op, _ in term.operator.items():
            if op.dimension > MAX_INTERACTION_DIMENSION:
                raise DimensionViolationError(
                    "Lagrangian term {0} has dimension above 4".format(op),
                    operator=op,
                    dimension=op.dimension,
                )
        if term.g_power < 1:
            continue
        weight = term.coefficient * term.g_power
        derivative = OperatorSum(
            (op, c * weight) for op, c in term.operator.items() if not op.is_unit
        )
        if derivative.is_zero:
            logger.debug("dropping field independent term %s", term)
            continue
        result.add(term.g_power - 1, derivative)
    if theory is not None:
        for order in result.orders():
            check_closure(theory, result, order)
    return result


class FreeCoefficients(object):
    """Coefficient source of the free theory: only the layer ``(0, 0)`` exists."""

    def __init__(self, theory=None, mu=1.0, graph_limit=DEFAULT_GRAPH_LIMIT):
        self.theory = theory or scalar_theory()
        self.mu = float(mu)
        self.graph_limit = graph_limit

    def symbolic(self, A, B, order=(0, 0)):
        # type: (Sequence[CompositeOperator], CompositeOperator, Order) -> SymbolicCoefficient
        if tuple(order) != (0, 0):
            raise MissingCoefficientError(
                "no layer {0} for C^{1}_{2}".format(tuple(order), B, ", ".join(map(str, A))),
                order=order,
            )
        return free_ope_coefficient(tuple(A), B, self.mu, self.theory, self.graph_limit)

    def value(self, A, B, points, order=(0, 0)):
        # type: (Sequence[CompositeOperator], CompositeOperator, np.ndarray, Order) -> float
        coefficient = self.symbolic(A, B, order)
        if coefficient.is_zero:
            return 0.0
        return float(coefficient.evaluate(list(points)))

    def targets(self, A, d_max):
        return target_operators(tuple(A), self.theory, d_max)


@dataclass(frozen=True)
class _Piece:
    coefficient: SymbolicCoefficient
    anchors: Tuple[np.ndarray, ...]
    weight: float
    shell: Optional[Fraction] = None

    def __call__(self, y):
        return self.weight * self.coefficient.evaluate([y] + list(self.anchors))


def _piece_sum(pieces, y):
    total = np.zeros(np.shape(y)[:-1])
    for piece in pieces:
        total = total + piece(y)
    return total


def _shift_points(points):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[-1] != AXES:
        raise ValueError("points must be 4-vectors")
    return points - points[-1]


class RecursionIntegrand(object):
    """The integrand of the first order recursion for ``C^B_{A_1...A_s}``.

    Points are shifted so that the expansion point ``x_s`` is the origin.

    :param order: Order of the input coefficient layers
    :param d_max: Optional cutoff on the dimension of the intermediate
        operators ``C``; pieces above it are dropped and the top kept shell is
        remembered for the truncation estimate
    """

    def __init__(
        self,
        A,
        B,
        interaction,
        points,
        theory=None,
        mu=1.0,
        order=(0, 0),
        d_max=None,
        source=None,
    ):
        self.A = tuple(A)
        self.B = B
        self.interaction = interaction
        self.points = _shift_points(points)
        if len(self.points) != len(self.A):
            raise ValueError("expected one point per operator")
        self.source = source or FreeCoefficients(theory, mu)
        self.mu = self.source.mu
        self.order = tuple(order)
        self.d_max = d_max
        self.truncated = False
        self.pieces = []  # type: List[_Piece]
        self._build()

    def _keep(self, op):
        if self.d_max is None or op.dimension <= self.d_max:
            return True
        self.truncated = True
        return False

    def _build(self):
        source, points, A, B = self.source, self.points, self.A, self.B
        terms = self.interaction.items(0)
        if not terms:
            return
        anchors = tuple(points)
        origin = (points[-1],)
        for E, weight in terms:
            full = source.symbolic((E,) + A, B, self.order)
            if not full.is_zero:
                self.pieces.append(_Piece(full, anchors, -float(weight)))
        for C in source.targets(A, B.dimension):
            if C.dimension >= B.dimension or not self._keep(C):
                continue
            constant = source.value(A, C, points, self.order)
            if not constant:
                continue
            for E, weight in terms:
                coefficient = source.symbolic((E, C), B, self.order)
                if not coefficient.is_zero:
                    self.pieces.append(
                        _Piece(coefficient, origin, float(weight) * constant, C.dimension)
                    )
        for k, A_k in enumerate(A):
            candidates = set()
            for E, _ in terms:
                candidates.update(source.targets((E, A_k), A_k.dimension))
            for C in sorted(candidates, key=lambda op: op.sort_key):
                if C.dimension > A_k.dimension or not self._keep(C):
                    continue
                replaced = A[:k] + (C,) + A[k + 1:]
                constant = source.value(replaced, B, points, self.order)
                if not constant:
                    continue
                for E, weight in terms:
                    coefficient = source.symbolic((E, A_k), C, self.order)
                    if not coefficient.is_zero:
                        self.pieces.append(
                            _Piece(
                                coefficient,
                                (points[k],),
                                float(weight) * constant,
                                C.dimension,
                            )
                        )
        logger.debug(
            "integrand for C^%s_%s: %d pieces", B, ", ".join(map(str, A)), len(self.pieces)
        )

    @property
    def is_zero(self):
        # type: () -> bool
        return not self.pieces

    def top_shell(self):
        # type: () -> List[_Piece]
        shells = [p.shell for p in self.pieces if p.shell is not None]
        if not shells:
            return []
        top = max(shells)
        return [p for p in self.pieces if p.shell == top]

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        values = _piece_sum(self.pieces, y)
        if np.ndim(values) == 0:
            return float(values)
        return values


def recursion_integrand(A, B, interaction, y, points, theory=None, mu=1.0, order=(0, 0)):
    # type: (Sequence[CompositeOperator], CompositeOperator, InteractionOperator, np.ndarray, np.ndarray, Optional[Theory], float, Order) -> float
    """Evaluate the recursion integrand at *y*.

    *y* is given in the frame of *points*, before the shift of ``x_s`` to
    the origin.

    :raises SingularPointError: If *y* coincides with an insertion point
    :raises MissingCoefficientError: If the input layer *order* is not available
    """
    integrand = RecursionIntegrand(A, B, interaction, points, theory, mu, order)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    return integrand(np.asarray(y, dtype=float) - points[-1])


@dataclass
class FirstOrderResult:
    """The increment ``C^{(n+1, l)}`` at one point configuration."""

    A: Tuple[CompositeOperator, ...]
    B: CompositeOperator
    order: Order
    points: np.ndarray
    quadrature: QuadratureResult
    truncation_estimate: float = 0.0

    @property
    def value(self):
        # type: () -> float
        return self.quadrature.value

    @property
    def error(self):
        # type: () -> float
        return self.quadrature.error

    @property
    def absolute(self):
        # type: () -> float
        return self.quadrature.absolute

    @property
    def converged(self):
        # type: () -> bool
        return self.quadrature.converged

    def __iter__(self):
        return iter((self.value, self.error))

    def as_dict(self):
        return {
            "A": [str(op) for op in self.A],
            "B": str(self.B),
            "order": list(self.order),
            "points": np.asarray(self.points).tolist(),
            "value": self.value,
            "quad_error": self.error,
            "truncation_estimate": self.truncation_estimate,
            "converged": self.converged,
            "diagnostics": self.quadrature.diagnostics,
        }


def integrate_first_order(
    A,
    B,
    interaction,
    points,
    tol=DEFAULT_TOL,
    theory=None,
    mu=1.0,
    order=(0, 0),
    d_max=None,
    levels=LEVELS,
    source=None,
):
    """Integrate the recursion integrand over ``y``.

    :param float tol: Relative tolerance of the region quadrature
    :return: A :class:`FirstOrderResult` which unpacks as ``(value, error)``
    """
    if tol <= 0:
        raise ValueError("the tolerance must be positive")
    integrand = RecursionIntegrand(
        A, B, interaction, points, theory, mu, order, d_max=d_max, source=source
    )
    n, l = integrand.order
    output = (n + 1, l)
    if integrand.is_zero:
        return FirstOrderResult(integrand.A, B, output, integrand.points, QuadratureResult.zero())
    radius = 1.0 / integrand.mu
    result = integrate_regions(
        integrand, integrand.points, tol=tol, radius=radius, mu=integrand.mu, levels=levels
    )
    truncation = 0.0
    if integrand.truncated:
        top = integrand.top_shell()
        if top:
            estimate = integrate_regions(
                lambda y: _piece_sum(top, y),
                integrand.points,
                tol=tol,
                radius=radius,
                mu=integrand.mu,
                levels=levels,
            )
            truncation = abs(estimate.value) / (n + 1)
    return FirstOrderResult(
        integrand.A, B, output, integrand.points, result.scaled(1.0 / (n + 1)), truncation
    )


def ir_tail(A, B, interaction, points, radius, theory=None, mu=1.0, tol=DEFAULT_TOL, levels=LEVELS):
    # type: (...) -> QuadratureResult
    """The contribution of ``|y| > radius`` to the first order integral.

    :raises DomainViolationError: If an insertion point lies outside the ball
    """
    integrand = RecursionIntegrand(A, B, interaction, points, theory, mu)
    if integrand.is_zero:
        return QuadratureResult.zero()
    return integrate_exterior(
        integrand, radius, tol=tol, levels=levels, points=integrand.points
    )


def _points_key(points):
    return tuple(np.round(np.asarray(points, dtype=float), 12).ravel().tolist())


class QuadratureFunction(object):
    """A coefficient layer defined by an integral, cached per point configuration."""

    def __init__(self, integrate):
        # type: (Callable[[np.ndarray], Union[FirstOrderResult, QuadratureResult]]) -> None
        self._integrate = integrate
        self._samples = {}  # type: Dict[tuple, Union[FirstOrderResult, QuadratureResult]]
        self._lock = threading.RLock()

    def result(self, points):
        key = _points_key(points)
        with self._lock:
            found = self._samples.get(key)
            if found is None:
                found = self._integrate(np.asarray(points, dtype=float))
                self._samples[key] = found
        return found

    def __call__(self, points):
        # type: (np.ndarray) -> float
        return self.result(points).value

    def error(self, points):
        # type: (np.ndarray) -> float
        return self.result(points).error

    @property
    def samples(self):
        with self._lock:
            return dict(self._samples)


class PerturbativeCoefficient(object):
    """``C^B_{A_1...A_s}`` as layers keyed by ``(g order, hbar order)``."""

    def __init__(self, A, B, mu=1.0, layers=None):
        self.A = tuple(A)
        self.B = B
        self.mu = float(mu)
        self._layers = {}  # type: Dict[Order, Union[SymbolicCoefficient, QuadratureFunction]]
        self._lock = threading.RLock()
        for order, layer in (layers or {}).items():
            self.set_layer(order, layer)

    def set_layer(self, order, layer):
        order = (int(order[0]), int(order[1]))
        with self._lock:
            self._layers[order] = layer

    def layer(self, order):
        # type: (Order) -> Union[SymbolicCoefficient, QuadratureFunction]
        with self._lock:
            try:
                return self._layers[tuple(order)]
            except KeyError:
                raise MissingCoefficientError(
                    "layer {0} of C^{1}_{2} is not available".format(
                        tuple(order), self.B, ", ".join(map(str, self.A))
                    ),
                    order=order,
                )

    def orders(self):
        # type: () -> List[Order]
        with self._lock:
            return sorted(self._layers)

    def evaluate_layer(self, order, points):
        # type: (Order, np.ndarray) -> float
        layer = self.layer(order)
        if isinstance(layer, SymbolicCoefficient):
            return float(layer.evaluate(list(np.atleast_2d(points))))
        return layer(points)

    def error(self, points):
        # type: (np.ndarray) -> float
        """Sum of the quadrature error bounds of all integral layers."""
        total = 0.0
        for order in self.orders():
            layer = self.layer(order)
            if isinstance(layer, QuadratureFunction):
                total += layer.error(points)
        return total

    def __call__(self, points, g=0.0, hbar=1.0):
        # type: (np.ndarray, float, float) -> float
        total = 0.0
        for n, l in self.orders():
            factor = g ** n * hbar ** l
            if factor:
                total += factor * self.evaluate_layer((n, l), points)
        return total


def first_order_coefficient(A, B, interaction, theory=None, mu=1.0, tol=DEFAULT_TOL, levels=LEVELS):
    # type: (...) -> PerturbativeCoefficient
    """A coefficient carrying its free layer and the first order integral layer."""
    source = FreeCoefficients(theory, mu)
    free = source.symbolic(A, B)

    def integrate(points):
        return integrate_first_order(
            A, B, interaction, points, tol=tol, mu=mu, levels=levels, source=source
        )

    return PerturbativeCoefficient(
        A, B, mu, layers={(0, 0): free, (1, 0): QuadratureFunction(integrate)}
    )


_ORIGIN = np.zeros((1, AXES))


def _two_point_pieces(source, terms, entries, order):
    """Pieces ``weight * I^E * C^target_{E, op}(y, 0)`` for ``(op, target, weight)`` entries."""
    pieces = []
    for op, target, weight in entries:
        for E, coupling in terms:
            coefficient = source.symbolic((E, op), target, order)
            if not coefficient.is_zero:
                pieces.append(_Piece(coefficient, (_ORIGIN[0],), float(coupling) * float(weight)))
    return pieces


def _integrate_pieces(pieces, mu, tol, levels):
    if not pieces:
        return QuadratureResult.zero()
    return integrate_regions(
        lambda y: _piece_sum(pieces, y), _ORIGIN, tol=tol, radius=1.0 / mu, mu=mu, levels=levels
    )


def _target_union(source, terms, op, dimension):
    found = set()
    for E, _ in terms:
        found.update(source.targets((E, op), dimension))
    return sorted(found, key=lambda target: target.sort_key)


def stq_recursion_step(
    Q,
    interaction,
    basis,
    theory,
    reduced=None,
    mu=1.0,
    tol=DEFAULT_TOL,
    levels=LEVELS,
    order=(0, 0),
    sources=None,
):
    # type: (QMatrix, InteractionOperator, OperatorBasis, Theory, Optional[ReducedBMatrix], float, float, Sequence[int], Order, Optional[Sequence[CompositeOperator]]) -> QMatrix
    """The increment of ``Q`` from one step of its recursion in ``g``::

        d_g Q_A^B = int sum_E I^E [ sum_{[C] <= [A]} C^C_{E A}(y, 0) Q_C^B
                                    - sum_{[B] <= [C] <= [A] + 1} Q_A^C C^B_{E C}(y, 0) ] dy
                    + hbar sum_E I^E Bt^B_{E A}

    :param Q: The matrix whose layer *order* enters the right hand side
    :param basis: Supplies the default rows
    :param reduced: The integrated antibracket; ``None`` drops the contact term
    :param sources: Rows ``A`` to compute, all antifield free basis operators by default
    :return: A :class:`QMatrix` holding the increment; per entry quadrature
        errors are kept in its ``errors`` mapping
    """
    source = FreeCoefficients(theory, mu)
    n, l = order
    increment = QMatrix()
    terms = interaction.items(0)
    if not terms:
        return increment
    if sources is None:
        sources = [op for op in basis if not has_antifields(op)]
    rows = {}  # type: Dict[CompositeOperator, Dict[CompositeOperator, float]]
    for (a, b), value in Q.layer_items(order):
        rows.setdefault(a, {})[b] = value
    for A in sources:
        grouped = {}  # type: Dict[CompositeOperator, list]
        for C in _target_union(source, terms, A, A.dimension):
            for B, value in rows.get(C, {}).items():
                if B.dimension <= A.dimension + 1:
                    grouped.setdefault(B, []).append((A, C, value))
        for C, value in rows.get(A, {}).items():
            for B in _target_union(source, terms, C, C.dimension):
                grouped.setdefault(B, []).append((C, B, -value))
        for B in sorted(grouped, key=lambda op: op.sort_key):
            pieces = _two_point_pieces(source, terms, grouped[B], order)
            if not pieces:
                continue
            result = _integrate_pieces(pieces, mu, tol, levels)
            if not result.converged:
                logger.warning("Q increment %s -> %s did not converge", A, B)
            increment.add(A, B, result.value / (n + 1), (n + 1, l))
            increment.errors[(A, B)] = result.error / (n + 1)
        if reduced is not None:
            for E, coupling in terms:
                for F, value in reduced.row(E, A, order).items():
                    increment.add(A, F, float(coupling) * value / (n + 1), (n + 1, l + 1))
    return increment


def bvq_recursion_step(
    reduced,
    interaction,
    theory,
    mu=1.0,
    tol=DEFAULT_TOL,
    levels=LEVELS,
    order=(0, 0),
    pairs=None,
):
    # type: (ReducedBMatrix, InteractionOperator, Theory, float, float, Sequence[int], Order, Optional[Sequence[Tuple[CompositeOperator, CompositeOperator]]]) -> ReducedBMatrix
    """The increment of the integrated antibracket from its recursion in ``g``::

        d_g Bt^B_{A1 A2} = int sum_E I^E [ sum_{[C] <= [A1]} Bt^B_{C A2} C^C_{E A1}(y, 0)
                                           + sum_{[C] <= [A2]} Bt^B_{A1 C} C^C_{E A2}(y, 0)
                                           - sum_{[C] = [A1] + [A2] - 3} Bt^C_{A1 A2} C^B_{E C}(y, 0) ] dy

    Every term is linear in ``Bt``, so a vanishing input gives a vanishing
    increment.

    :param pairs: The ``(A1, A2)`` entries to compute, by default the pairs
        present in *reduced*
    """
    source = FreeCoefficients(theory, mu)
    n, l = order
    increment = ReducedBMatrix()
    terms = interaction.items(0)
    if not terms or reduced.is_zero():
        return increment
    rows = {}  # type: Dict[Tuple[CompositeOperator, CompositeOperator], Dict[CompositeOperator, float]]
    for (a, b, f), value in reduced.layer_items(order):
        rows.setdefault((a, b), {})[f] = value
    if pairs is None:
        pairs = reduced.pairs()
    for A1, A2 in pairs:
        dimension = A1.dimension + A2.dimension - 3
        grouped = {}  # type: Dict[CompositeOperator, list]
        for C in _target_union(source, terms, A1, A1.dimension):
            for B, value in rows.get((C, A2), {}).items():
                if B.dimension == dimension:
                    grouped.setdefault(B, []).append((A1, C, value))
        for C in _target_union(source, terms, A2, A2.dimension):
            for B, value in rows.get((A1, C), {}).items():
                if B.dimension == dimension:
                    grouped.setdefault(B, []).append((A2, C, value))
        for C, value in rows.get((A1, A2), {}).items():
            for B in _target_union(source, terms, C, dimension):
                if B.dimension == dimension:
                    grouped.setdefault(B, []).append((C, B, -value))
        for B in sorted(grouped, key=lambda op: op.sort_key):
            pieces = _two_point_pieces(source, terms, grouped[B], order)
            if not pieces:
                continue
            result = _integrate_pieces(pieces, mu, tol, levels)
            increment.add(A1, A2, B, result.value / (n + 1), (n + 1, l))
            increment.errors[(A1, A2, B)] = result.error / (n + 1)
    return increment
