# -*- coding=utf-8 -*-
"""The free BRST differential, its matrix and the antibracket matrices.

``s0 O_A = sum_B Q_A^B O_B`` defines the matrix ``Q``; the antibracket of two
composite operators is ``sum_{C,w} B^{C,w}_{AB} O_C(x) d^w delta(x - y)`` and
its integrated form ``Bt^F_{AB} = sum (-1)^|w| B^{C,w}_{AB} delta(O_F, d^w O_C)``.
All matrices are sparse and graded by the order ``(g, hbar)``.
"""
from fractions import Fraction
from typing import Dict, Hashable, Iterator, List, Optional, Tuple, Union

from .exceptions import DimensionViolationError
from .misc import _get_logger, fraction_to_json
from .operators import (
    CompositeOperator,
    Factor,
    FieldKind,
    MultiIndex,
    OperatorBasis,
    OperatorSum,
    canonicalize,
    differentiate_operator,
    multiply,
)
from .theories import Theory

__all__ = [
    "Order",
    "GradedMatrix",
    "QMatrix",
    "BMatrix",
    "ReducedBMatrix",
    "apply_free_brst",
    "free_q_matrix",
    "classical_antibracket",
    "has_antifields",
]

logger = _get_logger(__name__)

Order = Tuple[int, int]
ZERO_ORDER = (0, 0)


def _json_number(value):
    if isinstance(value, Fraction):
        return fraction_to_json(value)
    return float(value)


class GradedMatrix(object):
    """Sparse entries keyed by ``(g, hbar)`` order and an entry key."""

    def __init__(self):
        self._layers = {}  # type: Dict[Order, Dict[Hashable, Union[Fraction, float]]]
        # quadrature error bounds of computed entries
        self.errors = {}  # type: Dict[Hashable, float]

    def _validate(self, key):
        pass

    def _add(self, key, value, order=ZERO_ORDER):
        order = (int(order[0]), int(order[1]))
        self._validate(key)
        if not value:
            return
        layer = self._layers.setdefault(order, {})
        total = layer.get(key, 0) + value
        if total:
            layer[key] = total
        else:
            layer.pop(key, None)
            if not layer:
                del self._layers[order]

    def _get(self, key, order=ZERO_ORDER):
        return self._layers.get(tuple(order), {}).get(key, 0)

    def orders(self):
        # type: () -> List[Order]
        return sorted(self._layers)

    def layer_items(self, order=ZERO_ORDER):
        return list(self._layers.get(tuple(order), {}).items())

    def __iter__(self):
        # type: () -> Iterator[Tuple[Order, Hashable, Union[Fraction, float]]]
        for order in self.orders():
            for key, value in self._layers[order].items():
                yield order, key, value

    def __len__(self):
        return sum(len(layer) for layer in self._layers.values())

    def is_zero(self, atol=0.0):
        # type: (float) -> bool
        return all(abs(value) <= atol for _, _, value in self)

    def max_abs(self):
        # type: () -> float
        return max((abs(float(value)) for _, _, value in self), default=0.0)

    def _empty(self):
        return type(self)()

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        result = self._empty()
        for source in (self, other):
            for order, key, value in source:
                result._add(key, value, order)
        return result

    def scaled(self, factor):
        result = self._empty()
        for order, key, value in self:
            result._add(key, value * factor, order)
        return result

    def below(self, g_order):
        """Only the layers with ``g`` order strictly below *g_order*."""
        result = self._empty()
        for order, key, value in self:
            if order[0] < g_order:
                result._add(key, value, order)
        return result

    def _key_json(self, key):
        return [str(part) for part in key]

    def as_dict(self):
        layers = []
        for order in self.orders():
            entries = sorted(
                ([self._key_json(key), _json_number(value)] for key, value in self._layers[order].items()),
                key=lambda item: item[0],
            )
            layers.append({"order": list(order), "entries": entries})
        return {"kind": type(self).__name__, "layers": layers}


class QMatrix(GradedMatrix):
    """``Q_A^B``, nonzero only for ``[O_B] <= [O_A] + 1``."""

    def _validate(self, key):
        source, target = key
        if target.dimension > source.dimension + 1:
            raise DimensionViolationError(
                "Q entries may raise the dimension by at most one",
                source=source,
                target=target,
            )

    def add(self, source, target, value, order=ZERO_ORDER):
        self._add((source, target), value, order)

    def entry(self, source, target, order=ZERO_ORDER):
        return self._get((source, target), order)

    def row(self, source, order=ZERO_ORDER):
        # type: (CompositeOperator, Order) -> Dict[CompositeOperator, Union[Fraction, float]]
        return {b: v for (a, b), v in self.layer_items(order) if a == source}

    def column(self, target, order=ZERO_ORDER):
        # type: (CompositeOperator, Order) -> Dict[CompositeOperator, Union[Fraction, float]]
        return {a: v for (a, b), v in self.layer_items(order) if b == target}

    def sources(self):
        return sorted({a for _, (a, _), _ in self}, key=lambda op: op.sort_key)

    def compose(self, other):
        # type: (QMatrix) -> QMatrix
        """``(Q Q')_A^B = sum_C Q_A^C Q'_C^B`` with orders added."""
        result = QMatrix()
        by_source = {}
        for order, (c, b), value in other:
            by_source.setdefault(c, []).append((order, b, value))
        for order, (a, c), value in self:
            for other_order, b, other_value in by_source.get(c, ()):
                combined = (order[0] + other_order[0], order[1] + other_order[1])
                result._add((a, b), value * other_value, combined)
        return result


class BMatrix(GradedMatrix):
    """``B^{C,w}_{AB}`` with ``|w| = [O_A] + [O_B] - [O_C] - 3``."""

    def _validate(self, key):
        left, right, op, w = key
        if w.order != left.dimension + right.dimension - op.dimension - 3:
            raise DimensionViolationError(
                "antibracket entry violates |w| = [A] + [B] - [C] - 3",
                left=left,
                right=right,
                operator=op,
                derivative=w,
            )

    def add(self, left, right, op, w, value, order=ZERO_ORDER):
        self._add((left, right, op, MultiIndex(w)), value, order)

    def entry(self, left, right, op, w, order=ZERO_ORDER):
        return self._get((left, right, op, MultiIndex(w)), order)

    def _key_json(self, key):
        left, right, op, w = key
        return [str(left), str(right), str(op), list(w)]

    def reduced(self):
        # type: () -> ReducedBMatrix
        """The integrated form ``Bt^F_{AB} = sum (-1)^|w| B^{C,w}_{AB} delta(O_F, d^w O_C)``."""
        result = ReducedBMatrix()
        for order, (left, right, op, w), value in self:
            sign = -1 if w.order % 2 else 1
            for target, count in differentiate_operator(op, w).items():
                result.add(left, right, target, value * sign * count, order)
        return result


class ReducedBMatrix(GradedMatrix):
    """``Bt^F_{AB}`` with ``[O_F] = [O_A] + [O_B] - 3``."""

    def _validate(self, key):
        left, right, target = key
        if target.dimension != left.dimension + right.dimension - 3:
            raise DimensionViolationError(
                "reduced antibracket entry violates [F] = [A] + [B] - 3",
                left=left,
                right=right,
                target=target,
            )

    def add(self, left, right, target, value, order=ZERO_ORDER):
        self._add((left, right, target), value, order)

    def entry(self, left, right, target, order=ZERO_ORDER):
        return self._get((left, right, target), order)

    def row(self, left, right, order=ZERO_ORDER):
        return {f: v for (a, b, f), v in self.layer_items(order) if a == left and b == right}

    def pairs(self):
        return sorted(
            {(a, b) for _, (a, b, _), _ in self},
            key=lambda pair: (pair[0].sort_key, pair[1].sort_key),
        )


def has_antifields(op):
    # type: (CompositeOperator) -> bool
    return any(f.field.kind is FieldKind.ANTIFIELD for f in op.factors)


def _brst_factor(theory, factor):
    # type: (Theory, Factor) -> Optional[Factor]
    rule = theory.brst_rule(factor.field.name)
    if rule.target is None:
        return None
    target = theory.field(rule.target)
    if rule.index_to_derivative:
        derivative = factor.derivative
        for index in factor.indices:
            derivative = derivative + MultiIndex.unit(index)
        return Factor(target, (), derivative)
    return Factor(target, factor.indices, factor.derivative)


def apply_free_brst(theory, value):
    # type: (Theory, Union[CompositeOperator, OperatorSum]) -> OperatorSum
    """Apply ``s0`` by the graded Leibniz rule.

    ``s0`` acts from the left, so hitting the ``i``-th factor picks up the
    sign of the odd factors in front of it.

    :raises UndeclaredFieldError: If a factor has no declared BRST rule
    """
    if isinstance(value, CompositeOperator):
        value = OperatorSum.from_operator(value)
    result = OperatorSum()
    for op, coefficient in value.items():
        factors = op.factors
        for position, factor in enumerate(factors):
            image = _brst_factor(theory, factor)
            if image is None:
                continue
            sign = (-1) ** sum(f.parity for f in factors[:position])
            product, reorder = canonicalize(
                factors[:position] + (image,) + factors[position + 1:]
            )
            result.add_term(product, coefficient * sign * reorder)
    return result


def free_q_matrix(theory, basis):
    # type: (Theory, OperatorBasis) -> QMatrix
    """``Q_0`` on every basis operator without antifields."""
    q = QMatrix()
    skipped = 0
    for op in basis:
        if has_antifields(op):
            skipped += 1
            continue
        for target, coefficient in apply_free_brst(theory, op).items():
            q.add(op, target, coefficient)
    if skipped:
        logger.debug("free Q matrix skipped %d operators with antifields", skipped)
    return q


def _is_conjugate(field_factor, antifield_factor):
    # type: (Factor, Factor) -> bool
    return (
        antifield_factor.field.antifield_of == field_factor.field.name
        and field_factor.field.kind is not FieldKind.ANTIFIELD
        and field_factor.indices == antifield_factor.indices
    )


def _remove(op, position):
    # type: (CompositeOperator, int) -> CompositeOperator
    return CompositeOperator(op.factors[:position] + op.factors[position + 1:])


def classical_antibracket(theory, left, right):
    # type: (Theory, CompositeOperator, CompositeOperator) -> BMatrix
    """The classical antibracket ``(O_A(x), O_B(y))`` as ``B^{C,w}_{AB}`` entries.

    Right derivatives act on ``O_A`` and left derivatives on ``O_B``; the
    ``y`` dependence is moved to ``x`` with
    ``f(y) d^W delta(x - y) = sum_t binom(W, t) (d^t f)(x) d^(W-t) delta(x - y)``.
    """
    for op in (left, right):
        for factor in op.factors:
            theory.field(factor.field.name)
    result = BMatrix()
    for i, a in enumerate(left.factors):
        for j, b in enumerate(right.factors):
            if _is_conjugate(a, b):
                sign = 1
            elif _is_conjugate(b, a):
                sign = -1
            else:
                continue
            sign *= (-1) ** (a.parity * sum(f.parity for f in left.factors[i + 1:]))
            sign *= (-1) ** (b.parity * sum(f.parity for f in right.factors[:j]))
            sign *= (-1) ** b.derivative.order
            rest_left = _remove(left, i)
            rest_right = _remove(right, j)
            total = a.derivative + b.derivative
            for t in total.sub_indices():
                weight = sign * total.binomial(t)
                for op, coefficient in differentiate_operator(rest_right, t).items():
                    product, reorder = multiply(rest_left, op)
                    if product is None:
                        continue
                    result.add(left, right, product, total - t, weight * coefficient * reorder)
    return result
