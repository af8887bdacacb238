# -*- coding=utf-8 -*-
"""Gauge invariance of OPE coefficients.

For operators ``A_1 ... A_s``, a target ``B`` and a dimension cutoff ``D``
the functional ::

    K^B_{A;D}(x) = sum_k sum_C (-1)^(e_1 + ... + e_{k-1}) Q_{A_k}^C C^B_{A_1..C..A_s}(x)
                   - sum_{[C] < D} Q_C^B C^C_{A_1...A_s}(x)
                   - hbar sum_{k<l} sum_{E,w} sigma_kl C^B_{..E..}(x) B^{E,w}_{A_k A_l} d^w_{x_k} delta(x_k - x_l)

vanishes identically in the free theory.  The first two lines are kept as a
:class:`~opeflow.expressions.SymbolicCoefficient`, so that ``K == 0`` is an
exact statement; the contact line is kept apart and can only be paired with
a test function.  ``sigma_kl`` is the Koszul sign of moving ``A_l`` next to
``A_k`` and the pair to the front.
"""
import itertools

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .brst import BMatrix, QMatrix, apply_free_brst, free_q_matrix
from .exceptions import DomainViolationError
from .expressions import SymbolicCoefficient
from .misc import _get_logger, as_fraction, fraction_to_json
from .operators import (
    AXES,
    CompositeOperator,
    MultiIndex,
    OperatorSum,
    enumerate_basis,
)
from .recursion import FreeCoefficients
from .theories import Theory

__all__ = [
    "apply_free_brst",
    "ContactTerm",
    "WardFunctional",
    "ward_expression",
    "evaluate_K",
    "smeared_K",
    "koszul_sign",
]

logger = _get_logger(__name__)

Operand = Union[CompositeOperator, OperatorSum]


def _as_sum(value):
    # type: (Operand) -> OperatorSum
    if isinstance(value, CompositeOperator):
        return OperatorSum.from_operator(value)
    return value


def koszul_sign(operators, k):
    # type: (Sequence[Operand], int) -> int
    """``(-1)`` to the total parity of the operators in front of position *k*."""
    parity = sum(_as_sum(op).parity for op in operators[:k])
    return -1 if parity % 2 else 1


@dataclass(frozen=True)
class ContactTerm:
    """One summand ``sign * value * C^B_{..E..}(x without x_l) d^w_{x_k} delta(x_k - x_l)``
    of the contact line, which enters ``K`` with an overall ``-hbar``.

    ``operator`` is ``E``; it replaces ``A_k`` and ``A_l`` is dropped.
    """

    k: int
    l: int
    operator: CompositeOperator
    derivative: MultiIndex
    value: Fraction
    sign: int
    order: Tuple[int, int] = (0, 0)

    def as_dict(self):
        return {
            "k": self.k,
            "l": self.l,
            "operator": str(self.operator),
            "derivative": list(self.derivative),
            "value": fraction_to_json(self.value) if isinstance(self.value, Fraction) else self.value,
            "sign": self.sign,
            "order": list(self.order),
        }


@dataclass
class WardFunctional:
    """``K^B_{A;D}`` split into its pointwise part and its contact terms."""

    B: CompositeOperator
    A: Tuple[OperatorSum, ...]
    D: Fraction
    expression: SymbolicCoefficient
    theory: Theory
    mu: float = 1.0
    contact: Tuple[ContactTerm, ...] = field(default_factory=tuple)

    @property
    def is_zero(self):
        # type: () -> bool
        """Whether the pointwise part vanishes as an expression."""
        return self.expression.is_zero

    def __call__(self, points):
        return self.expression.evaluate(list(np.atleast_2d(np.asarray(points, dtype=float))))

    def as_dict(self):
        return {
            "B": str(self.B),
            "A": [str(a) for a in self.A],
            "D": fraction_to_json(self.D),
            "expression": self.expression.as_dict(),
            "contact": [term.as_dict() for term in self.contact],
            "symbolic_zero": self.is_zero,
        }


def _combination(source, sums, B, order):
    # type: (FreeCoefficients, Sequence[OperatorSum], CompositeOperator, Tuple[int, int]) -> SymbolicCoefficient
    result = SymbolicCoefficient.zero(len(sums), source.mu)
    for choice in itertools.product(*(s.items() for s in sums)):
        weight = Fraction(1)
        for _, coefficient in choice:
            weight *= coefficient
        coefficient = source.symbolic([op for op, _ in choice], B, order)
        if not coefficient.is_zero:
            result = result + coefficient.scale(weight)
    return result


def _row_image(theory, q, value, order):
    # type: (Theory, Optional[QMatrix], OperatorSum, Tuple[int, int]) -> OperatorSum
    if q is None:
        return apply_free_brst(theory, value)
    image = OperatorSum()
    for op, coefficient in value.items():
        for target, entry in q.row(op, order).items():
            image.add_term(target, coefficient * as_fraction(entry))
    return image


def _column(theory, q, B, basis, order):
    if q is not None:
        return q.column(B, order)
    if basis is None:
        # free Q raises the dimension by exactly one
        basis = enumerate_basis(theory.dynamical_fields, B.dimension - 1)
    return free_q_matrix(theory, basis).column(B)


def _contact_terms(operators, antibracket, order):
    # type: (Sequence[OperatorSum], BMatrix, Tuple[int, int]) -> List[ContactTerm]
    terms = []
    entries = {}
    for entry_order, (left, right, op, w), value in antibracket:
        if entry_order == tuple(order):
            entries.setdefault((left, right), []).append((op, w, value))
    for k, l in itertools.combinations(range(len(operators)), 2):
        # bring A_l next to A_k, then past everything in front of A_k
        between = sum(operators[j].parity for j in range(k + 1, l))
        base = koszul_sign(operators, k) * (-1 if operators[l].parity * between % 2 else 1)
        for left, left_coefficient in operators[k].items():
            for right, right_coefficient in operators[l].items():
                for op, w, value in entries.get((left, right), ()):
                    terms.append(
                        ContactTerm(
                            k, l, op, w, value * left_coefficient * right_coefficient, base, order
                        )
                    )
    return terms


def ward_expression(
    B,
    A,
    D,
    theory,
    basis=None,
    q=None,
    antibracket=None,
    mu=1.0,
    order=(0, 0),
    source=None,
):
    # type: (CompositeOperator, Sequence[Operand], Union[int, Fraction], Theory, Optional[object], Optional[QMatrix], Optional[BMatrix], float, Tuple[int, int], Optional[FreeCoefficients]) -> WardFunctional
    """Assemble ``K^B_{A;D}`` from the Q matrix and the OPE coefficients.

    :param basis: Candidates for the sources ``C`` of ``Q_C^B`` when *q* is not
        given; by default every operator of dimension ``[B] - 1``
    :param q: The Q matrix; by default the free one, applied directly
    :param antibracket: Antibracket entries for the contact terms; none in
        the free theory
    :raises DomainViolationError: If ``D <= [B] - 1``
    :raises MissingCoefficientError: If coefficients of *order* are not available
    """
    D = as_fraction(D)
    if D <= B.dimension - 1:
        raise DomainViolationError(
            "the cutoff must exceed [B] - 1", D=D, dimension=B.dimension
        )
    operators = tuple(_as_sum(a) for a in A)
    if not operators:
        raise ValueError("at least one operator is required")
    source = source or FreeCoefficients(theory, mu)
    expression = SymbolicCoefficient.zero(len(operators), source.mu)
    for k, value in enumerate(operators):
        image = _row_image(theory, q, value, order)
        if image.is_zero:
            continue
        replaced = operators[:k] + (image,) + operators[k + 1:]
        term = _combination(source, replaced, B, order)
        expression = expression + term.scale(koszul_sign(operators, k))
    for C, entry in sorted(_column(theory, q, B, basis, order).items(), key=lambda item: item[0].sort_key):
        if C.dimension >= D:
            continue
        term = _combination(source, operators, C, order)
        expression = expression - term.scale(as_fraction(entry))
    contact = ()
    if antibracket is not None:
        contact = tuple(_contact_terms(operators, antibracket, order))
    logger.debug(
        "K^%s with %d operators: %d terms, %d contact terms",
        B,
        len(operators),
        len(expression),
        len(contact),
    )
    return WardFunctional(B, operators, D, expression, theory, source.mu, contact)


def evaluate_K(B, A, D, points, theory, **kwargs):
    # type: (CompositeOperator, Sequence[Operand], Union[int, Fraction], np.ndarray, Theory, object) -> float
    """``K^B_{A;D}`` at pairwise distinct points, where contact terms do not contribute.

    :raises SingularPointError: If two points coincide
    """
    functional = ward_expression(B, A, D, theory, **kwargs)
    return float(functional(points))


def _gaussian_derivative(w, z, centre, width):
    # type: (MultiIndex, np.ndarray, np.ndarray, float) -> float
    """``d^w exp(-|z - centre|^2 / (2 width^2))`` from Hermite polynomials."""
    u = (np.asarray(z, dtype=float) - centre) / (width * np.sqrt(2.0))
    total = 1.0
    for axis in range(AXES):
        n = w[axis]
        coefficients = np.zeros(n + 1)
        coefficients[n] = 1.0
        hermite = np.polynomial.hermite.hermval(u[axis], coefficients)
        total *= (-1.0 / (width * np.sqrt(2.0))) ** n * hermite * np.exp(-u[axis] ** 2)
    return float(total)


def smeared_K(functional, points, width=0.5, hbar=1.0, source=None):
    # type: (WardFunctional, np.ndarray, float, float, Optional[FreeCoefficients]) -> float
    """The contact line of *functional* paired with Gaussian test functions.

    The delta function between ``x_k`` and ``x_l`` is smeared in ``x_l`` with
    a Gaussian of the given width centred at ``x_l``, so each contact term
    contributes ``-hbar**(n + 1) * sign * value * C^B(..) * (d^w f)(x_k)`` for a
    term of hbar order ``n``.
    """
    if width <= 0:
        raise ValueError("the test function width must be positive")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    source = source or FreeCoefficients(functional.theory, functional.mu)
    total = 0.0
    for term in functional.contact:
        operators = list(functional.A)
        operators[term.k] = OperatorSum.from_operator(term.operator)
        del operators[term.l]
        remaining = np.delete(points, term.l, axis=0)
        coefficient = _combination(source, operators, functional.B, term.order)
        if coefficient.is_zero:
            continue
        smearing = _gaussian_derivative(term.derivative, points[term.k], points[term.l], width)
        weight = -(hbar ** (term.order[1] + 1)) * term.sign * float(term.value)
        total += weight * float(coefficient.evaluate(list(remaining))) * smearing
    return total
