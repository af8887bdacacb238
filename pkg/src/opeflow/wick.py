# -*- coding=utf-8 -*-
"""Wick graphs and free-theory OPE coefficients.

The factors of the operators ``A_1 ... A_s`` are flattened into *slots*.  A
graph covers every slot by exactly one edge: either a propagator edge joining
two slots at different vertices, or a target edge sending the slot into one
factor of ``O_B``.  A target edge from vertex ``k < s`` absorbs the Taylor
monomial ``(x_k - x_s)**(w - v)/(w - v)!`` that moves ``d^v phi(x_k)`` to
``d^w phi(x_s)``; at the expansion point ``x_s`` itself only ``v == w`` is
allowed.

Identical target factors are filled in increasing position, so every graph
is produced exactly once and no symmetry factor needs to be divided out.
"""
import itertools
import threading

from collections import OrderedDict
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .exceptions import GraphLimitError
from .expressions import SymbolicCoefficient, atom
from .misc import _get_logger
from .operators import (
    CompositeOperator,
    Factor,
    MultiIndex,
    OperatorSum,
    canonicalize,
    multi_indices,
)
from .theories import Theory, scalar_theory

__all__ = [
    "Slot",
    "PropagatorEdge",
    "TargetEdge",
    "WickGraph",
    "DEFAULT_GRAPH_LIMIT",
    "flatten_slots",
    "enumerate_wick_graphs",
    "partial_matchings",
    "free_ope_coefficient",
    "free_ope_combination",
    "target_operators",
    "clear_coefficient_cache",
    "coefficient_cache_size",
    "COEFFICIENT_CACHE_SIZE",
]

logger = _get_logger(__name__)

DEFAULT_GRAPH_LIMIT = 1000000

COEFFICIENT_CACHE_SIZE = 8192

# least recently used entries are evicted first
_COEFFICIENT_CACHE = OrderedDict()  # type: OrderedDict[tuple, SymbolicCoefficient]
_CACHE_LOCK = threading.RLock()


@dataclass(frozen=True)
class Slot:
    """One factor of one operator vertex."""

    index: int
    vertex: int
    position: int
    factor: Factor

    @property
    def odd(self):
        # type: () -> bool
        return bool(self.factor.parity)


@dataclass(frozen=True)
class PropagatorEdge:
    """A contraction ``<d^u a(x_i) d^v b(x_j)>`` of two slots with ``i < j``.

    ``terms`` holds the resolved ``(coefficient, derivative)`` pairs of
    ``sum coefficient * (d^derivative C)(x_i - x_j)``.
    """

    left: Slot
    right: Slot
    terms: Tuple[Tuple[Fraction, MultiIndex], ...]

    @property
    def derivatives(self):
        return self.left.factor.derivative, self.right.factor.derivative

    def value(self, n_points, mu):
        # type: (int, float) -> SymbolicCoefficient
        result = SymbolicCoefficient.zero(n_points, mu)
        for coefficient, derivative in self.terms:
            result = result + SymbolicCoefficient.from_atom(
                n_points, mu, atom(self.left.vertex, self.right.vertex, derivative), coefficient
            )
        return result


@dataclass(frozen=True)
class TargetEdge:
    """Route ``d^v phi(x_k)`` into the factor ``d^w phi(x_s)`` of ``O_B``."""

    source: Slot
    target: int
    derivative: MultiIndex

    @property
    def derivatives(self):
        return self.source.factor.derivative, self.derivative

    @property
    def shift(self):
        # type: () -> MultiIndex
        return self.derivative - self.source.factor.derivative

    def value(self, n_points, mu):
        # type: (int, float) -> SymbolicCoefficient
        shift = self.shift
        if not shift.order:
            return SymbolicCoefficient.one(n_points, mu)
        monomials = [MultiIndex.zero()] * n_points
        monomials[self.source.vertex] = shift
        key = ((), tuple(monomials))
        return SymbolicCoefficient(n_points, mu, [(key, Fraction(1, shift.factorial()))])


@dataclass(frozen=True)
class WickGraph:
    operators: Tuple[CompositeOperator, ...]
    target: CompositeOperator
    propagator_edges: Tuple[PropagatorEdge, ...]
    target_edges: Tuple[TargetEdge, ...]
    sign: int = 1

    @property
    def n_points(self):
        # type: () -> int
        return len(self.operators)

    @property
    def edges(self):
        return self.propagator_edges + self.target_edges

    def value(self, mu):
        # type: (float) -> SymbolicCoefficient
        result = SymbolicCoefficient.one(self.n_points, mu).scale(self.sign)
        for edge in self.edges:
            result = result * edge.value(self.n_points, mu)
        return result


def flatten_slots(operators):
    # type: (Sequence[CompositeOperator]) -> List[Slot]
    slots = []
    for vertex, op in enumerate(operators):
        for position, factor in enumerate(op.factors):
            slots.append(Slot(len(slots), vertex, position, factor))
    return slots


def _arrangement_sign(arrangement, slots):
    # type: (Sequence[int], Sequence[Slot]) -> int
    odd = [i for i in arrangement if slots[i].odd]
    inversions = sum(1 for a, b in itertools.combinations(odd, 2) if a > b)
    return -1 if inversions % 2 else 1


def _propagator_terms(theory, left, right):
    # type: (Theory, Slot, Slot) -> Tuple[Tuple[Fraction, MultiIndex], ...]
    u, v = left.factor.derivative, right.factor.derivative
    sign = -1 if v.order % 2 else 1
    return tuple(
        (term.coefficient * sign, u + v + term.derivative)
        for term in theory.contraction(left.factor, right.factor)
    )


def _target_accepts(slot, target, last_vertex):
    # type: (Slot, Factor, int) -> bool
    factor = slot.factor
    if factor.field != target.field or factor.indices != target.indices:
        return False
    if slot.vertex == last_vertex:
        return factor.derivative == target.derivative
    return factor.derivative.dominated_by(target.derivative)


def enumerate_wick_graphs(A, B, theory=None, graph_limit=DEFAULT_GRAPH_LIMIT):
    # type: (Sequence[CompositeOperator], CompositeOperator, Optional[Theory], Optional[int]) -> List[WickGraph]
    """All Wick graphs ``P(A_1, ..., A_s, B)``.

    :param A: Operators at the insertion points, ``x_s`` being the last one
    :param B: Target operator at ``x_s``
    :param theory: Contraction table, defaults to the free scalar
    :param graph_limit: Maximal number of graphs, ``None`` for no limit
    :raises GraphLimitError: If more than ``graph_limit`` graphs exist
    """
    operators = tuple(A)
    if not operators:
        raise ValueError("at least one operator is required")
    theory = theory or scalar_theory()
    slots = flatten_slots(operators)
    last_vertex = len(operators) - 1
    targets = B.factors
    graphs = []  # type: List[WickGraph]
    used = [False] * len(slots)
    filled = [None] * len(targets)  # type: List[Optional[int]]
    pairs = []  # type: List[PropagatorEdge]
    contraction_cache = {}

    def contract(left, right):
        key = (left.factor, right.factor)
        if key not in contraction_cache:
            contraction_cache[key] = _propagator_terms(theory, left, right)
        return contraction_cache[key]

    def emit():
        arrangement = [i for e in pairs for i in (e.left.index, e.right.index)]
        arrangement += [filled[p] for p in range(len(targets))]
        target_edges = tuple(
            TargetEdge(slots[filled[p]], p, targets[p].derivative) for p in range(len(targets))
        )
        graphs.append(
            WickGraph(
                operators,
                B,
                tuple(pairs),
                target_edges,
                _arrangement_sign(arrangement, slots),
            )
        )
        if graph_limit is not None and len(graphs) > graph_limit:
            raise GraphLimitError(
                "more than {0} Wick graphs".format(graph_limit), limit=graph_limit
            )

    def search(start):
        index = next((i for i in range(start, len(slots)) if not used[i]), None)
        free = sum(1 for p in filled if p is None)
        if index is None:
            if not free:
                emit()
            return
        remaining = sum(1 for u in used[index:] if not u)
        if remaining < free or (remaining - free) % 2:
            return
        slot = slots[index]
        used[index] = True
        seen = set()
        for position, target in enumerate(targets):
            if filled[position] is not None or target in seen:
                continue
            seen.add(target)
            if not _target_accepts(slot, target, last_vertex):
                continue
            filled[position] = index
            search(index + 1)
            filled[position] = None
        for partner in range(index + 1, len(slots)):
            other = slots[partner]
            if used[partner] or other.vertex == slot.vertex:
                continue
            terms = contract(slot, other)
            if not terms:
                continue
            used[partner] = True
            pairs.append(PropagatorEdge(slot, other, terms))
            search(index + 1)
            pairs.pop()
            used[partner] = False
        used[index] = False

    search(0)
    logger.debug(
        "%d Wick graphs for %s -> %s", len(graphs), ", ".join(map(str, operators)), B
    )
    return graphs


def partial_matchings(operators, theory=None):
    # type: (Sequence[CompositeOperator], Optional[Theory]) -> Iterator[Tuple[int, Tuple[PropagatorEdge, ...], Tuple[Slot, ...]]]
    """All sets of propagator edges between different vertices.

    Yields ``(sign, edges, unmatched)`` where ``sign`` is the Grassmann sign of
    moving the contracted pairs to the front.
    """
    theory = theory or scalar_theory()
    slots = flatten_slots(operators)

    def search(start, pairs, used, unmatched):
        index = next((i for i in range(start, len(slots)) if i not in used), None)
        if index is None:
            arrangement = [i for e in pairs for i in (e.left.index, e.right.index)]
            arrangement += [s.index for s in unmatched]
            yield _arrangement_sign(arrangement, slots), tuple(pairs), tuple(unmatched)
            return
        slot = slots[index]
        for item in search(index + 1, pairs, used | {index}, unmatched + [slot]):
            yield item
        for partner in range(index + 1, len(slots)):
            other = slots[partner]
            if partner in used or other.vertex == slot.vertex:
                continue
            terms = _propagator_terms(theory, slot, other)
            if not terms:
                continue
            edge = PropagatorEdge(slot, other, terms)
            for item in search(
                index + 1, pairs + [edge], used | {index, partner}, unmatched
            ):
                yield item

    for item in search(0, [], frozenset(), []):
        yield item


def free_ope_coefficient(A, B, mu=1.0, theory=None, graph_limit=DEFAULT_GRAPH_LIMIT):
    # type: (Sequence[CompositeOperator], CompositeOperator, float, Optional[Theory], Optional[int]) -> SymbolicCoefficient
    """The free OPE coefficient ``C^{mu;B}_{A_1...A_s}(x_1, ..., x_s)``.

    Returns the zero expression when no Wick graph exists.
    """
    theory = theory or scalar_theory()
    operators = tuple(A)
    key = (theory.name, operators, B, float(mu))
    with _CACHE_LOCK:
        cached = _COEFFICIENT_CACHE.get(key)
        if cached is not None:
            _COEFFICIENT_CACHE.move_to_end(key)
            return cached
    result = SymbolicCoefficient.zero(len(operators), mu)
    for graph in enumerate_wick_graphs(operators, B, theory, graph_limit):
        result = result + graph.value(mu)
    with _CACHE_LOCK:
        _COEFFICIENT_CACHE[key] = result
        while len(_COEFFICIENT_CACHE) > COEFFICIENT_CACHE_SIZE:
            _COEFFICIENT_CACHE.popitem(last=False)
    return result


def clear_coefficient_cache():
    with _CACHE_LOCK:
        _COEFFICIENT_CACHE.clear()


def coefficient_cache_size():
    # type: () -> int
    with _CACHE_LOCK:
        return len(_COEFFICIENT_CACHE)


def _as_sum(value):
    # type: (Union[CompositeOperator, OperatorSum]) -> OperatorSum
    if isinstance(value, CompositeOperator):
        return OperatorSum.from_operator(value)
    return value


def free_ope_combination(A, B, mu=1.0, theory=None, graph_limit=DEFAULT_GRAPH_LIMIT):
    # type: (Sequence[Union[CompositeOperator, OperatorSum]], CompositeOperator, float, Optional[Theory], Optional[int]) -> SymbolicCoefficient
    """Multilinear extension of :func:`free_ope_coefficient` to linear combinations."""
    sums = [_as_sum(a) for a in A]
    result = SymbolicCoefficient.zero(len(sums), mu)
    for choice in itertools.product(*(s.items() for s in sums)):
        weight = Fraction(1)
        for _, coefficient in choice:
            weight *= coefficient
        operators = [op for op, _ in choice]
        coefficient = free_ope_coefficient(operators, B, mu, theory, graph_limit)
        result = result + coefficient.scale(weight)
    return result


def _derivative_extensions(unmatched, last_vertex, budget):
    # type: (Sequence[Slot], int, int) -> Iterator[List[Factor]]
    if not unmatched:
        yield []
        return
    head, rest = unmatched[0], unmatched[1:]
    orders = [0] if head.vertex == last_vertex else range(budget + 1)
    for order in orders:
        for extra in multi_indices(order):
            factor = head.factor.with_derivative(head.factor.derivative + extra)
            for tail in _derivative_extensions(rest, last_vertex, budget - order):
                yield [factor] + tail


def target_operators(A, theory=None, d_max=4):
    # type: (Sequence[CompositeOperator], Optional[Theory], Fraction) -> List[CompositeOperator]
    """Every ``O_B`` with ``[O_B] <= d_max`` that can carry a nonzero free coefficient."""
    operators = tuple(A)
    theory = theory or scalar_theory()
    last_vertex = len(operators) - 1
    found = set()
    seen_unmatched = set()
    for _, _, unmatched in partial_matchings(operators, theory):
        key = tuple((s.vertex, s.factor) for s in unmatched)
        if key in seen_unmatched:
            continue
        seen_unmatched.add(key)
        base = sum((s.factor.dimension for s in unmatched), Fraction(0))
        if base > d_max:
            continue
        budget = int(Fraction(d_max) - base)
        for factors in _derivative_extensions(unmatched, last_vertex, budget):
            op, sign = canonicalize(factors)
            if op is not None and op.dimension <= d_max:
                found.add(op)
    return sorted(found, key=lambda op: op.sort_key)
