# -*- coding=utf-8 -*-
"""Composite operators, their canonical form and the dimension-graded basis.

Operators are monomials in derivatives of the fields of a theory.  Factors are
kept in a fixed canonical order and Grassmann-odd factors pick up a sign when
they are moved into it, so two operators compare equal exactly when they are
the same monomial.
"""
import enum
import itertools
import json
import math
import re

from collections import Counter
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import (
    Any,
    Dict,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from .exceptions import BasisTooLargeError, DimensionViolationError, UndeclaredFieldError
from .misc import _get_logger, as_fraction, canonical_json, fraction_to_json, fraction_to_ratio

__all__ = [
    "AXES",
    "MultiIndex",
    "FieldKind",
    "FieldSpec",
    "Factor",
    "CompositeOperator",
    "OperatorSum",
    "OperatorBasis",
    "UNIT",
    "canonicalize",
    "multiply",
    "derivative_expand",
    "differentiate_operator",
    "enumerate_basis",
    "euler_operator",
    "is_total_derivative",
    "multi_indices",
    "parse_operator",
    "parse_operator_sum",
]

AXES = 4
DEFAULT_BASIS_LIMIT = 100000

logger = _get_logger(__name__)


class MultiIndex(tuple):
    """A derivative multi-index ``w = (w_1, ..., w_4)`` with ``w_a >= 0``."""

    __slots__ = ()

    def __new__(cls, components=(0, 0, 0, 0)):
        comps = tuple(int(c) for c in components)
        if len(comps) != AXES or any(c < 0 for c in comps):
            raise ValueError("invalid multi-index {0!r}".format(components))
        return super(MultiIndex, cls).__new__(cls, comps)

    @classmethod
    def zero(cls):
        return cls((0,) * AXES)

    @classmethod
    def unit(cls, axis):
        # type: (int) -> MultiIndex
        comps = [0] * AXES
        comps[axis] = 1
        return cls(comps)

    @property
    def order(self):
        # type: () -> int
        return sum(self)

    def factorial(self):
        # type: () -> int
        return math.prod(math.factorial(c) for c in self)

    def __add__(self, other):
        return MultiIndex(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        return MultiIndex(a - b for a, b in zip(self, other))

    def dominated_by(self, other):
        # type: (Sequence[int]) -> bool
        return all(a <= b for a, b in zip(self, other))

    def sub_indices(self):
        # type: () -> Iterator[MultiIndex]
        """All ``v`` with ``v <= self`` componentwise."""
        for comps in itertools.product(*(range(c + 1) for c in self)):
            yield MultiIndex(comps)

    def binomial(self, other):
        # type: (MultiIndex) -> int
        return math.prod(math.comb(a, b) for a, b in zip(self, other))

    def monomial(self, x):
        """Evaluate ``x**w`` for points of shape ``(..., 4)``."""
        x = np.asarray(x, dtype=float)
        result = np.ones(x.shape[:-1])
        for axis, power in enumerate(self):
            if power:
                result = result * x[..., axis] ** power
        return result

    def __str__(self):
        return "".join("d{0}".format(axis + 1) * power for axis, power in enumerate(self))

    def __repr__(self):
        return "MultiIndex({0!r})".format(tuple(self))


def multi_indices(order):
    # type: (int) -> List[MultiIndex]
    """All multi-indices of total order ``order``, lexicographically sorted."""
    return sorted(
        MultiIndex(c)
        for c in itertools.product(range(order + 1), repeat=AXES)
        if sum(c) == order
    )


class FieldKind(enum.Enum):
    BOSON = "boson"
    FERMION = "fermion"
    GHOST = "ghost"
    ANTIGHOST = "antighost"
    AUXILIARY = "auxiliary"
    ANTIFIELD = "antifield"


@dataclass(frozen=True)
class FieldSpec:
    name: str
    kind: FieldKind
    dimension: Fraction
    parity: int = 0
    ghost_number: int = 0
    lorentz_arity: int = 0
    antifield_of: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "dimension", as_fraction(self.dimension))
        if not (1 <= self.dimension <= 3):
            raise DimensionViolationError(
                "field dimension must lie in [1, 3]", field=self.name, dimension=self.dimension
            )
        if self.parity not in (0, 1):
            raise ValueError("Grassmann parity must be 0 or 1")

    def index_tuples(self):
        # type: () -> Iterator[Tuple[int, ...]]
        return itertools.product(range(AXES), repeat=self.lorentz_arity)

    def as_dict(self):
        return {
            "name": self.name,
            "kind": self.kind.value,
            "dimension": fraction_to_json(self.dimension),
            "parity": self.parity,
            "ghost_number": self.ghost_number,
            "lorentz_arity": self.lorentz_arity,
            "antifield_of": self.antifield_of,
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            name=payload["name"],
            kind=FieldKind(payload["kind"]),
            dimension=Fraction(payload["dimension"]),
            parity=payload["parity"],
            ghost_number=payload["ghost_number"],
            lorentz_arity=payload["lorentz_arity"],
            antifield_of=payload.get("antifield_of"),
        )


@dataclass(frozen=True)
class Factor:
    """A single ``d^w phi_{indices}`` inside a monomial."""

    field: FieldSpec
    indices: Tuple[int, ...] = ()
    derivative: MultiIndex = dataclass_field(default_factory=MultiIndex.zero)

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if not isinstance(self.derivative, MultiIndex):
            object.__setattr__(self, "derivative", MultiIndex(self.derivative))
        if len(self.indices) != self.field.lorentz_arity:
            raise ValueError(
                "field {0} takes {1} Lorentz indices".format(
                    self.field.name, self.field.lorentz_arity
                )
            )

    @property
    def sort_key(self):
        return (self.field.name, self.indices, tuple(self.derivative))

    @property
    def dimension(self):
        # type: () -> Fraction
        return self.field.dimension + self.derivative.order

    @property
    def parity(self):
        # type: () -> int
        return self.field.parity

    @property
    def ghost_number(self):
        # type: () -> int
        return self.field.ghost_number

    def with_derivative(self, derivative):
        # type: (MultiIndex) -> Factor
        return Factor(self.field, self.indices, MultiIndex(derivative))

    def __str__(self):
        text = "{0}{1}".format(self.derivative, self.field.name)
        if self.indices:
            text += "_" + "".join(str(i + 1) for i in self.indices)
        return text

    def as_dict(self):
        """Indices are written 1..4, as in the printed name."""
        return {
            "field": self.field.name,
            "indices": [i + 1 for i in self.indices],
            "derivative": list(self.derivative),
        }

    @classmethod
    def from_dict(cls, payload, fields):
        # type: (Dict[str, Any], Mapping[str, FieldSpec]) -> Factor
        try:
            spec = fields[payload["field"]]
        except KeyError:
            raise UndeclaredFieldError(
                "undeclared field {0!r}".format(payload["field"]), field=payload["field"]
            )
        return cls(spec, tuple(i - 1 for i in payload["indices"]), tuple(payload["derivative"]))


@dataclass(frozen=True)
class CompositeOperator:
    """A monomial in canonical factor order; ``factors == ()`` is the unit."""

    factors: Tuple[Factor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        keys = [f.sort_key for f in self.factors]
        if keys != sorted(keys):
            raise ValueError("factors are not in canonical order; use canonicalize()")
        for left, right in zip(self.factors, self.factors[1:]):
            if left == right and left.parity:
                raise ValueError("repeated Grassmann-odd factor {0}".format(left))

    @property
    def dimension(self):
        # type: () -> Fraction
        return sum((f.dimension for f in self.factors), Fraction(0))

    @property
    def parity(self):
        # type: () -> int
        return sum(f.parity for f in self.factors) % 2

    @property
    def ghost_number(self):
        # type: () -> int
        return sum(f.ghost_number for f in self.factors)

    @property
    def is_unit(self):
        # type: () -> bool
        return not self.factors

    @property
    def sort_key(self):
        return (self.dimension, len(self.factors), tuple(f.sort_key for f in self.factors))

    def multiplicities(self):
        # type: () -> Counter
        return Counter(self.factors)

    def fields(self):
        return {f.field.name: f.field for f in self.factors}

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self):
        if self.is_unit:
            return "1"
        parts = []
        for factor, group in itertools.groupby(self.factors):
            power = len(list(group))
            parts.append(str(factor) if power == 1 else "{0}^{1}".format(factor, power))
        return "*".join(parts)

    def __repr__(self):
        return "CompositeOperator({0!r})".format(str(self))


UNIT = CompositeOperator(())


def _odd_permutation_sign(order, factors):
    odd = [i for i in order if factors[i].parity]
    inversions = sum(1 for a, b in itertools.combinations(odd, 2) if a > b)
    return -1 if inversions % 2 else 1


def canonicalize(factors):
    # type: (Iterable[Factor]) -> Tuple[Optional[CompositeOperator], int]
    """Sort *factors* into canonical order.

    :return: ``(operator, sign)`` where ``sign`` is the Grassmann sign of the
        reordering, or ``(None, 0)`` if a Grassmann-odd factor repeats and the
        product vanishes.
    """

    factors = list(factors)
    order = sorted(range(len(factors)), key=lambda i: factors[i].sort_key)
    ordered = [factors[i] for i in order]
    for left, right in zip(ordered, ordered[1:]):
        if left == right and left.parity:
            return None, 0
    return CompositeOperator(tuple(ordered)), _odd_permutation_sign(order, factors)


def multiply(left, right):
    # type: (CompositeOperator, CompositeOperator) -> Tuple[Optional[CompositeOperator], int]
    return canonicalize(left.factors + right.factors)


class OperatorSum(object):
    """A finite linear combination of composite operators with exact coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        # type: (Optional[Union[Mapping[CompositeOperator, Fraction], Iterable]]) -> None
        self._terms = {}  # type: Dict[CompositeOperator, Fraction]
        if terms is None:
            return
        items = terms.items() if isinstance(terms, Mapping) else terms
        for op, coefficient in items:
            self.add_term(op, coefficient)

    @classmethod
    def from_operator(cls, op, coefficient=1):
        # type: (CompositeOperator, Union[int, Fraction]) -> OperatorSum
        return cls([(op, coefficient)])

    def add_term(self, op, coefficient):
        # type: (Optional[CompositeOperator], Union[int, Fraction]) -> None
        if op is None or not coefficient:
            return
        value = self._terms.get(op, Fraction(0)) + as_fraction(coefficient)
        if value:
            self._terms[op] = value
        else:
            self._terms.pop(op, None)

    def items(self):
        # type: () -> List[Tuple[CompositeOperator, Fraction]]
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key)

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def coefficient(self, op):
        # type: (CompositeOperator) -> Fraction
        return self._terms.get(op, Fraction(0))

    @property
    def is_zero(self):
        return not self._terms

    def operators(self):
        return [op for op, _ in self.items()]

    def _homogeneous(self, attribute):
        values = {getattr(op, attribute) for op in self._terms}
        if len(values) > 1:
            raise ValueError("operator sum is not homogeneous in {0}".format(attribute))
        return values.pop() if values else None

    @property
    def dimension(self):
        return self._homogeneous("dimension")

    @property
    def parity(self):
        value = self._homogeneous("parity")
        return 0 if value is None else value

    @property
    def ghost_number(self):
        return self._homogeneous("ghost_number")

    def __add__(self, other):
        result = OperatorSum(self._terms)
        for op, coefficient in other.items():
            result.add_term(op, coefficient)
        return result

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        # type: (Union[int, Fraction]) -> OperatorSum
        return OperatorSum((op, c * as_fraction(factor)) for op, c in self._terms.items())

    __rmul__ = scale

    def __mul__(self, other):
        if isinstance(other, OperatorSum):
            result = OperatorSum()
            for lop, lc in self.items():
                for rop, rc in other.items():
                    product, sign = multiply(lop, rop)
                    result.add_term(product, sign * lc * rc)
            return result
        return self.scale(other)

    def __eq__(self, other):
        if isinstance(other, CompositeOperator):
            other = OperatorSum.from_operator(other)
        if not isinstance(other, OperatorSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join("({0})*{1}".format(c, op) for op, c in self.items())

    def __repr__(self):
        return "OperatorSum({0!r})".format(str(self))


def _distributions(w, parts):
    # type: (MultiIndex, int) -> Iterator[Tuple[int, Tuple[MultiIndex, ...]]]
    """Distribute ``d^w`` over ``parts`` factors with multinomial weights."""
    if parts == 1:
        yield 1, (w,)
        return
    for v in w.sub_indices():
        for weight, rest in _distributions(w - v, parts - 1):
            yield weight * w.binomial(v), (v,) + rest


def derivative_expand(w, op):
    # type: (MultiIndex, CompositeOperator) -> List[Tuple[CompositeOperator, int]]
    """Expand ``d^w`` of a monomial by the Leibniz rule.

    Returns each resulting monomial with its signed multiplicity; monomials
    whose contributions cancel are dropped.
    """

    w = MultiIndex(w)
    if op.is_unit:
        return [] if w.order else [(op, 1)]
    counts = Counter()  # type: Counter
    for weight, split in _distributions(w, len(op.factors)):
        factors = [f.with_derivative(f.derivative + v) for f, v in zip(op.factors, split)]
        result, sign = canonicalize(factors)
        if result is not None:
            counts[result] += sign * weight
    return sorted(((o, n) for o, n in counts.items() if n), key=lambda item: item[0].sort_key)


def differentiate_operator(value, w):
    # type: (Union[CompositeOperator, OperatorSum], MultiIndex) -> OperatorSum
    """``d^w`` of an operator or a linear combination, as an :class:`OperatorSum`."""
    if isinstance(value, CompositeOperator):
        value = OperatorSum.from_operator(value)
    result = OperatorSum()
    for op, coefficient in value.items():
        for target, count in derivative_expand(w, op):
            result.add_term(target, coefficient * count)
    return result


def euler_operator(value, field_spec, indices=()):
    # type: (Union[CompositeOperator, OperatorSum], FieldSpec, Tuple[int, ...]) -> OperatorSum
    """The Euler-Lagrange derivative ``sum_w (-d)^w  dL/d(d^w phi)``.

    Derivatives act from the left, so removing an odd factor picks up the
    sign of the odd factors standing in front of it.
    """

    if isinstance(value, CompositeOperator):
        value = OperatorSum.from_operator(value)
    indices = tuple(indices)
    result = OperatorSum()
    for op, coefficient in value.items():
        for position, factor in enumerate(op.factors):
            if factor.field != field_spec or factor.indices != indices:
                continue
            sign = 1
            if factor.parity:
                sign = (-1) ** sum(f.parity for f in op.factors[:position])
            rest, rest_sign = canonicalize(op.factors[:position] + op.factors[position + 1:])
            if rest is None:
                continue
            weight = coefficient * sign * rest_sign * (-1) ** factor.derivative.order
            for target, count in derivative_expand(factor.derivative, rest):
                result.add_term(target, weight * count)
    return result


def is_total_derivative(value):
    # type: (Union[CompositeOperator, OperatorSum]) -> bool
    """Whether a local polynomial is a total derivative.

    A polynomial without constant term is a total derivative exactly when all
    of its Euler-Lagrange derivatives vanish.
    """

    if isinstance(value, CompositeOperator):
        value = OperatorSum.from_operator(value)
    if value.coefficient(UNIT):
        return False
    seen = set()
    for op, _ in value.items():
        for factor in op.factors:
            key = (factor.field, factor.indices)
            if key in seen:
                continue
            seen.add(key)
            if not euler_operator(value, factor.field, factor.indices).is_zero:
                return False
    return True


@dataclass(frozen=True)
class OperatorBasis:
    """All monomials of dimension at most ``d_max`` in a set of fields."""

    operators: Tuple[CompositeOperator, ...]
    d_max: Fraction
    delta: Fraction
    fields: Tuple[FieldSpec, ...] = ()

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __contains__(self, op):
        return op in self._index

    @property
    def _index(self):
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {op: i for i, op in enumerate(self.operators)}
            object.__setattr__(self, "_index_cache", cached)
        return cached

    def index(self, op):
        # type: (CompositeOperator) -> int
        return self._index[op]

    def dimensions(self):
        # type: () -> List[Fraction]
        return sorted({op.dimension for op in self.operators})

    def of_dimension(self, dimension):
        return [op for op in self.operators if op.dimension == dimension]

    def below(self, dimension, inclusive=False):
        # type: (Fraction, bool) -> List[CompositeOperator]
        if inclusive:
            return [op for op in self.operators if op.dimension <= dimension]
        return [op for op in self.operators if op.dimension < dimension]

    def as_dict(self):
        return {
            "d_max": fraction_to_json(self.d_max),
            "delta": fraction_to_json(self.delta),
            "fields": [f.as_dict() for f in self.fields],
            "operators": [
                {
                    "name": str(op),
                    "factors": [f.as_dict() for f in op.factors],
                    "dimension": fraction_to_ratio(op.dimension),
                    "ghost_number": op.ghost_number,
                }
                for op in self.operators
            ],
        }

    @classmethod
    def from_dict(cls, payload):
        fields = tuple(FieldSpec.from_dict(f) for f in payload["fields"])
        lookup = {f.name: f for f in fields}
        operators = []
        for entry in payload["operators"]:
            op = CompositeOperator(tuple(Factor.from_dict(f, lookup) for f in entry["factors"]))
            if op.dimension != Fraction(entry["dimension"]) or op.ghost_number != entry["ghost_number"]:
                raise ValueError("basis entry {0!r} does not match its factors".format(entry))
            operators.append(op)
        return cls(
            operators=tuple(operators),
            d_max=Fraction(payload["d_max"]),
            delta=Fraction(payload["delta"]),
            fields=fields,
        )

    def to_json(self):
        # type: () -> str
        return canonical_json(self.as_dict())

    @classmethod
    def from_json(cls, text):
        # type: (str) -> OperatorBasis
        return cls.from_dict(json.loads(text))


def _letters(fields, d_max):
    # type: (Sequence[FieldSpec], Fraction) -> List[Factor]
    letters = []
    for spec in fields:
        headroom = d_max - spec.dimension
        if headroom < 0:
            continue
        for indices in spec.index_tuples():
            for order in range(int(math.floor(headroom)) + 1):
                for w in multi_indices(order):
                    letters.append(Factor(spec, indices, w))
    return sorted(letters, key=lambda f: f.sort_key)


def _basis_gap(dimensions):
    # type: (List[Fraction]) -> Fraction
    gaps = [b - a for a, b in zip(dimensions, dimensions[1:])]
    return min(gaps + [Fraction(1)])


def enumerate_basis(fields, d_max, limit=DEFAULT_BASIS_LIMIT, max_factors=None):
    # type: (Sequence[FieldSpec], Union[int, Fraction], int, Optional[int]) -> OperatorBasis
    """Enumerate every monomial of dimension ``<= d_max``.

    :param fields: The field content to build monomials from
    :param d_max: Dimension cutoff, inclusive
    :param int limit: Maximal number of operators before giving up
    :param max_factors: Optional cap on the number of factors per monomial
    :raises BasisTooLargeError: If more than *limit* monomials exist
    """

    d_max = as_fraction(d_max)
    fields = tuple(fields)
    letters = _letters(fields, d_max)
    found = [UNIT]

    def extend(start, budget, current):
        if max_factors is not None and len(current) >= max_factors:
            return
        for position in range(start, len(letters)):
            letter = letters[position]
            if letter.dimension > budget:
                continue
            chosen = current + (letter,)
            found.append(CompositeOperator(chosen))
            if len(found) > limit:
                raise BasisTooLargeError(
                    "basis exceeds {0} operators".format(limit), d_max=d_max, limit=limit
                )
            extend(position + letter.parity, budget - letter.dimension, chosen)

    extend(0, d_max, ())
    operators = tuple(sorted(found, key=lambda op: op.sort_key))
    delta = _basis_gap(sorted({op.dimension for op in operators}))
    logger.debug("enumerated %d operators up to dimension %s", len(operators), d_max)
    return OperatorBasis(operators=operators, d_max=d_max, delta=delta, fields=fields)


_FACTOR_RE = re.compile(
    r"^(?P<der>(?:d[1-4])*)(?P<name>[A-Za-z][A-Za-z_]*?)"
    r"(?:_(?P<idx>[1-4]+))?(?:\^(?P<pow>\d+))?$"
)


def _parse_factor(token, fields):
    match = _FACTOR_RE.match(token)
    if match is None:
        raise ValueError("cannot parse operator factor {0!r}".format(token))
    name = match.group("name")
    if name not in fields:
        raise UndeclaredFieldError("undeclared field {0!r}".format(name), field=name)
    counts = [0] * AXES
    for axis in re.findall(r"d([1-4])", match.group("der")):
        counts[int(axis) - 1] += 1
    indices = tuple(int(i) - 1 for i in (match.group("idx") or ""))
    power = int(match.group("pow") or 1)
    return [Factor(fields[name], indices, MultiIndex(counts))] * power


def parse_operator_sum(text, fields):
    # type: (str, Mapping[str, FieldSpec]) -> OperatorSum
    """Parse a monomial such as ``"phi^2*d1phi"`` or ``"cbar*d2c"``.

    The product is taken in the written order and then canonicalized, so the
    result may carry a sign or vanish.
    """

    text = text.strip()
    if text in ("1", ""):
        return OperatorSum.from_operator(UNIT)
    factors = []
    for token in re.split(r"\s*\*\s*", text):
        factors.extend(_parse_factor(token, fields))
    op, sign = canonicalize(factors)
    return OperatorSum([(op, sign)])


def parse_operator(text, fields):
    # type: (str, Mapping[str, FieldSpec]) -> CompositeOperator
    """Parse a monomial written in canonical order."""

    parsed = parse_operator_sum(text, fields)
    items = parsed.items()
    if len(items) != 1 or items[0][1] != 1:
        raise ValueError(
            "{0!r} is not a canonically ordered non-vanishing monomial".format(text)
        )
    return items[0][0]
