# -*- coding=utf-8 -*-
"""Exact symbolic OPE coefficients.

A coefficient of ``s`` insertion points is a finite sum of terms::

    q * prod_atoms (d^m C)(x_i - x_j)**p * prod_k (x_k - x_s)**e_k

with rational ``q``.  Atoms are interned, so repeated covariance factors are
shared between terms and evaluated once per call.  Terms are stored in a
canonical key so that structurally different but equal expressions collapse
and cancellation to zero is exact.
"""
import json

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .covariance import ACTIVE_LIMIT, eval_covariance_deriv
from .exceptions import SingularPointError
from .misc import _get_logger, as_fraction, canonical_json, fraction_to_json
from .operators import AXES, MultiIndex

__all__ = ["CovarianceAtom", "atom", "Term", "SymbolicCoefficient"]

logger = _get_logger(__name__)


class CovarianceAtom(tuple):
    """``(d^derivative C)(x_left - x_right)`` with ``left < right``."""

    __slots__ = ()
    _interned = {}  # type: Dict[Tuple[int, int, MultiIndex], CovarianceAtom]

    def __new__(cls, left, right, derivative):
        return super(CovarianceAtom, cls).__new__(cls, (left, right, derivative))

    @property
    def left(self):
        # type: () -> int
        return self[0]

    @property
    def right(self):
        # type: () -> int
        return self[1]

    @property
    def derivative(self):
        # type: () -> MultiIndex
        return self[2]

    @property
    def degree(self):
        # type: () -> int
        """Short distance scaling degree of the atom."""
        return -2 - self.derivative.order

    def __repr__(self):
        return "C[{0}]({1},{2})".format(self.derivative or "", self.left, self.right)


def atom(left, right, derivative):
    # type: (int, int, MultiIndex) -> CovarianceAtom
    """Return the interned atom ``(d^derivative C)(x_left - x_right)``."""
    if left >= right:
        raise ValueError("atoms are keyed with left < right")
    key = (int(left), int(right), MultiIndex(derivative))
    found = CovarianceAtom._interned.get(key)
    if found is None:
        found = CovarianceAtom(*key)
        CovarianceAtom._interned[key] = found
    return found


# (sorted (atom, power) pairs, per-point displacement exponents)
Term = Tuple[Tuple[Tuple[CovarianceAtom, int], ...], Tuple[MultiIndex, ...]]


def _zero_monomials(n_points):
    return tuple(MultiIndex.zero() for _ in range(n_points))


def _make_term(atoms, monomials):
    # type: (Mapping[CovarianceAtom, int], Sequence[MultiIndex]) -> Term
    return (
        tuple(sorted(((a, p) for a, p in atoms.items() if p), key=lambda item: item[0])),
        tuple(monomials),
    )


def _multiply_terms(left, right):
    # type: (Term, Term) -> Term
    powers = dict(left[0])
    for a, p in right[0]:
        powers[a] = powers.get(a, 0) + p
    monomials = [x + y for x, y in zip(left[1], right[1])]
    return _make_term(powers, monomials)


class SymbolicCoefficient(object):
    """An exact coefficient expression in ``n_points`` insertion points."""

    __slots__ = ("n_points", "mu", "_terms")

    def __init__(self, n_points, mu, terms=None):
        # type: (int, float, Optional[Iterable[Tuple[Term, Fraction]]]) -> None
        self.n_points = int(n_points)
        self.mu = float(mu)
        self._terms = {}  # type: Dict[Term, Fraction]
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, value in items:
                self._add(key, value)

    @classmethod
    def zero(cls, n_points, mu):
        return cls(n_points, mu)

    @classmethod
    def one(cls, n_points, mu):
        return cls(n_points, mu, [(((), _zero_monomials(n_points)), Fraction(1))])

    @classmethod
    def from_atom(cls, n_points, mu, covariance_atom, coefficient=1):
        key = _make_term({covariance_atom: 1}, _zero_monomials(n_points))
        return cls(n_points, mu, [(key, as_fraction(coefficient))])

    def _add(self, key, value):
        value = self._terms.get(key, Fraction(0)) + as_fraction(value)
        if value:
            self._terms[key] = value
        else:
            self._terms.pop(key, None)

    def _compatible(self, other):
        if self.n_points != other.n_points or self.mu != other.mu:
            raise ValueError("coefficients live on different point sets or scales")

    @property
    def terms(self):
        # type: () -> List[Tuple[Term, Fraction]]
        return sorted(self._terms.items(), key=lambda item: _term_sort_key(item[0]))

    @property
    def is_zero(self):
        # type: () -> bool
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def atoms(self):
        return sorted({a for key in self._terms for a, _ in key[0]})

    def __add__(self, other):
        self._compatible(other)
        result = SymbolicCoefficient(self.n_points, self.mu, self._terms)
        for key, value in other._terms.items():
            result._add(key, value)
        return result

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        factor = as_fraction(factor)
        return SymbolicCoefficient(
            self.n_points, self.mu, [(k, v * factor) for k, v in self._terms.items()]
        )

    def __mul__(self, other):
        if not isinstance(other, SymbolicCoefficient):
            return self.scale(other)
        self._compatible(other)
        result = SymbolicCoefficient(self.n_points, self.mu)
        for lkey, lvalue in self._terms.items():
            for rkey, rvalue in other._terms.items():
                result._add(_multiply_terms(lkey, rkey), lvalue * rvalue)
        return result

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, SymbolicCoefficient):
            return NotImplemented
        return (
            self.n_points == other.n_points
            and self.mu == other.mu
            and self._terms == other._terms
        )

    def __hash__(self):
        return hash((self.n_points, self.mu, frozenset(self._terms.items())))

    def term_degrees(self):
        # type: () -> List[int]
        """Short distance scaling degree of every term at ``mu -> 0``."""
        degrees = []
        for atoms, monomials in self._terms:
            degree = sum(a.degree * p for a, p in atoms)
            degree += sum(m.order for m in monomials)
            degrees.append(degree)
        return degrees

    def leading_degree(self):
        # type: () -> Optional[int]
        degrees = self.term_degrees()
        return min(degrees) if degrees else None

    def differentiate(self, point, axis):
        # type: (int, int) -> SymbolicCoefficient
        """Exact derivative with respect to coordinate ``axis`` of point ``point``."""
        if not 0 <= point < self.n_points:
            raise IndexError("point {0} out of range".format(point))
        last = self.n_points - 1
        unit = MultiIndex.unit(axis)
        result = SymbolicCoefficient(self.n_points, self.mu)
        for (atoms, monomials), value in self._terms.items():
            powers = dict(atoms)
            for a, power in atoms:
                if point not in (a.left, a.right):
                    continue
                sign = 1 if point == a.left else -1
                new_powers = dict(powers)
                new_powers[a] -= 1
                shifted = atom(a.left, a.right, a.derivative + unit)
                new_powers[shifted] = new_powers.get(shifted, 0) + 1
                result._add(_make_term(new_powers, monomials), value * sign * power)
            for k, exponent in enumerate(monomials):
                if k == last or not exponent[axis]:
                    continue
                if point == k:
                    sign = 1
                elif point == last:
                    sign = -1
                else:
                    continue
                new_monomials = list(monomials)
                new_monomials[k] = exponent - unit
                result._add(
                    _make_term(powers, new_monomials), value * sign * exponent[axis]
                )
        return result

    def evaluate(self, points, max_order=ACTIVE_LIMIT):
        """Evaluate at ``points``, a sequence of ``n_points`` arrays of shape ``(4,)`` or ``(N, 4)``.

        :raises SingularPointError: If two points entering a covariance atom coincide
        :raises DerivativeOrderError: If an atom carries more derivatives than *max_order*,
            by default the limit of :func:`~opeflow.covariance.derivative_order_limit`
        """
        if len(points) != self.n_points:
            raise ValueError(
                "expected {0} points, got {1}".format(self.n_points, len(points))
            )
        points = [np.asarray(p, dtype=float) for p in points]
        shape = np.broadcast_shapes(*(p.shape for p in points)) if points else (AXES,)
        total = np.zeros(shape[:-1])
        if not self._terms:
            return _scalar_or_array(total)
        atom_values = {}
        for a in self.atoms():
            difference = points[a.left] - points[a.right]
            if np.any(np.einsum("...a,...a->...", difference, difference) == 0):
                raise SingularPointError(
                    "points {0} and {1} coincide".format(a.left, a.right)
                )
            atom_values[a] = eval_covariance_deriv(
                a.derivative, difference, self.mu, max_order=max_order
            )
        monomial_values = {}
        last = self.n_points - 1
        for (atoms, monomials), value in self._terms.items():
            product = np.full(shape[:-1], float(value))
            for a, power in atoms:
                product = product * atom_values[a] ** power
            for k, exponent in enumerate(monomials):
                if k == last or not exponent.order:
                    continue
                cache_key = (k, exponent)
                if cache_key not in monomial_values:
                    monomial_values[cache_key] = exponent.monomial(points[k] - points[last])
                product = product * monomial_values[cache_key]
            total = total + product
        return _scalar_or_array(total)

    __call__ = evaluate

    def as_dict(self):
        return {
            "n_points": self.n_points,
            "mu": self.mu,
            "terms": [
                {
                    "coefficient": fraction_to_json(value),
                    "atoms": [
                        [a.left, a.right, list(a.derivative), power] for a, power in atoms
                    ],
                    "monomials": [list(m) for m in monomials],
                }
                for (atoms, monomials), value in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, payload):
        result = cls(payload["n_points"], payload["mu"])
        for entry in payload["terms"]:
            powers = {
                atom(left, right, MultiIndex(derivative)): power
                for left, right, derivative, power in entry["atoms"]
            }
            monomials = [MultiIndex(m) for m in entry["monomials"]]
            result._add(_make_term(powers, monomials), Fraction(entry["coefficient"]))
        return result

    def to_json(self):
        # type: () -> str
        return canonical_json(self.as_dict())

    @classmethod
    def from_json(cls, text):
        # type: (str) -> SymbolicCoefficient
        return cls.from_dict(json.loads(text))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for (atoms, monomials), value in self.terms:
            factors = ["{0!r}^{1}".format(a, p) if p > 1 else repr(a) for a, p in atoms]
            factors += [
                "(x{0}-x{1})^{2}".format(k, self.n_points - 1, tuple(m))
                for k, m in enumerate(monomials)
                if m.order
            ]
            parts.append("({0})".format(value) + "".join("*" + f for f in factors))
        return " + ".join(parts)

    def __repr__(self):
        return "SymbolicCoefficient({0})".format(self)


def _term_sort_key(term):
    atoms, monomials = term
    return (
        tuple((tuple(a[:2]), tuple(a.derivative), p) for a, p in atoms),
        tuple(tuple(m) for m in monomials),
    )


def _scalar_or_array(value):
    if np.ndim(value) == 0:
        return float(value)
    return value
