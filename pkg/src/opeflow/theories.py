# -*- coding=utf-8 -*-
"""Field content, contraction tables and free BRST rules of the supported theories."""
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from .exceptions import UndeclaredFieldError
from .operators import (
    AXES,
    Factor,
    FieldKind,
    FieldSpec,
    MultiIndex,
    OperatorSum,
    parse_operator_sum,
)

__all__ = [
    "PropagatorTerm",
    "BrstRule",
    "InteractionTerm",
    "Theory",
    "scalar_theory",
    "maxwell_theory",
    "dirac_theory",
    "theory_by_name",
    "THEORY_NAMES",
    "interaction_operator_sum",
]

PropagatorKey = Tuple[str, Tuple[int, ...], str, Tuple[int, ...]]


@dataclass(frozen=True)
class PropagatorTerm:
    """``<a(x) b(y)> += coefficient * (d^derivative C)(x - y)``."""

    coefficient: Fraction
    derivative: MultiIndex = dataclass_field(default_factory=MultiIndex.zero)


@dataclass(frozen=True)
class BrstRule:
    """Free BRST image of a field: ``s0 phi = d^e target``.

    ``target=None`` means ``s0 phi = 0``.  With ``index_to_derivative`` the
    Lorentz index of the source field becomes a derivative on the target, as in
    ``s0 A_mu = d_mu c``.
    """

    target: Optional[str] = None
    index_to_derivative: bool = False


@dataclass(frozen=True)
class InteractionTerm:
    """One term ``coefficient * g**g_power * operator`` of the interaction Lagrangian."""

    operator: OperatorSum
    coefficient: Fraction
    g_power: int = 1


@dataclass(frozen=True, eq=False)
class Theory:
    name: str
    fields: Tuple[FieldSpec, ...]
    propagators: Optional[Mapping[PropagatorKey, Tuple[PropagatorTerm, ...]]] = None
    brst: Mapping[str, BrstRule] = dataclass_field(default_factory=dict)
    lagrangian: Tuple[InteractionTerm, ...] = ()

    @property
    def field_map(self):
        # type: () -> Dict[str, FieldSpec]
        return {spec.name: spec for spec in self.fields}

    def field(self, name):
        # type: (str) -> FieldSpec
        try:
            return self.field_map[name]
        except KeyError:
            raise UndeclaredFieldError(
                "field {0!r} is not declared by theory {1}".format(name, self.name),
                field=name,
                theory=self.name,
            )

    @property
    def has_brst(self):
        # type: () -> bool
        return bool(self.brst)

    @property
    def dynamical_fields(self):
        return tuple(f for f in self.fields if f.kind is not FieldKind.ANTIFIELD)

    @property
    def antifields(self):
        return tuple(f for f in self.fields if f.kind is FieldKind.ANTIFIELD)

    def antifield_of(self, name):
        # type: (str) -> Optional[FieldSpec]
        for spec in self.antifields:
            if spec.antifield_of == name:
                return spec
        return None

    def contraction(self, left, right):
        # type: (Factor, Factor) -> Tuple[PropagatorTerm, ...]
        """Contraction terms of the undifferentiated fields of two factors."""
        if self.propagators is None:
            raise ValueError("theory {0} declares no propagators".format(self.name))
        key = (left.field.name, left.indices, right.field.name, right.indices)
        return self.propagators.get(key, ())

    def brst_rule(self, name):
        # type: (str) -> BrstRule
        self.field(name)
        try:
            return self.brst[name]
        except KeyError:
            raise UndeclaredFieldError(
                "no BRST transformation declared for {0!r}".format(name), field=name
            )

    def parse(self, text):
        # type: (str) -> OperatorSum
        return parse_operator_sum(text, self.field_map)

    def interaction_terms(self):
        return self.lagrangian


def _lagrangian(theory_fields, entries):
    lookup = {spec.name: spec for spec in theory_fields}
    terms = []
    for coefficient, text, power in entries:
        terms.append(
            InteractionTerm(parse_operator_sum(text, lookup), Fraction(coefficient), int(power))
        )
    return tuple(terms)


def scalar_theory(lagrangian=None):
    """One real massless scalar of dimension one with interaction ``g phi^4/4!``.

    :param lagrangian: Optional list of ``(coefficient, monomial, g_power)``
        entries replacing the default interaction
    """
    phi = FieldSpec("phi", FieldKind.BOSON, Fraction(1))
    propagators = {("phi", (), "phi", ()): (PropagatorTerm(Fraction(1)),)}
    if lagrangian is None:
        lagrangian = [(Fraction(1, 24), "phi^4", 1)]
    return Theory(
        name="scalar",
        fields=(phi,),
        propagators=propagators,
        lagrangian=_lagrangian((phi,), lagrangian),
    )


def _maxwell_fields(with_antifields):
    fields = [
        FieldSpec("A", FieldKind.BOSON, Fraction(1), lorentz_arity=1),
        FieldSpec("B", FieldKind.AUXILIARY, Fraction(2)),
        FieldSpec("c", FieldKind.GHOST, Fraction(1), parity=1, ghost_number=1),
        FieldSpec("cbar", FieldKind.ANTIGHOST, Fraction(1), parity=1, ghost_number=-1),
    ]
    if with_antifields:
        for spec in list(fields):
            fields.append(
                FieldSpec(
                    "anti_" + spec.name,
                    FieldKind.ANTIFIELD,
                    3 - spec.dimension,
                    parity=1 - spec.parity,
                    ghost_number=-1 - spec.ghost_number,
                    lorentz_arity=spec.lorentz_arity,
                    antifield_of=spec.name,
                )
            )
    return tuple(fields)


def _maxwell_propagators():
    one = Fraction(1)
    table = {
        ("c", (), "cbar", ()): (PropagatorTerm(one),),
        ("cbar", (), "c", ()): (PropagatorTerm(-one),),
    }
    for mu in range(AXES):
        table[("A", (mu,), "A", (mu,))] = (PropagatorTerm(one),)
        table[("A", (mu,), "B", ())] = (PropagatorTerm(-one, MultiIndex.unit(mu)),)
        table[("B", (), "A", (mu,))] = (PropagatorTerm(one, MultiIndex.unit(mu)),)
    return table


def maxwell_theory(with_antifields=False, lagrangian=None):
    """Free Maxwell field with Nakanishi-Lautrup field and ghosts in Feynman gauge.

    The contractions are the BRST-covariant position space two-point functions
    ``<A_mu A_nu> = delta_mu_nu C``, ``<c cbar> = -<cbar c> = C`` and
    ``<A_mu B> = -<B A_mu> = -d_mu C``, so that ``s0`` commutes with Wick
    contraction.
    """
    fields = _maxwell_fields(with_antifields)
    brst = {
        "A": BrstRule("c", index_to_derivative=True),
        "cbar": BrstRule("B"),
        "c": BrstRule(None),
        "B": BrstRule(None),
    }
    return Theory(
        name="maxwell",
        fields=fields,
        propagators=_maxwell_propagators(),
        brst=brst,
        lagrangian=_lagrangian(fields, lagrangian or []),
    )


def dirac_theory():
    """Dirac spinor and its conjugate of dimension 3/2.

    Spinor indices are suppressed; the theory is meant for basis enumeration
    and declares no contractions.
    """
    psi = FieldSpec("psi", FieldKind.FERMION, Fraction(3, 2), parity=1)
    psibar = FieldSpec("psibar", FieldKind.FERMION, Fraction(3, 2), parity=1)
    return Theory(name="dirac", fields=(psi, psibar))


THEORY_NAMES = ("scalar", "maxwell", "dirac")


def theory_by_name(name, lagrangian=None):
    # type: (str, Optional[list]) -> Theory
    if name == "scalar":
        return scalar_theory(lagrangian)
    if name == "maxwell":
        return maxwell_theory(with_antifields=True, lagrangian=lagrangian)
    if name == "dirac":
        return dirac_theory()
    raise ValueError("unknown theory {0!r}; expected one of {1}".format(name, THEORY_NAMES))


def interaction_operator_sum(theory):
    # type: (Theory) -> OperatorSum
    total = OperatorSum()
    for term in theory.lagrangian:
        total = total + term.operator.scale(term.coefficient)
    return total
