# -*- coding=utf-8 -*-
import json

from fractions import Fraction

import numpy as np
import pytest

from hypothesis import given, settings

from opeflow.exceptions import BasisTooLargeError, DimensionViolationError, UndeclaredFieldError
from opeflow.operators import (
    UNIT,
    CompositeOperator,
    Factor,
    FieldKind,
    FieldSpec,
    MultiIndex,
    OperatorBasis,
    OperatorSum,
    canonicalize,
    derivative_expand,
    differentiate_operator,
    enumerate_basis,
    euler_operator,
    is_total_derivative,
    multi_indices,
    multiply,
    parse_operator,
    parse_operator_sum,
)
from opeflow.theories import dirac_theory

from .strategies import multi_indices as multi_index_strategy, scalar_monomials


def _op(theory, text):
    return parse_operator(text, theory.field_map)


def _sum(theory, text):
    return parse_operator_sum(text, theory.field_map)


def test_multi_index():
    w = MultiIndex((2, 0, 1, 0))
    assert w.order == 3
    assert w.factorial() == 2
    assert str(w) == "d1d1d3"
    assert w + MultiIndex.unit(1) == MultiIndex((2, 1, 1, 0))
    assert MultiIndex.unit(2).dominated_by(w)
    assert not MultiIndex.unit(1).dominated_by(w)
    assert len(list(w.sub_indices())) == 6
    assert w.binomial(MultiIndex((1, 0, 1, 0))) == 2
    x = np.array([[2.0, 5.0, 3.0, 7.0], [1.0, 1.0, -1.0, 1.0]])
    np.testing.assert_allclose(w.monomial(x), [12.0, -1.0])
    for bad in ((1, 2, 3), (0, -1, 0, 0)):
        with pytest.raises(ValueError):
            MultiIndex(bad)


@pytest.mark.parametrize("order, count", [(0, 1), (1, 4), (2, 10), (3, 20)])
def test_multi_indices(order, count):
    found = multi_indices(order)
    assert len(found) == count
    assert found == sorted(found)
    assert all(w.order == order for w in found)


def test_field_spec_validation():
    with pytest.raises(DimensionViolationError):
        FieldSpec("chi", FieldKind.BOSON, Fraction(1, 2))
    with pytest.raises(DimensionViolationError):
        FieldSpec("chi", FieldKind.BOSON, 4)
    with pytest.raises(ValueError):
        FieldSpec("chi", FieldKind.BOSON, 1, parity=2)
    spec = FieldSpec("chi", FieldKind.BOSON, "3/2")
    assert spec.dimension == Fraction(3, 2)
    assert FieldSpec.from_dict(spec.as_dict()) == spec


def test_factor_needs_its_lorentz_indices(maxwell):
    with pytest.raises(ValueError):
        Factor(maxwell.field("A"))
    factor = Factor(maxwell.field("A"), (0,), (0, 1, 0, 0))
    assert factor.dimension == 2
    assert str(factor) == "d2A_1"


def test_parse_and_print(scalar, maxwell):
    op = _op(scalar, "phi^2*d1phi")
    assert op.dimension == 4
    assert str(op) == "phi^2*d1phi"
    assert _op(scalar, "1") == UNIT
    assert _op(scalar, "d1phi*phi") == _op(scalar, "phi*d1phi")
    field_strength_part = _op(maxwell, "d2A_1")
    assert field_strength_part.factors[0].indices == (0,)
    assert _op(maxwell, "c*cbar").ghost_number == 0
    assert _op(maxwell, "B*c").parity == 1


def test_parse_errors(scalar):
    with pytest.raises(UndeclaredFieldError):
        _op(scalar, "chi")
    with pytest.raises(ValueError):
        _op(scalar, "phi**2")


def test_canonical_order_signs(maxwell):
    c, cbar = Factor(maxwell.field("c")), Factor(maxwell.field("cbar"))
    op, sign = canonicalize([cbar, c])
    assert str(op) == "c*cbar"
    assert sign == -1
    assert canonicalize([c, c]) == (None, 0)
    assert _sum(maxwell, "cbar*c") == OperatorSum.from_operator(op, -1)
    assert _sum(maxwell, "c*c").is_zero
    with pytest.raises(ValueError):
        CompositeOperator((cbar, c))
    with pytest.raises(ValueError):
        _op(maxwell, "cbar*c")


def test_multiply(scalar, maxwell):
    phi = _op(scalar, "phi")
    assert multiply(phi, _op(scalar, "phi^2")) == (_op(scalar, "phi^3"), 1)
    assert multiply(UNIT, phi) == (phi, 1)
    c, cbar = _op(maxwell, "c"), _op(maxwell, "cbar")
    assert multiply(cbar, c) == (_op(maxwell, "c*cbar"), -1)


def test_operator_sum_arithmetic(scalar, maxwell):
    a = _sum(scalar, "phi^2") + _sum(scalar, "d1phi").scale(3)
    b = _sum(scalar, "phi^2")
    assert (a - b) == _sum(scalar, "d1phi").scale(3)
    assert (a - a).is_zero
    assert len(a) == 2
    assert a.coefficient(_op(scalar, "d1phi")) == 3
    assert a.dimension == 2
    with pytest.raises(ValueError):
        (a + _sum(scalar, "phi")).dimension
    ghosts = _sum(maxwell, "c")
    assert (ghosts * ghosts).is_zero
    assert (_sum(maxwell, "cbar") * ghosts) == -_sum(maxwell, "c*cbar")
    assert str(OperatorSum()) == "0"


def test_leibniz_rule(scalar, maxwell):
    d1 = MultiIndex.unit(0)
    assert derivative_expand(d1, _op(scalar, "phi^2")) == [(_op(scalar, "phi*d1phi"), 2)]
    assert derivative_expand(d1, UNIT) == []
    assert derivative_expand(MultiIndex.zero(), UNIT) == [(UNIT, 1)]
    expanded = differentiate_operator(_op(maxwell, "c*cbar"), d1)
    assert expanded == _sum(maxwell, "d1c*cbar") + _sum(maxwell, "c*d1cbar")
    second = differentiate_operator(_op(scalar, "phi^2"), MultiIndex((2, 0, 0, 0)))
    assert second == _sum(scalar, "phi*d1d1phi").scale(2) + _sum(scalar, "d1phi^2").scale(2)


@settings(max_examples=30, deadline=None)
@given(scalar_monomials(max_dimension=3), multi_index_strategy(max_order=2))
def test_derivatives_raise_the_dimension(op, w):
    for target, count in derivative_expand(w, op):
        assert target.dimension == op.dimension + w.order
        assert count > 0


def test_derivatives_commute(scalar):
    op = _op(scalar, "phi^2*d3phi")
    d1, d2 = MultiIndex.unit(0), MultiIndex.unit(1)
    first = differentiate_operator(differentiate_operator(op, d1), d2)
    second = differentiate_operator(differentiate_operator(op, d2), d1)
    assert first == second == differentiate_operator(op, d1 + d2)


def test_euler_operator(scalar):
    phi = scalar.field("phi")
    potential = _sum(scalar, "phi^4").scale(Fraction(1, 24))
    assert euler_operator(potential, phi) == _sum(scalar, "phi^3").scale(Fraction(1, 6))
    kinetic = _sum(scalar, "d1phi^2")
    assert euler_operator(kinetic, phi) == _sum(scalar, "d1d1phi").scale(-2)


def test_total_derivatives(scalar, maxwell):
    assert is_total_derivative(differentiate_operator(_op(scalar, "phi^3"), MultiIndex.unit(2)))
    assert not is_total_derivative(_op(scalar, "phi*d1d1phi"))
    assert is_total_derivative(_sum(scalar, "phi*d1d1phi") + _sum(scalar, "d1phi^2"))
    assert not is_total_derivative(OperatorSum.from_operator(UNIT))
    ghost_current = differentiate_operator(_op(maxwell, "c*cbar"), MultiIndex.unit(3))
    assert is_total_derivative(ghost_current)


def test_scalar_basis(scalar):
    basis = enumerate_basis(scalar.fields, 2)
    assert [str(op) for op in basis][:2] == ["1", "phi"]
    assert len(basis) == 7
    assert basis.delta == 1
    assert basis.dimensions() == [0, 1, 2]
    assert len(basis.of_dimension(2)) == 5
    assert len(enumerate_basis(scalar.fields, 3)) == 22
    assert _op(scalar, "phi^2") in basis
    assert basis.index(UNIT) == 0
    assert basis.below(2) == [op for op in basis if op.dimension < 2]


def test_basis_is_sorted_by_dimension(scalar):
    basis = enumerate_basis(scalar.fields, 4)
    dimensions = [op.dimension for op in basis]
    assert dimensions == sorted(dimensions)
    assert len(set(basis.operators)) == len(basis)


def test_fermion_basis():
    theory = dirac_theory()
    basis = enumerate_basis(theory.fields, 3)
    names = {str(op) for op in basis}
    assert "psi*psibar" in names
    assert "psi^2" not in names
    assert len(basis) == 12
    assert basis.delta == Fraction(1, 2)


def test_basis_limit(scalar):
    with pytest.raises(BasisTooLargeError) as excinfo:
        enumerate_basis(scalar.fields, 4, limit=10)
    assert excinfo.value.code == "BASIS_TOO_LARGE"


def test_max_factors(scalar):
    basis = enumerate_basis(scalar.fields, 4, max_factors=2)
    assert max(len(op.factors) for op in basis) == 2


def test_basis_json(maxwell):
    basis = enumerate_basis(maxwell.dynamical_fields, 2)
    document = json.loads(basis.to_json())
    entries = {entry["name"]: entry for entry in document["operators"]}
    assert entries["1"] == {"name": "1", "factors": [], "dimension": "0/1", "ghost_number": 0}
    assert entries["A_2*c"]["factors"] == [
        {"field": "A", "indices": [2], "derivative": [0, 0, 0, 0]},
        {"field": "c", "indices": [], "derivative": [0, 0, 0, 0]},
    ]
    assert entries["A_2*c"]["ghost_number"] == 1
    assert entries["A_2*c"]["dimension"] == "2/1"
    assert entries["d3cbar"]["factors"] == [{"field": "cbar", "indices": [], "derivative": [0, 0, 1, 0]}]
    assert entries["d3cbar"]["ghost_number"] == -1
    restored = OperatorBasis.from_json(basis.to_json())
    assert restored.operators == basis.operators
    assert restored.d_max == 2
    assert restored.to_json() == basis.to_json()


def test_basis_json_fractional_dimensions():
    basis = enumerate_basis(dirac_theory().fields, 3)
    document = json.loads(basis.to_json())
    assert {entry["dimension"] for entry in document["operators"]} == {"0/1", "3/2", "5/2", "3/1"}
    assert OperatorBasis.from_dict(document).operators == basis.operators


def test_basis_json_rejects_inconsistent_entries(scalar):
    document = json.loads(enumerate_basis(scalar.fields, 2).to_json())
    document["operators"][1]["ghost_number"] = 1
    with pytest.raises(ValueError):
        OperatorBasis.from_dict(document)
    document["operators"][1]["ghost_number"] = 0
    document["operators"][1]["factors"][0]["field"] = "chi"
    with pytest.raises(UndeclaredFieldError):
        OperatorBasis.from_dict(document)
