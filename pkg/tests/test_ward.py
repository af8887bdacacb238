# -*- coding=utf-8 -*-
import itertools
import math

import numpy as np
import pytest

from opeflow.brst import classical_antibracket, free_q_matrix
from opeflow.exceptions import DomainViolationError, SingularPointError
from opeflow.operators import UNIT, MultiIndex, enumerate_basis
from opeflow.recursion import FreeCoefficients
from opeflow.ward import (
    apply_free_brst,
    evaluate_K,
    koszul_sign,
    smeared_K,
    ward_expression,
)
from opeflow.wick import free_ope_coefficient, free_ope_combination, target_operators

X = np.array([0.7, -0.2, 0.4, 0.1])
ORIGIN = np.zeros(4)


def _op(theory, text):
    return theory.parse(text).items()[0][0]


def _strength(theory, mu, nu):
    return theory.parse("d{0}A_{1}".format(mu, nu)) - theory.parse("d{0}A_{1}".format(nu, mu))


def test_brst_is_reexported(maxwell):
    assert apply_free_brst(maxwell, _strength(maxwell, 1, 2)).is_zero
    assert apply_free_brst(maxwell, _op(maxwell, "d1A_2")) == maxwell.parse("d1d2c")


def test_koszul_sign(maxwell):
    c, A = _op(maxwell, "c"), _op(maxwell, "A_1")
    operators = [c, A, c, A]
    assert [koszul_sign(operators, k) for k in range(4)] == [1, -1, -1, 1]


def test_gauge_invariant_operators_with_empty_preimage(maxwell):
    F = _strength(maxwell, 1, 2)
    functional = ward_expression(UNIT, [F, F], 1, maxwell)
    assert functional.is_zero
    assert functional.contact == ()


def test_field_strength_coefficients_are_antisymmetric(maxwell):
    F = _strength(maxwell, 1, 2)
    square = F * F
    d1A2, d2A1 = _op(maxwell, "d1A_2"), _op(maxwell, "d2A_1")
    first = free_ope_combination([F, square], d1A2, theory=maxwell)
    second = free_ope_combination([F, square], d2A1, theory=maxwell)
    assert not first.is_zero
    assert (first + second).is_zero
    functional = ward_expression(_op(maxwell, "d1d2c"), [F, square], 3, maxwell)
    assert functional.is_zero


def test_single_contractions_cancel(maxwell):
    A, cbar = _op(maxwell, "A_1"), _op(maxwell, "cbar")
    ghost = free_ope_coefficient([_op(maxwell, "d1c"), cbar], UNIT, theory=maxwell)
    auxiliary = free_ope_coefficient([A, _op(maxwell, "B")], UNIT, theory=maxwell)
    assert not ghost.is_zero
    assert (ghost + auxiliary).is_zero
    functional = ward_expression(UNIT, [A, cbar], 1, maxwell)
    assert functional.is_zero
    assert evaluate_K(UNIT, [A, cbar], 1, np.array([X, ORIGIN]), maxwell) == 0.0


def test_ward_identity_on_random_draws(maxwell):
    rng = np.random.default_rng(7)
    operators = [op for op in enumerate_basis(maxwell.fields, 2, max_factors=2)]
    targets = [op for op in enumerate_basis(maxwell.fields, 3, max_factors=2)]
    q = free_q_matrix(maxwell, enumerate_basis(maxwell.fields, 3, max_factors=2))
    nontrivial = 0
    for _ in range(100):
        A = [operators[i] for i in rng.integers(len(operators), size=2)]
        B = targets[rng.integers(len(targets))]
        points = np.array([rng.normal(size=4), ORIGIN])
        functional = ward_expression(B, A, B.dimension, maxwell)
        assert functional.is_zero, (A, B)
        assert abs(functional(points)) < 1e-10
        # the same identity from an explicit Q matrix
        assert ward_expression(B, A, B.dimension, maxwell, q=q).is_zero, (A, B)
        if any(not apply_free_brst(maxwell, a).is_zero for a in A):
            nontrivial += 1
    assert nontrivial > 0


def test_ward_domain_and_points(maxwell):
    B = _op(maxwell, "d1d2c")
    with pytest.raises(DomainViolationError):
        ward_expression(B, [_op(maxwell, "A_1"), _op(maxwell, "A_2")], 2, maxwell)
    with pytest.raises(SingularPointError):
        evaluate_K(UNIT, [_op(maxwell, "A_1"), _op(maxwell, "cbar")], 1, np.array([X, X]), maxwell)


def test_free_theory_has_no_contact_terms(maxwell):
    functional = ward_expression(UNIT, [_op(maxwell, "A_1"), _op(maxwell, "cbar")], 1, maxwell)
    assert smeared_K(functional, np.array([X, ORIGIN])) == 0.0


def test_contact_terms_pair_with_the_test_function(maxwell_bv):
    field, anti = _op(maxwell_bv, "A_1"), _op(maxwell_bv, "anti_A_1")
    antibracket = classical_antibracket(maxwell_bv, field, anti)
    functional = ward_expression(
        UNIT, [field, anti], 1, maxwell_bv, q=free_q_matrix(maxwell_bv, []), antibracket=antibracket
    )
    assert len(functional.contact) == 1
    term = functional.contact[0]
    assert (term.k, term.l, term.operator, term.sign) == (0, 1, UNIT, 1)
    points = np.array([X, ORIGIN])
    width = 0.5
    # the contact line enters with -hbar
    expected = -math.exp(-float(X.dot(X)) / (2 * width ** 2))
    assert smeared_K(functional, points, width=width) == pytest.approx(expected)
    assert smeared_K(functional, points, width=width, hbar=2.0) == pytest.approx(2 * expected)
    # the contact line carries an explicit hbar
    assert smeared_K(functional, points, width=width, hbar=0.0) == 0.0
    with pytest.raises(ValueError):
        smeared_K(functional, points, width=0)
    assert functional.as_dict()["contact"][0]["operator"] == "1"


def test_contact_sign_picks_up_odd_operators_in_between(maxwell_bv):
    field, ghost, anti = (_op(maxwell_bv, name) for name in ("A_1", "c", "anti_A_1"))
    antibracket = classical_antibracket(maxwell_bv, field, anti)
    functional = ward_expression(
        ghost,
        [field, ghost, anti],
        2,
        maxwell_bv,
        q=free_q_matrix(maxwell_bv, []),
        antibracket=antibracket,
    )
    assert functional.is_zero
    (term,) = functional.contact
    # anti_A_1 is odd and has to pass the ghost
    assert (term.k, term.l, term.operator, term.sign) == (0, 2, UNIT, -1)
    Y = np.array([0.1, 0.3, -0.2, 0.5])
    width = 0.5
    points = np.array([X, ORIGIN, Y])
    # C^c_{1 c} = 1, so only the smeared delta function remains
    expected = math.exp(-float((X - Y).dot(X - Y)) / (2 * width ** 2))
    assert smeared_K(functional, points, width=width) == pytest.approx(expected)


def test_contact_terms_with_derivatives(maxwell_bv):
    field, anti = _op(maxwell_bv, "d1A_1"), _op(maxwell_bv, "anti_A_1")
    antibracket = classical_antibracket(maxwell_bv, field, anti)
    functional = ward_expression(
        UNIT, [field, anti], 1, maxwell_bv, q=free_q_matrix(maxwell_bv, []), antibracket=antibracket
    )
    (term,) = functional.contact
    assert term.derivative == MultiIndex.unit(0)
    assert (term.operator, term.value, term.sign) == (UNIT, 1, 1)
    width = 0.5
    # -d_1 exp(-|x|^2 / (2 width^2)) at x = X
    expected = X[0] / width ** 2 * math.exp(-float(X.dot(X)) / (2 * width ** 2))
    assert smeared_K(functional, np.array([X, ORIGIN]), width=width) == pytest.approx(expected)


def _ward_targets(theory, q, A, d_max):
    """Every ``B`` with ``[B] <= d_max`` for which some term of ``K^B`` can be nonzero."""
    found = set()
    for k, op in enumerate(A):
        for image in q.row(op):
            replaced = list(A)
            replaced[k] = image
            found.update(target_operators(replaced, theory, d_max))
    for C in target_operators(A, theory, d_max):
        found.update(q.row(C))
    return sorted((B for B in found if B.dimension <= d_max), key=lambda op: op.sort_key)


@pytest.mark.slow
@pytest.mark.timeout(1800)
def test_ward_identity_on_the_full_sector(maxwell):
    d_max = 3
    basis = enumerate_basis(maxwell.fields, d_max)
    assert max(len(op.factors) for op in basis) == 3
    q = free_q_matrix(maxwell, basis)
    source = FreeCoefficients(maxwell)
    operators = [op for op in basis if op != UNIT]
    products = [(op,) for op in operators] + [
        pair
        for pair in itertools.product(operators, repeat=2)
        if pair[0].dimension + pair[1].dimension <= d_max + 1
    ]
    assert any(len(a.factors) == 3 for pair in products if len(pair) == 2 for a in pair)
    checked = 0
    for A in products:
        for B in _ward_targets(maxwell, q, A, d_max):
            functional = ward_expression(B, A, B.dimension, maxwell, q=q, source=source)
            assert functional.is_zero, (A, B)
            checked += 1
    assert checked > len(products)
