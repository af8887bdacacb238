# -*- coding=utf-8 -*-
import numpy as np

from hypothesis import strategies as st

from opeflow.operators import AXES, Factor, MultiIndex, canonicalize
from opeflow.theories import scalar_theory

PHI = scalar_theory().field("phi")


def multi_indices(max_order=3):
    """Strategy for derivative multi-indices of bounded total order."""
    return (
        st.lists(st.integers(min_value=0, max_value=max_order), min_size=AXES, max_size=AXES)
        .filter(lambda comps: sum(comps) <= max_order)
        .map(MultiIndex)
    )


def four_vectors(min_norm=0.2, max_norm=3.0):
    """Strategy for 4-vectors with norm in ``[min_norm, max_norm]``."""
    component = st.floats(
        min_value=-max_norm, max_value=max_norm, allow_nan=False, allow_infinity=False
    )
    return (
        st.lists(component, min_size=AXES, max_size=AXES)
        .map(np.array)
        .filter(lambda x: min_norm <= np.linalg.norm(x) <= max_norm)
    )


def point_configurations(n_points, min_separation=0.3, max_norm=2.0):
    """Strategy for ``n_points`` pairwise separated 4-vectors."""

    def separated(points):
        return all(
            np.linalg.norm(points[i] - points[j]) >= min_separation
            for i in range(len(points))
            for j in range(i)
        )

    return st.lists(
        four_vectors(min_norm=0.0, max_norm=max_norm), min_size=n_points, max_size=n_points
    ).filter(separated)


def momenta(min_size=1, max_size=4, max_norm=10.0):
    component = st.floats(
        min_value=-max_norm, max_value=max_norm, allow_nan=False, allow_infinity=False
    )
    return st.lists(
        st.lists(component, min_size=AXES, max_size=AXES).map(np.array),
        min_size=min_size,
        max_size=max_size,
    )


@st.composite
def scalar_monomials(draw, max_dimension=4):
    """Strategy for canonical scalar monomials of dimension at most ``max_dimension``."""
    factors = []
    budget = max_dimension
    count = draw(st.integers(min_value=0, max_value=max_dimension))
    for _ in range(count):
        if budget < 1:
            break
        derivative = draw(multi_indices(max_order=budget - 1))
        factors.append(Factor(PHI, (), derivative))
        budget -= 1 + derivative.order
    op, _ = canonicalize(factors)
    return op


@st.composite
def weighted_trees(draw, special=None, max_derivative=2):
    """Strategy for random weighted trees, drawn through a seeded generator."""
    from opeflow.trees import random_tree

    if special is None:
        special = draw(st.booleans())
    seed = draw(st.integers(min_value=0, max_value=2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    return random_tree(rng, special=special, max_external=6, max_internal=5, max_derivative=max_derivative)
