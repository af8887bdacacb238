# -*- coding=utf-8 -*-
import math

import networkx as nx
import numpy as np
import pytest

from opeflow.lemmas import (
    LEMMAS,
    LemmaReport,
    check_amputation,
    check_gs_properties,
    check_lambda_integrals,
    check_line_join,
    check_p_integrals,
    check_reduction,
    check_special_merge,
    check_t_irr_ineq2,
    check_t_irr_ineq2_below_scale,
    check_t_rel_ineq1,
    check_t_rel_ineq3,
    check_tree_scaling,
    check_xi_scaling,
    run_lemma_suite,
    t_irr_ineq2_excess,
)
from opeflow.trees import WeightedTree, external, internal


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.mark.parametrize(
    "check",
    [
        check_reduction,
        check_tree_scaling,
        check_special_merge,
        check_line_join,
        check_amputation,
        check_t_irr_ineq2,
        check_t_rel_ineq1,
        check_t_rel_ineq3,
        check_xi_scaling,
    ],
)
def test_tree_inequalities_hold(rng, check):
    report = check(rng, 300)
    assert report.samples == 300
    assert report.violations == 0, report
    assert report.passed


def test_gs_properties():
    reports = check_gs_properties(max_dimension=4, max_r=6, max_w=4, max_s=3)
    names = [report.name for report in reports]
    assert names == ["gs_prop_1", "gs_prop_1a", "gs_prop_2", "gs_prop_2a", "gs_prop_3"]
    for report in reports:
        assert report.samples > 0
        assert report.passed, report


def test_t_irr_ineq2_fails_below_the_momentum_scale():
    graph = nx.Graph([(external(0), internal(0)), (internal(0), external(1))])
    tree = WeightedTree(graph, [3, 2])
    q = np.array([[100.0, 0.0, 0.0, 0.0], [-100.0, 0.0, 0.0, 0.0]])
    # mu < lam < lam_high < |q|
    assert t_irr_ineq2_excess(tree, q, 1.0, 2.0, 10.0, 1.0) > 0
    # above the momentum scale the bound holds
    assert t_irr_ineq2_excess(tree, q, 1.0, 200.0, 1000.0, 1.0) <= 1e-12


def test_t_irr_ineq2_below_the_momentum_scale_is_reported(rng):
    report = check_t_irr_ineq2_below_scale(rng, 300)
    assert report.name == "t_irr_ineq2_below_scale"
    assert report.samples == 300
    assert report.diagnostic
    assert report.passed
    assert 0 <= report.violations <= report.samples


def test_suite_reports_both_regions_of_t_irr_ineq2():
    reports = run_lemma_suite(["t_irr_ineq2"], samples=100, seed=1)
    assert [r.name for r in reports] == ["t_irr_ineq2", "t_irr_ineq2_below_scale"]
    assert reports[0].violations == 0
    assert not reports[0].diagnostic
    assert reports[1].diagnostic
    assert all(r.passed for r in reports)


def test_lambda_integrals_have_finite_constants(rng):
    reports = check_lambda_integrals(rng, 20)
    assert [r.name for r in reports] == ["lambdaint", "lambdaint2", "lambdaint3"]
    for report in reports:
        assert report.samples == 20
        assert report.passed
        assert 0 < report.constant < math.inf


def test_p_integrals_have_finite_constants(rng):
    reports = check_p_integrals(rng, 10, draws=2000)
    assert [r.name for r in reports] == ["pint", "pint2"]
    for report in reports:
        assert report.passed
        assert math.isfinite(report.constant)


def test_report_serialisation():
    report = LemmaReport("demo", 10, 1, 1.5)
    payload = report.as_dict()
    assert payload["passed"] is False
    assert payload["samples"] == 10
    assert LemmaReport("demo", 10, 0, 0.5, constant=math.inf).passed is False
    diagnostic = LemmaReport("demo", 10, 3, 5.0, diagnostic=True)
    assert diagnostic.passed
    assert diagnostic.as_dict()["diagnostic"] is True


def test_suite_selection():
    reports = run_lemma_suite(["reduction", "xi_scaling"], samples=50, seed=3)
    assert [r.name for r in reports] == ["reduction", "xi_scaling"]
    again = run_lemma_suite(["reduction", "xi_scaling"], samples=50, seed=3)
    assert [r.worst_ratio for r in reports] == [r.worst_ratio for r in again]
    with pytest.raises(KeyError):
        run_lemma_suite(["nonsense"])
    assert "gs" in LEMMAS
