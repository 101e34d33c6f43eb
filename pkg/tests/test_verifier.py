"""
Tests for grid subordination checks and implication testing
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import json
import logging

import numpy as np
import pytest

from conditions import ConditionEvaluator, TheoremId, all_theorems
from config import ToolkitConfig
from domain_catalog import DomainCatalog, DomainKind, OUTSIDE, TargetDomain, all_domains, generate
from errors import NotNormalized
from series_core import GridSpec, OperatorParams, PowerSeries
from verifier import FamilyKind, FamilySpec, ImplicationVerifier, build_family

SINE = TargetDomain(DomainKind.SINE)
PETAL = TargetDomain(DomainKind.PETAL)
SMALL_GRID = GridSpec(0.99, 16, 128)


def make_verifier(config=None):
    config = config or ToolkitConfig()
    verifier = ImplicationVerifier(config)
    verifier.set_managers(DomainCatalog(config), ConditionEvaluator(config))
    return verifier


@pytest.fixture(scope="module")
def verifier():
    return make_verifier()


def test_builtin_family_size(verifier):
    members = build_family(FamilySpec(FamilyKind.BUILTIN), SINE, verifier.catalog)
    assert len(members) == 202
    assert [m.index for m in members] == list(range(202))
    assert all(m.series[0] == 1 for m in members)


@pytest.mark.parametrize("name,size", [("linear", 101), ("quadratic", 81), ("scaled-target", 20),
                                       ("starlike", 20), ("constant", 1)])
def test_named_family_sizes(name, size, verifier):
    assert len(build_family(FamilySpec.named(name), PETAL, verifier.catalog)) == size


def test_starlike_family_is_seeded(verifier):
    first = build_family(FamilySpec.named("starlike", seed=3), SINE, verifier.catalog)
    second = build_family(FamilySpec.named("starlike", seed=3), SINE, verifier.catalog)
    assert all(np.array_equal(a.series.coeffs, b.series.coeffs) for a, b in zip(first, second))


def test_constant_function_is_subordinate(verifier):
    for domain in (SINE, PETAL):
        verdict = verifier.subordination_check(PowerSeries.constant(1.0), domain, SMALL_GRID)
        assert verdict.holds
        assert verdict.witness is None
        assert verdict.checked_points == SMALL_GRID.size


def test_small_linear_function_is_subordinate(verifier):
    assert verifier.subordination_check(PowerSeries.from_coefficients([1, 0.5], 8), SINE).holds


def test_steep_function_has_witness(verifier):
    verdict = verifier.subordination_check(PowerSeries.from_coefficients([1, 2.0], 8), SINE,
                                           SMALL_GRID)
    assert not verdict.holds
    assert abs(verdict.witness) <= 0.99 + 1e-12
    codes, _ = verifier.catalog.classify(SINE, verdict.witness_image)
    assert codes[0] == OUTSIDE


def test_failure_survives_refinement(verifier):
    p = PowerSeries.from_coefficients([1, 1.2], 8)
    assert not verifier.subordination_check(p, SINE, SMALL_GRID).holds
    assert not verifier.subordination_check(p, SINE, SMALL_GRID.refined(2)).holds


def test_subordination_needs_p_at_origin_one(verifier):
    with pytest.raises(NotNormalized):
        verifier.subordination_check(PowerSeries.from_coefficients([2, 0.1], 8), SINE)


def test_operator_image_check(verifier):
    p = PowerSeries.from_coefficients([1, 0.1], 8)
    assert verifier.operator_image_check(p, OperatorParams(1.0, 0.0), SINE, SMALL_GRID).holds
    assert not verifier.operator_image_check(p, OperatorParams(30.0, 0.0), SINE, SMALL_GRID).holds
    with pytest.raises(ValueError):
        verifier.operator_image_check(p, OperatorParams(1.0, 0.0), SINE, SMALL_GRID, order=4)


def test_sine_lemniscate_linear_family(verifier):
    theorem = TheoremId.of("sine", 2, "lemniscate")
    c_values = tuple(round(c, 12) for c in np.linspace(-0.2, 0.2, 41))
    family = FamilySpec(FamilyKind.LINEAR, c_values=c_values)
    report = verifier.implication_test(theorem, OperatorParams(5.0, 0.1), family=family)
    assert report.condition_report.holds
    assert report.family_size == 41
    assert report.premise_true_count > 0
    assert report.implication_violations == []
    assert report.sound


def test_petal_crescent_quadratic_family(verifier):
    theorem = TheoremId.of("petal", 2, "crescent")
    report = verifier.implication_test(theorem, OperatorParams(2.5, 1.0),
                                       family=FamilySpec.named("quadratic"))
    assert report.condition_report.margin == 0.0
    assert report.family_size == 81
    assert report.sound


@pytest.mark.parametrize("theorem", all_theorems(), ids=lambda t: t.label)
def test_constant_family_premise_and_conclusion_hold(theorem, verifier):
    params = OperatorParams(1.0, 1.0, 1.0 if theorem.order == 3 else None)
    report = verifier.implication_test(theorem, params, family=FamilySpec.named("constant"),
                                       grid=SMALL_GRID)
    assert report.family_size == 1
    assert report.premise_true_count == 1
    assert report.sound


def test_report_is_reproducible(verifier):
    theorem = TheoremId.of("sine", 3, "exponential")
    params = OperatorParams(8.0, 0.5, 0.1)
    first = verifier.implication_test(theorem, params, family=FamilySpec.named("quadratic"),
                                      grid=SMALL_GRID).to_dict()
    second = make_verifier().implication_test(theorem, params, family=FamilySpec.named("quadratic"),
                                              grid=SMALL_GRID).to_dict()
    assert first == second


def test_workers_aggregate_in_family_order():
    theorem = TheoremId.of("petal", 2, "sine")
    params = OperatorParams(0.5, 0.2)
    family = FamilySpec.named("linear")
    serial = make_verifier().implication_test(theorem, params, family=family, grid=SMALL_GRID)
    threaded = make_verifier(ToolkitConfig(workers=4)).implication_test(
        theorem, params, family=family, grid=SMALL_GRID)
    assert serial.to_dict() == threaded.to_dict()


def test_counterexample_search_on_holding_condition_warns(verifier, caplog):
    theorem = TheoremId.of("sine", 2, "cardioid")
    with caplog.at_level(logging.WARNING, logger="verifier"):
        findings = verifier.counterexample_search(theorem, OperatorParams(20.0, 0.1),
                                                  FamilySpec.named("linear"), SMALL_GRID)
    assert findings == []
    assert "condition holds" in caplog.text


def test_counterexample_search_with_steep_family(verifier):
    theorem = TheoremId.of("sine", 2, "exponential")
    steep = FamilySpec(FamilyKind.LINEAR, c_values=(0.9, 1.5, 3.0))
    findings = verifier.counterexample_search(theorem, OperatorParams(0.05, 0.0), steep, SMALL_GRID)
    assert [f.index for f in findings] == [0, 1, 2]
    assert [f.label for f in findings] == ["1+(0.9)z", "1+(1.5)z", "1+(3)z"]
    for f in findings:
        assert abs(f.witness) <= 0.99 + 1e-12


def test_builtin_family_reaches_outside_the_targets(verifier):
    for target in (SINE, PETAL):
        members = build_family(FamilySpec(FamilyKind.BUILTIN), target, verifier.catalog)
        escaping = [m.label for m in members
                    if not verifier.subordination_check(m.series, target, SMALL_GRID).holds]
        assert len(escaping) >= 40
        assert "1+(1.5)z" in escaping and "1+(-1.5)z" in escaping


def test_failing_condition_exposes_violations(verifier):
    theorem = TheoremId.of("petal", 2, "sine")
    params = OperatorParams(0.5, 0.2)
    report = verifier.implication_test(theorem, params, family=FamilySpec.named("linear"),
                                       grid=SMALL_GRID)
    assert not report.condition_report.holds
    assert not report.sound
    assert "1+(1.5)z" in [v.label for v in report.implication_violations]


@pytest.mark.parametrize("domain", all_domains(), ids=lambda d: d.kind.value)
def test_target_series_is_subordinate_to_its_domain(domain, verifier):
    q = verifier.catalog.taylor_series(domain, verifier.config.target_series_order)
    verdict = verifier.subordination_check(q, domain)
    assert verdict.holds, verdict.to_dict()


def test_crescent_order_24_truncation_leaves_the_lune(verifier):
    crescent = TargetDomain(DomainKind.CRESCENT)
    verdict = verifier.subordination_check(verifier.catalog.taylor_series(crescent, 24), crescent)
    assert not verdict.holds
    # sqrt(1 + z^2) is singular at z = +-i
    assert abs(verdict.witness.imag) > 0.95
    assert verifier.catalog.contains(crescent, generate(crescent, verdict.witness)).inside


def test_export_report(verifier, tmp_path):
    theorem = TheoremId.of("sine", 2, "sine")
    report = verifier.implication_test(theorem, OperatorParams(5.0, 1.0),
                                       family=FamilySpec.named("constant"), grid=SMALL_GRID)
    path = verifier.export_report(report, str(tmp_path / "report.json"))
    with open(path) as f:
        data = json.load(f)
    assert data['family_size'] == 1
    assert data['implication_violations'] == []
    assert data['theorem']['h'] == {'kind': 'sine'}
