"""
Soundness harness: whenever a condition holds, no member of the built-in
family may satisfy the premise while escaping the target
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import pytest

from conditions import ConditionEvaluator, MKPair, TheoremId, all_theorems
from config import ToolkitConfig
from domain_catalog import DomainCatalog
from series_core import OperatorParams
from verifier import FamilyKind, FamilySpec, ImplicationVerifier

# (beta2, beta1 above the critical value); the first point sits on the threshold
OFFSETS = [(1.0, 1e-12), (0.25, 0.5), (0.5, 1.0), (2.0, 2.0), (4.0, 5.0)]
BETA3 = 0.5
MK = MKPair(2, 2)


@pytest.fixture(scope="module")
def harness():
    config = ToolkitConfig()
    evaluator = ConditionEvaluator(config)
    verifier = ImplicationVerifier(config)
    verifier.set_managers(DomainCatalog(config), evaluator)
    return evaluator, verifier


def parameter_points(evaluator: ConditionEvaluator, theorem: TheoremId):
    beta3 = BETA3 if theorem.order == 3 else None
    for beta2, offset in OFFSETS:
        beta1 = evaluator.critical_beta1(theorem, beta2, beta3, MK) + offset
        yield OperatorParams(beta1, beta2, beta3)


@pytest.mark.parametrize("theorem", all_theorems(), ids=lambda t: t.label)
def test_conditions_are_sound_on_builtin_family(theorem, harness):
    evaluator, verifier = harness
    family = FamilySpec(FamilyKind.BUILTIN)
    for params in parameter_points(evaluator, theorem):
        report = verifier.implication_test(theorem, params, MK, family)
        assert report.condition_report.holds, params
        assert report.family_size == 202
        # the steepest linear members leave the target, so their premises must fail
        assert report.premise_true_count < report.family_size
        assert report.sound, [v.to_dict() for v in report.implication_violations]


def test_threshold_point_has_zero_margin(harness):
    evaluator, _ = harness
    for theorem in all_theorems():
        params = next(parameter_points(evaluator, theorem))
        margin = evaluator.evaluate(theorem, params, MK).margin
        assert 0 <= margin < 1e-9
