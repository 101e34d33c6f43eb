"""
Tests for boundary extremal functions, constants and admissible tuples
"""

import sys
import os
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from admissibility import (AdmissibilityChecker, AdmissibilityTuple, log_ratio_criterion, n1, n2,
                           n3, n4, n5, n5_profile, nu_constants, r0_residual, solve_r0,
                           target_derivatives)
from domain_catalog import DomainKind
from errors import DegenerateS, InvalidMK, MissingU, SingularTheta
from series_core import GridSpec, PowerSeries

SINE = DomainKind.SINE
PETAL = DomainKind.PETAL


@pytest.fixture(scope="module")
def checker():
    return AdmissibilityChecker()


def canonical_tuple(checker, target, theta, m, re_part, **extra):
    """Tuple at q(zeta), m zeta q'(zeta) whose Re(1 + t/s) equals re_part"""
    r, s = checker.expected_tuple(target, theta, m)
    return AdmissibilityTuple(r, s, s * (re_part - 1), theta, m, **extra)


def test_sine_constants():
    profile = nu_constants(SINE)
    assert profile.nu0 == pytest.approx(0.540302, abs=1e-5)
    assert profile.nu1 == pytest.approx(-1.55741, abs=1e-4)
    assert profile.nu0 == pytest.approx(math.cos(1.0), abs=1e-15)
    assert profile.nu1 == pytest.approx(-math.tan(1.0), abs=1e-12)


def test_sine_minima_found_numerically_at_zero():
    profile = nu_constants(SINE)
    assert abs(profile.nu0_numeric - profile.nu0) < 1e-8
    assert abs(profile.nu1_numeric - profile.nu1) < 1e-8
    assert abs(profile.argmin_nu0) < 1e-6
    assert abs(profile.argmin_nu1) < 1e-6


def test_petal_constants():
    profile = nu_constants(PETAL)
    assert profile.nu0 == pytest.approx(1 / math.sqrt(2))
    assert profile.nu1 == -0.5
    assert abs(profile.nu0_numeric - profile.nu0) < 1e-8
    assert profile.theta_exclusions == [math.pi / 2, 3 * math.pi / 2]


def test_no_profile_for_other_targets():
    with pytest.raises(ValueError):
        nu_constants(DomainKind.CARDIOID)


def test_n5_profile_is_constant_away_from_singularities():
    thetas = np.linspace(0, 2 * np.pi, 10_000)
    thetas = thetas[np.abs(np.cos(thetas)) > 1e-2]
    assert np.max(np.abs(n5_profile(thetas) + 0.5)) < 1e-12
    assert n5(0.3) == -0.5
    assert np.all(n5(thetas) == -0.5)


def test_boundary_functions_match_target_derivatives():
    for theta in (0.2, 1.1, 2.5, 4.0):
        zeta = complex(math.cos(theta), math.sin(theta))
        _, q1, q2, _ = target_derivatives(SINE, zeta)
        assert float(n1(theta)) == pytest.approx(abs(q1), rel=1e-12)
        assert float(n2(theta)) == pytest.approx((zeta * q2 / q1).real, rel=1e-9, abs=1e-12)
        _, p1, _, _ = target_derivatives(PETAL, zeta)
        assert float(n4(theta)) == pytest.approx(abs(p1), rel=1e-9)


def test_n3_at_right_angle():
    assert float(n3(math.pi / 2)) == pytest.approx(1.0)


def test_n4_singular_on_imaginary_axis():
    with pytest.raises(SingularTheta):
        n4(math.pi / 2)
    with pytest.raises(SingularTheta):
        n4(np.array([0.0, 3 * math.pi / 2]))


def test_r0_root():
    r0 = solve_r0()
    assert r0 == pytest.approx(0.546302, abs=1e-5)
    assert r0_residual(r0) < 1e-12
    assert r0 == pytest.approx(math.tan(0.5), abs=1e-12)


def test_log_ratio_criterion_flips_at_r0():
    r0 = solve_r0()
    assert not log_ratio_criterion(r0 - 1e-3)
    assert log_ratio_criterion(r0 + 1e-3)


def test_second_order_admissibility_threshold(checker):
    theta = 0.7
    threshold = 2 * (1 + float(n2(theta)))
    assert checker.admissible_second_order(canonical_tuple(checker, SINE, theta, 2, threshold + 0.1), SINE)
    assert not checker.admissible_second_order(canonical_tuple(checker, SINE, theta, 2, threshold - 0.1),
                                               SINE)


def test_second_order_equality_is_admissible(checker):
    theta = 0.4
    tup = canonical_tuple(checker, PETAL, theta, 1, 1 + n5(theta))
    assert checker.admissible_second_order(tup, PETAL)


def test_strict_check_requires_canonical_pair(checker):
    tup = canonical_tuple(checker, SINE, 0.7, 1, 10.0)
    shifted = AdmissibilityTuple(tup.r + 0.5, tup.s, tup.t, tup.theta, tup.m)
    assert not checker.admissible_second_order(shifted, SINE)
    assert checker.admissible_second_order(shifted, SINE, strict=False)


def test_petal_tuple_at_excluded_angle(checker):
    with pytest.raises(SingularTheta):
        checker.expected_tuple(PETAL, math.pi / 2, 1)


def test_degenerate_s(checker):
    with pytest.raises(DegenerateS):
        checker.admissible_second_order(AdmissibilityTuple(1.0, 0.0, 1.0, 0.0), SINE, strict=False)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=0.0, max_value=2 * math.pi),
       st.floats(min_value=-5.0, max_value=5.0).filter(lambda x: x == 0 or abs(x) > 1e-9),
       st.floats(min_value=1e-3, max_value=1e3))
def test_scaling_s_and_t_keeps_verdict(theta, offset, factor):
    checker = AdmissibilityChecker()
    tup = canonical_tuple(checker, SINE, theta, 1, 1 + float(n2(theta)) + offset)
    before = checker.admissible_second_order(tup, SINE, strict=False)
    after = checker.admissible_second_order(tup.scaled(factor), SINE, strict=False)
    assert before == after


def test_third_order_example(checker):
    # m=2, k=5 at theta=pi/2: threshold 4 + 24 tanh(1)
    theta = math.pi / 2
    threshold = 4 + 24 * math.tanh(1.0)
    assert threshold == pytest.approx(22.278, abs=1e-3)
    base = canonical_tuple(checker, SINE, theta, 2, 2 * (1 + math.tanh(1.0)) + 0.1, k=5)
    low = AdmissibilityTuple(base.r, base.s, base.t, theta, 2, u=11 * base.s, k=5)
    high = AdmissibilityTuple(base.r, base.s, base.t, theta, 2, u=23 * base.s, k=5)
    assert not checker.admissible_third_order(low)
    assert checker.admissible_third_order(high)


def test_third_order_needs_u(checker):
    tup = canonical_tuple(checker, SINE, 0.5, 2, 5.0, k=2)
    with pytest.raises(MissingU):
        checker.admissible_third_order(tup)


def test_third_order_needs_valid_mk(checker):
    with pytest.raises(InvalidMK):
        AdmissibilityTuple(1.0, 1.0, 1.0, 0.0, m=3, k=2)
    tup = AdmissibilityTuple(1.0, 1.0, 1.0, 0.0, m=1, u=1.0, k=1)
    with pytest.raises(InvalidMK):
        checker.admissible_third_order(tup)


def test_derivative_bound(checker):
    grid = GridSpec(0.99, 8, 64)
    assert checker.derivative_bound_check(PowerSeries.from_coefficients([1, 0.1], 8), SINE, 1, grid)
    assert not checker.derivative_bound_check(PowerSeries.from_coefficients([1, 0.9], 8), SINE, 1, grid)


def test_sine_inequality_chain(checker):
    rng = np.random.default_rng(17)
    for beta1, beta2 in rng.uniform(1e-3, 10.0, size=(50, 2)):
        chain = checker.inequality_chain_check(beta1, beta2, SINE)
        assert chain.holds, (beta1, beta2, chain.minimum, chain.bound)


def test_petal_inequality_chain(checker):
    rng = np.random.default_rng(19)
    for beta1 in rng.uniform(1e-3, 10.0, size=50):
        # n4 is unbounded, so the chain needs 2 beta1 >= beta2
        beta2 = rng.uniform(1e-3, 2 * beta1)
        chain = checker.inequality_chain_check(beta1, beta2, PETAL)
        assert chain.holds, (beta1, beta2, chain.minimum, chain.bound)
        assert chain.bound == pytest.approx((2 * beta1 - beta2) / (2 * math.sqrt(2)))
