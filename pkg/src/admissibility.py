"""
Admissibility Profiles
Boundary extremal functions, the constants nu0, nu1, r0 and admissible-tuple checks
for the targets 1 + sin z and 1 + arcsinh z
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from config import DEFAULT_CONFIG, ToolkitConfig
from domain_catalog import DomainKind
from errors import DegenerateS, InvalidMK, MissingU, SingularTheta
from series_core import GridSpec, PowerSeries, euler_derivative, evaluate

logger = logging.getLogger(__name__)

ADMISSIBLE_TARGETS = (DomainKind.SINE, DomainKind.PETAL)
SINGULAR_COS_TOLERANCE = 1e-9
# Relative slack for the equality case of the real-part inequalities
EQUALITY_SLACK = 1e-12


def _as_target(target) -> DomainKind:
    if not isinstance(target, DomainKind):
        target = DomainKind(str(target).lower())
    if target not in ADMISSIBLE_TARGETS:
        raise ValueError(f"No admissibility profile for target {target.value}")
    return target


def n1(theta):
    """|cos(e^{i theta})|, the modulus of q' on the boundary for 1 + sin z"""
    theta = np.asarray(theta, dtype=float)
    return np.sqrt(np.cosh(np.sin(theta)) ** 2 - np.sin(np.cos(theta)) ** 2)


def n2(theta):
    """Re(zeta q''/q') for 1 + sin z"""
    theta = np.asarray(theta, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return (-c * np.sin(2 * c) + s * np.sinh(2 * s)) / (np.cos(2 * c) + np.cosh(2 * s))


def n3(theta):
    theta = np.asarray(theta, dtype=float)
    return -np.cos(2 * theta)


def n4(theta, tolerance: float = SINGULAR_COS_TOLERANCE):
    """|q'| on the boundary for 1 + arcsinh z; uses |cos theta|"""
    theta = np.asarray(theta, dtype=float)
    cos_abs = np.abs(np.cos(theta))
    if np.any(cos_abs < tolerance):
        raise SingularTheta(f"n4 is singular where |cos theta| < {tolerance}")
    return 1.0 / (math.sqrt(2.0) * np.sqrt(cos_abs))


def n5(theta):
    """Re(zeta q''/q') for 1 + arcsinh z, constant -1/2"""
    return np.full(np.shape(theta), -0.5) if np.ndim(theta) else -0.5


def n5_profile(theta):
    """Re(-e^{2i theta}/(1 + e^{2i theta})) evaluated directly"""
    square = np.exp(2j * np.asarray(theta, dtype=float))
    return np.real(-square / (1 + square))


def target_derivatives(target, zeta) -> Tuple[complex, complex, complex, complex]:
    """q, q', q'', q''' at zeta"""
    target = _as_target(target)
    zeta = complex(zeta)
    if target is DomainKind.SINE:
        return 1 + np.sin(zeta), np.cos(zeta), -np.sin(zeta), -np.cos(zeta)
    root = np.sqrt(1 + zeta * zeta)
    if abs(root) < SINGULAR_COS_TOLERANCE:
        raise SingularTheta(f"q' of 1 + arcsinh z is singular at {zeta}")
    first = 1 / root
    second = -zeta / root ** 3
    third = (2 * zeta * zeta - 1) / root ** 5
    return 1 + np.arcsinh(zeta), first, second, third


@dataclass
class AdmissibilityProfile:
    """Extremal constants of a target's boundary functions"""
    target: DomainKind
    nu0: float
    nu1: float
    theta_exclusions: List[float] = field(default_factory=list)
    nu0_numeric: Optional[float] = None
    nu1_numeric: Optional[float] = None
    argmin_nu0: Optional[float] = None
    argmin_nu1: Optional[float] = None

    def to_dict(self) -> Dict:
        return {
            'target': self.target.value,
            'nu0': self.nu0,
            'nu1': self.nu1,
            'theta_exclusions': list(self.theta_exclusions),
            'nu0_numeric': self.nu0_numeric,
            'nu1_numeric': self.nu1_numeric,
            'argmin_nu0': self.argmin_nu0,
            'argmin_nu1': self.argmin_nu1,
        }


def minimize_on_grid(func: Callable, thetas: np.ndarray) -> Tuple[float, float]:
    """Grid minimum followed by bounded golden-section refinement around it"""
    values = func(thetas)
    index = int(np.argmin(values))
    best_theta, best_value = float(thetas[index]), float(values[index])
    step = float(np.max(np.diff(thetas))) if len(thetas) > 1 else 1e-3
    low = float(thetas[index - 1]) if index > 0 else best_theta - step
    high = float(thetas[index + 1]) if index + 1 < len(thetas) else best_theta + step
    try:
        refined = minimize_scalar(lambda t: float(func(np.array([t]))[0]),
                                  bounds=(low, high), method='bounded',
                                  options={'xatol': 1e-12})
    except SingularTheta:
        return best_value, best_theta
    if refined.success and refined.fun < best_value:
        return float(refined.fun), float(refined.x)
    return best_value, best_theta


def periodic_grid(period: float, samples: int) -> np.ndarray:
    """Uniform samples of [-period/2, period/2)"""
    return period * (np.arange(samples) / samples - 0.5)


@lru_cache(maxsize=None)
def nu_constants(target, samples: int = DEFAULT_CONFIG.minimization_samples) -> AdmissibilityProfile:
    """Closed-form nu0, nu1 with a numeric minimization cross-check"""
    target = _as_target(target)
    if target is DomainKind.SINE:
        nu0 = math.sqrt(1 - math.sin(1.0) ** 2)
        nu1 = -math.sin(2.0) / (1 + math.cos(2.0))
        # n1 and n2 have period pi
        thetas = periodic_grid(math.pi, samples)
        nu0_numeric, argmin0 = minimize_on_grid(n1, thetas)
        nu1_numeric, argmin1 = minimize_on_grid(n2, thetas)
        exclusions: List[float] = []
    else:
        nu0 = 1 / math.sqrt(2.0)
        nu1 = -0.5
        thetas = periodic_grid(math.pi, samples)
        thetas = thetas[np.abs(np.cos(thetas)) >= 1e-6]
        nu0_numeric, argmin0 = minimize_on_grid(n4, thetas)
        nu1_numeric = float(np.min(n5_profile(thetas)))
        argmin1 = 0.0
        exclusions = [math.pi / 2, 3 * math.pi / 2]
    if abs(nu0 - nu0_numeric) > 1e-8 or abs(nu1 - nu1_numeric) > 1e-8:
        logger.error("Numeric minima (%r, %r) disagree with closed forms (%r, %r) for %s",
                     nu0_numeric, nu1_numeric, nu0, nu1, target.value)
    logger.debug("Constants for %s: nu0=%.12f nu1=%.12f", target.value, nu0, nu1)
    return AdmissibilityProfile(target, nu0, nu1, exclusions,
                                nu0_numeric, nu1_numeric, argmin0, argmin1)


def solve_r0() -> float:
    """Positive root of r^2 + 2 cot(1) r - 1 = 0"""
    cot1 = 1 / math.tan(1.0)
    return brentq(lambda r: r * r + 2 * cot1 * r - 1, 0.0, 1.0, xtol=1e-15, rtol=1e-15)


def r0_residual(r: float) -> float:
    return abs(r * r + 2 * r / math.tan(1.0) - 1)


def log_ratio_criterion(radius: float, samples: int = DEFAULT_CONFIG.boundary_samples) -> bool:
    """min over |z| = radius of |log((1+z)/(1-z))| >= 1"""
    z = radius * np.exp(2j * np.pi * (np.arange(samples) / samples))
    return bool(np.min(np.abs(np.log((1 + z) / (1 - z)))) >= 1.0)


@dataclass
class AdmissibilityTuple:
    """Boundary tuple (r, s, t, u) at angle theta"""
    r: complex
    s: complex
    t: complex
    theta: float
    m: int = 1
    u: Optional[complex] = None
    k: Optional[int] = None

    def __post_init__(self):
        if self.m < 1:
            raise InvalidMK(f"m must be at least 1, got {self.m}")
        if self.k is not None and self.k < self.m:
            raise InvalidMK(f"k must be at least m, got m={self.m}, k={self.k}")

    def scaled(self, factor: float) -> 'AdmissibilityTuple':
        """Multiply s, t and u by a positive real"""
        u = None if self.u is None else factor * self.u
        return AdmissibilityTuple(self.r, factor * self.s, factor * self.t,
                                  self.theta, self.m, u, self.k)


@dataclass
class ChainCheck:
    """Minimum of the boundary expression against its closed-form lower bound"""
    target: DomainKind
    beta1: float
    beta2: float
    minimum: float
    bound: float
    holds: bool


class AdmissibilityChecker:
    """Tuple checks for second- and third-order admissibility"""

    def __init__(self, config: ToolkitConfig = DEFAULT_CONFIG):
        self.config = config

    def profile(self, target) -> AdmissibilityProfile:
        return nu_constants(_as_target(target), self.config.minimization_samples)

    def expected_tuple(self, target, theta: float, m: int) -> Tuple[complex, complex]:
        """Canonical (r, s) = (q(zeta), m zeta q'(zeta))"""
        target = _as_target(target)
        if target is DomainKind.PETAL and abs(math.cos(theta)) < self.config.singular_cos_tolerance:
            raise SingularTheta(f"theta={theta} is excluded for the petal target")
        zeta = complex(math.cos(theta), math.sin(theta))
        q, q1, _, _ = target_derivatives(target, zeta)
        return complex(q), complex(m * zeta * q1)

    def _matches(self, tup: AdmissibilityTuple, target) -> bool:
        r, s = self.expected_tuple(target, tup.theta, tup.m)
        tolerance = self.config.tuple_match_tolerance
        if abs(tup.r - r) > tolerance or abs(tup.s - s) > tolerance:
            logger.debug("Tuple at theta=%s does not match q(zeta), m zeta q'(zeta)", tup.theta)
            return False
        return True

    def _check_s(self, tup: AdmissibilityTuple):
        if abs(tup.s) < self.config.degenerate_s_tolerance:
            raise DegenerateS(f"|s| = {abs(tup.s):.3e} is below the degeneracy tolerance")

    @staticmethod
    def _at_least(lhs: float, rhs: float) -> bool:
        return lhs >= rhs - EQUALITY_SLACK * max(1.0, abs(rhs))

    def admissible_second_order(self, tup: AdmissibilityTuple, target,
                                strict: bool = True) -> bool:
        """Re(1 + t/s) >= m(1 + n(theta)) with n2 (sine) or n5 (petal)"""
        target = _as_target(target)
        self._check_s(tup)
        if strict and not self._matches(tup, target):
            return False
        n = float(n2(tup.theta)) if target is DomainKind.SINE else n5(tup.theta)
        return self._at_least((1 + tup.t / tup.s).real, tup.m * (1 + n))

    def admissible_third_order(self, tup: AdmissibilityTuple, strict: bool = True) -> bool:
        """Second-order check plus Re(u/s) >= m^2 n3 + 3m(k-1) n2 (sine target)"""
        if tup.u is None:
            raise MissingU("Third-order admissibility needs u")
        if tup.k is None or not tup.k >= tup.m >= 2:
            raise InvalidMK(f"Third order needs k >= m >= 2, got m={tup.m}, k={tup.k}")
        if not self.admissible_second_order(tup, DomainKind.SINE, strict):
            return False
        threshold = tup.m ** 2 * float(n3(tup.theta)) \
            + 3 * tup.m * (tup.k - 1) * float(n2(tup.theta))
        return self._at_least((tup.u / tup.s).real, threshold)

    def derivative_bound_check(self, p: PowerSeries, target, m: int, grid: GridSpec) -> bool:
        """sup over the grid of |z p'| <= m nu0"""
        if abs(p[0] - 1) > self.config.origin_tolerance:
            raise ValueError(f"p(0) must equal 1, got {p[0]}")
        values = evaluate(euler_derivative(p), grid.points())
        return bool(np.max(np.abs(values)) <= m * self.profile(target).nu0)

    def inequality_chain_check(self, beta1: float, beta2: float, target,
                               samples: Optional[int] = None,
                               tolerance: float = 1e-9) -> ChainCheck:
        """Boundary minimum of |q'| (beta1 + beta2 Re(zeta q''/q')) against nu0 (beta1 + beta2 nu1)"""
        target = _as_target(target)
        samples = self.config.minimization_samples if samples is None else samples
        thetas = 2.0 * np.pi * (np.arange(samples) / samples)
        if target is DomainKind.SINE:
            values = n1(thetas) * (beta1 + beta2 * n2(thetas))
            profile = self.profile(target)
            bound = profile.nu0 * (beta1 + beta2 * profile.nu1)
        else:
            thetas = thetas[np.abs(np.cos(thetas)) >= 1e-6]
            values = n4(thetas) * (beta1 + beta2 * n5(thetas))
            bound = (2 * beta1 - beta2) / (2 * math.sqrt(2.0))
        minimum = float(np.min(values))
        return ChainCheck(target, beta1, beta2, minimum, bound, minimum >= bound - tolerance)
