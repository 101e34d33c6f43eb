"""
Sufficient Conditions
Predicate evaluators for the second- and third-order subordination conditions and
parameter-region scans
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from admissibility import nu_constants, solve_r0
from config import DEFAULT_CONFIG, ToolkitConfig
from domain_catalog import DomainKind, TargetDomain
from errors import InvalidMK, InvalidTheorem, MissingBeta3
from series_core import OperatorParams

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TheoremId:
    """Target q, operator order and majorant h of one sufficient condition"""
    target: DomainKind
    order: int
    h: TargetDomain

    def __post_init__(self):
        if self.target not in (DomainKind.SINE, DomainKind.PETAL):
            raise InvalidTheorem(f"No conditions for target {self.target.value}")
        if self.order not in (2, 3):
            raise InvalidTheorem(f"Order must be 2 or 3, got {self.order}")
        if self.target is DomainKind.PETAL and self.order == 3:
            raise InvalidTheorem("no third-order petal theorems")

    @classmethod
    def of(cls, target, order: int, h_kind, C: Optional[float] = None,
           D: Optional[float] = None) -> 'TheoremId':
        if not isinstance(target, DomainKind):
            target = DomainKind(str(target).lower())
        return cls(target, int(order), TargetDomain.of(h_kind, C, D))

    @property
    def h_kind(self) -> DomainKind:
        return self.h.kind

    @property
    def janowski_params(self) -> Optional[Tuple[float, float]]:
        return (self.h.C, self.h.D) if self.h.kind is DomainKind.JANOWSKI else None

    @property
    def label(self) -> str:
        return f"{self.target.value}/{self.order}/{self.h.label}"

    def to_dict(self) -> Dict:
        return {'target': self.target.value, 'order': self.order, 'h': self.h.to_dict()}


def all_theorems(C: float = 0.5, D: float = -0.5) -> List[TheoremId]:
    """The 24 conditions: sine orders 2 and 3, petal order 2, over every majorant"""
    theorems = []
    for target, order in ((DomainKind.SINE, 2), (DomainKind.SINE, 3), (DomainKind.PETAL, 2)):
        for kind in DomainKind:
            h = TargetDomain.janowski(C, D) if kind is DomainKind.JANOWSKI else TargetDomain(kind)
            theorems.append(TheoremId(target, order, h))
    return theorems


@dataclass(frozen=True)
class MKPair:
    m: int = 2
    k: int = 2

    def __post_init__(self):
        if not self.k >= self.m >= 2:
            raise InvalidMK(f"Need k >= m >= 2, got m={self.m}, k={self.k}")

    @property
    def beta3_multiplier(self) -> float:
        nu1 = nu_constants(DomainKind.SINE).nu1
        return -self.m ** 2 + 3 * self.m * (self.k - 1) * nu1


@dataclass
class ConditionReport:
    """Verdict of one condition with both sides of the inequality"""
    holds: bool
    lhs: float
    rhs: float
    margin: float
    theorem: TheoremId
    core: float
    hypothesis_flags: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            'theorem': self.theorem.to_dict(),
            'holds': self.holds,
            'lhs': self.lhs,
            'rhs': self.rhs,
            'margin': self.margin,
            'core': self.core,
            'hypothesis_flags': list(self.hypothesis_flags),
        }


@dataclass
class RegionScan:
    """Margins over a beta1 x beta2 raster; rows are indexed by beta2"""
    theorem: TheoremId
    beta1_values: np.ndarray
    beta2_values: np.ndarray
    margins: np.ndarray
    holds: np.ndarray

    def rows(self) -> Iterator[Tuple[float, float, float, bool]]:
        for i, beta2 in enumerate(self.beta2_values):
            for j, beta1 in enumerate(self.beta1_values):
                yield float(beta1), float(beta2), float(self.margins[i, j]), bool(self.holds[i, j])

    def crossing_beta1(self, row: int = 0) -> Optional[float]:
        """Smallest scanned beta1 at which the condition holds in the given row"""
        hits = np.flatnonzero(self.holds[row])
        return float(self.beta1_values[hits[0]]) if hits.size else None

    def to_dict(self) -> Dict:
        return {
            'theorem': self.theorem.to_dict(),
            'rows': [{'beta1': b1, 'beta2': b2, 'margin': m, 'holds': h}
                     for b1, b2, m, h in self.rows()],
        }


def threshold_constants() -> Dict[str, float]:
    """Constants quoted by the conditions, keyed as in the constants artifact"""
    profile = nu_constants(DomainKind.SINE)
    return {
        'nu0': profile.nu0,
        'nu1': profile.nu1,
        'r0': solve_r0(),
        'sinh1': math.sinh(1.0),
        'e_minus_1': math.e - 1,
        'half_pi': math.pi / 2,
        'sqrt2': SQRT2,
        'e': math.e,
    }


def sorted_thresholds(digits: int = 50) -> List[str]:
    """Names of the second-order thresholds on X in ascending order, at high precision"""
    with mpmath.workdps(digits):
        values = {
            'r0': mpmath.csc(1) - mpmath.cot(1),
            'sinh1': mpmath.sinh(1),
            'sqrt2': mpmath.sqrt(2),
            'half_pi': mpmath.pi / 2,
            'e_minus_1': mpmath.e - 1,
            'e': mpmath.e,
        }
        return sorted(values, key=lambda name: values[name])


class ConditionEvaluator:
    """Evaluates sufficient conditions against the constant table"""

    def __init__(self, config: ToolkitConfig = DEFAULT_CONFIG):
        self.config = config
        profile = nu_constants(DomainKind.SINE, config.minimization_samples)
        self.constants = {
            'nu0': profile.nu0,
            'nu1': profile.nu1,
            'r0': solve_r0(),
            'sinh1': math.sinh(1.0),
            'e': math.e,
        }

    def _inequality(self, theorem: TheoremId) -> Tuple[str, float, float]:
        """('quadratic', a, b) for Z(Z-a) >= b, or ('linear', c, b) for c Z >= b"""
        c = self.constants
        kind = theorem.h_kind
        if theorem.target is DomainKind.SINE:
            scale = 1.0
            if kind is DomainKind.LEMNISCATE:
                return 'quadratic', 2.0, 1.0
        else:
            scale = 2 * SQRT2
            if kind is DomainKind.LEMNISCATE:
                return 'quadratic', 4 * SQRT2, 8.0
        if kind is DomainKind.JANOWSKI:
            C, D = theorem.janowski_params
            return 'linear', 1 - D * D, scale * (C - D) * (1 + abs(D))
        if kind is DomainKind.PETAL:
            # 2X >= pi for the sine target, W >= sqrt(2) pi for the petal target
            return ('linear', 2.0, math.pi) if scale == 1.0 else ('linear', 1.0, SQRT2 * math.pi)
        if kind is DomainKind.CRESCENT and scale != 1.0:
            # 2 sqrt2 * sqrt2, kept exact so W = 4 sits on the boundary
            return 'linear', 1.0, 4.0
        rhs = {
            DomainKind.SIGMOID: c['r0'],
            DomainKind.CRESCENT: SQRT2,
            DomainKind.CARDIOID: c['e'],
            DomainKind.EXPONENTIAL: c['e'] - 1,
            DomainKind.SINE: c['sinh1'],
        }[kind]
        return 'linear', 1.0, scale * rhs

    def _report(self, theorem: TheoremId, core: float, flags: List[str]) -> ConditionReport:
        form, a, b = self._inequality(theorem)
        lhs = core * (core - a) if form == 'quadratic' else a * core
        margin = lhs - b
        return ConditionReport(margin >= 0, lhs, b, margin, theorem, core, flags)

    def _require(self, theorem: TheoremId, target: DomainKind, order: int):
        if theorem.target is not target or theorem.order != order:
            raise InvalidTheorem(
                f"{theorem.label} is not a {target.value} order-{order} condition")

    def sine_second_order(self, theorem: TheoremId, params: OperatorParams) -> ConditionReport:
        """X = nu0 (beta1 + beta2 nu1)"""
        self._require(theorem, DomainKind.SINE, 2)
        x = self.constants['nu0'] * (params.beta1 + params.beta2 * self.constants['nu1'])
        return self._report(theorem, x, params.hypothesis_flags())

    def sine_third_order(self, theorem: TheoremId, params: OperatorParams,
                         mk: Optional[MKPair] = None) -> ConditionReport:
        """Y = nu0 (beta1 + beta2 nu1 + beta3 (-m^2 + 3m(k-1) nu1))"""
        self._require(theorem, DomainKind.SINE, 3)
        if params.beta3 is None:
            raise MissingBeta3("Third-order conditions need beta3")
        mk = mk or MKPair()
        nu0, nu1 = self.constants['nu0'], self.constants['nu1']
        y = nu0 * (params.beta1 + params.beta2 * nu1 + params.beta3 * mk.beta3_multiplier)
        return self._report(theorem, y, params.hypothesis_flags())

    def petal_second_order(self, theorem: TheoremId, params: OperatorParams) -> ConditionReport:
        """W = 2 beta1 - beta2"""
        self._require(theorem, DomainKind.PETAL, 2)
        w = 2 * params.beta1 - params.beta2
        return self._report(theorem, w, params.hypothesis_flags())

    def evaluate(self, theorem: TheoremId, params: OperatorParams,
                 mk: Optional[MKPair] = None) -> ConditionReport:
        if theorem.target is DomainKind.PETAL:
            return self.petal_second_order(theorem, params)
        if theorem.order == 2:
            return self.sine_second_order(theorem, params)
        return self.sine_third_order(theorem, params, mk)

    def required_core(self, theorem: TheoremId) -> float:
        """Smallest core value (X, Y or W) that satisfies the condition"""
        form, a, b = self._inequality(theorem)
        if form == 'quadratic':
            return (a + math.sqrt(a * a + 4 * b)) / 2
        return b / a

    def critical_beta1(self, theorem: TheoremId, beta2: float, beta3: Optional[float] = None,
                       mk: Optional[MKPair] = None) -> float:
        """beta1 at which the margin vanishes for the given beta2 (and beta3)"""
        core = self.required_core(theorem)
        if theorem.target is DomainKind.PETAL:
            return (core + beta2) / 2
        beta1 = core / self.constants['nu0'] - beta2 * self.constants['nu1']
        if theorem.order == 3:
            if beta3 is None:
                raise MissingBeta3("Third-order conditions need beta3")
            beta1 -= beta3 * (mk or MKPair()).beta3_multiplier
        return beta1

    def region_scan(self, theorem: TheoremId, beta1_range: Tuple[float, float],
                    beta2_range: Tuple[float, float],
                    resolution: Union[int, Sequence[int]] = 101,
                    beta3: Optional[float] = None, mk: Optional[MKPair] = None,
                    workers: Optional[int] = None) -> RegionScan:
        """Margins on a uniform raster; rows evaluated in parallel, kept in order"""
        if isinstance(resolution, int):
            resolution = (resolution, resolution)
        n1, n2 = resolution
        if n1 < 2 or n2 < 2:
            raise ValueError("Region scans need at least 2 samples per axis")
        for name, (low, high) in (('beta1', beta1_range), ('beta2', beta2_range)):
            if not 0 <= low <= high:
                raise ValueError(f"{name} range must satisfy 0 <= low <= high")
        if theorem.order == 3 and beta3 is None:
            raise MissingBeta3("Third-order scans need a fixed beta3")
        beta1_values = np.linspace(beta1_range[0], beta1_range[1], n1)
        beta2_values = np.linspace(beta2_range[0], beta2_range[1], n2)

        def scan_row(beta2: float) -> List[float]:
            return [self.evaluate(theorem, OperatorParams(float(b1), float(beta2), beta3), mk).margin
                    for b1 in beta1_values]

        workers = workers or self.config.workers
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                margins = list(pool.map(scan_row, beta2_values))
        else:
            margins = [scan_row(b2) for b2 in beta2_values]
        margins = np.array(margins)
        logger.debug("Scanned %s over %dx%d cells", theorem.label, n1, n2)
        return RegionScan(theorem, beta1_values, beta2_values, margins, margins >= 0)
