"""
Implication Verifier
Grid-based subordination checks and premise/conclusion testing of the differential
subordination implications on finite test families
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from conditions import ConditionEvaluator, ConditionReport, MKPair, TheoremId
from config import DEFAULT_CONFIG, ToolkitConfig
from domain_catalog import OUTSIDE, BOUNDARY, DomainCatalog, TargetDomain
from errors import NotNormalized
from series_core import (GridSpec, OperatorParams, PowerSeries, evaluate, phi2, phi3,
                         random_normalized_function, starlike_quotient)

logger = logging.getLogger(__name__)


def _grid_values(low: float, high: float, count: int) -> Tuple[float, ...]:
    return tuple(round(float(v), 12) for v in np.linspace(low, high, count))


# members with |c| > 0.9 leave both targets
DEFAULT_LINEAR_C = _grid_values(-1.5, 1.5, 101)
DEFAULT_QUADRATIC_C = _grid_values(-0.6, 0.6, 9)
DEFAULT_QUADRATIC_D = _grid_values(-0.4, 0.4, 9)
DEFAULT_LAMBDAS = _grid_values(0.05, 1.0, 20)


class FamilyKind(Enum):
    """Built-in test families of p with p(0) = 1"""
    LINEAR = "linear"
    QUADRATIC = "quadratic"
    SCALED_TARGET = "scaled-target"
    STARLIKE = "starlike"
    CONSTANT = "constant"
    BUILTIN = "builtin"


@dataclass(frozen=True)
class FamilySpec:
    """Deterministic description of a finite family"""
    kind: FamilyKind
    c_values: Tuple[float, ...] = DEFAULT_LINEAR_C
    d_values: Tuple[float, ...] = DEFAULT_QUADRATIC_D
    lambdas: Tuple[float, ...] = DEFAULT_LAMBDAS
    size: int = 20
    degree: int = 12
    seed: int = DEFAULT_CONFIG.seed
    order: int = DEFAULT_CONFIG.series_order
    target_order: int = DEFAULT_CONFIG.target_series_order

    @classmethod
    def named(cls, name: str, seed: int = DEFAULT_CONFIG.seed) -> 'FamilySpec':
        kind = FamilyKind(name)
        if kind is FamilyKind.QUADRATIC:
            return cls(kind, c_values=DEFAULT_QUADRATIC_C, seed=seed)
        return cls(kind, seed=seed)

    def to_dict(self) -> Dict:
        data = {'kind': self.kind.value}
        if self.kind in (FamilyKind.LINEAR, FamilyKind.QUADRATIC):
            data['c_values'] = list(self.c_values)
        if self.kind is FamilyKind.QUADRATIC:
            data['d_values'] = list(self.d_values)
        if self.kind is FamilyKind.SCALED_TARGET:
            data['lambdas'] = list(self.lambdas)
            data['target_order'] = self.target_order
        if self.kind is FamilyKind.STARLIKE:
            data.update({'size': self.size, 'degree': self.degree, 'seed': self.seed})
        return data


@dataclass(eq=False)
class FamilyMember:
    index: int
    label: str
    series: PowerSeries


def build_family(spec: FamilySpec, target: TargetDomain, catalog: DomainCatalog) -> List[FamilyMember]:
    """Members in a fixed order; the scaled-target family uses the conclusion's q"""
    if spec.kind is FamilyKind.BUILTIN:
        parts = [FamilySpec(FamilyKind.LINEAR, order=spec.order),
                 FamilySpec(FamilyKind.QUADRATIC, c_values=DEFAULT_QUADRATIC_C, order=spec.order),
                 FamilySpec(FamilyKind.SCALED_TARGET, target_order=spec.target_order)]
        members = []
        for part in parts:
            for member in build_family(part, target, catalog):
                members.append(FamilyMember(len(members), member.label, member.series))
        return members

    entries: List[Tuple[str, PowerSeries]] = []
    if spec.kind is FamilyKind.CONSTANT:
        entries.append(("1", PowerSeries.constant(1.0, spec.order)))
    elif spec.kind is FamilyKind.LINEAR:
        for c in spec.c_values:
            entries.append((f"1+({c:g})z", PowerSeries.from_coefficients([1.0, c], spec.order)))
    elif spec.kind is FamilyKind.QUADRATIC:
        for c in spec.c_values:
            for d in spec.d_values:
                entries.append((f"1+({c:g})z+({d:g})z^2",
                                PowerSeries.from_coefficients([1.0, c, d], spec.order)))
    elif spec.kind is FamilyKind.SCALED_TARGET:
        q = catalog.taylor_series(target, spec.target_order)
        for lam in spec.lambdas:
            entries.append((f"1+{lam:g}(q-1)", 1.0 + lam * (q - 1.0)))
    elif spec.kind is FamilyKind.STARLIKE:
        rng = np.random.default_rng(spec.seed)
        for i in range(spec.size):
            f = random_normalized_function(rng, spec.degree, spec.order)
            entries.append((f"zf'/f#{i}", starlike_quotient(f)))
    return [FamilyMember(i, label, series) for i, (label, series) in enumerate(entries)]


@dataclass
class SubordinationVerdict:
    """Outcome of a grid check of p(D_r) inside a target domain"""
    holds: bool
    witness: Optional[complex]
    checked_points: int
    boundary_points: int = 0
    witness_image: Optional[complex] = None

    def to_dict(self) -> Dict:
        return {
            'holds': self.holds,
            'witness': None if self.witness is None else [self.witness.real, self.witness.imag],
            'witness_image': None if self.witness_image is None
            else [self.witness_image.real, self.witness_image.imag],
            'checked_points': self.checked_points,
            'boundary_points': self.boundary_points,
        }


@dataclass
class Violation:
    """Family member whose premise holds while its conclusion fails"""
    index: int
    label: str
    witness: complex

    def to_dict(self) -> Dict:
        return {'index': self.index, 'label': self.label,
                'witness': [self.witness.real, self.witness.imag]}


@dataclass
class ImplicationReport:
    """Premise/conclusion tally of one condition over one family"""
    theorem: TheoremId
    params: OperatorParams
    family: FamilySpec
    family_size: int
    premise_true_count: int
    condition_report: ConditionReport
    grid: GridSpec
    implication_violations: List[Violation] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.implication_violations

    def to_dict(self) -> Dict:
        return {
            'theorem': self.theorem.to_dict(),
            'params': self.params.to_dict(),
            'family': self.family.to_dict(),
            'grid': self.grid.to_dict(),
            'family_size': self.family_size,
            'premise_true_count': self.premise_true_count,
            'implication_violations': [v.to_dict() for v in self.implication_violations],
            'condition_report': self.condition_report.to_dict(),
        }


class ImplicationVerifier:
    """Runs subordination checks and implication tests over test families"""

    def __init__(self, config: ToolkitConfig = DEFAULT_CONFIG):
        self.config = config
        self.catalog: Optional[DomainCatalog] = None
        self.evaluator: Optional[ConditionEvaluator] = None
        self.grid_points: Dict[GridSpec, np.ndarray] = {}
        self.family_cache: Dict[Tuple[FamilySpec, TargetDomain], List[FamilyMember]] = {}
        self.conclusion_cache: Dict[Tuple, SubordinationVerdict] = {}

    def set_managers(self, catalog: DomainCatalog, evaluator: ConditionEvaluator):
        """Set references to the domain catalog and condition evaluator"""
        self.catalog = catalog
        self.evaluator = evaluator

    def default_grid(self) -> GridSpec:
        return GridSpec(self.config.grid_radius, self.config.radial_steps,
                        self.config.angular_steps)

    def _points(self, grid: GridSpec) -> np.ndarray:
        if grid not in self.grid_points:
            self.grid_points[grid] = grid.points()
        return self.grid_points[grid]

    def subordination_check(self, p: PowerSeries, target: TargetDomain,
                            grid: Optional[GridSpec] = None) -> SubordinationVerdict:
        """p(z) inside the target for every grid point; Boundary counts as Inside"""
        grid = grid or self.default_grid()
        if abs(p[0] - 1) > self.config.origin_tolerance:
            raise NotNormalized(f"p(0) must equal 1, got {p[0]}")
        points = self._points(grid)
        images = evaluate(p, points)
        codes, excess = self.catalog.classify(target, images)
        outside = codes == OUTSIDE
        boundary_points = int(np.count_nonzero(codes == BOUNDARY))
        if not outside.any():
            return SubordinationVerdict(True, None, len(points), boundary_points)
        # witness: the most distant escape
        score = np.where(outside, np.nan_to_num(excess, nan=np.inf), -np.inf)
        index = int(np.argmax(score))
        return SubordinationVerdict(False, complex(points[index]), len(points),
                                    boundary_points, complex(images[index]))

    def operator_image_check(self, p: PowerSeries, params: OperatorParams, h: TargetDomain,
                             grid: Optional[GridSpec] = None, order: int = 2) -> SubordinationVerdict:
        """phi2(p) or phi3(p) subordinate to h on the grid"""
        if order not in (2, 3):
            raise ValueError(f"Operator order must be 2 or 3, got {order}")
        image = phi2(p, params) if order == 2 else phi3(p, params)
        return self.subordination_check(image, h, grid)

    def _family(self, spec: FamilySpec, target: TargetDomain) -> List[FamilyMember]:
        key = (spec, target)
        if key not in self.family_cache:
            self.family_cache[key] = build_family(spec, target, self.catalog)
        return self.family_cache[key]

    def _conclusion(self, spec: FamilySpec, target: TargetDomain, member: FamilyMember,
                    grid: GridSpec) -> SubordinationVerdict:
        key = (spec, target, member.index, grid)
        if key not in self.conclusion_cache:
            self.conclusion_cache[key] = self.subordination_check(member.series, target, grid)
        return self.conclusion_cache[key]

    def _violations(self, theorem: TheoremId, params: OperatorParams, family: FamilySpec,
                    grid: GridSpec) -> Tuple[int, int, List[Violation]]:
        target = TargetDomain(theorem.target)
        members = self._family(family, target)

        def check_member(member: FamilyMember) -> Tuple[bool, Optional[Violation]]:
            premise = self.operator_image_check(member.series, params, theorem.h, grid, theorem.order)
            if not premise.holds:
                return False, None
            conclusion = self._conclusion(family, target, member, grid)
            if conclusion.holds:
                return True, None
            return True, Violation(member.index, member.label, conclusion.witness)

        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                outcomes = list(pool.map(check_member, members))
        else:
            outcomes = [check_member(member) for member in members]
        premise_true = sum(1 for premise, _ in outcomes if premise)
        violations = [violation for _, violation in outcomes if violation is not None]
        return len(members), premise_true, violations

    def implication_test(self, theorem: TheoremId, params: OperatorParams,
                         mk: Optional[MKPair] = None,
                         family: Optional[FamilySpec] = None,
                         grid: Optional[GridSpec] = None) -> ImplicationReport:
        """Premise true and conclusion false is a violation"""
        family = family or FamilySpec(FamilyKind.BUILTIN)
        grid = grid or self.default_grid()
        condition = self.evaluator.evaluate(theorem, params, mk)
        size, premise_true, violations = self._violations(theorem, params, family, grid)
        if condition.holds and violations:
            logger.error("%s holds at %s yet %d family members violate the implication",
                         theorem.label, params.to_dict(), len(violations))
        logger.info("%s over %s: %d/%d premises true, %d violations", theorem.label,
                    family.kind.value, premise_true, size, len(violations))
        return ImplicationReport(theorem, params, family, size, premise_true, condition, grid,
                                 violations)

    def counterexample_search(self, theorem: TheoremId, params: OperatorParams,
                              family: FamilySpec, grid: Optional[GridSpec] = None,
                              mk: Optional[MKPair] = None) -> List[Violation]:
        """Members with premise true and conclusion false; meant for failing conditions"""
        condition = self.evaluator.evaluate(theorem, params, mk)
        if condition.holds:
            logger.warning("Counterexample search on %s where the condition holds", theorem.label)
        _, _, findings = self._violations(theorem, params, family, grid or self.default_grid())
        return findings

    def export_report(self, report: ImplicationReport, filename: str) -> str:
        """Write an implication report as JSON"""
        with open(filename, 'w') as f:
            json.dump(report.to_dict(), f, indent=2)
        return filename
