"""
Target Domain Catalog
The eight Ma-Minda generators with evaluation, membership, boundary and enclosing-disk queries
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import lambertw

from config import DEFAULT_CONFIG, ToolkitConfig
from errors import BRANCH_AMBIGUITY, InvalidJanowskiParams, TooCloseToBoundary
from series_core import PowerSeries, series_mul, series_reciprocal

logger = logging.getLogger(__name__)

# Status codes for vectorized classification
INSIDE = 1
BOUNDARY = 0
OUTSIDE = -1

_WINDING_CHUNK = 512


class DomainKind(Enum):
    """Generators phi with phi(0) = 1"""
    LEMNISCATE = "lemniscate"
    JANOWSKI = "janowski"
    SIGMOID = "sigmoid"
    CRESCENT = "crescent"
    CARDIOID = "cardioid"
    EXPONENTIAL = "exponential"
    SINE = "sine"
    PETAL = "petal"


class MembershipStatus(Enum):
    """Position of a point relative to an open domain"""
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


_STATUS_FROM_CODE = {
    INSIDE: MembershipStatus.INSIDE,
    BOUNDARY: MembershipStatus.BOUNDARY,
    OUTSIDE: MembershipStatus.OUTSIDE,
}


@dataclass(frozen=True)
class TargetDomain:
    """One generator; Janowski carries (C, D)"""
    kind: DomainKind
    C: Optional[float] = None
    D: Optional[float] = None

    def __post_init__(self):
        if self.kind is DomainKind.JANOWSKI:
            if self.C is None or self.D is None:
                raise InvalidJanowskiParams("Janowski domain needs C and D")
            if not -1.0 < self.D < self.C <= 1.0:
                raise InvalidJanowskiParams(
                    f"Janowski needs -1 < D < C <= 1, got C={self.C}, D={self.D}")
        elif self.C is not None or self.D is not None:
            raise ValueError(f"{self.kind.value} takes no (C, D) parameters")

    @classmethod
    def of(cls, kind, C: Optional[float] = None, D: Optional[float] = None) -> 'TargetDomain':
        """Build from a kind or its string value"""
        if not isinstance(kind, DomainKind):
            kind = DomainKind(str(kind).lower())
        return cls(kind, C, D)

    @classmethod
    def janowski(cls, C: float, D: float) -> 'TargetDomain':
        return cls(DomainKind.JANOWSKI, C, D)

    @property
    def label(self) -> str:
        if self.kind is DomainKind.JANOWSKI:
            return f"janowski(C={self.C:g},D={self.D:g})"
        return self.kind.value

    def to_dict(self) -> Dict:
        data = {'kind': self.kind.value}
        if self.kind is DomainKind.JANOWSKI:
            data.update({'C': self.C, 'D': self.D})
        return data


def all_domains(C: float = 0.5, D: float = -0.5) -> List[TargetDomain]:
    """One domain per kind, Janowski with the given parameters"""
    return [TargetDomain.janowski(C, D) if kind is DomainKind.JANOWSKI else TargetDomain(kind)
            for kind in DomainKind]


@dataclass
class MembershipVerdict:
    """Closed-form or winding classification of a single point"""
    status: MembershipStatus
    distance_hint: float
    flags: List[str] = field(default_factory=list)

    @property
    def inside(self) -> bool:
        return self.status is MembershipStatus.INSIDE

    def to_dict(self) -> Dict:
        return {'status': self.status.value, 'distance_hint': self.distance_hint,
                'flags': list(self.flags)}


@dataclass(frozen=True)
class EnclosingDisk:
    """Smallest disk about the center that contains the domain"""
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("Enclosing disk radius must be positive")

    def to_dict(self) -> Dict:
        return {'center': [self.center.real, self.center.imag], 'radius': self.radius}


def generate(domain: TargetDomain, z):
    """phi(z) with principal branches; scalars or arrays"""
    z = np.asarray(z, dtype=complex)
    kind = domain.kind
    if kind is DomainKind.LEMNISCATE:
        w = np.sqrt(1 + z)
    elif kind is DomainKind.JANOWSKI:
        w = (1 + domain.C * z) / (1 + domain.D * z)
    elif kind is DomainKind.SIGMOID:
        w = 2 / (1 + np.exp(-z))
    elif kind is DomainKind.CRESCENT:
        w = z + np.sqrt(1 + z * z)
    elif kind is DomainKind.CARDIOID:
        w = 1 + z * np.exp(z)
    elif kind is DomainKind.EXPONENTIAL:
        w = np.exp(z)
    elif kind is DomainKind.SINE:
        w = 1 + np.sin(z)
    else:
        w = 1 + np.arcsinh(z)
    return complex(w) if w.ndim == 0 else w


def functional(domain: TargetDomain, w) -> Tuple[np.ndarray, float]:
    """
    Defining functional and its threshold: w is inside iff value < threshold.
    Extra components of the characterizing sets are mapped to +inf.
    """
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    kind = domain.kind
    with np.errstate(all='ignore'):
        if kind is DomainKind.LEMNISCATE:
            value = np.where(w.real < 0, np.inf, np.abs(w * w - 1))
            return value, 1.0
        if kind is DomainKind.JANOWSKI:
            C, D = domain.C, domain.D
            center = (1 - C * D) / (1 - D * D)
            return np.abs(w - center), (C - D) / (1 - D * D)
        if kind is DomainKind.SIGMOID:
            singular = (w == 0) | (w == 2)
            ratio = np.where(singular, 1.0, w) / np.where(singular, 1.0, 2 - w)
            return np.where(singular, np.inf, np.abs(np.log(ratio))), 1.0
        if kind is DomainKind.CRESCENT:
            modulus = np.abs(w)
            value = np.abs(w * w - 1) / (2 * np.where(modulus == 0, 1.0, modulus))
            return np.where((modulus == 0) | (w.real < 0), np.inf, value), 1.0
        if kind is DomainKind.CARDIOID:
            return np.abs(lambertw(w - 1, 0)), 1.0
        if kind is DomainKind.EXPONENTIAL:
            zero = w == 0
            return np.where(zero, np.inf, np.abs(np.log(np.where(zero, 1.0, w)))), 1.0
        if kind is DomainKind.SINE:
            return np.abs(np.arcsin(w - 1)), 1.0
        shifted = w - 1
        value = np.abs(np.sinh(shifted))
        return np.where(np.abs(shifted.imag) > np.pi / 2, np.inf, value), 1.0


def taylor_series(domain: TargetDomain, order: int) -> PowerSeries:
    """Maclaurin expansion of the generator up to the given order"""
    n = order + 1
    coeffs = np.zeros(n, dtype=complex)
    inverse_factorial = np.ones(n)
    for k in range(1, n):
        inverse_factorial[k] = inverse_factorial[k - 1] / k
    kind = domain.kind
    if kind is DomainKind.LEMNISCATE:
        coeffs[0] = 1.0
        for k in range(order):
            coeffs[k + 1] = coeffs[k] * (0.5 - k) / (k + 1)
    elif kind is DomainKind.JANOWSKI:
        numerator = PowerSeries.from_coefficients([1.0, domain.C], order)
        denominator = PowerSeries.from_coefficients([1.0, domain.D], order)
        return series_mul(numerator, series_reciprocal(denominator))
    elif kind is DomainKind.SIGMOID:
        # 2/(1+e^-z) = 1 / ((1 + e^-z)/2)
        signs = (-1.0) ** np.arange(n)
        half_sum = 0.5 * signs * inverse_factorial
        half_sum[0] = 1.0
        return series_reciprocal(PowerSeries(half_sum, order))
    elif kind is DomainKind.CRESCENT:
        binomial = 1.0
        for k in range(0, order // 2 + 1):
            coeffs[2 * k] = binomial
            binomial = binomial * (0.5 - k) / (k + 1)
        if order >= 1:
            coeffs[1] += 1.0
    elif kind is DomainKind.CARDIOID:
        coeffs[0] = 1.0
        coeffs[1:] = inverse_factorial[:-1]
    elif kind is DomainKind.EXPONENTIAL:
        coeffs[:] = inverse_factorial
    elif kind is DomainKind.SINE:
        coeffs[0] = 1.0
        odd = np.arange(1, n, 2)
        coeffs[odd] = ((-1.0) ** ((odd - 1) // 2)) * inverse_factorial[odd]
    else:
        coeffs[0] = 1.0
        central = 1.0
        for m in range(0, (order - 1) // 2 + 1):
            coeffs[2 * m + 1] = central / (2 * m + 1)
            central = -central * (2 * m + 1) / (2 * m + 2)
    return PowerSeries(coeffs, order)


class DomainCatalog:
    """Membership and geometry queries with cached boundary polygons"""

    CLOSED_FORM_RADII = {
        DomainKind.CARDIOID: math.e,
        DomainKind.PETAL: math.pi / 2,
        DomainKind.SINE: math.sinh(1.0),
    }

    def __init__(self, config: ToolkitConfig = DEFAULT_CONFIG):
        self.samples = config.boundary_samples
        self.boundary_band = config.boundary_band
        self.boundary_cache: Dict[Tuple[TargetDomain, int], np.ndarray] = {}

    def generate(self, domain: TargetDomain, z):
        return generate(domain, z)

    def taylor_series(self, domain: TargetDomain, order: int) -> PowerSeries:
        return taylor_series(domain, order)

    @staticmethod
    def boundary_thetas(samples: int) -> np.ndarray:
        return 2.0 * np.pi * (np.arange(samples) / samples)

    def boundary(self, domain: TargetDomain, samples: Optional[int] = None) -> np.ndarray:
        """phi(e^{i theta_k}) for uniform theta_k starting at 0"""
        samples = self.samples if samples is None else samples
        if samples < 8:
            raise ValueError("Boundary needs at least 8 samples")
        key = (domain, samples)
        if key not in self.boundary_cache:
            values = generate(domain, np.exp(1j * self.boundary_thetas(samples)))
            values.setflags(write=False)
            self.boundary_cache[key] = values
            logger.debug("Cached %d boundary samples for %s", samples, domain.label)
        return self.boundary_cache[key]

    def classify(self, domain: TargetDomain, w) -> Tuple[np.ndarray, np.ndarray]:
        """Status codes and signed excess (value - threshold) for many points"""
        value, threshold = functional(domain, w)
        excess = value - threshold
        band = self.boundary_band * max(1.0, abs(threshold))
        codes = np.full(excess.shape, OUTSIDE, dtype=np.int8)
        on_band = np.abs(excess) < band
        codes[on_band] = BOUNDARY
        codes[(excess < 0) & ~on_band] = INSIDE
        return codes, excess

    def contains(self, domain: TargetDomain, w: complex, method: str = "closed_form",
                 samples: Optional[int] = None) -> MembershipVerdict:
        """Open-domain membership of a single point"""
        if method == "winding":
            return self.winding_membership(domain, w, samples)
        if method != "closed_form":
            raise ValueError(f"Unknown membership method: {method}")
        codes, excess = self.classify(domain, w)
        verdict = MembershipVerdict(_STATUS_FROM_CODE[int(codes[0])], float(abs(excess[0])))
        if domain.kind is DomainKind.SINE and abs(complex(w).real - 1) > 1:
            try:
                oracle = self.winding_membership(domain, w, samples)
            except TooCloseToBoundary:
                return verdict
            if oracle.status is not verdict.status:
                logger.warning("Principal arcsin disagrees with the winding oracle at %s", w)
                oracle.flags.append(BRANCH_AMBIGUITY)
                return oracle
        return verdict

    def winding_numbers(self, domain: TargetDomain, w,
                        samples: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """Winding number of the sampled boundary around each point, and distance to it"""
        curve = self.boundary(domain, samples)
        closed = np.append(curve, curve[0])
        x0, y0 = closed[:-1].real, closed[:-1].imag
        x1, y1 = closed[1:].real, closed[1:].imag
        edges = closed[1:] - closed[:-1]
        edge_norm2 = np.abs(edges) ** 2
        safe_norm2 = np.where(edge_norm2 == 0, 1.0, edge_norm2)

        points = np.atleast_1d(np.asarray(w, dtype=complex))
        winding = np.zeros(points.shape, dtype=int)
        distance = np.zeros(points.shape)
        for start in range(0, points.size, _WINDING_CHUNK):
            chunk = points[start:start + _WINDING_CHUNK][:, None]
            px, py = chunk.real, chunk.imag
            is_left = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
            upward = (y0 <= py) & (y1 > py) & (is_left > 0)
            downward = (y0 > py) & (y1 <= py) & (is_left < 0)
            winding[start:start + _WINDING_CHUNK] = upward.sum(axis=1) - downward.sum(axis=1)

            offset = chunk - closed[:-1]
            t = np.clip((offset * np.conj(edges)).real / safe_norm2, 0.0, 1.0)
            gap = np.abs(offset - t * edges)
            distance[start:start + _WINDING_CHUNK] = gap.min(axis=1)
        return winding, distance

    def winding_membership(self, domain: TargetDomain, w: complex,
                           samples: Optional[int] = None,
                           min_distance: Optional[float] = None) -> MembershipVerdict:
        """Inside iff the sampled boundary winds once around w"""
        min_distance = self.boundary_band if min_distance is None else min_distance
        winding, distance = self.winding_numbers(domain, w, samples)
        if distance[0] < min_distance:
            raise TooCloseToBoundary(
                f"{w} lies {distance[0]:.3e} from the sampled boundary of {domain.label}")
        status = MembershipStatus.INSIDE if winding[0] == 1 else MembershipStatus.OUTSIDE
        return MembershipVerdict(status, float(distance[0]))

    def enclosing_disk(self, domain: TargetDomain) -> EnclosingDisk:
        if domain.kind in self.CLOSED_FORM_RADII:
            return EnclosingDisk(1.0 + 0j, self.CLOSED_FORM_RADII[domain.kind])
        return EnclosingDisk(1.0 + 0j, self.boundary_radius(domain))

    def boundary_radius(self, domain: TargetDomain, samples: Optional[int] = None) -> float:
        """max |phi(e^{i theta}) - 1| over the boundary samples"""
        return float(np.max(np.abs(self.boundary(domain, samples) - 1)))

    def starlike_about_one(self, domain: TargetDomain, samples: Optional[int] = None) -> bool:
        """Whether the boundary argument about 1 increases monotonically"""
        curve = self.boundary(domain, samples)
        angles = np.unwrap(np.angle(np.append(curve, curve[0]) - 1))
        return bool(np.all(np.diff(angles) > 0))

    def log_shift_criterion(self, rho: float, samples: Optional[int] = None) -> bool:
        """min over theta of |log(1 + rho e^{i theta})| >= 1"""
        thetas = self.boundary_thetas(self.samples if samples is None else samples)
        with np.errstate(divide='ignore'):
            values = np.abs(np.log(1 + rho * np.exp(1j * thetas)))
        return bool(np.min(values) >= 1.0)
