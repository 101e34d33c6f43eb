"""
Truncated Power Series
Exact-order Taylor arithmetic and the differential operators built on it
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from errors import MissingBeta3, NotNormalized, ZeroConstantTerm

logger = logging.getLogger(__name__)

DEFAULT_ORDER = 24
ORIGIN_TOLERANCE = 1e-12
RECIPROCAL_TOLERANCE = 1e-12
NEAR_BOUNDARY_RADIUS = 0.9


@dataclass(frozen=True, eq=False)
class PowerSeries:
    """Taylor coefficients a_0..a_N about 0, truncated at order N"""
    coeffs: np.ndarray
    order: int

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=complex)
        if coeffs.ndim != 1:
            raise ValueError("Coefficients must be a one-dimensional sequence")
        if self.order < 0:
            raise ValueError("Truncation order must be non-negative")
        if len(coeffs) != self.order + 1:
            raise ValueError(
                f"Expected {self.order + 1} coefficients for order {self.order}, got {len(coeffs)}")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("Coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @classmethod
    def from_coefficients(cls, coeffs, order: Optional[int] = None) -> 'PowerSeries':
        """Build from a known polynomial, padding with exact zeros up to order"""
        coeffs = np.atleast_1d(np.array(coeffs, dtype=complex))
        if order is None:
            order = len(coeffs) - 1
        padded = np.zeros(order + 1, dtype=complex)
        n = min(len(coeffs), order + 1)
        padded[:n] = coeffs[:n]
        return cls(padded, order)

    @classmethod
    def constant(cls, value: complex, order: int = DEFAULT_ORDER) -> 'PowerSeries':
        return cls.from_coefficients([value], order)

    @classmethod
    def variable(cls, order: int = DEFAULT_ORDER) -> 'PowerSeries':
        """The identity function z"""
        return cls.from_coefficients([0.0, 1.0], order)

    def __getitem__(self, k: int) -> complex:
        return complex(self.coeffs[k])

    def truncate(self, order: int) -> 'PowerSeries':
        if order > self.order:
            raise ValueError(f"Cannot extend order {self.order} to {order}")
        return PowerSeries(self.coeffs[:order + 1], order)

    def shift_down(self, tolerance: float = ORIGIN_TOLERANCE) -> 'PowerSeries':
        """Divide by z; requires a vanishing constant term"""
        if abs(self.coeffs[0]) > tolerance:
            raise NotNormalized("Division by z needs a zero constant term")
        if self.order == 0:
            raise ValueError("Order-0 series cannot be divided by z")
        return PowerSeries(self.coeffs[1:], self.order - 1)

    def max_deviation(self, other: 'PowerSeries', n_coeffs: Optional[int] = None) -> float:
        """Largest coefficient difference over the first n_coeffs terms"""
        n = min(self.order, other.order) + 1
        if n_coeffs is not None:
            n = min(n, n_coeffs)
        return float(np.max(np.abs(self.coeffs[:n] - other.coeffs[:n])))

    def __add__(self, other):
        if isinstance(other, PowerSeries):
            return series_add(self, other)
        coeffs = self.coeffs.copy()
        coeffs[0] += other
        return PowerSeries(coeffs, self.order)

    __radd__ = __add__

    def __neg__(self):
        return series_scale(self, -1.0)

    def __sub__(self, other):
        if isinstance(other, PowerSeries):
            return series_sub(self, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return series_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, series_reciprocal(other))
        return series_scale(self, 1.0 / other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("Only non-negative integer powers are supported")
        result = PowerSeries.constant(1.0, self.order)
        for _ in range(n):
            result = series_mul(result, self)
        return result

    def __call__(self, z):
        return evaluate(self, z)

    def __repr__(self) -> str:
        return f"PowerSeries(order={self.order}, coeffs={self.coeffs.tolist()})"

    def to_dict(self) -> Dict:
        """Convert series to its JSON form"""
        return {
            'order': self.order,
            'coeffs': [[float(c.real), float(c.imag)] for c in self.coeffs]
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'PowerSeries':
        coeffs = [complex(re, im) for re, im in data['coeffs']]
        return cls(np.array(coeffs, dtype=complex), int(data['order']))


@dataclass(frozen=True, eq=False)
class NormalizedFunction:
    """f(z) = z + a_2 z^2 + ... in the class A"""
    series: PowerSeries

    def __post_init__(self):
        if self.series.order < 1:
            raise NotNormalized("Normalized functions need order >= 1")
        if self.series[0] != 0 or self.series[1] != 1:
            raise NotNormalized("Normalized function needs a_0 = 0 and a_1 = 1")

    @classmethod
    def from_higher_coefficients(cls, higher: List[complex],
                                 order: int = DEFAULT_ORDER) -> 'NormalizedFunction':
        """f = z + higher[0] z^2 + higher[1] z^3 + ..."""
        return cls(PowerSeries.from_coefficients([0.0, 1.0] + list(higher), order))

    @classmethod
    def identity(cls, order: int = DEFAULT_ORDER) -> 'NormalizedFunction':
        return cls(PowerSeries.variable(order))


@dataclass(frozen=True, eq=False)
class StarlikeFunctionals:
    """S_j = z^j f^(j) / f for j = 1..4"""
    S1: PowerSeries
    S2: PowerSeries
    S3: PowerSeries
    S4: PowerSeries


@dataclass(frozen=True)
class OperatorParams:
    """Coefficients of the second/third-order differential operators"""
    beta1: float
    beta2: float
    beta3: Optional[float] = None

    def __post_init__(self):
        for name in ('beta1', 'beta2', 'beta3'):
            value = getattr(self, name)
            if value is not None and (not np.isfinite(value) or value < 0):
                raise ValueError(f"{name} must be a finite non-negative number, got {value}")

    def scaled(self, factor: float) -> 'OperatorParams':
        beta3 = None if self.beta3 is None else factor * self.beta3
        return OperatorParams(factor * self.beta1, factor * self.beta2, beta3)

    def hypothesis_flags(self) -> List[str]:
        """Flags for coefficients that miss the strict positivity every theorem assumes"""
        flags = []
        for name in ('beta1', 'beta2', 'beta3'):
            value = getattr(self, name)
            if value is not None and value == 0:
                flags.append(f"{name}_zero_outside_theorem_hypothesis")
        return flags

    def to_dict(self) -> Dict:
        data = {'beta1': self.beta1, 'beta2': self.beta2}
        if self.beta3 is not None:
            data['beta3'] = self.beta3
        return data


@dataclass(frozen=True)
class GridSpec:
    """Polar sample of the closed disk of the given radius"""
    radius: float = 0.99
    radial_steps: int = 64
    angular_steps: int = 512

    def __post_init__(self):
        if not 0 < self.radius <= 0.999:
            raise ValueError("Grid radius must lie in (0, 0.999]")
        if self.radial_steps < 1:
            raise ValueError("Grid needs at least one radial step")
        if self.angular_steps < 16:
            raise ValueError("Grid needs at least 16 angular steps")

    @property
    def size(self) -> int:
        return self.radial_steps * self.angular_steps

    def refined(self, factor: int = 2) -> 'GridSpec':
        """Grid containing every point of this one"""
        return GridSpec(self.radius, self.radial_steps * factor, self.angular_steps * factor)

    def points(self) -> np.ndarray:
        # j/n and k/n keep refined grids bit-identical on shared points
        radii = self.radius * (np.arange(1, self.radial_steps + 1) / self.radial_steps)
        angles = 2.0 * np.pi * (np.arange(self.angular_steps) / self.angular_steps)
        return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()

    def to_dict(self) -> Dict:
        return {'radius': self.radius, 'radial_steps': self.radial_steps,
                'angular_steps': self.angular_steps}


def _common(a: PowerSeries, b: PowerSeries):
    order = min(a.order, b.order)
    return a.coeffs[:order + 1], b.coeffs[:order + 1], order


def series_add(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    ca, cb, order = _common(a, b)
    return PowerSeries(ca + cb, order)


def series_sub(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    ca, cb, order = _common(a, b)
    return PowerSeries(ca - cb, order)


def series_scale(a: PowerSeries, factor: complex) -> PowerSeries:
    return PowerSeries(factor * a.coeffs, a.order)


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at the common order"""
    ca, cb, order = _common(a, b)
    return PowerSeries(np.convolve(ca, cb)[:order + 1], order)


def series_reciprocal(a: PowerSeries, tolerance: float = RECIPROCAL_TOLERANCE) -> PowerSeries:
    """1/a by the recursive division loop"""
    c = a.coeffs
    if abs(c[0]) < tolerance:
        raise ZeroConstantTerm(f"Constant term {c[0]} is below {tolerance}")
    ans = np.zeros(a.order + 1, dtype=complex)
    ans[0] = 1.0 / c[0]
    for n in range(1, a.order + 1):
        ans[n] = -np.dot(ans[:n], c[n:0:-1]) / c[0]
    return PowerSeries(ans, a.order)


def euler_derivative(a: PowerSeries) -> PowerSeries:
    """z d/dz"""
    return PowerSeries(np.arange(a.order + 1) * a.coeffs, a.order)


def weighted_derivative(a: PowerSeries, j: int) -> PowerSeries:
    """z^j d^j/dz^j: coefficient k(k-1)...(k-j+1) a_k"""
    if j < 0:
        raise ValueError("Derivative order must be non-negative")
    k = np.arange(a.order + 1)
    falling = np.ones(a.order + 1)
    for i in range(j):
        falling = falling * (k - i)
    return PowerSeries(falling * a.coeffs, a.order)


def _check_origin(p: PowerSeries, tolerance: float = ORIGIN_TOLERANCE):
    if abs(p[0] - 1.0) > tolerance:
        raise NotNormalized(f"p(0) must equal 1, got {p[0]}")


def phi2(p: PowerSeries, params: OperatorParams) -> PowerSeries:
    """1 + beta1 z p' + beta2 z^2 p''"""
    _check_origin(p)
    coeffs = params.beta1 * weighted_derivative(p, 1).coeffs \
        + params.beta2 * weighted_derivative(p, 2).coeffs
    coeffs[0] = 1.0
    return PowerSeries(coeffs, p.order)


def phi3(p: PowerSeries, params: OperatorParams) -> PowerSeries:
    """phi2 plus beta3 z^3 p'''"""
    if params.beta3 is None:
        raise MissingBeta3("Third-order operator needs beta3")
    base = phi2(p, params)
    return PowerSeries(base.coeffs + params.beta3 * weighted_derivative(p, 3).coeffs, p.order)


def starlike_functionals(f: NormalizedFunction) -> StarlikeFunctionals:
    series = f.series
    reciprocal = series_reciprocal(series.shift_down())
    functionals = [
        series_mul(weighted_derivative(series, j).shift_down(), reciprocal)
        for j in range(1, 5)
    ]
    return StarlikeFunctionals(*functionals)


def starlike_quotient(f: NormalizedFunction) -> PowerSeries:
    """p = z f'/f"""
    return starlike_functionals(f).S1


def s_f_operator(f: NormalizedFunction, params: OperatorParams) -> PowerSeries:
    S = starlike_functionals(f)
    S1, S2, S3 = S.S1, S.S2, S.S3
    first = S2 - S1 * S1 + S1
    second = S3 + 2 * S2 + 2 * S1 ** 3 - 2 * S1 * S1 - 3 * S1 * S2
    return 1.0 + params.beta1 * first + params.beta2 * second


def theta_f_operator(f: NormalizedFunction, params: OperatorParams,
                     variant: str = "printed") -> PowerSeries:
    """
    Third-order starlike combination.
    'printed' carries 3*S3 in the (beta2 + 3 beta3) bracket; 'reconciled'
    carries S3, which is the form equal to phi3(z f'/f).
    """
    if params.beta3 is None:
        raise MissingBeta3("Third-order operator needs beta3")
    if variant not in ("printed", "reconciled"):
        raise ValueError(f"Unknown variant: {variant}")
    S = starlike_functionals(f)
    S1, S2, S3, S4 = S.S1, S.S2, S.S3, S.S4
    b1, b2, b3 = params.beta1, params.beta2, params.beta3
    s3_weight = 3.0 if variant == "printed" else 1.0
    return (1.0 + b1 * S1
            + (b1 + 2 * b2) * (S2 - S1 * S1)
            + (b2 + 3 * b3) * (2 * S1 ** 3 - 3 * S1 * S2 + s3_weight * S3)
            + b3 * (S4 - 3 * S2 * S2 - 6 * S1 ** 4 - 4 * S1 * S3 + 12 * S1 * S1 * S2))


def truncation_bound(a: PowerSeries, radius: float) -> float:
    """Geometric tail estimate |a_N| r^(N+1) / (1 - r) for |z| <= r; exact for 1/(1-z)"""
    if radius >= 1.0:
        return float('inf')
    last = abs(a.coeffs[-1])
    if last == 0:
        return 0.0
    return float(last * radius ** (a.order + 1) / (1.0 - radius))


def evaluate(a: PowerSeries, z):
    """Horner evaluation; accepts scalars or numpy arrays"""
    z = np.asarray(z, dtype=complex)
    radius = float(np.max(np.abs(z))) if z.size else 0.0
    if radius > 1.0:
        logger.warning("Evaluating a truncated series outside the closed unit disk")
    elif radius >= NEAR_BOUNDARY_RADIUS:
        logger.debug("Truncation error bound at |z| <= %.6g: %.3e", radius,
                     truncation_bound(a, radius))
    nonzero = np.flatnonzero(a.coeffs)
    degree = int(nonzero[-1]) if nonzero.size else 0
    result = np.full(z.shape, a.coeffs[degree], dtype=complex)
    for k in range(degree - 1, -1, -1):
        result = result * z + a.coeffs[k]
    return complex(result) if result.ndim == 0 else result


def random_normalized_function(rng: np.random.Generator, degree: int = 12,
                               order: int = DEFAULT_ORDER) -> NormalizedFunction:
    """Random f with |a_k| <= 1/(2k^2), uniform in each coefficient disk"""
    if degree < 1 or degree > order:
        raise ValueError("Degree must lie between 1 and the truncation order")
    higher = []
    for k in range(2, degree + 1):
        radius = np.sqrt(rng.uniform()) / (2.0 * k * k)
        angle = rng.uniform(0.0, 2.0 * np.pi)
        higher.append(radius * np.exp(1j * angle))
    return NormalizedFunction.from_higher_coefficients(higher, order)


@dataclass
class IdentityReport:
    """Coefficientwise comparison of a starlike formula against the operator"""
    which: str
    trials: int
    degree: int
    seed: int
    compared_coefficients: int
    max_deviation: float
    per_coefficient_max: List[float] = field(default_factory=list)
    variant: Optional[str] = None
    pattern_residual: Optional[float] = None

    def passes(self, tolerance: float) -> bool:
        return self.max_deviation < tolerance

    def to_dict(self) -> Dict:
        data = {
            'which': self.which,
            'trials': self.trials,
            'degree': self.degree,
            'seed': self.seed,
            'compared_coefficients': self.compared_coefficients,
            'max_deviation': self.max_deviation,
            'per_coefficient_max': list(self.per_coefficient_max),
        }
        if self.variant is not None:
            data['variant'] = self.variant
            data['pattern_residual'] = self.pattern_residual
        return data


def operator_identity_report(which: str, trials: int = 100, degree: int = 12, seed: int = 7,
                             params: Optional[OperatorParams] = None, compare: int = 8,
                             variant: str = "printed",
                             order: int = DEFAULT_ORDER) -> IdentityReport:
    """
    Compare S_f against phi2(zf'/f), or Theta_f against phi3(zf'/f), on
    seeded random normalized functions. For Theta_f the report also measures
    how far the deviation is from 2(beta2 + 3 beta3) S3.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if which not in ("Sf", "Thetaf"):
        raise ValueError(f"Unknown identity: {which}")
    if params is None:
        params = OperatorParams(1.0, 1.0, 1.0 if which == "Thetaf" else None)
    rng = np.random.default_rng(seed)
    per_coefficient = np.zeros(compare)
    pattern = 0.0
    for _ in range(trials):
        f = random_normalized_function(rng, degree, order)
        p = starlike_quotient(f)
        if which == "Sf":
            formula, operator = s_f_operator(f, params), phi2(p, params)
        else:
            formula, operator = theta_f_operator(f, params, variant), phi3(p, params)
        n = min(compare, formula.order + 1)
        diff = np.abs(formula.coeffs[:n] - operator.coeffs[:n])
        per_coefficient[:n] = np.maximum(per_coefficient[:n], diff)
        if which == "Thetaf":
            s3_weight = 2.0 * (params.beta2 + 3.0 * params.beta3) if variant == "printed" else 0.0
            expected = s3_weight * starlike_functionals(f).S3.coeffs[:n]
            residual = np.abs(formula.coeffs[:n] - operator.coeffs[:n] - expected)
            pattern = max(pattern, float(np.max(residual)))
    logger.debug("Identity %s over %d trials: max deviation %.3e",
                 which, trials, float(per_coefficient.max()))
    return IdentityReport(
        which=which, trials=trials, degree=degree, seed=seed,
        compared_coefficients=compare,
        max_deviation=float(per_coefficient.max()),
        per_coefficient_max=[float(v) for v in per_coefficient],
        variant=variant if which == "Thetaf" else None,
        pattern_residual=pattern if which == "Thetaf" else None,
    )
