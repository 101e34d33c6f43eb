"""
Toolkit Configuration
Numeric tolerances, sampling sizes and defaults shared by every component
"""

import json
from dataclasses import dataclass, asdict, replace
from typing import Dict


@dataclass(frozen=True)
class ToolkitConfig:
    """Tunable settings; defaults reproduce the documented behaviour"""
    series_order: int = 24
    target_series_order: int = 64
    boundary_samples: int = 4096
    boundary_band: float = 1e-9
    coefficient_tolerance: float = 1e-9
    origin_tolerance: float = 1e-12
    reciprocal_tolerance: float = 1e-12
    degenerate_s_tolerance: float = 1e-12
    tuple_match_tolerance: float = 1e-9
    singular_cos_tolerance: float = 1e-9
    minimization_samples: int = 100_000
    grid_radius: float = 0.99
    radial_steps: int = 64
    angular_steps: int = 512
    seed: int = 20240101
    workers: int = 1

    def __post_init__(self):
        if self.series_order < 1:
            raise ValueError("series_order must be at least 1")
        if self.target_series_order < 1:
            raise ValueError("target_series_order must be at least 1")
        if self.boundary_samples < 8:
            raise ValueError("boundary_samples must be at least 8")
        if not 0 < self.grid_radius <= 0.999:
            raise ValueError("grid_radius must lie in (0, 0.999]")
        if self.radial_steps < 1 or self.angular_steps < 16:
            raise ValueError("grid needs radial_steps >= 1 and angular_steps >= 16")
        if self.minimization_samples < 16:
            raise ValueError("minimization_samples must be at least 16")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        for name in ('boundary_band', 'coefficient_tolerance', 'origin_tolerance',
                     'reciprocal_tolerance', 'degenerate_s_tolerance',
                     'tuple_match_tolerance', 'singular_cos_tolerance'):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def with_overrides(self, **overrides) -> 'ToolkitConfig':
        """Copy with the given non-None fields replaced"""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return replace(self, **changes)

    def to_dict(self) -> Dict:
        """Convert configuration to dictionary"""
        return asdict(self)

    @classmethod
    def from_json(cls, path: str) -> 'ToolkitConfig':
        """Load configuration from a JSON file; unknown keys are rejected"""
        with open(path, 'r') as f:
            data = json.load(f)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"Unknown configuration keys: {', '.join(sorted(unknown))}")
        return cls(**data)


DEFAULT_CONFIG = ToolkitConfig()
