"""Analysis configuration: grids, tolerances and the state-norm mode."""

import math
from dataclasses import dataclass, field, fields


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs shared by every operation.

    ``state_norm`` selects the norm on the state space: 2.0 (Euclidean,
    the only mode in which the time-varying radii are exact), 1.0 or
    ``math.inf``.  ``seed`` only feeds randomized verification helpers;
    the analysis itself is deterministic.
    """

    grid_size: int = 4096
    sigma_tol: float = 1e-9
    refine_tol: float = 1e-8
    n_max: int = 256
    section: int = 128
    state_norm: float = 2.0
    seed: int = 42
    nu_max: float = 50.0
    phase_cap: float = field(default=math.pi / 2)

    def __post_init__(self):
        if self.grid_size < 64 or self.grid_size & (self.grid_size - 1):
            raise ValueError("grid_size must be >= 64 and a power of two")
        for name in ("sigma_tol", "refine_tol", "nu_max", "phase_cap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_max < 1 or self.section < 1:
            raise ValueError("n_max and section must be positive")
        if self.state_norm not in (2.0, 1.0, math.inf):
            raise ValueError("state_norm must be 2, 1 or inf")

    def as_dict(self):
        """Config block embedded in every report, for provenance."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = "inf" if v == math.inf else v
        return out


DEFAULT_CONFIG = AnalysisConfig()
