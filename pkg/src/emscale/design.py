"""Design vector and the per-mode search space."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .motor import DEFAULT_BOUNDS, INTERNAL_FACTORS, ScalingDomainError, ScalingVector

MODES = ("proportional", "combined")

ALL_VARIABLES = ("k_ax", "k_rad", "gamma") + INTERNAL_FACTORS

MODE_VARIABLES = {
    "proportional": ("k_ax", "k_rad", "gamma"),
    "combined": ALL_VARIABLES,
}


@dataclass(frozen=True)
class DesignVector:
    """Scaling factors plus gear ratio.

    In proportional mode the internal factors are pinned to 1 and only
    ``(k_ax, k_rad, gamma)`` are free.
    """

    k_ax: float = 1.0
    k_rad: float = 1.0
    gamma: float = 5.0
    k_mw: float = 1.0
    k_ml: float = 1.0
    k_sd: float = 1.0
    k_tw: float = 1.0
    mode: str = "combined"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "proportional":
            for name in INTERNAL_FACTORS:
                if getattr(self, name) != 1.0:
                    raise ValueError(f"proportional mode pins {name} to 1, got {getattr(self, name)}")

    @property
    def scaling(self) -> ScalingVector:
        return ScalingVector(self.k_ax, self.k_rad, self.k_mw, self.k_ml, self.k_sd, self.k_tw)

    def values(self) -> dict[str, float]:
        return {name: float(getattr(self, name)) for name in ALL_VARIABLES}

    def check(self, bounds=None) -> "DesignVector":
        bounds = bounds or DEFAULT_BOUNDS
        for name in ALL_VARIABLES:
            lo, hi = bounds[name]
            if not lo <= getattr(self, name) <= hi:
                raise ScalingDomainError(name, getattr(self, name), (lo, hi))
        return self

    @classmethod
    def proportional(cls, k_ax: float, k_rad: float, gamma: float) -> "DesignVector":
        return cls(k_ax=k_ax, k_rad=k_rad, gamma=gamma, mode="proportional")


class DesignSpace:
    """Maps the free variables of a mode to and from the unit box."""

    def __init__(self, mode: str, bounds=None):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        self.mode = mode
        self.bounds = dict(bounds or DEFAULT_BOUNDS)
        self.names = MODE_VARIABLES[mode]
        self.lower = np.array([self.bounds[n][0] for n in self.names], dtype=float)
        self.upper = np.array([self.bounds[n][1] for n in self.names], dtype=float)

    @property
    def dim(self) -> int:
        return len(self.names)

    def to_design(self, x) -> DesignVector:
        """Natural-unit coordinates -> design; clipped into the box."""
        x = np.clip(np.asarray(x, dtype=float), self.lower, self.upper)
        return DesignVector(mode=self.mode, **{n: float(v) for n, v in zip(self.names, x)})

    def from_design(self, d: DesignVector) -> np.ndarray:
        return np.array([getattr(d, n) for n in self.names], dtype=float)

    def to_unit(self, x):
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u):
        return self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)
