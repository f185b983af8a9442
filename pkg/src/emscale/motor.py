"""Geometric scaling of a reference PM machine and its closed-form performance model.

The reference machine is scaled axially (``k_ax``) and radially (``k_rad``);
on top of the radial factor the magnet width/length and the slot depth/tooth
width can be rescaled individually. The performance model maps the factors
to a torque-speed envelope and a loss map:

* magnetic loading ``lambda_B`` -- magnet width times a permeance divider in
  the magnet length, capped by tooth saturation;
* electric loading ``lambda_A`` -- slot depth times the slot-width share of
  the slot pitch;
* peak torque ``T_max0 * k_ax * k_rad**3 * lambda_B * lambda_A``;
* copper, iron (hysteresis + eddy) and windage/friction losses.

All surrogate constants live on :class:`ReferenceMachine`. With every factor
at 1 the model reproduces the reference exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

INTERNAL_FACTORS = ("k_mw", "k_ml", "k_sd", "k_tw")
SCALING_FACTORS = ("k_ax", "k_rad") + INTERNAL_FACTORS

DEFAULT_BOUNDS = {
    "k_ax": (0.8, 1.2),
    "k_rad": (0.8, 1.2),
    "k_mw": (0.9, 1.1),
    "k_ml": (0.9, 1.1),
    "k_sd": (0.9, 1.1),
    "k_tw": (0.9, 1.1),
    "gamma": (1.0, 10.0),
}

# relative slack on envelope checks, absorbs round-off at the corner points
ENVELOPE_RTOL = 1e-9


class ScalingDomainError(ValueError):
    def __init__(self, factor: str, value: float, bounds: tuple[float, float]):
        super().__init__(f"{factor}={value} outside [{bounds[0]}, {bounds[1]}]")
        self.factor = factor


class InfeasiblePointError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingVector:
    k_ax: float = 1.0
    k_rad: float = 1.0
    k_mw: float = 1.0
    k_ml: float = 1.0
    k_sd: float = 1.0
    k_tw: float = 1.0

    def check(self, bounds=None):
        bounds = bounds or DEFAULT_BOUNDS
        for name in SCALING_FACTORS:
            lo, hi = bounds[name]
            value = getattr(self, name)
            if not lo <= value <= hi:
                raise ScalingDomainError(name, value, (lo, hi))
        return self

    @property
    def is_proportional(self) -> bool:
        return all(getattr(self, f) == 1.0 for f in INTERNAL_FACTORS)


@dataclass(frozen=True)
class ReferenceMachine:
    """Unscaled machine plus the surrogate's calibration constants.

    Dimensions are placeholders (only ratios to them are meaningful). Loss
    coefficients are the loss components in W at the rated point
    ``(T_max0, w_base0)``.
    """

    d_mw0: float = 0.020  # magnet width, m
    d_ml0: float = 0.0065  # magnet length (thickness), m
    d_sd0: float = 0.030  # slot depth, m
    d_tw0: float = 0.0085  # tooth width, m
    T_max0: float = 280.0  # N m
    w_base0: float = 430.0  # rad/s
    w_max0: float = 1100.0  # rad/s
    c_cu: float = 4000.0  # W
    c_hys: float = 300.0  # W
    c_eddy: float = 600.0  # W
    c_mech: float = 150.0  # W
    c_g: float = 0.2  # effective air gap / magnet length
    f_t: float = 0.5  # tooth share of the slot pitch
    b_sat: float = 1.1  # tooth saturation headroom
    c_ew: float = 0.3  # end-winding / active length

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name.startswith("c_") and f.name not in ("c_g", "c_ew"):
                if value < 0:
                    raise ValueError(f"ReferenceMachine.{f.name} must be non-negative, got {value}")
            elif not value > 0:
                raise ValueError(f"ReferenceMachine.{f.name} must be positive, got {value}")
        if not self.w_base0 < self.w_max0:
            raise ValueError("ReferenceMachine needs w_base0 < w_max0")
        if not self.f_t < 1:
            raise ValueError("ReferenceMachine.f_t must be < 1")
        if not self.b_sat > 1:
            raise ValueError("ReferenceMachine.b_sat must exceed 1 so the reference is unsaturated")

    @property
    def rated_power(self) -> float:
        return self.T_max0 * self.w_base0


@dataclass(frozen=True)
class Geometry:
    d_mw: float
    d_ml: float
    d_sd: float
    d_tw: float


def scale_geometry(ref: ReferenceMachine, k: ScalingVector, bounds=None) -> Geometry:
    k.check(bounds)
    return Geometry(
        d_mw=ref.d_mw0 * k.k_rad * k.k_mw,
        d_ml=ref.d_ml0 * k.k_rad * k.k_ml,
        d_sd=ref.d_sd0 * k.k_rad * k.k_sd,
        d_tw=ref.d_tw0 * k.k_rad * k.k_tw,
    )


def slot_width_factor(ref: ReferenceMachine, k_tw: float) -> float:
    return (1.0 - ref.f_t * k_tw) / (1.0 - ref.f_t)


def loading_factors(k: ScalingVector, ref: ReferenceMachine) -> tuple[float, float]:
    """Relative magnetic and electric loading ``(lambda_B, lambda_A)``."""
    permeance = k.k_ml * (1.0 + ref.c_g) / (k.k_ml + ref.c_g)
    lambda_b = min(k.k_mw * permeance, ref.b_sat * k.k_tw)
    lambda_a = k.k_sd * slot_width_factor(ref, k.k_tw)
    return lambda_b, lambda_a


@dataclass(frozen=True)
class MotorModel:
    reference: ReferenceMachine
    scaling: ScalingVector
    geometry: Geometry
    lambda_b: float
    lambda_a: float
    t_peak: float  # N m
    w_base: float  # rad/s
    w_max: float  # rad/s

    def max_torque(self, w):
        """Envelope T_max(w): flat to the base speed, constant power above it,
        zero past the mechanical speed limit."""
        w = np.abs(np.asarray(w, dtype=float))
        t = self.t_peak * self.w_base / np.maximum(w, self.w_base)
        t = np.where(w <= self.w_max * (1 + ENVELOPE_RTOL), t, 0.0)
        return t if t.ndim else float(t)

    @property
    def peak_power(self) -> float:
        return self.t_peak * min(self.w_base, self.w_max)

    def loss_components(self, T_m, w_m):
        ref, k = self.reference, self.scaling
        T_m = np.asarray(T_m, dtype=float)
        r = np.asarray(w_m, dtype=float) / ref.w_base0
        end_winding = (k.k_ax + ref.c_ew * k.k_rad) / (1.0 + ref.c_ew)
        current = T_m / (ref.T_max0 * k.k_ax * k.k_rad**2 * self.lambda_b)
        copper_area = k.k_rad**2 * k.k_sd * slot_width_factor(ref, k.k_tw)
        p_cu = ref.c_cu * end_winding * current**2 / copper_area
        p_fe = (ref.c_hys * r + ref.c_eddy * r**2) * self.lambda_b**2 * k.k_ax * k.k_rad**2
        p_mech = ref.c_mech * r**3 * k.k_ax * k.k_rad**4
        return p_cu, p_fe, p_mech

    def in_envelope(self, T_m, w_m):
        T_m = np.abs(np.asarray(T_m, dtype=float))
        w_m = np.asarray(w_m, dtype=float)
        limit = self.max_torque(w_m)
        return (w_m >= 0) & (w_m <= self.w_max * (1 + ENVELOPE_RTOL)) & (T_m <= limit * (1 + ENVELOPE_RTOL))


def build_model(ref: ReferenceMachine, k: ScalingVector, bounds=None) -> MotorModel:
    geometry = scale_geometry(ref, k, bounds)
    lambda_b, lambda_a = loading_factors(k, ref)
    return MotorModel(
        reference=ref,
        scaling=k,
        geometry=geometry,
        lambda_b=lambda_b,
        lambda_a=lambda_a,
        t_peak=ref.T_max0 * k.k_ax * k.k_rad**3 * lambda_b * lambda_a,
        w_base=ref.w_base0 / (k.k_ax * k.k_rad * lambda_b),
        w_max=ref.w_max0 / k.k_rad,
    )


def _check_envelope(m: MotorModel, T_m, w_m):
    ok = m.in_envelope(T_m, w_m)
    if not np.all(ok):
        T_bad = np.broadcast_to(T_m, np.shape(ok))[~ok].flat[0] if np.ndim(ok) else T_m
        w_bad = np.broadcast_to(w_m, np.shape(ok))[~ok].flat[0] if np.ndim(ok) else w_m
        raise InfeasiblePointError(f"operating point T={float(T_bad):.6g} N m, w={float(w_bad):.6g} rad/s is outside the envelope")


def losses(m: MotorModel, T_m, w_m, check: bool = True):
    """Total loss P_cu + P_fe + P_mech in W; symmetric in the torque sign."""
    if check:
        _check_envelope(m, T_m, w_m)
    p_cu, p_fe, p_mech = m.loss_components(T_m, w_m)
    out = p_cu + p_fe + p_mech
    return out if np.ndim(out) else float(out)


def input_power(m: MotorModel, T_m, w_m, check: bool = True):
    """Electrical input power: shaft power plus losses (negative when regenerating)."""
    out = np.asarray(T_m, dtype=float) * np.asarray(w_m, dtype=float) + losses(m, T_m, w_m, check)
    return out if np.ndim(out) else float(out)
