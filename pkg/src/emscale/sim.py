"""Per-candidate evaluation: cycle energy plus the performance constraints."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cycle import KMH, DriveCycle
from .design import DesignVector
from .motor import DEFAULT_BOUNDS, MotorModel, ReferenceMachine, build_model, losses
from .vehicle import VehicleParams, shaft_speed, shaft_torque, wheel_torque

MARGIN_NAMES = ("top_speed", "acceleration", "gradeability", "cycle")


@dataclass(frozen=True)
class PerformanceSpec:
    v_max: float = 180 * KMH  # m/s
    v_acc: float = 100 * KMH  # m/s
    t_acc: float = 9.6  # s
    alpha_max: float = 0.20  # grade, tan of the road angle
    v_grade: float = 1 * KMH  # crawl speed for the grade check, m/s
    dt_acc: float = 0.01  # s
    t_cap: float = 60.0  # s

    def __post_init__(self):
        for name in ("v_max", "v_acc", "t_acc", "v_grade", "dt_acc", "t_cap"):
            if not getattr(self, name) > 0:
                raise ValueError(f"PerformanceSpec.{name} must be positive")
        if self.alpha_max < 0:
            raise ValueError("PerformanceSpec.alpha_max must be non-negative")


class CycleInfeasibleError(RuntimeError):
    def __init__(self, t: float, reason: str):
        super().__init__(f"motor cannot follow the cycle at t={t:g} s: {reason}")
        self.t = t


@dataclass(frozen=True, eq=False)
class CycleProfile:
    """Per-step operating points of one design on one cycle."""

    t: np.ndarray
    v: np.ndarray
    T_m: np.ndarray
    w_m: np.ndarray
    P_loss: np.ndarray
    P_ac: np.ndarray
    dt: np.ndarray
    margin: float  # normalized envelope margin, < 0 means infeasible
    first_violation: float | None  # time of the first infeasible step
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.first_violation is None

    @property
    def energy(self) -> float:
        """Left-rectangle sum of P_ac over the cycle, J."""
        if not self.feasible:
            return math.nan
        return float(np.dot(self.P_ac, self.dt))


def cycle_profile(cycle: DriveCycle, vp: VehicleParams, gamma: float, m: MotorModel, w_scale: float | None = None) -> CycleProfile:
    """Operating points, losses and input power at every sample.

    Braking torque beyond the envelope goes to the friction brakes. Motoring
    torque beyond it, or any speed past ``w_max``, makes the design
    infeasible; the margin reports by how much (torque in units of
    ``T_max0``, speed in units of ``w_scale``).
    """
    # quasi-static demand over [t_i, t_i+1) at the interval's mean speed
    dt = cycle.dt
    v_mid = cycle.v.copy()
    v_mid[:-1] = 0.5 * (cycle.v[:-1] + cycle.v[1:])
    T_req = wheel_torque(vp, v_mid, cycle.a, gate_rolling=True)
    w = shaft_speed(vp, gamma, v_mid)
    T_m = shaft_torque(vp, gamma, T_req)
    limit = m.max_torque(w)
    T_m = np.maximum(T_m, -limit)

    w_scale = w_scale or m.reference.w_max0
    torque_slack = np.where(T_m > 0, (limit - T_m) / m.reference.T_max0, np.inf)
    speed_slack = (m.w_max - w) / w_scale
    slack = np.minimum(torque_slack, speed_slack)
    margin = float(np.min(slack))

    bad = ~m.in_envelope(T_m, w)
    first, reason = None, ""
    if np.any(bad):
        i = int(np.argmax(bad))
        first = float(cycle.t[i])
        reason = "speed above w_max" if w[i] > m.w_max else "torque above envelope"
        margin = min(margin, -1e-12)

    p_loss = losses(m, T_m, w, check=False)
    p_ac = T_m * w + p_loss
    return CycleProfile(cycle.t, v_mid, T_m, w, p_loss, p_ac, dt, margin, first, reason)


def cycle_energy(cycle: DriveCycle, vp: VehicleParams, gamma: float, m: MotorModel) -> float:
    """Energy drawn at the motor input over the cycle, J.

    Raises :class:`CycleInfeasibleError` with the first violating timestamp.
    """
    prof = cycle_profile(cycle, vp, gamma, m)
    if not prof.feasible:
        raise CycleInfeasibleError(prof.first_violation, prof.reason)
    return prof.energy


def top_speed_margin(vp: VehicleParams, gamma: float, m: MotorModel, spec: PerformanceSpec) -> float:
    w = shaft_speed(vp, gamma, spec.v_max)
    demand = shaft_torque(vp, gamma, wheel_torque(vp, spec.v_max, 0.0))
    speed = (m.w_max - w) / w
    torque = (m.max_torque(w) - demand) / m.reference.T_max0
    return float(min(speed, torque))


check_top_speed = top_speed_margin


def acceleration_time(vp: VehicleParams, gamma: float, m: MotorModel, spec: PerformanceSpec) -> float:
    """Full-throttle time from standstill to ``v_acc`` (explicit Euler), capped at ``t_cap``."""
    dt = spec.dt_acc
    traction = gamma * vp.eta_g / vp.r_w
    t, v = 0.0, 0.0
    n_max = int(round(spec.t_cap / dt))
    for _ in range(n_max):
        force = traction * m.max_torque(gamma * v / vp.r_w) - vp.drag_force(v) - vp.rolling_force
        dv = dt * force / vp.m_v
        if v + dv >= spec.v_acc:
            return float(t + dt * (spec.v_acc - v) / dv)
        if dv <= 0:
            break
        v += dv
        t += dt
    return spec.t_cap


def check_acceleration(vp: VehicleParams, gamma: float, m: MotorModel, spec: PerformanceSpec) -> float:
    """Normalized slack ``(t_acc - elapsed) / t_acc``."""
    return float((spec.t_acc - acceleration_time(vp, gamma, m, spec)) / spec.t_acc)


def grade_torque_demand(vp: VehicleParams, spec: PerformanceSpec) -> float:
    """Wheel torque to hold the vehicle on the maximum grade, N m."""
    theta = math.atan(spec.alpha_max)
    return vp.r_w * vp.m_v * vp.g * (math.sin(theta) + vp.c_r * math.cos(theta))


def check_gradeability(vp: VehicleParams, gamma: float, m: MotorModel, spec: PerformanceSpec) -> float:
    """Shaft-torque slack at crawl speed in units of ``T_max0``."""
    w = shaft_speed(vp, gamma, spec.v_grade)
    available = gamma * vp.eta_g * m.max_torque(w)
    return float((available - grade_torque_demand(vp, spec)) / (gamma * vp.eta_g * m.reference.T_max0))


@dataclass(frozen=True)
class SimContext:
    cycle: DriveCycle
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    reference: ReferenceMachine = field(default_factory=ReferenceMachine)
    spec: PerformanceSpec = field(default_factory=PerformanceSpec)
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))


@dataclass(frozen=True, eq=False)
class EvaluationRecord:
    design: DesignVector
    energy: float  # E_ac(T), J; nan if the cycle cannot be followed
    feasible: bool
    margins: dict
    profile: CycleProfile | None = None

    @property
    def violation(self) -> float:
        """Euclidean norm of the negative margins."""
        return math.sqrt(sum(min(v, 0.0) ** 2 for v in self.margins.values()))

    def same_outcome(self, other: "EvaluationRecord") -> bool:
        return (
            (self.energy == other.energy or (math.isnan(self.energy) and math.isnan(other.energy)))
            and self.feasible == other.feasible
            and self.margins == other.margins
        )


def evaluate(design: DesignVector, ctx: SimContext, keep_profile: bool = False) -> EvaluationRecord:
    """Check the constraints, then simulate the cycle.

    Out-of-bounds designs raise :class:`~emscale.motor.ScalingDomainError`
    before anything is simulated; every other kind of infeasibility is
    reported through the margins.
    """
    design.check(ctx.bounds)
    m = build_model(ctx.reference, design.scaling, ctx.bounds)
    vp, spec, gamma = ctx.vehicle, ctx.spec, design.gamma

    margins = {
        "top_speed": top_speed_margin(vp, gamma, m, spec),
        "acceleration": check_acceleration(vp, gamma, m, spec),
        "gradeability": check_gradeability(vp, gamma, m, spec),
    }
    w_scale = shaft_speed(vp, gamma, spec.v_max)
    prof = cycle_profile(ctx.cycle, vp, gamma, m, w_scale=w_scale)
    margins["cycle"] = prof.margin
    feasible = all(v >= 0 for v in margins.values()) and prof.feasible
    return EvaluationRecord(
        design=design,
        energy=prof.energy,
        feasible=feasible,
        margins=margins,
        profile=prof if keep_profile else None,
    )
