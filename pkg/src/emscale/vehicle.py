"""Quasi-static longitudinal dynamics and the one-speed transmission."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class VehicleParams:
    """Small city car. ``c_r`` is a typical passenger-car value; the rest are
    the study's published vehicle data."""

    m_v: float = 1085.0  # kg
    r_w: float = 0.295  # m
    rho_a: float = 1.2  # kg/m^3
    c_d: float = 0.35
    A_f: float = 0.72  # m^2
    c_r: float = 0.01
    g: float = 9.81  # m/s^2
    eta_g: float = 0.95
    regen_enabled: bool = True

    def __post_init__(self):
        for name in ("m_v", "r_w", "rho_a", "g", "eta_g"):
            if not getattr(self, name) > 0:
                raise ValueError(f"VehicleParams.{name} must be positive, got {getattr(self, name)}")
        # zero drag/rolling is allowed for idealized checks
        for name in ("c_d", "A_f", "c_r"):
            if getattr(self, name) < 0:
                raise ValueError(f"VehicleParams.{name} must be non-negative, got {getattr(self, name)}")
        if self.eta_g > 1:
            raise ValueError(f"VehicleParams.eta_g must be <= 1, got {self.eta_g}")

    def drag_force(self, v):
        return 0.5 * self.rho_a * self.c_d * self.A_f * np.square(v)

    @property
    def rolling_force(self) -> float:
        return self.c_r * self.m_v * self.g


def wheel_torque(p: VehicleParams, v, a, gate_rolling: bool = False):
    """Torque at the wheels to follow (v, a) on a flat road.

    With ``gate_rolling`` the rolling term is dropped where ``v == 0`` so a
    standing vehicle demands nothing.
    """
    v = np.asarray(v, dtype=float)
    rolling = p.rolling_force
    if gate_rolling:
        rolling = np.where(v > 0, rolling, 0.0)
    out = p.r_w * (p.m_v * np.asarray(a, dtype=float) + p.drag_force(v) + rolling)
    return out if out.ndim else float(out)


def shaft_torque(p: VehicleParams, gamma: float, T_req):
    """Motor shaft torque for a wheel torque demand.

    Motoring divides the gearbox loss in, braking multiplies it out. Without
    regeneration, braking demand goes to the friction brakes and the motor
    sees zero.
    """
    T_req = np.asarray(T_req, dtype=float)
    motoring = T_req / (gamma * p.eta_g)
    if p.regen_enabled:
        braking = T_req * p.eta_g / gamma
    else:
        braking = np.zeros_like(T_req)
    out = np.where(T_req >= 0, motoring, braking)
    return out if out.ndim else float(out)


def shaft_speed(p: VehicleParams, gamma: float, v):
    out = gamma * np.asarray(v, dtype=float) / p.r_w
    return out if out.ndim else float(out)
