"""Drive-cycle energy optimization of a geometrically scaled PM motor and its gear ratio."""

__version__ = "0.1.0"

from .cycle import DriveCycle, load_cycle, resample, wltc_class3
from .design import DesignSpace, DesignVector
from .motor import ReferenceMachine, ScalingVector, build_model, input_power, loading_factors, losses, scale_geometry
from .sim import EvaluationRecord, PerformanceSpec, SimContext, cycle_energy, evaluate
from .vehicle import VehicleParams, shaft_speed, shaft_torque, wheel_torque
from .runner import RunResult, run_optimization

__all__ = [
    "DesignSpace",
    "DesignVector",
    "DriveCycle",
    "EvaluationRecord",
    "PerformanceSpec",
    "ReferenceMachine",
    "RunResult",
    "ScalingVector",
    "SimContext",
    "VehicleParams",
    "build_model",
    "cycle_energy",
    "evaluate",
    "input_power",
    "load_cycle",
    "loading_factors",
    "losses",
    "resample",
    "run_optimization",
    "scale_geometry",
    "shaft_speed",
    "shaft_torque",
    "wheel_torque",
    "wltc_class3",
]
