"""Seeded design optimization: the evaluator wrapped for the BO loop."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bayesopt import Observation, default_n_init, optimize
from .design import DesignSpace, DesignVector
from .sim import EvaluationRecord, SimContext, evaluate

DEFAULT_PENALTY_FALLBACK = 2.0e7  # J, used until the first feasible design appears


@dataclass
class RunResult:
    mode: str
    seed: int
    iterations: int
    n_init: int
    history: list  # EvaluationRecord, in evaluation order
    ei: list
    wall_time: float

    @property
    def best(self) -> EvaluationRecord | None:
        feasible = [r for r in self.history if r.feasible]
        if not feasible:
            return None
        return min(feasible, key=lambda r: r.energy)

    @property
    def feasible_run(self) -> bool:
        return self.best is not None

    def running_best(self) -> list[float]:
        out, cur = [], math.inf
        for r in self.history:
            if r.feasible and r.energy < cur:
                cur = r.energy
            out.append(cur)
        return out


def design_problem(ctx: SimContext, space: DesignSpace):
    def objective(x) -> Observation:
        rec = evaluate(space.to_design(x), ctx)
        value = rec.energy if math.isfinite(rec.energy) else math.inf
        violation = 0.0 if rec.feasible else max(rec.violation, 1e-12)
        return Observation(value, violation, rec)

    return objective


def run_optimization(
    ctx: SimContext,
    mode: str,
    iters: int,
    seed: int,
    penalty_fallback: float = DEFAULT_PENALTY_FALLBACK,
) -> RunResult:
    """Minimize cycle energy over the free variables of ``mode``."""
    space = DesignSpace(mode, ctx.bounds)
    trace = optimize(
        design_problem(ctx, space),
        space.lower,
        space.upper,
        iters,
        seed,
        n_init=default_n_init(space.dim),
        fallback=penalty_fallback,
    )
    return RunResult(
        mode=mode,
        seed=seed,
        iterations=iters,
        n_init=trace.n_init,
        history=[o.payload for o in trace.observations],
        ei=list(trace.ei),
        wall_time=trace.wall_time,
    )


def reference_design(mode: str = "combined", gamma: float = 5.0) -> DesignVector:
    return DesignVector(gamma=gamma, mode=mode)
