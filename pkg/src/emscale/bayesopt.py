"""Bayesian optimization with a Matern-5/2 GP and expected improvement.

Constraints enter through a deterministic penalty: an infeasible sample is
trained on as ``worst_feasible * (1 + violation)`` so it never looks better
than any feasible one.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.optimize import minimize
from scipy.special import ndtr
from scipy.stats import qmc

log = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)
LOG_2PI = math.log(2 * math.pi)

JITTER_START = 1e-8
JITTER_MAX = 1e-2
DEDUPE_TOL = 1e-9

# log-space hyperparameter boxes
LOG_LENGTH_BOUNDS = (math.log(1e-2), math.log(2e1))
LOG_SIGNAL_BOUNDS = (math.log(1e-2), math.log(1e2))
LOG_NOISE_BOUNDS = (math.log(1e-8), math.log(1e-1))

N_CANDIDATES = 1024
N_REFINE = 5
INIT_SEED_OFFSET = 104729


class GPFitError(RuntimeError):
    pass


def matern52(A: np.ndarray, B: np.ndarray, lengthscales, signal_var: float) -> np.ndarray:
    diff = (A[:, None, :] - B[None, :, :]) / lengthscales
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    sr = SQRT5 * r
    return signal_var * (1.0 + sr + sr * sr / 3.0) * np.exp(-sr)


def dedupe(X: np.ndarray, y: np.ndarray, tol: float = DEDUPE_TOL):
    """Drop rows of X within ``tol`` (max-norm) of an earlier row."""
    keep = []
    for i in range(len(X)):
        if all(np.max(np.abs(X[i] - X[j])) > tol for j in keep):
            keep.append(i)
    return X[keep], y[keep]


def _cholesky(K: np.ndarray, noise: float):
    n = len(K)
    jitter = JITTER_START
    while jitter <= JITTER_MAX * (1 + 1e-12):
        try:
            L = scipy.linalg.cholesky(K + (noise + jitter) * np.eye(n), lower=True)
            return L, jitter
        except np.linalg.LinAlgError:
            jitter *= 10
    return None, jitter


@dataclass(frozen=True, eq=False)
class GpModel:
    X: np.ndarray  # unit-box inputs
    y: np.ndarray  # raw targets
    y_mean: float
    y_std: float
    lengthscales: np.ndarray
    signal_var: float
    noise_var: float
    L: np.ndarray
    alpha: np.ndarray
    jitter: float
    degenerate: bool  # all targets equal
    log_likelihood: float

    def predict(self, Xq):
        """Posterior mean and standard deviation (raw units) of the latent function."""
        Xq = np.atleast_2d(np.asarray(Xq, dtype=float))
        Ks = matern52(Xq, self.X, self.lengthscales, self.signal_var)
        mu = Ks @ self.alpha
        v = scipy.linalg.solve_triangular(self.L, Ks.T, lower=True)
        var = np.maximum(self.signal_var - np.sum(v * v, axis=0), 0.0)
        return self.y_mean + self.y_std * mu, self.y_std * np.sqrt(var)

    def predict_standardized(self, Xq):
        mu, sd = self.predict(Xq)
        return (mu - self.y_mean) / self.y_std, sd / self.y_std


def _log_marginal(theta, X, z, fixed_noise):
    d = X.shape[1]
    ls = np.exp(theta[:d])
    s2 = math.exp(theta[d])
    noise = fixed_noise if fixed_noise is not None else math.exp(theta[d + 1])
    K = matern52(X, X, ls, s2)
    L, _ = _cholesky(K, noise)
    if L is None:
        return -np.inf
    a = scipy.linalg.cho_solve((L, True), z)
    return float(-0.5 * z @ a - np.sum(np.log(np.diag(L))) - 0.5 * len(z) * LOG_2PI)


def _coordinate_search(f, theta, lo, hi, step=1.0, min_step=0.05, max_passes=60):
    best = f(theta)
    for _ in range(max_passes):
        improved = False
        for i in range(len(theta)):
            for sign in (1.0, -1.0):
                trial = theta.copy()
                trial[i] = np.clip(trial[i] + sign * step, lo[i], hi[i])
                if trial[i] == theta[i]:
                    continue
                val = f(trial)
                if val > best + 1e-10:
                    theta, best, improved = trial, val, True
                    break
        if not improved:
            step /= 2
            if step < min_step:
                break
    return theta, best


def fit_gp(X, y, noise: float | None = None) -> GpModel:
    """Fit a Matern-5/2 ARD GP to unit-box inputs.

    Targets are standardized internally. Hyperparameters maximize the log
    marginal likelihood: best of a fixed start grid, then coordinate search
    in log space. ``noise`` pins the noise variance (standardized units).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    X, y = dedupe(X, y)
    if len(X) < 2:
        raise GPFitError(f"need at least 2 distinct points, got {len(X)}")
    n, d = X.shape

    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    degenerate = not y_std > 1e-12 * max(1.0, abs(y_mean))
    if degenerate:
        y_std = 1.0
    z = (y - y_mean) / y_std

    lo = [LOG_LENGTH_BOUNDS[0]] * d + [LOG_SIGNAL_BOUNDS[0]]
    hi = [LOG_LENGTH_BOUNDS[1]] * d + [LOG_SIGNAL_BOUNDS[1]]
    if noise is None:
        lo.append(LOG_NOISE_BOUNDS[0])
        hi.append(LOG_NOISE_BOUNDS[1])
    lo, hi = np.array(lo), np.array(hi)

    def objective(theta):
        return _log_marginal(theta, X, z, noise)

    starts = []
    for ls in (0.1, 0.3, 1.0):
        for nv in ((1e-6, 1e-3) if noise is None else (None,)):
            theta = [math.log(ls)] * d + [0.0]
            if nv is not None:
                theta.append(math.log(nv))
            starts.append(np.array(theta))
    scored = [(objective(t), i) for i, t in enumerate(starts)]
    best_val, best_i = max(scored)
    theta, lml = _coordinate_search(objective, starts[best_i], lo, hi)
    if not np.isfinite(lml):
        theta = starts[best_i]

    ls = np.exp(theta[:d])
    s2 = math.exp(theta[d])
    nv = noise if noise is not None else math.exp(theta[d + 1])
    K = matern52(X, X, ls, s2)
    L, jitter = _cholesky(K, nv)
    if L is None:
        raise GPFitError(f"covariance not positive definite at jitter {JITTER_MAX:g}; design set:\n{X}")
    alpha = scipy.linalg.cho_solve((L, True), z)
    return GpModel(X, y, y_mean, y_std, ls, s2, nv + jitter, L, alpha, jitter, degenerate, lml)


def ei_closed_form(mu, sigma, best):
    """Expected improvement below ``best`` for a Gaussian N(mu, sigma^2)."""
    mu, sigma = np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float)
    gap = best - mu
    with np.errstate(divide="ignore", invalid="ignore"):
        z = gap / sigma
        ei = gap * ndtr(z) + sigma * np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    ei = np.where(sigma > 0, ei, np.maximum(gap, 0.0))
    ei = np.maximum(ei, 0.0)
    return ei if ei.ndim else float(ei)


def expected_improvement(gp: GpModel, x, best_y: float):
    """EI of minimization at unit-box point(s) ``x``; identically 0 for a constant model."""
    mu, sd = gp.predict(x)
    if gp.degenerate:
        return np.zeros(len(mu)) if np.ndim(x) > 1 else 0.0
    ei = ei_closed_form(mu, sd, best_y)
    return ei if np.ndim(x) > 1 else float(ei[0])


def _min_distance(C, X):
    d2 = np.sum((C[:, None, :] - X[None, :, :]) ** 2, axis=-1)
    return np.sqrt(np.min(d2, axis=1))


def propose(gp: GpModel, rng: np.random.Generator, best_y: float | None = None):
    """Next unit-box point maximizing EI, with its EI value.

    Scores ``N_CANDIDATES`` scrambled Sobol points and polishes the best few
    with bounded Nelder-Mead. Falls back to the candidate farthest from the
    data when EI is zero everywhere.
    """
    d = gp.X.shape[1]
    if best_y is None:
        best_y = float(np.min(gp.y))
    sobol = qmc.Sobol(d, scramble=True, seed=rng.integers(2**32))
    cand = sobol.random(N_CANDIDATES)
    ei = expected_improvement(gp, cand, best_y)
    dist = _min_distance(cand, gp.X)

    scale = gp.y_std
    if gp.degenerate or not np.max(ei) > 1e-12 * scale:
        i = int(np.argmax(dist))
        return cand[i], 0.0

    best_x, best_ei = None, -np.inf
    bounds = [(0.0, 1.0)] * d
    for i in np.argsort(-ei, kind="stable")[:N_REFINE]:
        res = minimize(
            lambda u: -expected_improvement(gp, np.clip(u, 0, 1), best_y) / scale,
            cand[i],
            method="Nelder-Mead",
            bounds=bounds,
            options={"maxfev": 200 * d, "xatol": 1e-5, "fatol": 1e-12},
        )
        for x in (np.clip(res.x, 0, 1), cand[i]):
            val = expected_improvement(gp, x, best_y)
            if val > best_ei and _min_distance(x[None, :], gp.X)[0] > 1e-6:
                best_x, best_ei = x, val
    if best_x is None:
        i = int(np.argmax(np.where(dist > 1e-6, ei, -1.0)))
        best_x, best_ei = cand[i], float(ei[i])
    return best_x, float(best_ei)


@dataclass(frozen=True)
class Observation:
    value: float
    violation: float = 0.0
    payload: object = None

    @property
    def feasible(self) -> bool:
        return self.violation == 0.0 and math.isfinite(self.value)


def penalized_targets(obs: list[Observation], fallback: float) -> np.ndarray:
    """GP training targets; infeasible points get ``worst_feasible * (1 + violation)``."""
    feasible = [o.value for o in obs if o.feasible]
    worst = max(feasible) if feasible else fallback
    return np.array([o.value if o.feasible else worst + abs(worst) * o.violation for o in obs])


@dataclass
class Trace:
    """Everything a seeded run saw, in evaluation order."""

    X: np.ndarray  # natural units
    observations: list
    ei: list  # EI at proposal; nan for the initial design
    n_init: int
    seed: int
    wall_time: float = 0.0
    best_index: int | None = field(default=None)

    @property
    def feasible_found(self) -> bool:
        return self.best_index is not None

    @property
    def best(self) -> Observation | None:
        return None if self.best_index is None else self.observations[self.best_index]

    def running_best(self) -> np.ndarray:
        out, cur = [], math.inf
        for o in self.observations:
            if o.feasible and o.value < cur:
                cur = o.value
            out.append(cur)
        return np.array(out)


def default_n_init(dim: int) -> int:
    return max(5, 2 * dim)


def optimize(
    func: Callable[[np.ndarray], Observation | float],
    lower,
    upper,
    iters: int,
    seed: int,
    n_init: int | None = None,
    fallback: float = 1e20,
    callback: Callable | None = None,
) -> Trace:
    """Minimize ``func`` over the box ``[lower, upper]``.

    ``func`` takes natural-unit coordinates and returns an
    :class:`Observation` (or a bare float for unconstrained problems).
    The initial design is a Latin hypercube of ``max(5, 2 d)`` points seeded
    from ``seed`` plus a fixed offset, so the initial design and the
    acquisition loop draw from independent streams.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    lower, upper = np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)
    d = len(lower)
    n_init = n_init or default_n_init(d)
    t0 = time.perf_counter()

    def run(u):
        out = func(lower + u * (upper - lower))
        return out if isinstance(out, Observation) else Observation(float(out))

    U = qmc.LatinHypercube(d, seed=seed + INIT_SEED_OFFSET).random(n_init)
    obs = [run(u) for u in U]
    ei_log = [math.nan] * n_init
    rng = np.random.default_rng(seed)

    for it in range(iters):
        y = penalized_targets(obs, fallback)
        gp = fit_gp(U, y)
        u, ei = propose(gp, rng, float(np.min(y)))
        U = np.vstack([U, u])
        obs.append(run(u))
        ei_log.append(ei)
        log.debug("iter %d ei=%.3g value=%.6g feasible=%s", it, ei, obs[-1].value, obs[-1].feasible)
        if callback is not None:
            callback(it, U[-1], obs[-1])

    trace = Trace(lower + U * (upper - lower), obs, ei_log, n_init, seed, time.perf_counter() - t0)
    feasible = [i for i, o in enumerate(obs) if o.feasible]
    if feasible:
        trace.best_index = min(feasible, key=lambda i: (obs[i].value, i))
    return trace
