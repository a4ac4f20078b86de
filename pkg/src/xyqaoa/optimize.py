"""Multi-start schedule optimization.

Maximizes transfer fidelity over the 2p bang-bang durations with a projected
limited-memory quasi-Newton ascent (two-loop L-BFGS recursion, backtracking
Armijo line search, Euclidean projection onto the feasible set).  Two modes:

* free       — durations only need to stay nonnegative; total runtime floats.
* fixed_tf   — durations optimized on the scaled simplex {d >= 0, sum d = t_f}.

Every restart draws its own deterministic seed from (rng_seed, restart index),
so restarts are order-independent and the whole run is reproducible bit for
bit.  scipy's bound-constrained L-BFGS cannot handle the simplex constraint by
projection, hence the small self-contained implementation here; both modes
share it so they also share invariants (feasible iterates, monotone ascent).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import NamedTuple, Sequence

import numpy as np

from .parallel import ordered_map
from .subspace import Schedule, diagonalize_hb, _check_n_sites, _fidelity_and_gradient

__all__ = [
    "OptimizationResult",
    "OptimizerConfig",
    "RestartRecord",
    "default_restarts",
    "optimize_free",
    "optimize_fixed_tf",
    "pad_schedule",
    "random_simplex_schedule",
]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 100
    max_iterations: int = 2000
    gradient_tolerance: float = 1e-8
    rng_seed: int = 0
    mode: str = "free"  # "free" or "fixed_tf"
    t_f: float | None = None

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient tolerance must be positive")
        if self.mode not in ("free", "fixed_tf"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "fixed_tf" and (self.t_f is None or self.t_f <= 0):
            raise ValueError("fixed_tf mode needs a positive t_f")


class RestartRecord(NamedTuple):
    seed_index: int
    final_fidelity: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    best_schedule: Schedule
    best_fidelity: float
    restart_records: list[RestartRecord]
    wall_time: float
    n_sites: int
    depth: int
    mode: str
    t_f: float | None


def default_restarts(n_sites: int) -> int:
    """Restart-count rule used by the experiment grids: 200 up to 15 sites,
    400 beyond (larger chains need more draws to hit the good basins)."""
    return 200 if n_sites <= 15 else 400


def random_simplex_schedule(depth: int, t_f: float, rng: np.random.Generator) -> Schedule:
    """Uniform draw on the (2p-1)-simplex scaled to total time ``t_f``.

    Exponential spacings: 2p iid Exp(1) variates normalized to sum t_f are
    exactly Dirichlet(1, ..., 1), i.e. uniform over the simplex.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if t_f <= 0:
        raise ValueError("total time must be positive")
    gaps = -np.log(rng.uniform(size=2 * depth))
    return Schedule.from_durations(t_f * gaps / gaps.sum())


def pad_schedule(schedule: Schedule, new_depth: int) -> Schedule:
    """Append zero-duration pairs; the protocol's action is unchanged."""
    if new_depth < schedule.depth:
        raise ValueError("new depth must not shrink the schedule")
    extra = np.zeros((new_depth - schedule.depth, 2))
    return Schedule(np.vstack([schedule.pairs, extra]))


# ---------------------------------------------------------------------------
# projections
# ---------------------------------------------------------------------------


def _project_nonnegative(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _project_simplex(x: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum y = total} (sort-based)."""
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot project a non-finite point onto the simplex")
    u = np.sort(x)[::-1]
    shifted = np.cumsum(u) - total
    rho = np.nonzero(u * np.arange(1, x.size + 1) > shifted)[0][-1]
    theta = shifted[rho] / (rho + 1.0)
    return np.maximum(x - theta, 0.0)


# ---------------------------------------------------------------------------
# projected L-BFGS core
# ---------------------------------------------------------------------------

_MEMORY = 10
_ARMIJO = 1e-4


def _lbfgs_direction(grad, s_list, y_list, rho_list):
    q = grad.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def _ascend(x0, spect, project, tol, max_iter):
    """Projected quasi-Newton ascent on the fidelity.  Returns
    (x, fidelity, iterations, converged)."""
    x = project(np.asarray(x0, dtype=float))
    fid, grad_f = _fidelity_and_gradient(x, spect)
    f = -fid          # minimize the negative
    g = -grad_f
    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    rho_list: list[float] = []

    for iteration in range(max_iter):
        pg = x - project(x - g)
        if np.max(np.abs(pg)) < tol:
            return x, -f, iteration, True

        d = _lbfgs_direction(g, s_list, y_list, rho_list)
        if (
            not np.all(np.isfinite(d))
            or d @ g > -1e-14 * np.linalg.norm(d) * np.linalg.norm(g)
        ):
            d = -g  # quasi-Newton direction unusable; fall back to steepest
        d_norm = float(np.linalg.norm(d))
        d_cap = 1e6 * max(1.0, float(np.linalg.norm(x)))
        if d_norm > d_cap:
            d *= d_cap / d_norm
        alpha = 1.0 if s_list else min(1.0, 1.0 / max(np.max(np.abs(g)), 1e-12))
        x_scale = max(1.0, float(np.max(np.abs(x))))
        x_new = f_new = g_new = None
        while alpha > 1e-12:
            cand = project(x + alpha * d)
            step = cand - x
            step_inf = float(np.max(np.abs(step)))
            if step_inf == 0.0:
                break
            if step_inf < 1e-12 * x_scale and abs(g @ step) < 1e-16 * max(abs(f), 1e-3):
                break  # predicted gain below the float resolution of f
            fid_c, grad_c = _fidelity_and_gradient(cand, spect)
            f_c = -fid_c
            if f_c <= f + _ARMIJO * (g @ step) and f_c < f:
                x_new, f_new, g_new = cand, f_c, -grad_c
                break
            alpha *= 0.5
        if x_new is None:
            return x, -f, iteration, False  # no improving step left

        s = x_new - x
        y = g_new - g
        sy = s @ y
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            s_list.append(s)
            y_list.append(y)
            rho_list.append(1.0 / sy)
            if len(s_list) > _MEMORY:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)
        x, f, g = x_new, f_new, g_new

    return x, -f, max_iter, False


# ---------------------------------------------------------------------------
# multi-start drivers
# ---------------------------------------------------------------------------


def _restart_seed(rng_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=rng_seed, spawn_key=(index,))
    )


def _run_restart(args):
    (n_sites, depth, config, index, warm) = args
    spect = diagonalize_hb(n_sites)
    if config.mode == "fixed_tf":
        total = float(config.t_f)
        project = lambda v: _project_simplex(v, total)  # noqa: E731
    else:
        project = _project_nonnegative
    if warm is not None:
        x0 = warm
    else:
        rng = _restart_seed(config.rng_seed, index)
        if config.mode == "fixed_tf":
            t0 = float(config.t_f)
        else:
            t0 = rng.uniform(0.5 * n_sites, 3.0 * n_sites)
        x0 = random_simplex_schedule(depth, t0, rng).durations
    x, fid, iters, converged = _ascend(
        x0, spect, project, config.gradient_tolerance, config.max_iterations
    )
    return index, x, fid, iters, converged


def _optimize(
    n_sites: int,
    depth: int,
    config: OptimizerConfig,
    initial_schedules: Sequence[Schedule],
    workers: int | None,
) -> OptimizationResult:
    n_sites = _check_n_sites(n_sites)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    start = time.perf_counter()

    tasks = [(n_sites, depth, config, i, None) for i in range(config.restarts)]
    for j, sched in enumerate(initial_schedules):
        if sched.depth != depth:
            raise ValueError("warm-start schedule depth mismatch")
        tasks.append((n_sites, depth, config, config.restarts + j, sched.durations))

    records: list[RestartRecord] = []
    best_x = None
    best_fid = -1.0
    for index, x, fid, iters, converged in ordered_map(_run_restart, tasks, workers):
        records.append(RestartRecord(index, fid, iters, converged))
        if fid > best_fid:  # strict: ties keep the lowest restart index
            best_fid = fid
            best_x = x

    if config.mode == "fixed_tf":
        # the projection keeps iterates on the simplex to rounding; snap the
        # winner so the advertised 1e-9 sum contract is unconditional
        best_x = _project_simplex(best_x, float(config.t_f))
    best = Schedule.from_durations(np.maximum(best_x, 0.0))
    return OptimizationResult(
        best_schedule=best,
        best_fidelity=best_fid,
        restart_records=records,
        wall_time=time.perf_counter() - start,
        n_sites=n_sites,
        depth=depth,
        mode=config.mode,
        t_f=config.t_f,
    )


def optimize_free(
    n_sites: int,
    depth: int,
    config: OptimizerConfig | None = None,
    initial_schedules: Sequence[Schedule] = (),
    workers: int | None = None,
) -> OptimizationResult:
    """Maximize fidelity with unconstrained total runtime.

    Each restart draws a total time uniformly in [0.5 N, 3 N] (bracketing the
    observed ~2.4 N transfer times), places a uniform simplex draw at that
    scale, and ascends with nonnegativity enforced by projection.  Extra
    ``initial_schedules`` run as additional warm-started restarts.
    """
    config = replace(config or OptimizerConfig(), mode="free", t_f=None)
    return _optimize(n_sites, depth, config, initial_schedules, workers)


def optimize_fixed_tf(
    n_sites: int,
    depth: int,
    t_f: float,
    config: OptimizerConfig | None = None,
    initial_schedules: Sequence[Schedule] = (),
    workers: int | None = None,
) -> OptimizationResult:
    """Maximize fidelity at a fixed total runtime ``t_f``.

    Iterates live on the scaled simplex {d >= 0, sum d = t_f}; every ascent
    step is projected back, so the sum constraint holds to 1e-9 on the result.
    """
    if t_f <= 0:
        raise ValueError("t_f must be positive")
    config = replace(config or OptimizerConfig(), mode="fixed_tf", t_f=float(t_f))
    return _optimize(n_sites, depth, config, initial_schedules, workers)
