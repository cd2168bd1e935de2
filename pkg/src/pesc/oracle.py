"""Independent reference projections for validating the epigraph machinery.

The oracle restates the lifted nearest-point problem directly -- minimize
||v - w||^2 + y^2 subject to y >= f(w) -- and hands it to a generic
convex-programming solver.  It shares no code with the projection path it
checks: the cost appears here as a solver expression, not as the eval /
subgradient pair the solver-side code uses.

Desk scale only (vectors of at most 16 entries); accuracy, not speed.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .costs import CostFunction

MAX_ORACLE_SIZE = 16


@dataclass(frozen=True)
class OracleConfig:
    """Accuracy knobs: probe step for the stationarity check, solver
    iteration cap, and objective tolerance."""

    step: float = 1e-4
    iters: int = 50_000
    tol: float = 1e-4

    def __post_init__(self):
        if not (self.step > 0 and self.iters > 0 and self.tol > 0):
            raise ValueError("step, iters and tol must all be positive")


def oracle_objective(v: np.ndarray, w: np.ndarray, f: CostFunction) -> float:
    """||v - w||^2 + f(w)^2: the boundary reduction of the lifted distance.

    Valid because f >= 0 puts the nearest lifted point to (v, 0) at
    height y = f(w).
    """
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    return float(np.sum((v - w) ** 2)) + f.eval(w) ** 2


def oracle_epigraph_projection(v: np.ndarray, f: CostFunction, cfg: OracleConfig = OracleConfig()):
    """Reference nearest point of the epigraph of f to (v, 0).

    Returns (w, y).  The result is verified stationary: random
    perturbations of size cfg.step must not improve the objective by more
    than cfg.tol, otherwise the solve is reported as failed.
    """
    import cvxpy as cp

    v = np.asarray(v, dtype=np.float64)
    if v.size > MAX_ORACLE_SIZE:
        raise ValueError(f"oracle is desk-scale only (<= {MAX_ORACLE_SIZE} entries)")

    w = cp.Variable(v.shape)
    y = cp.Variable()
    problem = cp.Problem(
        cp.Minimize(cp.sum_squares(w - v) + cp.square(y)),
        [y >= _cost_expression(w, f.kind, v.shape)],
    )
    _solve(problem, cfg)
    w_star = np.asarray(w.value, dtype=np.float64).reshape(v.shape)
    y_star = float(y.value)

    gain = _best_perturbation_gain(v, w_star, f, cfg)
    if gain > 10 * cfg.tol:
        raise RuntimeError(
            f"oracle solve not stationary: a {cfg.step:g} perturbation improved "
            f"the objective by {gain:g}"
        )
    return w_star, y_star


def _cost_expression(w, kind: str, shape):
    import cvxpy as cp

    if kind == "l1":
        return cp.norm1(cp.vec(w, order="C"))
    if kind == "l2":
        return cp.norm2(cp.vec(w, order="C"))
    if kind == "tv":
        if len(shape) == 1:
            if shape[0] < 2:
                return cp.Constant(0.0)
            return cp.sum(cp.abs(cp.diff(w)))
        total = cp.Constant(0.0)
        if shape[0] > 1:
            total += cp.sum(cp.abs(cp.diff(w, axis=0)))
        if shape[1] > 1:
            total += cp.sum(cp.abs(cp.diff(w, axis=1)))
        return total
    raise ValueError(f"unknown cost kind {kind!r}")


def _solve(problem, cfg: OracleConfig):
    import cvxpy as cp

    try:
        problem.solve(solver=cp.CLARABEL, max_iter=cfg.iters)
    except cp.error.SolverError:
        problem.status = None  # fall through to the backup solver
    if problem.status not in ("optimal", "optimal_inaccurate"):
        problem.solve(solver=cp.SCS, eps=1e-9, max_iters=cfg.iters)
    if problem.status not in ("optimal", "optimal_inaccurate"):
        raise RuntimeError(f"oracle solve failed with status {problem.status!r}")


def _best_perturbation_gain(v, w_star, f, cfg: OracleConfig, probes: int = 64) -> float:
    """Largest objective decrease found among random small perturbations."""
    rng = np.random.default_rng(1234)
    base = oracle_objective(v, w_star, f)
    best = 0.0
    for _ in range(probes):
        direction = rng.standard_normal(w_star.shape)
        direction /= np.linalg.norm(direction.ravel())
        trial = oracle_objective(v, w_star + cfg.step * direction, f)
        best = max(best, base - trial)
    return best


@dataclass(frozen=True)
class CostCheckReport:
    samples: int
    max_violation: Optional[float]


def oracle_cost_check(
    f: CostFunction, samples: int, seed: int, shape=(4, 4)
) -> CostCheckReport:
    """Probe the subgradient inequality f(u) >= f(w) + <g(w), u - w>.

    Draws random pairs and reports the worst violation (None when no
    samples were requested).
    """
    if samples < 0:
        raise ValueError("samples must be nonnegative")
    if samples == 0:
        return CostCheckReport(samples=0, max_violation=None)
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(samples):
        w = rng.uniform(-1.0, 1.0, size=shape) * 2.0
        u = rng.uniform(-1.0, 1.0, size=shape) * 2.0
        g = f.subgradient(w)
        violation = f.eval(w) + float(np.sum(g * (u - w))) - f.eval(u)
        worst = max(worst, violation)
    return CostCheckReport(samples=samples, max_violation=float(worst))
