"""The three optimization problems behind the probability bounds.

Problems 1 and 3 are solved in closed form and cross-checked numerically.
Problem 2 has no known closed form and is solved by a multi-start penalized
Nelder-Mead search over an exactly feasible parametrization.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .automata import APLUS_PROBABILITY, APLUS_SIN_SQ, C5_PROBABILITY

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-7
FEASIBILITY_TOL = 1e-8
DEFAULT_DIM = 6
MAX_DIM = 12
DEFAULT_RESTARTS = 200
DEFAULT_SEED = 7
PENALTY_SCHEDULE = (10.0, 1e3, 1e5, 1e7)
SIMPLEX_TOL = 1e-10
EVALS_PER_PARAMETER = 50
GRID_POINTS = 401
REFINE_SPAN = 0.2
HALF_PI = math.pi / 2
Y_LOWER = math.sqrt(3 / 5)


class ClosedFormMismatch(ArithmeticError):
    """A closed-form optimum disagrees with its numeric cross-check."""


@dataclass(frozen=True)
class Problem1Point:
    alpha: float
    beta: float
    p2: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if not 0.0 <= value <= HALF_PI + 1e-15:
                raise ValueError(f"{name} must lie in [0, pi/2], got {value}")
        if not 0.0 <= self.p2 <= 1.0:
            raise ValueError(f"p2 must be a probability, got {self.p2}")


@dataclass(frozen=True, eq=False)
class Problem2Point:
    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray
    pa1: float
    pr1: float
    pa2: float
    pr2: float
    accept_dim: int

    @property
    def dim(self) -> int:
        return len(self.v1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "accept_dim": self.accept_dim,
            "v1": [float(x) for x in self.v1],
            "v2": [float(x) for x in self.v2],
            "v3": [float(x) for x in self.v3],
            "pa1": self.pa1,
            "pr1": self.pr1,
            "pa2": self.pa2,
            "pr2": self.pr2,
        }


@dataclass(frozen=True)
class Problem3Point:
    """E^2 and alpha; ``beta`` None means the optimal beta = 2 alpha - pi/2."""

    e_sq: float
    alpha: float
    beta: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.e_sq <= 1.0:
            raise ValueError(f"E^2 must lie in [0, 1], got {self.e_sq}")

    @property
    def y(self) -> float:
        return -math.cos(2 * self.alpha)


@dataclass(frozen=True)
class OptimizationResult:
    problem: int
    p: float
    witness: Any
    feasibility_residual: float
    iterations: int
    seed: Optional[int] = None
    restarts: int = 0
    numeric_p: Optional[float] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        witness = self.witness
        if isinstance(witness, Problem2Point):
            witness = witness.to_dict()
        elif witness is not None:
            witness = {k: v for k, v in vars(witness).items() if v is not None}
        return {
            "problem": self.problem,
            "p": self.p,
            "witness": witness,
            "residual": self.feasibility_residual,
            "iterations": self.iterations,
            "seed": self.seed,
            "restarts": self.restarts,
            "numeric_p": self.numeric_p,
            **self.details,
        }


# Problem 1


def problem1_objective(pt: Problem1Point) -> float:
    """``min(cos^2(a - b), sin^2 a cos^2 b + p2, 1 - p2)``."""
    a, b, p2 = pt.alpha, pt.beta, pt.p2
    return min(math.cos(a - b) ** 2, math.sin(a) ** 2 * math.cos(b) ** 2 + p2, 1 - p2)


def problem1_branch_bound(alpha: float, beta: float) -> float:
    """Upper bound ``(1 + sin^2 a cos^2 b) / 2`` on the last two terms.

    For alpha < beta this never exceeds 5/8.
    """
    return (1 + math.sin(alpha) ** 2 * math.cos(beta) ** 2) / 2


def _problem1_best(alpha, beta):
    """Best value over p2 at fixed angles, without assuming alpha >= beta."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    s = np.sin(alpha) ** 2 * np.cos(beta) ** 2
    p2 = np.clip((1 - s) / 2, 0.0, np.sin(beta) ** 2)
    first = np.cos(np.maximum(alpha - beta, 0.0)) ** 2
    return np.minimum(first, np.minimum(s + p2, 1 - p2))


def _refine_2d(func, x0, x_bounds, y_bounds, span=REFINE_SPAN):
    """Nested bounded scalar maximization around a grid point.

    The inner search covers all of ``y_bounds`` and needs ``func(x, .)`` to be
    unimodal; the outer one is limited to ``x0 +- span``.
    """

    def inner(x):
        res = minimize_scalar(
            lambda y: -func(x, y), bounds=y_bounds, method="bounded", options={"xatol": 1e-12}
        )
        return res.x, -res.fun

    lo, hi = max(x_bounds[0], x0 - span), min(x_bounds[1], x0 + span)
    res = minimize_scalar(
        lambda x: -inner(x)[1], bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
    )
    y, value = inner(res.x)
    return res.x, y, value


def problem1_numeric(points: int = GRID_POINTS) -> Tuple[float, float, float]:
    """Dense grid over (alpha, beta) followed by bounded refinement."""
    grid = np.linspace(0.0, HALF_PI, points)
    a, b = np.meshgrid(grid, grid, indexing="ij")
    values = _problem1_best(a, b)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    alpha, beta, refined = _refine_2d(
        lambda x, y: float(_problem1_best(x, y)), grid[i], (0.0, HALF_PI), (0.0, HALF_PI)
    )
    if values[i, j] >= refined:
        return float(values[i, j]), float(grid[i]), float(grid[j])
    return float(refined), float(alpha), float(beta)


def solve_problem1() -> OptimizationResult:
    """Closed form ``(52 + 4 sqrt 7) / 81``, verified against a numeric search."""
    alpha = math.asin(math.sqrt(APLUS_SIN_SQ))
    beta = HALF_PI - alpha
    p2 = (1 - APLUS_SIN_SQ**2) / 2
    witness = Problem1Point(alpha=alpha, beta=beta, p2=p2)
    residual = max(0.0, p2 - math.sin(beta) ** 2)

    numeric, _, _ = problem1_numeric()
    logger.debug("problem 1: closed form %.12f, numeric %.12f", APLUS_PROBABILITY, numeric)
    if abs(numeric - APLUS_PROBABILITY) > AGREEMENT_TOL:
        logger.warning("problem 1 numeric optimum %.12f disagrees", numeric)
        raise ClosedFormMismatch(
            f"Problem 1: closed form {APLUS_PROBABILITY:.12f} vs numeric {numeric:.12f}"
        )
    return OptimizationResult(
        problem=1,
        p=APLUS_PROBABILITY,
        witness=witness,
        feasibility_residual=residual,
        iterations=GRID_POINTS**2,
        numeric_p=numeric,
        details={"branch_alpha_lt_beta": 5 / 8},
    )


# Problem 3


def problem3_objectives(pt: Problem3Point) -> Tuple[float, float]:
    """``f = 1 - E^2 sin^2(3a)`` and ``g = (1 - E^2 cos^3(2a)) / 2``."""
    a = pt.alpha
    f = 1 - pt.e_sq * math.sin(3 * a) ** 2
    g = (1 - pt.e_sq * math.cos(2 * a) ** 3) / 2
    return f, g


def problem3_general_value(pt: Problem3Point) -> float:
    """Value before fixing beta: ``min(1 - E^2 cos^2(a+b), (1 - E^2 sin^2 b cos 2a) / 2)``."""
    if pt.beta is None:
        return min(problem3_objectives(pt))
    a, b, e_sq = pt.alpha, pt.beta, pt.e_sq
    return min(
        1 - e_sq * math.cos(a + b) ** 2,
        (1 - e_sq * math.sin(b) ** 2 * math.cos(2 * a)) / 2,
    )


def problem3_y_objective(y: float) -> float:
    """``1/2 + y^3 / (2 (5y^3 - 3y + 1))`` on the equal-branches curve."""
    return 0.5 + y**3 / (2 * (5 * y**3 - 3 * y + 1))


def _problem3_min(e_sq, alpha):
    e_sq = np.asarray(e_sq, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    f = 1 - e_sq * np.sin(3 * alpha) ** 2
    g = (1 - e_sq * np.cos(2 * alpha) ** 3) / 2
    return np.minimum(f, g)


def problem3_numeric(points: int = GRID_POINTS) -> Tuple[float, float]:
    """Returns (1-D scan of the y-objective, 2-D scan of min(f, g))."""
    ys = np.linspace(Y_LOWER, 1.0, points)
    y_values = problem3_y_objective(ys)
    k = int(np.argmax(y_values))
    h = ys[1] - ys[0]
    res = minimize_scalar(
        lambda y: -problem3_y_objective(y),
        bounds=(max(Y_LOWER, ys[k] - 2 * h), min(1.0, ys[k] + 2 * h)),
        method="bounded",
        options={"xatol": 1e-12},
    )
    y_best = max(float(y_values[k]), -float(res.fun))

    e_grid = np.linspace(0.0, 1.0, points)
    a_grid = np.linspace(0.0, HALF_PI, points)
    a, e = np.meshgrid(a_grid, e_grid, indexing="ij")
    values = _problem3_min(e, a)
    i, j = np.unravel_index(np.argmax(values), values.shape)
    # min(f, g) is concave in E^2 for fixed alpha, so alpha is the outer variable.
    _, _, refined = _refine_2d(
        lambda x, y: float(_problem3_min(y, x)), a_grid[i], (0.0, HALF_PI), (0.0, 1.0)
    )
    grid_best = max(float(values[i, j]), refined)
    return y_best, grid_best


def solve_problem3() -> OptimizationResult:
    """Closed form ``1/2 + 3 sqrt 15 / 50`` at ``y = sqrt(3/5)``, ``E^2 = 1``."""
    cos_sq = 0.5 - math.sqrt(15) / 10
    alpha = math.acos(math.sqrt(cos_sq))
    witness = Problem3Point(e_sq=1.0, alpha=alpha)
    f, g = problem3_objectives(witness)

    y_scan, grid_scan = problem3_numeric()
    logger.debug("problem 3: y-scan %.12f, grid %.12f", y_scan, grid_scan)
    for label, numeric in (("y-scan", y_scan), ("grid scan", grid_scan)):
        if abs(numeric - C5_PROBABILITY) > AGREEMENT_TOL:
            logger.warning("problem 3 %s optimum %.12f disagrees", label, numeric)
            raise ClosedFormMismatch(
                f"Problem 3: closed form {C5_PROBABILITY:.12f} vs {label} {numeric:.12f}"
            )
    return OptimizationResult(
        problem=3,
        p=C5_PROBABILITY,
        witness=witness,
        feasibility_residual=abs(min(f, g) - C5_PROBABILITY),
        iterations=GRID_POINTS**2 + GRID_POINTS,
        numeric_p=grid_scan,
        details={"y": Y_LOWER, "y_scan": y_scan},
    )


# Problem 2


def problem2_residual(pt: Problem2Point) -> float:
    """Largest violation of the equality, orthogonality and range constraints."""
    v1, v2, v3 = pt.v1, pt.v2, pt.v3
    u = v1 + v2 + v3
    w = v1 + v2
    probabilities = (pt.pa1, pt.pr1, pt.pa2, pt.pr2)
    violations = [
        abs(float(np.linalg.norm(u)) - 1.0),
        abs(float(v1 @ v2)),
        abs(float(u @ v2)),
        abs(float(w @ v3)),
        abs(pt.pa1 + pt.pr1 - float(v3 @ v3)),
        abs(pt.pa2 + pt.pr2 - float(v2 @ v2)),
    ]
    violations += [max(0.0, -x, x - 1.0) for x in probabilities]
    return max(violations)


def problem2_evaluate(pt: Problem2Point) -> Tuple[float, float]:
    """Objective p and feasibility residual of a Problem-2 point."""
    if not 0 <= pt.accept_dim <= pt.dim:
        raise ValueError("accept_dim must lie between 0 and dim")
    if not (len(pt.v1) == len(pt.v2) == len(pt.v3)):
        raise ValueError("v1, v2 and v3 must have the same length")
    na = pt.accept_dim
    u = pt.v1 + pt.v2 + pt.v3
    w = pt.v1 + pt.v2
    accept_u = float(u[:na] @ u[:na])
    accept_w = float(w[:na] @ w[:na])
    accept_v1 = float(pt.v1[:na] @ pt.v1[:na])
    p = min(accept_u, accept_w + pt.pa1, 1.0 - accept_v1 - pt.pa1 - pt.pa2)
    return p, problem2_residual(pt)


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(x, axis=-1, keepdims=True)
    return np.divide(x, norm, out=np.zeros_like(x), where=norm > 1e-15)


def _reject(x: np.ndarray, unit: np.ndarray) -> np.ndarray:
    return x - np.sum(x * unit, axis=-1, keepdims=True) * unit


def problem2_vectors(theta: np.ndarray, dim: int):
    """Map raw parameters to (v1, v2, v3) satisfying the vector constraints.

    ``theta`` has ``3 dim + 2`` entries along its last axis: raw directions
    for u = v1 + v2 + v3, v2 and the free part of v1, then two angles fixing
    ``s = <v1, u>`` and the share of ``s - s^2`` taken by ``|v2|^2``.
    """
    theta = np.asarray(theta, dtype=float)
    u = _unit_rows(theta[..., :dim])
    raw_v2 = _reject(theta[..., dim : 2 * dim], u)
    raw_r = _reject(theta[..., 2 * dim : 3 * dim], u)
    v2_dir = _unit_rows(raw_v2)
    r_dir = _unit_rows(_reject(raw_r, v2_dir))
    s = 0.5 + 0.5 * np.sin(theta[..., 3 * dim])[..., None]
    share = 0.5 + 0.5 * np.sin(theta[..., 3 * dim + 1])[..., None]
    n2 = share * (s - s * s)
    v2 = np.sqrt(n2) * v2_dir
    v1 = s * u + np.sqrt(np.maximum(s - s * s - n2, 0.0)) * r_dir
    v3 = u - v1 - v2
    return v1, v2, v3


def _balanced_probabilities(v1, v2, v3, accept_dim):
    """Best p_a1 given the vectors; p_a2 = 0 since it only lowers the last term."""
    w = v1 + v2
    low = np.sum(w[..., :accept_dim] ** 2, axis=-1)
    high = 1.0 - np.sum(v1[..., :accept_dim] ** 2, axis=-1)
    cap = np.sum(v3 * v3, axis=-1)
    pa1 = np.clip((high - low) / 2, 0.0, cap)
    return pa1, np.zeros_like(pa1)


def problem2_point(theta: np.ndarray, dim: int, accept_dim: int) -> Problem2Point:
    v1, v2, v3 = problem2_vectors(theta, dim)
    pa1, pa2 = _balanced_probabilities(v1, v2, v3, accept_dim)
    pa1, pa2 = float(pa1), float(pa2)
    return Problem2Point(
        v1=v1,
        v2=v2,
        v3=v3,
        pa1=pa1,
        pr1=max(0.0, float(v3 @ v3) - pa1),
        pa2=pa2,
        pr2=float(v2 @ v2) - pa2,
        accept_dim=accept_dim,
    )


def _accept_dim_for(restart: int, dim: int) -> int:
    if dim <= 2:
        return 1
    return 1 + restart % (dim - 1)


def _solve_one(dim: int, accept_dim: int, rng: np.random.Generator):
    n = 3 * dim + 2
    x = rng.uniform(-1.0, 1.0, n)
    evaluations = 0
    for mu in PENALTY_SCHEDULE:

        def objective(theta, mu=mu):
            p, residual = problem2_evaluate(problem2_point(theta, dim, accept_dim))
            return -p + mu * residual**2

        res = minimize(
            objective,
            x,
            method="Nelder-Mead",
            options={
                "xatol": SIMPLEX_TOL,
                "fatol": SIMPLEX_TOL,
                "maxfev": EVALS_PER_PARAMETER * n,
                "adaptive": True,
            },
        )
        x = res.x
        evaluations += res.nfev
    point = problem2_point(x, dim, accept_dim)
    p, residual = problem2_evaluate(point)
    return p, residual, point, evaluations


def solve_problem2(
    dim: int = DEFAULT_DIM,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = DEFAULT_SEED,
    accept_dim: Optional[int] = None,
) -> OptimizationResult:
    """Multi-start search for the Problem-2 optimum.

    Restart r draws from the r-th child of ``SeedSequence(seed)`` and, unless
    ``accept_dim`` is pinned, uses an accepting subspace of dimension
    ``1 + r mod (dim - 1)``. The best feasible restart wins; ties keep the
    earliest.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if dim > MAX_DIM:
        raise ValueError(f"dim must be at most {MAX_DIM}")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if accept_dim is not None and not 1 <= accept_dim <= dim:
        raise ValueError("accept_dim must lie between 1 and dim")

    children = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    evaluations = 0
    for r, child in enumerate(children):
        na = accept_dim if accept_dim is not None else _accept_dim_for(r, dim)
        p, residual, point, nfev = _solve_one(dim, na, np.random.default_rng(child))
        evaluations += nfev
        logger.debug("problem 2 restart %d (accept_dim %d): p=%.10f residual=%.2e", r, na, p, residual)
        if residual > FEASIBILITY_TOL:
            continue
        if best is None or p > best[0]:
            best = (p, residual, point)

    if best is None:
        logger.warning("problem 2: no restart reached feasibility %g", FEASIBILITY_TOL)
        return OptimizationResult(
            problem=2, p=float("nan"), witness=None, feasibility_residual=float("inf"),
            iterations=evaluations, seed=seed, restarts=restarts,
        )
    p, residual, point = best
    return OptimizationResult(
        problem=2,
        p=p,
        witness=point,
        feasibility_residual=residual,
        iterations=evaluations,
        seed=seed,
        restarts=restarts,
        details={"dim": dim},
    )


# Sampling


def _sample_problem1(count, rng):
    alpha = rng.uniform(0.0, HALF_PI, count)
    beta = rng.uniform(0.0, HALF_PI, count)
    p2 = rng.uniform(0.0, 1.0, count) * np.sin(beta) ** 2
    s = np.sin(alpha) ** 2 * np.cos(beta) ** 2
    first = np.cos(np.maximum(alpha - beta, 0.0)) ** 2
    p = np.minimum(first, np.minimum(s + p2, 1 - p2))
    points = [
        Problem1Point(alpha=float(a), beta=float(b), p2=float(q))
        for a, b, q in zip(alpha, beta, p2)
    ]
    return points, p


def _sample_problem2(count, rng, dim):
    theta = rng.uniform(-math.pi, math.pi, (count, 3 * dim + 2))
    v1, v2, v3 = problem2_vectors(theta, dim)
    accept_dims = rng.integers(1, dim, count) if dim > 1 else np.ones(count, dtype=int)
    n3 = np.sum(v3 * v3, axis=-1)
    n2 = np.sum(v2 * v2, axis=-1)
    pa1 = rng.uniform(0.0, 1.0, count) * n3
    pa2 = rng.uniform(0.0, 1.0, count) * n2
    # Row i measures acceptance on its first accept_dims[i] coordinates.
    accepted = np.arange(dim) < accept_dims[:, None]
    u, w = v1 + v2 + v3, v1 + v2
    values = np.minimum(
        np.sum((u * accepted) ** 2, axis=-1),
        np.minimum(
            np.sum((w * accepted) ** 2, axis=-1) + pa1,
            1.0 - np.sum((v1 * accepted) ** 2, axis=-1) - pa1 - pa2,
        ),
    )
    points = [
        Problem2Point(
            v1[i], v2[i], v3[i], float(pa1[i]), float(n3[i] - pa1[i]),
            float(pa2[i]), float(n2[i] - pa2[i]), int(accept_dims[i]),
        )
        for i in range(count)
    ]
    return points, values


def _sample_problem3(count, rng):
    e_sq = rng.uniform(0.0, 1.0, count)
    alpha = rng.uniform(0.0, HALF_PI, count)
    beta = rng.uniform(0.0, HALF_PI, count)
    p = np.minimum(
        1 - e_sq * np.cos(alpha + beta) ** 2,
        (1 - e_sq * np.sin(beta) ** 2 * np.cos(2 * alpha)) / 2,
    )
    points = [
        Problem3Point(e_sq=float(e), alpha=float(a), beta=float(b))
        for e, a, b in zip(e_sq, alpha, beta)
    ]
    return points, p


def feasible_sampler(
    problem_id: int, count: int, seed: int, dim: int = DEFAULT_DIM
) -> List[Tuple[Any, float]]:
    """Random feasible points of a problem with their objective values."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    if problem_id == 1:
        points, values = _sample_problem1(count, rng)
    elif problem_id == 2:
        points, values = _sample_problem2(count, rng, dim)
    elif problem_id == 3:
        points, values = _sample_problem3(count, rng)
    else:
        raise ValueError(f"Unknown problem: {problem_id}")
    return list(zip(points, (float(v) for v in values)))
