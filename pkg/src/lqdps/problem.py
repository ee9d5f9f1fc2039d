"""Multi-objective problems, sublevel sets and Pareto diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import EvaluationError, InputError, UnsupportedError

__all__ = [
    "ParetoSetModel",
    "MultiObjectiveProblem",
    "SublevelRef",
    "ParetoVerdict",
    "evaluate_objectives",
    "sublevel_violation",
    "weak_pareto_local_check",
    "pareto_set_distance",
    "coercivity_heuristic",
]

Evaluator = Callable[[np.ndarray], Sequence[float]]

# strict-dominance margin used by the local weak-Pareto check
DOMINANCE_EPS = 1e-12
# total grid budget per pass of the Pareto-set distance search
GRID_BUDGET = 10**6
GRID_POINTS_1D = 10**4


@dataclass(frozen=True)
class ParetoSetModel:
    """Analytic parameterization ``theta -> x`` of a Pareto set.

    Args:
        lo, hi: parameter box.
        mapping: vectorized map from an ``(N, p)`` parameter array to ``(N, n)`` points.
        param_coords: indices ``j`` with ``x[param_coords[j]] == theta[j]`` on the
            set. When given, the distance search is restricted to parameters
            that could beat the trivial upper bound.
    """

    lo: np.ndarray
    hi: np.ndarray
    mapping: Callable[[np.ndarray], np.ndarray]
    param_coords: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "lo", np.atleast_1d(np.asarray(self.lo, dtype=float)))
        object.__setattr__(self, "hi", np.atleast_1d(np.asarray(self.hi, dtype=float)))

    @property
    def p(self) -> int:
        return self.lo.size

    def points(self, theta) -> np.ndarray:
        return np.asarray(self.mapping(np.atleast_2d(theta)), dtype=float)


@dataclass(frozen=True)
class MultiObjectiveProblem:
    """``min F(x)`` over a box, ``F: R^n -> R^m``.

    ``func`` receives a float ndarray of length ``n`` and returns ``m`` floats.
    """

    name: str
    n: int
    m: int
    func: Evaluator
    lo: np.ndarray = None
    hi: np.ndarray = None
    coercive_index: Optional[int] = None
    pareto_set: Optional[ParetoSetModel] = None
    clip_eval: bool = False  # evaluator projects inputs onto the box first

    def __post_init__(self):
        lo = np.full(self.n, -np.inf) if self.lo is None else np.asarray(self.lo, dtype=float)
        hi = np.full(self.n, np.inf) if self.hi is None else np.asarray(self.hi, dtype=float)
        if lo.shape != (self.n,) or hi.shape != (self.n,):
            raise InputError("box bounds must have length n")
        if np.any(lo > hi):
            raise InputError("box has lo > hi")
        if self.coercive_index is not None and not 0 <= self.coercive_index < self.m:
            raise InputError("coercive_index out of range")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def in_box(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo) and np.all(x <= self.hi))

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.lo, self.hi)

    def __call__(self, x) -> np.ndarray:
        return evaluate_objectives(self, x)


def evaluate_objectives(problem: MultiObjectiveProblem, x, clip: bool = False) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (problem.n,):
        raise InputError(f"{problem.name}: expected x of length {problem.n}, got {x.shape}")
    if clip:
        x = problem.clip(x)
    elif not problem.in_box(x):
        raise InputError(f"{problem.name}: x={x.tolist()} lies outside the box")
    F = np.asarray(problem.func(x), dtype=float)
    if F.shape != (problem.m,):
        raise EvaluationError(f"{problem.name}: evaluator returned shape {F.shape}")
    if not np.all(np.isfinite(F)):
        raise EvaluationError(f"{problem.name}: non-finite objective at x={x.tolist()}")
    return F


@dataclass(frozen=True)
class SublevelRef:
    """The sublevel set ``{x : F(x) <= F(x_ref)}``."""

    x_ref: np.ndarray
    F_ref: np.ndarray

    @classmethod
    def at(cls, problem: MultiObjectiveProblem, x_ref) -> "SublevelRef":
        x_ref = np.array(x_ref, dtype=float)
        return cls(x_ref, evaluate_objectives(problem, x_ref))


def sublevel_violation(problem: MultiObjectiveProblem, omega: SublevelRef, x, F=None) -> float:
    """``max_i max(0, F_i(x) - F_ref_i)``; zero exactly on the sublevel set."""
    if F is None:
        F = evaluate_objectives(problem, x)
    return max(0.0, float(np.max(np.asarray(F) - omega.F_ref)))


@dataclass(frozen=True)
class ParetoVerdict:
    is_weak_pareto_candidate: bool
    witness: Optional[np.ndarray] = None

    def __post_init__(self):
        if (self.witness is None) != self.is_weak_pareto_candidate:
            raise InputError("witness must be present exactly when the verdict is negative")

    def __bool__(self) -> bool:
        return self.is_weak_pareto_candidate


def weak_pareto_local_check(
    problem: MultiObjectiveProblem, x, radius: float, samples: int, seed: int
) -> ParetoVerdict:
    """Search a ball around ``x`` for a point strictly better in every objective.

    A negative answer comes with a witness. A positive answer only means the
    sampler found nothing, so it is a necessary condition, not a proof.
    """
    if radius <= 0:
        raise InputError("radius must be positive")
    if samples < 1:
        raise InputError("samples must be >= 1")
    x = np.asarray(x, dtype=float)
    Fx = evaluate_objectives(problem, x)
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, problem.n))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    r = radius * rng.random((samples, 1)) ** (1.0 / problem.n)
    # clipping toward a box containing x never leaves the ball
    ys = problem.clip(x + dirs / norms * r)
    for y in ys:
        Fy = evaluate_objectives(problem, y)
        if np.all(Fy < Fx - DOMINANCE_EPS):
            return ParetoVerdict(False, y)
    return ParetoVerdict(True)


def _grid(lo, hi, count):
    axes = [np.linspace(a, b, count) if b > a else np.array([a]) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def pareto_set_distance(problem: MultiObjectiveProblem, x) -> float:
    """Infimum over the Pareto set of ``||x - ps(theta)||_inf``, on a grid.

    One coarse grid over the (pruned) parameter box, then two passes around
    the incumbent, each ten times finer.
    """
    ps = problem.pareto_set
    if ps is None:
        raise UnsupportedError(f"{problem.name} has no Pareto-set model")
    x = np.asarray(x, dtype=float)

    def dist(thetas):
        return np.max(np.abs(ps.points(thetas) - x), axis=1)

    lo, hi = ps.lo.copy(), ps.hi.copy()
    best = math.inf
    if ps.param_coords is not None:
        theta0 = np.clip(x[list(ps.param_coords)], ps.lo, ps.hi)
        best = float(dist(theta0)[0])
        if best == 0.0:
            return 0.0
        # any theta farther than `best` from x's own coordinates cannot improve
        lo = np.maximum(lo, x[list(ps.param_coords)] - best)
        hi = np.minimum(hi, x[list(ps.param_coords)] + best)

    count = GRID_POINTS_1D if ps.p == 1 else int(GRID_BUDGET ** (1.0 / ps.p))
    spacing = (hi - lo) / (count - 1)
    thetas = _grid(lo, hi, count)
    d = dist(thetas)
    i = int(np.argmin(d))
    theta_best, best = thetas[i], min(best, float(d[i]))
    for _ in range(2):
        rlo = np.maximum(ps.lo, theta_best - spacing)
        rhi = np.minimum(ps.hi, theta_best + spacing)
        spacing = spacing / 10.0
        thetas = _grid(rlo, rhi, 21)
        d = dist(thetas)
        i = int(np.argmin(d))
        if d[i] < best:
            theta_best, best = thetas[i], float(d[i])
    return best


def coercivity_heuristic(
    problem: MultiObjectiveProblem, index: Optional[int] = None, rays: int = 8, seed: int = 0
) -> bool:
    """Does ``F_index`` grow along random rays at radii 1e2 and 1e3?

    Evaluates outside the box, so evaluators undefined there report False.
    """
    index = problem.coercive_index if index is None else index
    if index is None:
        raise UnsupportedError(f"{problem.name} declares no coercive objective")
    rng = np.random.default_rng(seed)
    base = np.where(np.isfinite(problem.lo), problem.lo, 0.0)
    f0 = float(np.asarray(problem.func(base))[index])
    with np.errstate(all="ignore"):
        for _ in range(rays):
            d = rng.standard_normal(problem.n)
            d /= np.linalg.norm(d)
            try:
                f2 = float(np.asarray(problem.func(base + 1e2 * d))[index])
                f3 = float(np.asarray(problem.func(base + 1e3 * d))[index])
            except (ValueError, ArithmeticError):
                return False
            if not (math.isfinite(f2) and math.isfinite(f3) and f0 < f2 < f3):
                return False
    return True
