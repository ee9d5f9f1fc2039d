"""One proximal subproblem: minimize ``phi(x, z)`` over the sublevel set.

``phi(x, z) = f(F(x), z) + beta * H(z; z_k) + (mu / 2) * R(x)`` where ``R`` is
``q(x, x_k)**2`` (``Q_SQUARED``) or ``q(x, x_k)`` (``Q_PLAIN``).

The z-part separates per component and is solved exactly. The x-part is
nonsmooth and, for the benchmarks, nonconvex, so it is handled by a
deterministic compass search on a penalized objective.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, InternalError
from .problem import MultiObjectiveProblem, SublevelRef, evaluate_objectives, sublevel_violation
from .quasi_metric import QuasiDistanceSpec
from .scalarization import Kind, ScalarizationModel, Z_POSITIVE, _H

__all__ = [
    "Mode",
    "InnerSolverConfig",
    "SubproblemInstance",
    "StationarityCertificate",
    "phi_eval",
    "solve_z_step",
    "solve_x_step",
    "solve_subproblem",
    "z_residual",
    "argmin_displacement",
]


class Mode(str, enum.Enum):
    Q_SQUARED = "q2"
    Q_PLAIN = "q"


@dataclass(frozen=True)
class InnerSolverConfig:
    """Knobs of the inner compass search.

    ``step0=None`` means one tenth of each coordinate's box width (0.1 for
    unbounded coordinates). Probes whose sublevel violation exceeds
    ``max_violation`` are rejected outright, on top of the quadratic penalty.
    """

    penalty_weight: float = 1e6
    sweeps: int = 8
    step0: Optional[float] = None
    shrink: float = 0.5
    min_step: float = 1e-9
    z_root_tol: float = 1e-12
    max_violation: float = 1e-7
    max_evals: int = 100_000

    def __post_init__(self):
        if self.penalty_weight <= 0 or self.sweeps < 1 or self.min_step <= 0:
            raise InputError("inner solver settings must be positive")
        if self.step0 is not None and self.step0 <= 0:
            raise InputError("step0 must be positive")
        if not 0 < self.shrink < 1:
            raise InputError("shrink must lie in (0, 1)")
        if self.z_root_tol <= 0 or self.max_violation < 0 or self.max_evals < 1:
            raise InputError("bad tolerance or budget")

    def initial_steps(self, problem: MultiObjectiveProblem) -> np.ndarray:
        if self.step0 is not None:
            return np.full(problem.n, self.step0)
        width = problem.hi - problem.lo
        return np.where(np.isfinite(width) & (width > 0), 0.1 * width, 0.1)


@dataclass(frozen=True)
class SubproblemInstance:
    problem: MultiObjectiveProblem
    model: ScalarizationModel
    qspec: QuasiDistanceSpec
    x_k: np.ndarray
    z_k: np.ndarray
    mu_k: float
    beta_k: float
    mode: Mode = Mode.Q_SQUARED
    omega: SublevelRef = None

    def __post_init__(self):
        x_k = np.array(self.x_k, dtype=float)
        z_k = np.array(self.z_k, dtype=float)
        if self.mu_k <= 0 or self.beta_k <= 0:
            raise InputError("mu_k and beta_k must be positive")
        if z_k.shape != (self.model.m,) or np.any(z_k <= Z_POSITIVE):
            raise InputError("z_k must be a strictly positive vector of length m")
        if self.model.m != self.problem.m or self.qspec.n != self.problem.n:
            raise InputError("model/quasi-distance dimensions do not match the problem")
        if not self.problem.in_box(x_k):
            raise InputError("x_k must lie in the box")
        object.__setattr__(self, "x_k", x_k)
        object.__setattr__(self, "z_k", z_k)
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.omega is None:
            object.__setattr__(self, "omega", SublevelRef.at(self.problem, x_k))

    def regularizer(self, x) -> float:
        q = self.qspec.fast(x, self.x_k)
        return q * q if self.mode is Mode.Q_SQUARED else q

    def z_step(self, F_values, tol: float = 1e-12) -> np.ndarray:
        return solve_z_step(self.model, F_values, self.z_k, self.beta_k, tol)


@dataclass(frozen=True)
class StationarityCertificate:
    z_residual: float
    directional_slack: float
    descent_margin: float
    sublevel_violation: float
    sweeps_used: int
    evaluations: int


def phi_eval(inst: SubproblemInstance, x, z, F=None) -> float:
    z = np.asarray(z, dtype=float)
    if np.any(z <= Z_POSITIVE):
        raise InputError("z must be strictly positive")
    if F is None:
        F = evaluate_objectives(inst.problem, x)
    return (
        inst.model.value(F, z)
        + inst.beta_k * _H(z.tolist(), inst.z_k.tolist())
        + 0.5 * inst.mu_k * inst.regularizer(np.asarray(x, dtype=float).tolist())
    )


def _exp_z_root(F_i: float, zk: float, beta: float, tol: float) -> float:
    """Root of ``exp(z + F_i) + beta/zk - beta/z`` on ``(0, zk)``.

    The left end of the bracket is ``beta / (exp(zk + F_i) + beta/zk)``, where
    the function is provably nonpositive.
    """
    e_hi = math.exp(zk + F_i)
    lo, hi = beta / (e_hi + beta / zk), zk

    def g(z):
        return math.exp(z + F_i) + beta / zk - beta / z

    if g(lo) > 0 or g(hi) < 0:
        raise InternalError("z-step root is not bracketed")
    z = lo
    for _ in range(200):
        gz = g(z)
        if gz == 0.0:
            return z
        if gz < 0:
            lo = z
        else:
            hi = z
        dg = math.exp(z + F_i) + beta / (z * z)
        z_new = z - gz / dg
        if not lo < z_new < hi:
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= tol * 1e-3 * max(z, 1e-300) or hi - lo <= 4 * math.ulp(hi):
            return z_new
        z = z_new
    if hi - lo > tol:
        raise InternalError("z-step root finder did not converge")
    return 0.5 * (lo + hi)


def solve_z_step(model: ScalarizationModel, F_values, z_k, beta_k: float, tol: float = 1e-12) -> np.ndarray:
    """Exact minimizer in ``z`` of ``f(F, z) + beta_k * H(z; z_k)``.

    For ``SUM_SHIFTED`` the optimality condition ``1/z - 1/z_k = 1/beta`` has
    the closed form ``z = beta * z_k / (beta + z_k)``.
    """
    z_k = np.asarray(z_k, dtype=float)
    if beta_k <= 0 or np.any(z_k <= Z_POSITIVE):
        raise InputError("need beta_k > 0 and z_k strictly positive")
    if model.kind is Kind.SUM_SHIFTED:
        return beta_k * z_k / (beta_k + z_k)
    F = np.asarray(F_values, dtype=float)
    return np.array([_exp_z_root(f, zk, beta_k, tol) for f, zk in zip(F.tolist(), z_k.tolist())])


def z_residual(model: ScalarizationModel, F_values, z_next, z_k, beta_k: float) -> float:
    z_next = np.asarray(z_next, dtype=float)
    z_k = np.asarray(z_k, dtype=float)
    if np.any(z_next <= Z_POSITIVE) or np.any(z_k <= Z_POSITIVE):
        raise InputError("z vectors must be strictly positive")
    h = np.array(model.fast_h(np.asarray(F_values, dtype=float).tolist(), z_next.tolist()))
    return float(np.max(np.abs(1.0 / z_next - 1.0 / z_k - h / beta_k)))


class _PenalizedX:
    """``psi(x) = f(F(x), z) + (mu/2) R(x) + rho * violation(x)**2``."""

    def __init__(self, inst: SubproblemInstance, z, config: InnerSolverConfig, reg_weight=None):
        self.inst = inst
        self.reg_weight = 0.5 * inst.mu_k if reg_weight is None else reg_weight
        self.z = np.asarray(z, dtype=float).tolist()
        self.rho = config.penalty_weight
        self.cap = config.max_violation
        self.F_ref = inst.omega.F_ref.tolist()
        self.evals = 0

    def __call__(self, x: np.ndarray) -> float:
        self.evals += 1
        inst = self.inst
        F = inst.problem.func(x)
        viol = max(0.0, max(a - b for a, b in zip(F, self.F_ref)))
        if viol > self.cap or any(f != f for f in F):
            return math.inf
        return (
            inst.model.fast_value(F, self.z)
            + (self.reg_weight * inst.regularizer(x.tolist()) if self.reg_weight else 0.0)
            + self.rho * viol * viol
        )


def solve_x_step(
    inst: SubproblemInstance, z_fixed, config: InnerSolverConfig = InnerSolverConfig(), x_start=None
) -> np.ndarray:
    """Pattern search on the penalized x-objective, started at ``x_start``
    (default ``x_k``).

    Exploratory moves probe coordinates in index order, positive direction
    first, taking the first strict improvement; a coordinate's step doubles
    after a success and shrinks after a failure. Successful explorations
    are followed by Hooke-Jeeves extrapolation along the displacement.
    Never returns a worse point than the start.
    """
    x, _ = _compass(inst, z_fixed, config, x_start)
    return x


def _compass(inst, z_fixed, config, x_start=None, reg_weight=None):
    psi = _PenalizedX(inst, z_fixed, config, reg_weight)
    prob = inst.problem
    lo, hi = prob.lo, prob.hi
    steps = config.initial_steps(prob)
    cap = np.maximum(steps, np.where(np.isfinite(hi - lo), hi - lo, steps)).tolist()
    steps = steps.tolist()
    lo_l, hi_l = lo.tolist(), hi.tolist()
    min_step, shrink, budget = config.min_step, config.shrink, config.max_evals

    def explore(x, fx):
        for i in range(prob.n):
            s = steps[i]
            if s < min_step:
                continue
            xi = x[i]
            improved = False
            for cand in (min(xi + s, hi_l[i]), max(xi - s, lo_l[i])):
                if cand == xi:
                    continue
                y = x.copy()
                y[i] = cand
                fy = psi(y)
                if fy < fx:
                    x, fx, improved = y, fy, True
                    break
            steps[i] = min(2.0 * s, cap[i]) if improved else s * shrink
        return x, fx

    base = np.array(inst.x_k if x_start is None else x_start, dtype=float)
    f_base = psi(base)
    while max(steps) >= min_step and psi.evals < budget:
        x, fx = explore(base, f_base)
        # pattern moves: keep extrapolating along the last successful displacement
        while fx < f_base and psi.evals < budget:
            y = np.clip(2.0 * x - base, lo, hi)
            base, f_base = x, fx
            fy = psi(y)
            x, fx = explore(y, fy)
            if not fx < f_base:
                x, fx = base, f_base
        base, f_base = x, fx
    return base, psi.evals


def argmin_displacement(
    inst: SubproblemInstance, x, z, config: InnerSolverConfig = InnerSolverConfig()
) -> float:
    """How far pattern search moves from ``x`` when minimizing ``f(., z)``
    over the sublevel set with the proximal term switched off.

    Zero (or tiny) means ``x`` already minimizes the scalarization over the
    sublevel set, which certifies weak Pareto optimality in plain mode.
    """
    x = np.asarray(x, dtype=float)
    x_min, _ = _compass(inst, z, config, x, reg_weight=0.0)
    return float(np.max(np.abs(x_min - x)))


def _directional_slack(inst, x, z, F_x, t=1e-6, seed=0, extra=8) -> float:
    """Smallest one-sided difference quotient of ``phi(., z)`` at ``x`` over
    coordinate directions and a few fixed random unit directions, counting
    only directions that stay feasible."""
    n = inst.problem.n
    dirs = [s * e for e in np.eye(n) for s in (1.0, -1.0)]
    rng = np.random.default_rng(seed)
    for _ in range(extra):
        d = rng.standard_normal(n)
        dirs.append(d / np.linalg.norm(d))
    base = phi_eval(inst, x, z, F_x)
    best = math.inf
    for d in dirs:
        y = x + t * d
        if not inst.problem.in_box(y):
            continue
        F_y = evaluate_objectives(inst.problem, y)
        if sublevel_violation(inst.problem, inst.omega, y, F_y) > 0:
            continue
        best = min(best, (phi_eval(inst, y, z, F_y) - base) / t)
    return best


def solve_subproblem(inst: SubproblemInstance, config: InnerSolverConfig = InnerSolverConfig()):
    """Alternate exact z-steps and compass x-steps.

    Starts with the z-step at ``x_k`` and ends with a z-step, so the returned
    ``z`` is exactly optimal for the returned ``x``. Sweeps stop early once a
    full round leaves both blocks unchanged.

    Returns:
        ``(x_next, z_next, certificate)``
    """
    prob = inst.problem
    x = inst.x_k.copy()
    F = inst.omega.F_ref
    z = inst.z_step(F, config.z_root_tol)
    evals = 0
    used = 0
    for used in range(1, config.sweeps + 1):
        x_new, n_ev = _compass(inst, z, config, x)
        evals += n_ev
        F_new = evaluate_objectives(prob, x_new)
        z_new = inst.z_step(F_new, config.z_root_tol)
        unchanged = np.array_equal(x_new, x) and np.array_equal(z_new, z)
        x, F, z = x_new, F_new, z_new
        if unchanged:
            break
    phi_k = phi_eval(inst, inst.x_k, inst.z_k, inst.omega.F_ref)
    phi_next = phi_eval(inst, x, z, F)
    cert = StationarityCertificate(
        z_residual=z_residual(inst.model, F, z, inst.z_k, inst.beta_k),
        directional_slack=_directional_slack(inst, x, z, F),
        descent_margin=phi_k - phi_next,
        sublevel_violation=sublevel_violation(prob, inst.omega, x, F),
        sweeps_used=used,
        evaluations=evals,
    )
    return x, z, cert
