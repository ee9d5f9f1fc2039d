"""Seeded property suites behind ``lqdps props``.

Each suite returns a :class:`PropResult`; the detail strings hold counts and
rounded magnitudes only, so the printed report is byte-stable for a seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .benchmarks import PROBLEMS, default_qspec
from .quasi_metric import qd_axiom_audit
from .scalarization import Kind, ScalarizationModel, H_eval, scalar_rep_audit
from .solver import LqdpsConfig, Schedule, run_lqdps
from .subproblem import solve_z_step, z_residual

__all__ = ["PropResult", "SUITES", "run_all", "format_report"]


@dataclass(frozen=True)
class PropResult:
    name: str
    ok: bool
    detail: str


def qd_axioms(seed: int) -> PropResult:
    audit = qd_axiom_audit(default_qspec(3), 10_000, seed)
    return PropResult("qd_axioms", audit.ok, f"samples={audit.samples} violations={audit.violations}")


def qd_sandwich(seed: int) -> PropResult:
    spec = default_qspec(3)
    b = spec.norm_bounds()
    rng = np.random.default_rng(seed)
    x = rng.uniform(-10, 10, (10_000, 3))
    y = rng.uniform(-10, 10, (10_000, 3))
    bad = 0
    for xi, yi in zip(x, y):
        q = spec.fast(xi.tolist(), yi.tolist())
        d = float(np.linalg.norm(xi - yi))
        bad += not (b.alpha * d * (1 - 1e-12) <= q <= b.beta * d * (1 + 1e-12))
    return PropResult("qd_sandwich", bad == 0, f"pairs=10000 alpha={b.alpha:g} beta={b.beta:.6f} violations={bad}")


def h_regularizer(seed: int) -> PropResult:
    rng = np.random.default_rng(seed)
    ref = rng.uniform(0.1, 3.0, 2)
    bad = int(H_eval(ref, ref) != 0.0)
    for _ in range(1000):
        z = rng.uniform(0.01, 5.0, 2)
        if np.array_equal(z, ref):
            continue
        bad += not H_eval(z, ref) > 0
        w = rng.uniform(0.01, 5.0, 2)
        mid = H_eval(0.5 * (z + w), ref)
        bad += not 0.5 * (H_eval(z, ref) + H_eval(w, ref)) - mid > 0
    return PropResult("h_regularizer", bad == 0, f"violations={bad}")


def gradient_fd(seed: int) -> PropResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for kind in Kind:
        model = ScalarizationModel(kind, 3)
        for _ in range(1000):
            F = rng.uniform(-1.0, 2.0, 3)
            z = rng.uniform(0.05, 2.0, 3)
            g = model.grad_z(F, z)
            for i in range(3):
                e = np.zeros(3)
                e[i] = 1e-6
                fd = (model.value(F, z + e) - model.value(F, z - e)) / 2e-6
                worst = max(worst, abs(fd - g[i]) / max(abs(g[i]), 1e-12))
    return PropResult("gradient_fd", worst <= 1e-5, f"worst_rel_err<=1e-5: {worst <= 1e-5}")


def z_step(seed: int) -> PropResult:
    rng = np.random.default_rng(seed)
    worst = {Kind.SUM_SHIFTED: 0.0, Kind.EXPONENTIAL: 0.0}
    for _ in range(1000):
        zk = rng.uniform(0.01, 5.0, 2)
        beta = float(rng.uniform(0.01, 10.0))
        F = rng.uniform(-1.0, 2.0, 2)
        for kind in worst:
            model = ScalarizationModel(kind, 2)
            z = solve_z_step(model, F, zk, beta)
            worst[kind] = max(worst[kind], z_residual(model, F, z, zk, beta))
    ok = worst[Kind.SUM_SHIFTED] <= 1e-12 and worst[Kind.EXPONENTIAL] <= 1e-11
    return PropResult("z_step", ok, f"trials=1000 within_tolerance={ok}")


def scalar_rep(seed: int) -> PropResult:
    bad = 0
    for kind in Kind:
        bad += scalar_rep_audit(ScalarizationModel(kind, 3), 2000, seed).violations
    return PropResult("scalar_rep", bad == 0, f"violations={bad}")


def z_trajectory(seed: int) -> PropResult:
    # SUM_SHIFTED with beta = 1 and z0 = 1 gives z^k = 1/(k+1)
    z = np.ones(2)
    model = ScalarizationModel(Kind.SUM_SHIFTED, 2)
    worst = 0.0
    for k in range(1, 21):
        z = solve_z_step(model, np.zeros(2), z, 1.0)
        worst = max(worst, float(np.max(np.abs(z - 1.0 / (k + 1)))))
    return PropResult("z_trajectory", worst <= 1e-12, f"k<=20 within_1e-12={worst <= 1e-12}")


def descent_runs(seed: int) -> PropResult:
    """Short runs on every benchmark: monotone f, feasible, inside the box."""
    bad = 0
    runs = 0
    for pid, problem in PROBLEMS.items():
        for kind in Kind:
            config = LqdpsConfig(mu=Schedule.parse("1+1/k"), beta=Schedule.parse("k"), tol=1e-3, max_iter=15)
            x0 = np.full(3, 0.5)
            res = run_lqdps(problem, ScalarizationModel(kind, problem.m), default_qspec(3), config, x0, np.ones(problem.m))
            runs += 1
            inside = all(problem.in_box(r.x) for r in res.trace.records)
            bad += not (res.audit.ok() and inside)
    return PropResult("descent_runs", bad == 0, f"runs={runs} failures={bad}")


SUITES: dict[str, Callable[[int], PropResult]] = {
    "qd_axioms": qd_axioms,
    "qd_sandwich": qd_sandwich,
    "h_regularizer": h_regularizer,
    "gradient_fd": gradient_fd,
    "z_step": z_step,
    "scalar_rep": scalar_rep,
    "z_trajectory": z_trajectory,
    "descent_runs": descent_runs,
}


def run_all(seed: int = 0) -> list[PropResult]:
    return [suite(seed) for suite in SUITES.values()]


def format_report(results: list[PropResult], seed: int) -> str:
    lines = [f"property suites, seed={seed}"]
    for r in results:
        lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
    passed = sum(r.ok for r in results)
    lines.append(f"{passed}/{len(results)} suites passed")
    return "\n".join(lines) + "\n"
