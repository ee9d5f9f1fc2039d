"""Three-variable benchmark problems with analytic Pareto sets.

``fa``, ``fb`` and ``fc`` are the F1, F4 and F6 functions of the Li-Zhang
MOEA/D suite, restricted to three decision variables.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InputError
from .problem import MultiObjectiveProblem, ParetoSetModel, evaluate_objectives, pareto_set_distance
from .quasi_metric import QuasiDistanceSpec

__all__ = ["PROBLEMS", "get_problem", "benchmark_eval", "ps_distance", "default_qspec", "default_start"]

PI = math.pi


def _fa(x):
    x1, x2, x3 = x.tolist()
    r = math.sqrt(x1)
    return (x1 + 2.0 * (x3 - x1 * x1) ** 2, 1.0 - r + 2.0 * (x2 - r) ** 2)


def _fa_ps(theta):
    t = theta[:, 0]
    return np.stack([t, np.sqrt(t), t**2], axis=1)


def _fb(x):
    x1, x2, x3 = x.tolist()
    return (
        x1 + 2.0 * (x3 - 0.8 * x1 * math.cos((6.0 * PI * x1 + PI) / 3.0)) ** 2,
        1.0 - math.sqrt(x1) + 2.0 * (x2 - 0.8 * x1 * math.sin(6.0 * PI * x1 + 2.0 * PI / 3.0)) ** 2,
    )


def _fb_ps(theta):
    t = theta[:, 0]
    return np.stack(
        [t, 0.8 * t * np.sin(6 * np.pi * t + 2 * np.pi / 3), 0.8 * t * np.cos((6 * np.pi * t + np.pi) / 3)],
        axis=1,
    )


def _fc(x):
    x1, x2, x3 = x.tolist()
    c1 = math.cos(0.5 * x1 * PI)
    return (
        c1 * math.cos(0.5 * x2 * PI),
        c1 * math.sin(0.5 * x2 * PI),
        math.sin(0.5 * x1 * PI) + 2.0 * (x3 - 2.0 * x2 * math.sin(2.0 * PI * x1 + PI)) ** 2,
    )


def _fc_ps(theta):
    t1, t2 = theta[:, 0], theta[:, 1]
    return np.stack([t1, t2, 2 * t2 * np.sin(2 * np.pi * t1 + np.pi)], axis=1)


PROBLEMS: dict[str, MultiObjectiveProblem] = {
    "fa": MultiObjectiveProblem(
        "fa", 3, 2, _fa, lo=[0, 0, 0], hi=[1, 1, 1],
        pareto_set=ParetoSetModel([0.0], [1.0], _fa_ps, param_coords=(0,)),
    ),
    "fb": MultiObjectiveProblem(
        "fb", 3, 2, _fb, lo=[0, -1, -1], hi=[1, 1, 1],
        pareto_set=ParetoSetModel([0.0], [1.0], _fb_ps, param_coords=(0,)),
    ),
    "fc": MultiObjectiveProblem(
        "fc", 3, 3, _fc, lo=[0, 0, -2], hi=[1, 1, 2],
        pareto_set=ParetoSetModel([0.0, 0.0], [1.0, 1.0], _fc_ps, param_coords=(0, 1)),
    ),
}


def get_problem(problem_id: str) -> MultiObjectiveProblem:
    try:
        return PROBLEMS[problem_id.lower()]
    except KeyError:
        raise InputError(f"unknown problem {problem_id!r}; choose from {sorted(PROBLEMS)}") from None


def benchmark_eval(problem_id: str, x, clip: bool = False) -> np.ndarray:
    return evaluate_objectives(get_problem(problem_id), x, clip=clip)


def ps_distance(problem_id: str, x) -> float:
    return pareto_set_distance(get_problem(problem_id), x)


def default_qspec(n: int = 3) -> QuasiDistanceSpec:
    """Up-moves cost 3 per unit, down-moves 2."""
    return QuasiDistanceSpec.uniform(n, 3.0, 2.0)


def default_start(problem_id: str) -> tuple[np.ndarray, np.ndarray]:
    p = get_problem(problem_id)
    return np.full(p.n, 0.5), np.ones(p.m)
