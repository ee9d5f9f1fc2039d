import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lqdps.benchmarks import PROBLEMS, benchmark_eval, default_start, get_problem, ps_distance
from lqdps.errors import EvaluationError, InputError, UnsupportedError
from lqdps.problem import (
    MultiObjectiveProblem,
    ParetoVerdict,
    SublevelRef,
    coercivity_heuristic,
    evaluate_objectives,
    pareto_set_distance,
    sublevel_violation,
    weak_pareto_local_check,
)

FA = get_problem("fa")


def brute_ps_distance(problem_id, x, count):
    """Dense parameter scan with no pruning or refinement."""
    ps = get_problem(problem_id).pareto_set
    axes = [np.linspace(a, b, count) for a, b in zip(ps.lo, ps.hi)]
    best = math.inf
    if ps.p == 1:
        return float(np.min(np.max(np.abs(ps.points(axes[0][:, None]) - x), axis=1)))
    for t1 in axes[0]:
        thetas = np.column_stack([np.full(count, t1), axes[1]])
        best = min(best, float(np.min(np.max(np.abs(ps.points(thetas) - x), axis=1))))
    return best


def test_benchmark_values():
    assert benchmark_eval("fa", [1, 1, 1]).tolist() == [1, 0]
    F = benchmark_eval("fa", [0.5, 0.5, 0.5])
    assert F[0] == 0.625
    assert F[1] == pytest.approx(1 - math.sqrt(0.5) + 2 * (0.5 - math.sqrt(0.5)) ** 2)
    assert F[1] == pytest.approx(0.37868, abs=1e-5)
    assert benchmark_eval("fb", [0, 0, 0]).tolist() == [0, 1]
    assert benchmark_eval("fc", [1, 0, 0]) == pytest.approx([0, 0, 1], abs=1e-15)
    assert benchmark_eval("fc", [0, 0, 0]).tolist() == [1, 0, 0]


def test_fb_literal_formula():
    x1, x2, x3 = 0.3, -0.4, 0.7
    f1 = x1 + 2 * (x3 - 0.8 * x1 * math.cos((6 * math.pi * x1 + math.pi) / 3)) ** 2
    f2 = 1 - math.sqrt(x1) + 2 * (x2 - 0.8 * x1 * math.sin(6 * math.pi * x1 + 2 * math.pi / 3)) ** 2
    assert benchmark_eval("fb", [x1, x2, x3]).tolist() == pytest.approx([f1, f2], rel=1e-15)


def test_box_checks():
    with pytest.raises(InputError):
        benchmark_eval("fa", [1.1, 0.5, 0.5])
    assert benchmark_eval("fa", [1.1, 0.5, 0.5], clip=True).tolist() == benchmark_eval("fa", [1, 0.5, 0.5]).tolist()
    benchmark_eval("fb", [0, -1, -1])
    with pytest.raises(InputError):
        benchmark_eval("fc", [0, 0, 2.5])
    with pytest.raises(InputError):
        get_problem("zdt1")
    with pytest.raises(InputError):
        benchmark_eval("fa", [0.5, 0.5])


def test_nonfinite_objective_is_an_evaluation_error():
    bad = MultiObjectiveProblem("bad", 1, 1, lambda x: (math.inf,))
    with pytest.raises(EvaluationError):
        evaluate_objectives(bad, [0.0])


def test_default_start():
    x0, z0 = default_start("fc")
    assert x0.tolist() == [0.5] * 3 and z0.tolist() == [1, 1, 1]


def test_sublevel_violation():
    omega = SublevelRef.at(FA, [0.5, 0.5, 0.5])
    assert sublevel_violation(FA, omega, [0.5, 0.5, 0.5]) == 0
    assert sublevel_violation(FA, omega, [1, 1, 1]) == pytest.approx(0.375)
    # the PS point at theta = 0.4 dominates the anchor strictly
    t = 0.4
    assert sublevel_violation(FA, omega, [t, math.sqrt(t), t * t]) == 0


def test_weak_pareto_check():
    assert weak_pareto_local_check(FA, [0.25, 0.5, 0.0625], radius=0.05, samples=2000, seed=0)
    verdict = weak_pareto_local_check(FA, [0.5, 0.9, 0.9], radius=0.1, samples=2000, seed=0)
    assert not verdict
    assert np.all(FA(verdict.witness) < FA([0.5, 0.9, 0.9]))
    assert np.max(np.abs(verdict.witness - [0.5, 0.9, 0.9])) <= 0.1
    assert weak_pareto_local_check(FA, [0.25, 0.5, 0.0625], radius=1e-300, samples=1, seed=0)
    with pytest.raises(InputError):
        weak_pareto_local_check(FA, [0.5, 0.5, 0.5], radius=0.1, samples=0, seed=0)
    with pytest.raises(InputError):
        ParetoVerdict(False)


def test_ps_distance_examples():
    assert ps_distance("fa", [0.49, 0.7, 0.2401]) <= 1e-6
    assert ps_distance("fa", [0.25, 0.5, 0.0625]) <= 1e-6
    # theta = x1 gives 0.0375, but the infimum sits near theta = 0.2746 where
    # the three coordinate gaps balance
    d = ps_distance("fa", [0.25, 0.5, 0.1])
    assert d < 0.0375
    assert d == pytest.approx(brute_ps_distance("fa", np.array([0.25, 0.5, 0.1]), 10**6), abs=2e-6)
    assert d == pytest.approx((math.sqrt(2.4) - 1) / 2 - 0.25, abs=1e-6)  # theta - 0.25 == 0.1 - theta**2
    assert ps_distance("fc", [0.5, 0.5, 0.0]) <= 1e-6
    x1, x2 = 0.3, 0.7
    assert ps_distance("fc", [x1, x2, 2 * x2 * math.sin(2 * math.pi * x1 + math.pi)]) <= 1e-6


@pytest.mark.parametrize(
    "pid,x",
    [("fa", [0.9, 0.1, 0.9]), ("fa", [0.5, 0.5, 0.5]), ("fb", [0.5, 0.5, 0.5]), ("fb", [0.1, -0.9, 0.8])],
)
def test_ps_distance_matches_dense_scan_1d(pid, x):
    assert ps_distance(pid, x) == pytest.approx(brute_ps_distance(pid, np.array(x), 10**6), abs=2e-6)


@pytest.mark.parametrize("x", [[0.5, 0.5, 0.5], [0.1, 0.9, -1.5], [0.8, 0.2, 1.9]])
def test_ps_distance_matches_dense_scan_2d(x):
    oracle = brute_ps_distance("fc", np.array(x), 2001)
    got = ps_distance("fc", x)
    # the dense scan is an upper bound up to its own resolution
    assert got <= oracle + 1e-9
    assert got == pytest.approx(oracle, abs=5e-3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(PROBLEMS)), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_ps_distance_nonnegative(pid, x):
    assert ps_distance(pid, x) >= 0


def test_no_pareto_model():
    plain = MultiObjectiveProblem("plain", 1, 1, lambda x: (float(x[0]) ** 2,))
    with pytest.raises(UnsupportedError):
        pareto_set_distance(plain, [0.0])


def test_coercivity_heuristic():
    quad = MultiObjectiveProblem("quad", 2, 1, lambda x: (float(x @ x),), coercive_index=0)
    assert coercivity_heuristic(quad)
    bounded = MultiObjectiveProblem("bounded", 2, 1, lambda x: (math.tanh(float(x[0])),), coercive_index=0)
    assert not coercivity_heuristic(bounded)
