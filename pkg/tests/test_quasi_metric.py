import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lqdps.errors import InputError
from lqdps.quasi_metric import (
    NormEquivalenceBounds,
    QuasiDistanceSpec,
    parse_coefficients,
    qd_axiom_audit,
    qd_eval,
    qd_norm_bounds,
    qd_sq_eval,
    qd_subgradient_first,
)

BENCH = QuasiDistanceSpec.uniform(3, 3.0, 2.0)
coord = st.floats(-10, 10, allow_nan=False)
vec3 = st.lists(coord, min_size=3, max_size=3)


def brute_q(cp, cm, x, y):
    # literal per-coordinate branch definition
    total = 0.0
    for a, b, p, m in zip(x, y, cp, cm):
        if b - a > 0:
            total += p * (b - a)
        else:
            total += m * (a - b)
    return total


def test_examples():
    assert qd_eval(BENCH, [0, 0, 0], [1, 1, 1]) == 9
    assert qd_eval(BENCH, [1, 1, 1], [0, 0, 0]) == 6
    assert qd_eval(BENCH, [0.3, -2, 5], [0.3, -2, 5]) == 0
    assert qd_sq_eval(BENCH, [0, 0, 0], [1, 1, 1]) == 81
    one = QuasiDistanceSpec((3.0,), (2.0,))
    assert qd_sq_eval(one, [0.5], [0.25]) == pytest.approx(0.25)
    assert qd_eval(one, [0], [1]) == 3 and qd_eval(one, [1], [2]) + qd_eval(one, [2], [1]) == 5


def test_triangle_example():
    one = QuasiDistanceSpec((3.0,), (2.0,))
    assert qd_eval(one, [0], [1]) == 3
    assert qd_eval(one, [0], [2]) + qd_eval(one, [2], [1]) == 8


def test_norm_bounds():
    b = qd_norm_bounds(BENCH)
    assert (b.alpha, b.beta) == (2.0, pytest.approx(3 * math.sqrt(3)))
    b = qd_norm_bounds(QuasiDistanceSpec((1.0,), (1.0,)))
    assert (b.alpha, b.beta) == (1.0, 1.0)
    b = qd_norm_bounds(QuasiDistanceSpec((5.0, 1.0), (2.0, 4.0)))
    assert (b.alpha, b.beta) == (1.0, pytest.approx(5 * math.sqrt(2)))
    with pytest.raises(InputError):
        NormEquivalenceBounds(2.0, 1.0)


def test_subgradient_boxes():
    one = QuasiDistanceSpec((3.0,), (2.0,))
    g = qd_subgradient_first(one, [0], [1])
    assert g.lo.tolist() == [-3] and g.hi.tolist() == [-3]
    g = qd_subgradient_first(one, [1], [0])
    assert g.lo.tolist() == [2] and g.hi.tolist() == [2]
    g = qd_subgradient_first(BENCH, [1, 2, 3], [1, 2, 3])
    assert g.lo.tolist() == [-3] * 3 and g.hi.tolist() == [2] * 3


@pytest.mark.parametrize(
    "cp,cm", [((1.0, 0.0), (1.0, 1.0)), ((1.0,), (1.0, 2.0)), ((1.0,), (-1.0,)), ((math.nan,), (1.0,)), ((), ())]
)
def test_rejects_bad_coefficients(cp, cm):
    with pytest.raises(InputError):
        QuasiDistanceSpec(cp, cm)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        qd_eval(BENCH, [0, 0], [1, 1, 1])


def test_parse_coefficients():
    assert parse_coefficients("3, 3,3") == (3.0, 3.0, 3.0)
    with pytest.raises(InputError):
        parse_coefficients("3,x")


@settings(max_examples=200, deadline=None)
@given(vec3, vec3)
def test_matches_branch_definition(x, y):
    assert qd_eval(BENCH, x, y) == pytest.approx(brute_q([3] * 3, [2] * 3, x, y), rel=1e-12, abs=1e-12)
    assert BENCH.fast(x, y) == pytest.approx(qd_eval(BENCH, x, y), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(vec3, vec3, vec3)
def test_axioms_and_sandwich(x, y, z):
    q = lambda a, b: qd_eval(BENCH, a, b)
    assert q(x, x) == 0
    assert q(x, z) <= q(x, y) + q(y, z) + 1e-9 * (1 + q(x, z))
    d = float(np.linalg.norm(np.subtract(x, y)))
    b = qd_norm_bounds(BENCH)
    assert b.alpha * d <= q(x, y) * (1 + 1e-12) + 1e-12
    assert q(x, y) <= b.beta * d * (1 + 1e-12) + 1e-12


@settings(max_examples=100, deadline=None)
@given(vec3, vec3)
def test_subgradient_contains_finite_difference(x, y):
    # one-sided difference quotients lie inside the subgradient box
    g = qd_subgradient_first(BENCH, x, y)
    for i in range(3):
        if abs(x[i] - y[i]) < 1e-6:
            continue  # the probe would straddle the kink
        e = np.zeros(3)
        e[i] = 1e-7
        fwd = (qd_eval(BENCH, np.add(x, e), y) - qd_eval(BENCH, x, y)) / 1e-7
        assert g.lo[i] - 1e-5 <= fwd <= g.hi[i] + 1e-5


def test_axiom_audit():
    audit = qd_axiom_audit(BENCH, 10_000, seed=3)
    assert audit.samples == 10_000 and audit.ok
    assert qd_axiom_audit(BENCH, 50, seed=3) == qd_axiom_audit(BENCH, 50, seed=3)
    with pytest.raises(InputError):
        qd_axiom_audit(BENCH, 0, seed=0)
