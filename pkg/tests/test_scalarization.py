import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lqdps.errors import InputError, SaturationError
from lqdps.scalarization import (
    H_eval,
    Kind,
    LogRegularizerRef,
    ScalarizationModel,
    f_eval,
    f_partial_z,
    h_scalar,
    scalar_rep_audit,
)

SUM = ScalarizationModel(Kind.SUM_SHIFTED, 2)
EXP = ScalarizationModel(Kind.EXPONENTIAL, 2)


def test_h_scalar_values():
    assert h_scalar(1) == 1
    assert h_scalar(0) == 0.5
    assert h_scalar(2) == 4
    assert h_scalar(0.625) == pytest.approx(1 / 1.375)


def test_h_scalar_continuous_and_increasing():
    assert h_scalar(1 - 1e-12) == pytest.approx(h_scalar(1 + 1e-12), abs=1e-10)
    ts = np.linspace(-5, 5, 2001)
    hs = [h_scalar(t) for t in ts]
    assert all(b > a for a, b in zip(hs, hs[1:]))
    assert min(hs) > 0


def test_f_eval_examples():
    assert f_eval(SUM, [1, 0], [1, 1]) == 3.5
    assert f_eval(EXP, [0, 0], [0, 0]) == 2
    assert f_eval(ScalarizationModel("sum_shifted", 3), [0, 0, 0], [0, 0, 0]) == 1.5


def test_gradient_examples():
    assert f_partial_z(SUM, [3.0, -7.0], [0.2, 9.0]).tolist() == [1, 1]
    one = ScalarizationModel(Kind.EXPONENTIAL, 1)
    assert f_partial_z(one, [0], [0]).tolist() == [1]
    assert f_partial_z(one, [1], [1])[0] == pytest.approx(math.e**2)


def test_input_errors():
    with pytest.raises(InputError):
        f_eval(SUM, [1, 2, 3], [1, 1])
    with pytest.raises(InputError):
        f_eval(SUM, [1, 2], [-1, 1])
    with pytest.raises(SaturationError):
        f_eval(EXP, [800, 0], [1, 1])
    with pytest.raises(ValueError):
        ScalarizationModel("linear", 2)


@pytest.mark.parametrize("model", [SUM, EXP], ids=["sum_shifted", "exponential"])
def test_gradient_matches_central_differences(model):
    rng = np.random.default_rng(11)
    for _ in range(200):
        F = rng.uniform(-1, 2, 2)
        z = rng.uniform(0.05, 2, 2)
        g = f_partial_z(model, F, z)
        for i in range(2):
            e = np.zeros(2)
            e[i] = 1e-6
            fd = (f_eval(model, F, z + e) - f_eval(model, F, z - e)) / 2e-6
            assert fd == pytest.approx(g[i], rel=1e-5)


def test_H_examples():
    assert H_eval([1.3, 0.2], [1.3, 0.2]) == 0
    assert H_eval([2.0], [1.0]) == pytest.approx(2 - math.log(2) - 1)
    assert H_eval([0.5, 0.5], LogRegularizerRef([1.0, 1.0])) == pytest.approx(0.38629436, abs=1e-8)
    with pytest.raises(InputError):
        H_eval([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(InputError):
        LogRegularizerRef([1.0, -1.0])


pos = st.floats(1e-3, 1e3, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.lists(pos, min_size=2, max_size=2), st.lists(pos, min_size=2, max_size=2))
def test_H_nonnegative_zero_only_at_reference(z, ref):
    value = H_eval(z, ref)
    assert value >= 0
    if not np.allclose(z, ref, rtol=1e-6):
        assert value > 0


@settings(max_examples=300, deadline=None)
@given(st.lists(pos, min_size=2, max_size=2), st.lists(pos, min_size=2, max_size=2))
def test_H_midpoint_convexity(a, b):
    ref = [1.0, 2.0]
    a, b = np.array(a), np.array(b)
    gap = 0.5 * (H_eval(a, ref) + H_eval(b, ref)) - H_eval(0.5 * (a + b), ref)
    assert gap >= -1e-9 * (1 + H_eval(a, ref) + H_eval(b, ref))


@settings(max_examples=300, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=2, max_size=2),
    st.lists(st.floats(0, 1), min_size=2, max_size=2),
    st.lists(st.floats(0, 3), min_size=2, max_size=2),
    st.sampled_from([SUM, EXP]),
)
def test_monotone_in_objective_values(v, d, z, model):
    w = np.add(v, d)
    assert f_eval(model, v, z) <= f_eval(model, w, z)
    if all(di > 1e-9 for di in d):
        assert f_eval(model, v, z) < f_eval(model, w, z)


def test_scalar_rep_audit():
    for model in (ScalarizationModel(Kind.SUM_SHIFTED, 3), ScalarizationModel(Kind.EXPONENTIAL, 3)):
        audit = scalar_rep_audit(model, 10_000, seed=5)
        assert audit.ok and audit.trials == 10_000
    with pytest.raises(InputError):
        scalar_rep_audit(SUM, 0, seed=0)
