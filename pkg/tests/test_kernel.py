import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from entnewton import (
    ConfigError, ExpOverflowError, InputShapeError, ProblemInstance, evaluate,
    min_weight_squared, weights_satisfy,
)
from conftest import problem_from, random_problem


def test_zero_point_is_uniform():
    p, _ = random_problem(0, n=7)
    ev = evaluate(p, np.zeros(p.d))
    np.testing.assert_allclose(ev.f, np.full(7, 1 / 7), rtol=0, atol=1e-15)
    assert ev.L_ent == pytest.approx(math.log(7), abs=1e-14)


def test_two_outcome_reality_loss():
    p = ProblemInstance(A=[[1.0], [-1.0]], b=[1.0, 0.0], w=[0.0, 0.0], gamma=0.0, R=2.0)
    ev = evaluate(p, [0.0])
    np.testing.assert_array_equal(ev.f, [0.5, 0.5])
    assert ev.L_exp == 0.25
    assert ev.L == 0.25


def test_matches_extended_precision_reference(frozen):
    case = frozen["evaluate_n8_d3"]
    ev = evaluate(problem_from(case), case["x"])
    for key, want in case["expected"].items():
        np.testing.assert_allclose(getattr(ev, key), want, rtol=1e-13, atol=1e-15, err_msg=key)


def test_min_weight_squared_examples(frozen):
    assert min_weight_squared(5, 0.0, 0.0 + 1e-300, 1.0, 10) == pytest.approx(10)
    assert min_weight_squared(math.e, 1.0, 1e-300, 1.0, 10) == pytest.approx(10)
    case = frozen["min_weight_squared"]
    a = case["args"]
    got = min_weight_squared(a["n"], a["gamma"], a["l"], a["sigma_min"], a["constant"])
    assert got == pytest.approx(case["expected"], rel=1e-14)


def test_min_weight_squared_rejects_singular():
    with pytest.raises(ConfigError):
        min_weight_squared(4, 0.5, 1.0, 0.0)


def test_weights_satisfy_threshold():
    p, _ = random_problem(1, n=6, d=2)
    need = min_weight_squared(6, p.gamma, p.l, p.sigma_min, 10)
    ok = p.replace(w=np.full(6, math.sqrt(need) * (1 + 1e-12)))
    low = p.replace(w=np.full(6, math.sqrt(need) * 0.99))
    assert weights_satisfy(ok, 10)
    assert not weights_satisfy(low, 10)


@pytest.mark.parametrize("kw,err", [
    (dict(b=[0.6, 0.6]), ConfigError),
    (dict(b=[-0.1, 0.5]), ConfigError),
    (dict(gamma=1.5), ConfigError),
    (dict(R=0.5), ConfigError),          # ||A|| = 1 > R
    (dict(b=[0.5]), InputShapeError),
    (dict(w=[1.0, np.nan]), ConfigError),
])
def test_instance_validation(kw, err):
    base = dict(A=[[1.0], [0.0]], b=[0.5, 0.5], w=[1.0, 1.0], gamma=0.5, R=1.0)
    base.update(kw)
    with pytest.raises(err):
        ProblemInstance(**base)


def test_small_radius_is_flagged():
    p = ProblemInstance(A=[[1.0], [0.0]], b=[0.5, 0.5], w=[1.0, 1.0], gamma=0.5, R=2.0)
    assert p.warnings
    with pytest.raises(ConfigError):
        p.replace(theorem_mode=True)
    assert not p.replace(R=10.0).warnings


def test_instance_is_immutable():
    p, _ = random_problem(2)
    with pytest.raises(ValueError):
        p.A[0, 0] = 1.0
    with pytest.raises(AttributeError):
        p.gamma = 0.1


def test_overflow_reports_index():
    p = ProblemInstance(A=[[1.0], [-1.0], [0.5]], b=[0, 0, 0], w=[0, 0, 0], gamma=0.5, R=2.0)
    with pytest.raises(ExpOverflowError) as exc:
        evaluate(p, [800.0])
    assert exc.value.index == 0
    assert isinstance(exc.value, OverflowError)


def test_shape_mismatch():
    p, _ = random_problem(3)
    with pytest.raises(InputShapeError):
        evaluate(p, np.zeros(p.d + 1))


def test_evaluate_is_pure():
    p, x = random_problem(4)
    a, b = evaluate(p, x), evaluate(p, x)
    for k in ("f", "h", "u"):
        assert np.array_equal(getattr(a, k), getattr(b, k))
    assert a.L == b.L


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 40), d=st.integers(1, 5),
       R=st.floats(0.3, 10.0))
def test_fact_invariants(seed, n, d, R):
    d = min(d, n)
    p, x = random_problem(seed, n=n, d=d, R=R)
    ev = evaluate(p, x)
    log_n = math.log(n)
    assert abs(ev.f.sum() - 1) <= 1e-12
    assert np.linalg.norm(ev.f) <= 1 + 1e-12
    assert -1e-15 <= ev.L_ent <= log_n + 1e-10
    assert ev.h.min() >= -1 - 1e-12 and ev.h.max() <= 1e-12
    assert np.abs(ev.h).sum() <= log_n + 1e-10
    assert np.linalg.norm(ev.h) <= log_n + 1e-10
    assert ev.alpha >= math.exp(-R * R)
