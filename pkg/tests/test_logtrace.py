import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tll.contact import S3Quadrature
from tll.logtrace import (
    LogTraceScenario,
    broken_family,
    circle_trace_shift,
    conformal_family,
    constant_family,
    differenced_trace_check,
    invariance_experiment,
    library_scenarios,
    log_density,
    log_trace,
    run_scenario,
    s3_vanishing_chain,
    sphere_log_trace,
)
from tll.phase import sphere_szego_kernel

Q = S3Quadrature(16, 16)
TINY = S3Quadrature(2, 2)


def test_log_trace_basic():
    assert log_trace(np.zeros(Q.shape), Q) == 0.0
    assert log_trace(np.ones(Q.shape), Q) == pytest.approx(2 * math.pi ** 2, abs=1e-6)
    assert log_trace(lambda p, a, b: 1 + 0 * p, Q) == pytest.approx(2 * math.pi ** 2, abs=1e-6)
    with pytest.raises(ValueError, match="grid mismatch"):
        log_trace(np.ones((3, 3, 3)), Q)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.floats(-3, 3))
def test_log_trace_linear_and_monotone(seed, c):
    rng = np.random.default_rng(seed)
    a, b = rng.standard_normal(Q.shape), rng.standard_normal(Q.shape)
    assert log_trace(a + c * b, Q) == pytest.approx(log_trace(a, Q) + c * log_trace(b, Q), abs=1e-9)
    assert log_trace(a + np.abs(b), Q) >= log_trace(a, Q)


def test_sphere_kernel_has_no_log():
    assert log_density(sphere_szego_kernel(2, 4)) == 0.0
    assert sphere_log_trace(Q) == 0.0


def test_constant_family_zero_deviation():
    rep = invariance_experiment(constant_family(), [0.0, 0.1], TINY, grid_check=False)
    assert rep["max_deviation"] == 0.0 and rep["passed"]


def test_conformal_family_small_grid():
    rep = invariance_experiment(conformal_family(), [0.0, 0.2], TINY)
    assert rep["max_deviation"] < 1e-6
    assert rep["grid_deviation"] < 1e-6
    assert max(rep["idempotence_defects"]) < 1e-6
    assert rep["passed"] and not rep["flagged"]


def test_broken_family_flagged():
    rep = invariance_experiment(broken_family(), [0.0, 0.2], TINY, grid_check=False)
    assert rep["flagged"]
    assert rep["max_deviation"] > 1e-3
    assert rep["idempotence_defects"][1] > 1e-3
    with pytest.raises(ValueError, match="idempotence"):
        invariance_experiment(broken_family(), [0.2], TINY, strict=True, grid_check=False)


def test_circle_shift_against_matrices():
    n, K, t, eps = 512, 150, 0.3, 0.2
    theta = 2 * math.pi * np.arange(n) / n
    f = np.exp(-4 * (1 - np.cos(theta)))
    idx = np.arange(-K, K + 1)

    def toeplitz(g):
        c = np.fft.fft(g) / n
        return c[(idx[:, None] - idx[None, :]) % n]

    S = np.diag((idx >= 0).astype(float))
    E = np.diag(np.exp(-eps * np.abs(idx)))
    brute = np.trace(toeplitz(np.exp(t * f)) @ S @ toeplitz(np.exp(-t * f)) @ E).real - np.trace(S @ E)
    assert circle_trace_shift(t, eps, n)[0] == pytest.approx(brute, abs=1e-12)


def test_differenced_trace_has_no_log():
    rep = differenced_trace_check(np.linspace(0, 0.2, 5))
    assert rep["max_log_coefficient"] < 1e-4
    assert rep["max_pole_coefficient"] < 1e-4


def seed(s, t1, t2):
    return np.sin(2 * s) ** 4 * (1 + 0.5 * np.cos(t1))


def test_vanishing_chain():
    rep = s3_vanishing_chain(seed, [1, 2, 3], S3Quadrature(64, 16))
    assert rep["fit_residual"] < 1e-10 and rep["ratio_residual"] < 1e-10
    assert rep["classes"] == {"0": 0, "1": -1, "2": 0, "3": -1}
    assert rep["forced_L1"] == 0.0 and rep["forced_L"] == [0.0, 0.0, 0.0]
    assert rep["constraint_violation"] > 0  # a generic seed contradicts the assumed input


def test_vanishing_chain_zero_seed():
    rep = s3_vanishing_chain(lambda s, a, b: 0 * s * a, [1, 2], S3Quadrature(64, 16))
    assert rep["L"] == [0.0, 0.0] and rep["constraint_violation"] == 0.0


def test_scenario_json_and_run():
    sc = LogTraceScenario.from_json({"name": "s", "kind": "sphere", "params": {"n_phi": 8, "n_theta": 8}})
    out = run_scenario(sc)
    assert out["result"]["L"] == 0.0 and out["scenario"]["kind"] == "sphere"
    with pytest.raises(ValueError):
        LogTraceScenario.from_json({"name": "s", "kind": "nope"})
    assert {s.name for s in library_scenarios()} >= {"conformal_family", "vanishing_chain"}
