import math
from fractions import Fraction
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tll.jets import Jet, JetError
from tll.laurent import (
    LOG_SIGN,
    FitError,
    LaurentSymbol,
    epsilon_trace_expansion,
    fit_epsilon_expansion,
    kernel_expansion,
    laplace_transform_numeric,
    measure_log_sign,
)


def phase_1d():
    x, y = Jet.variables(2, 4)
    return (x - y) ** 2


def const_symbol(n, values, nv=2):
    return LaurentSymbol.constant(n, values, nv, 4)


def test_alpha_from_nonnegative_terms():
    sing = kernel_expansion(const_symbol(2, {1: 2.0, 0: 3.0}), phase_1d())
    assert sing.alpha[2].constant_term == pytest.approx(2.0)
    assert sing.alpha[1].constant_term == pytest.approx(3.0)
    assert sing.psi.is_zero()


def test_alpha_factorial_weights():
    sing = kernel_expansion(const_symbol(4, {3: 1.0}), phase_1d())
    assert sing.alpha[4].constant_term == pytest.approx(math.factorial(3))


def test_beta_from_negative_terms():
    sing = kernel_expansion(const_symbol(1, {-1: 5.0, -2: 4.0}), phase_1d())
    assert sing.beta[0].constant_term == pytest.approx(5.0)
    assert sing.beta[1].constant_term == pytest.approx(4.0)


def test_exact_mode_gives_rationals():
    x, y = Jet.variables(2, 3, exact=True)
    sym = LaurentSymbol(2, {-2: Jet.constant(3, 2, 3, exact=True), 1: Jet.constant(1, 2, 3, exact=True)})
    sing = kernel_expansion(sym, (x - y) ** 2)
    assert sing.beta[1].constant_term == Fraction(3)
    assert sing.alpha[2].constant_term == Fraction(1)


def test_top_degree_checked():
    with pytest.raises(JetError):
        kernel_expansion(const_symbol(1, {1: 1.0}), phase_1d())


def test_kernel_expansion_is_linear():
    rng = np.random.default_rng(0)
    a = const_symbol(3, {k: rng.standard_normal() for k in (-2, -1, 0, 1, 2)})
    b = const_symbol(3, {k: rng.standard_normal() for k in (-1, 2)})
    s = kernel_expansion(a + b.scale(2.5), phase_1d())
    sa, sb = kernel_expansion(a, phase_1d()), kernel_expansion(b, phase_1d())
    for k in s.alpha:
        assert s.alpha[k].allclose(sa.alpha[k] + 2.5 * sb.alpha[k])
    for k in s.beta:
        assert s.beta[k].allclose(sa.beta[k] + 2.5 * sb.beta[k])


def test_log_sign_measured():
    measured = measure_log_sign()
    assert abs(measured - LOG_SIGN) < 1e-3


def test_numeric_transform_against_closed_form():
    sym = const_symbol(3, {2: 1.0, 0: 2.0})
    for s in (0.3, 1.0, 4.0):
        assert laplace_transform_numeric(sym, 0.0, s) == pytest.approx(2 / s ** 3 + 2 / s, rel=1e-9)


def test_negative_epsilon_rejected():
    with pytest.raises(ValueError):
        laplace_transform_numeric(const_symbol(1, {0: 1.0}), 0.0, -1.0)


def test_roundtrip_poles():
    sym = const_symbol(2, {1: 2.0, 0: 3.0})
    sing = kernel_expansion(sym, phase_1d())
    eps = np.geomspace(1e-3, 1e-1, 30)
    fit = fit_epsilon_expansion([(e, laplace_transform_numeric(sym, 0.0, e)) for e in eps], 2, 2)
    assert fit.pole_coeffs[2] == pytest.approx(sing.alpha[2].constant_term, rel=1e-6)
    assert fit.pole_coeffs[1] == pytest.approx(sing.alpha[1].constant_term, rel=1e-6)


@pytest.mark.parametrize("cutoff", [1.0, 2.0])
def test_log_coefficient_cutoff_independent(cutoff):
    sym = const_symbol(1, {-1: 0.7})
    sing = kernel_expansion(sym, phase_1d())
    eps = np.geomspace(1e-3, 1e-1, 40)
    fit = fit_epsilon_expansion([(e, laplace_transform_numeric(sym, 0.0, e, cutoff)) for e in eps],
                                0, 3, max_log=1)
    assert fit.log_coeffs[0].real == pytest.approx(LOG_SIGN * sing.psi.constant_term, abs=1e-4)


def test_fit_recovers_synthetic_data():
    eps = np.geomspace(1e-3, 1e-1, 40)
    data = [(e, 1.5 / e ** 2 - 0.25 / e + 0.3 * np.log(e) + 2.0 - e) for e in eps]
    fit = fit_epsilon_expansion(data, max_pole=2, max_taylor=1)
    assert fit.pole_coeffs[2] == pytest.approx(1.5, abs=1e-6)
    assert fit.pole_coeffs[1] == pytest.approx(-0.25, abs=1e-6)
    assert fit.log_coeffs[0] == pytest.approx(0.3, abs=1e-6)
    assert fit.smooth_coeffs[0] == pytest.approx(2.0, abs=1e-6)


def test_circle_trace_has_no_log():
    eps = np.geomspace(1e-3, 1e-1, 40)
    data = [(e, 1.0 / (1.0 - np.exp(-e))) for e in eps]
    fit = fit_epsilon_expansion(data, max_pole=1, max_taylor=3)
    assert fit.pole_coeffs[1] == pytest.approx(1.0, abs=1e-6)
    assert abs(fit.log_coeffs[0]) < 1e-4


def test_fit_sample_count_and_conditioning():
    with pytest.raises(FitError):
        fit_epsilon_expansion([(0.1, 1.0), (0.2, 2.0)], 2, 2)
    eps = np.geomspace(1e-3, 1.1e-3, 40)
    with pytest.raises(FitError, match="condition"):
        fit_epsilon_expansion([(e, 1 / e) for e in eps], 3, 5, max_log=2)


def test_trace_expansion_homogeneous_measure():
    sym = const_symbol(2, {1: 1.0, -1: 0.5})
    sing = kernel_expansion(sym, phase_1d())
    measure = SimpleNamespace(weights=np.full(10, 0.2 * np.pi))
    exp = epsilon_trace_expansion(sing, measure)
    assert exp.pole_coeffs[2] == pytest.approx(2 * np.pi)
    assert exp.log_coeffs[0] == pytest.approx(LOG_SIGN * 0.5 * 2 * np.pi)


def test_trace_expansion_with_coordinates():
    x, y = Jet.variables(2, 3)
    sym = LaurentSymbol(1, {0: 1 + x * y})
    sing = kernel_expansion(sym, phase_1d())
    nodes = np.array([[0.0], [0.5]])
    measure = SimpleNamespace(weights=np.array([1.0, 2.0]), local_coords=nodes)
    exp = epsilon_trace_expansion(sing, measure)
    assert exp.pole_coeffs[1] == pytest.approx(1.0 + 2.0 * 1.25)


def test_symbol_json_roundtrip():
    sym = const_symbol(2, {1: 1.0, -1: 0.25j})
    back = LaurentSymbol.from_json(sym.to_json())
    assert back.n == 2 and set(back.terms) == {1, -1}
    assert back.terms[-1] == sym.terms[-1]


@settings(max_examples=25, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0.1, 3))
def test_transform_matches_expansion_for_nonnegative_symbols(a0, a1, s):
    sym = const_symbol(2, {0: a0, 1: a1})
    sing = kernel_expansion(sym, phase_1d())
    approx = sum(sing.alpha[k].constant_term * s ** -k for k in sing.alpha)
    assert laplace_transform_numeric(sym, 0.0, s) == pytest.approx(approx, rel=1e-8, abs=1e-10)
