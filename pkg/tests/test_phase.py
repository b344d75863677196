import math

import numpy as np
import pytest
import scipy.integrate as si
from hypothesis import given, settings, strategies as st

from tll.jets import Jet
from tll.laurent import LaurentSymbol, kernel_expansion
from tll.phase import (
    PhaseError,
    PhaseKernel,
    associativity_defect,
    compose_fixed,
    compose_kernels,
    critical_point,
    idempotence_defect,
    jet_det_inverse,
    laplace_expansion,
    leading_coefficient_gap,
    sphere_szego_kernel,
    stationary_phase,
    toy_kernel,
    unit_factor,
    validate_phase,
    validate_phase_jet,
)

# adaptive quadrature of int exp(-50 (u^2/2 + u^3/6)) du over [-1.5, 10]
CUBIC_LAMBDA50 = 0.356018415502046


def cubic_integral(lam):
    val, _ = si.quad(lambda t: math.exp(-lam * (t * t / 2 + t ** 3 / 6)), -1.5, 10,
                     epsabs=0, epsrel=1e-13, limit=200)
    return val


def symbol_value(sym, lam, half_shift):
    return sum(complex(c.constant_term) * lam ** k for k, c in sym.terms.items()) * lam ** (-half_shift)


def test_validate_square():
    x, y = Jet.variables(2, 4)
    assert validate_phase_jet((x - y) ** 2)["c"] == pytest.approx(1.0)


def test_validate_rejects_linear_imaginary():
    x, y = Jet.variables(2, 4)
    with pytest.raises(PhaseError, match="positive"):
        validate_phase_jet((x - y) * 1j)


def test_validate_rejects_nonzero_diagonal():
    x, y = Jet.variables(2, 4)
    with pytest.raises(PhaseError, match="q\\(x,x\\)"):
        validate_phase_jet((x - y) ** 2 + x * y)


def test_sphere_kernel_constants():
    S = sphere_szego_kernel(2, 4)
    rep = validate_phase(S)
    assert rep["c"] > 0
    sing = kernel_expansion(S.amplitude, S.phase)
    assert complex(sing.alpha[2].constant_term) == pytest.approx(1 / (2 * math.pi ** 2), abs=1e-12)
    assert all(b.is_zero(0.0) for b in sing.beta.values())


def test_circle_kernel_pure_pole():
    S = sphere_szego_kernel(1, 4)
    sing = kernel_expansion(S.amplitude, S.phase)
    assert complex(sing.alpha[1].constant_term) == pytest.approx(1 / (2 * math.pi), abs=1e-14)
    assert sing.psi.is_zero(0.0)


def test_sphere_kernel_needs_positive_n():
    with pytest.raises(PhaseError):
        sphere_szego_kernel(0)


def test_critical_point_quadratic():
    x, y, u = Jet.variables(3, 6)
    (w,) = critical_point((x - u) ** 2 + (u - y) ** 2, 2)
    X, Y = Jet.variables(2, 5)
    assert w.allclose((X + Y) * 0.5, atol=1e-14)


def test_critical_point_cubic_residual():
    x, y, u = Jet.variables(3, 7)
    phi = (x - u) ** 2 + (u - y) ** 2 + u ** 3 / 10
    (w,) = critical_point(phi, 2)
    resid = phi.diff(2).compose(Jet.variables(2, 6) + [w])
    assert resid.max_abs() < 1e-12


def test_critical_point_singular():
    x, y, u = Jet.variables(3, 4)
    with pytest.raises(PhaseError, match="singular"):
        critical_point(x * x + y * y + 0 * u, 2)


def test_pure_gaussian():
    u = Jet.variable(0, 1, 8)
    sym = laplace_expansion(u * u / 2, Jet.constant(1.0, 1, 8), 0, terms=3)
    assert complex(sym.terms[0].constant_term) == pytest.approx(math.sqrt(2 * math.pi))
    assert all(abs(complex(sym.coefficient(k).constant_term)) < 1e-14 for k in (-1, -2))


def test_cubic_three_terms_against_quadrature():
    assert cubic_integral(50) == pytest.approx(CUBIC_LAMBDA50, rel=1e-12)
    u = Jet.variable(0, 1, 10)
    sym = laplace_expansion(u * u / 2 + u ** 3 / 6, Jet.constant(1.0, 1, 10), 0, terms=3)
    assert complex(sym.terms[-1].constant_term) / math.sqrt(2 * math.pi) == pytest.approx(5 / 24)
    approx = symbol_value(sym, 50, 0.5)
    assert abs(approx - CUBIC_LAMBDA50) / CUBIC_LAMBDA50 < 1e-4


def test_correction_scaling_under_doubling():
    lam = 500.0
    corr = [cubic_integral(l) / math.sqrt(2 * math.pi / l) - 1 for l in (lam, 2 * lam)]
    assert corr[1] / corr[0] == pytest.approx(0.5, rel=0.01)


def test_decoupled_gaussian_factorizes():
    u, v = Jet.variables(2, 8)
    two = laplace_expansion(u * u / 2 + u ** 3 / 6 + v * v, Jet.constant(1.0, 2, 8), 0, terms=2)
    (a,) = Jet.variables(1, 8)
    one_u = laplace_expansion(a * a / 2 + a ** 3 / 6, Jet.constant(1.0, 1, 8), 0, terms=2)
    one_v = laplace_expansion(a * a, Jet.constant(1.0, 1, 8), 0, terms=2)
    for k in (0, -1):
        prod = sum(complex(one_u.terms[i].constant_term) * complex(one_v.terms[k - i].constant_term)
                   for i in (0, -1) if k - i in one_v.terms)
        assert complex(two.terms[k].constant_term) == pytest.approx(prod, rel=1e-12)


def test_coupled_2d_against_quadrature():
    lam = 50
    u, v = Jet.variables(2, 10)
    ph = u ** 2 / 2 + v ** 2 / 2 + u * v / 4 + u ** 2 * v / 6 + v ** 3 / 10
    sym = laplace_expansion(ph, Jet.constant(1.0, 2, 10) + 0.5 * u * v, 0, terms=3)
    ref, _ = si.dblquad(lambda b, a: math.exp(-lam * (a * a / 2 + b * b / 2 + a * b / 4 + a * a * b / 6
                                                      + b ** 3 / 10)) * (1 + 0.5 * a * b),
                        -1.5, 1.5, -1.5, 1.5, epsabs=0, epsrel=1e-12)
    assert abs(symbol_value(sym, lam, 1.0) - ref) / ref < 1e-5


def test_exterior_dependence_against_quadrature():
    lam, x0 = 50, 0.1
    x, w = Jet.variables(2, 12)
    res = stationary_phase(w ** 2 / 2 + w ** 3 / 6 + x * w, {0: Jet.constant(1.0, 2, 12)}, 1, terms=3)
    val = np.exp(-lam * res.critical_value.eval([x0])) * sum(
        c.eval([x0]) * lam ** k for k, c in res.amplitude.items())
    ref, _ = si.quad(lambda t: math.exp(-lam * (t * t / 2 + t ** 3 / 6 + x0 * t)), -1.5, 10,
                     epsabs=0, epsrel=1e-13, limit=200)
    assert abs(val - ref) / ref < 1e-4


def test_negative_real_part_rejected():
    u = Jet.variable(0, 1, 4)
    with pytest.raises(PhaseError):
        laplace_expansion(-u * u / 2, Jet.constant(1.0, 1, 4))


def test_branch_cut_detected():
    u, v = Jet.variables(2, 4)
    # two eigenvalues near -1 + 0.2i: the determinant winds past the negative axis
    h = -1 + 0.2j
    with pytest.raises(PhaseError, match="branch"):
        stationary_phase((u * u + v * v) * (h / 2), {0: Jet.constant(1.0, 2, 4)}, 0)


def test_jet_det_inverse():
    x = Jet.variable(0, 1, 4)
    M = [[x, 1 + x], [2 + x * x, x * 0]]
    det, inv = jet_det_inverse(M)
    assert det.allclose(-(1 + x) * (2 + x * x))
    for i in range(2):
        for j in range(2):
            s = sum((M[i][k] * inv[k][j] for k in range(2)), x * 0)
            assert s.allclose(x * 0 + (1 if i == j else 0), atol=1e-12)


def test_gaussian_kernels_fixed_parameter():
    x, y = Jet.variables(2, 6)
    K = PhaseKernel((x - y) ** 2 / 2, LaurentSymbol(1, {0: Jet.constant(1.0, 2, 6)}), 1, 1)
    res = compose_fixed(K, K)
    assert res.critical_value.allclose((x - y) ** 2 / 4, atol=1e-12)
    # int exp(-lam ((x-u)^2 + (u-y)^2)/2) du = sqrt(pi/lam) exp(-lam (x-y)^2/4)
    assert complex(res.amplitude[-0.5].constant_term) == pytest.approx(math.sqrt(math.pi))


def test_zero_amplitude_composes_to_zero():
    S = sphere_szego_kernel(2, 6)
    Z = compose_kernels(S, S.scale_amplitude(0.0))
    assert all(a.is_zero(1e-15) for a in Z.amplitude.terms.values())


def test_sphere_self_composition():
    S = sphere_szego_kernel(2, 6)
    SS = compose_kernels(S, S)
    validate_phase(SS)
    e, resid = unit_factor(SS.phase, S.phase.truncate(4))
    assert resid < 1e-10
    assert complex(e.constant_term) == pytest.approx(1.0, abs=1e-12)


def test_base_point_hessian_determinant():
    S = sphere_szego_kernel(2, 4)
    from tll.phase import _composition_data
    phi, amps, n_ext = _composition_data(S, S, with_tau=True)
    res = stationary_phase(phi, amps, n_ext, terms=1)
    assert complex(res.hessian_det.constant_term) == pytest.approx(16.0)


def test_idempotence_defect_decreases():
    d2 = idempotence_defect(2, order=2)
    d4 = idempotence_defect(2, order=4)
    assert d2["defect"] > d4["defect"]
    assert d4["defect"] < 1e-6
    assert abs(d4["unit_constant"] - 1) < 1e-12


def test_circle_idempotence():
    rep = idempotence_defect(1, order=4)
    assert rep["defect"] < 1e-6


@settings(max_examples=10, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=1.0), min_size=9, max_size=9),
       st.lists(st.floats(0.5, 2.0), min_size=3, max_size=3))
def test_associativity_one_dimensional(coefs, widths):
    ks = [toy_kernel(8, (1.0 + coefs[3 * i], coefs[3 * i + 1], coefs[3 * i + 2]), widths[i])
          for i in range(3)]
    rep = associativity_defect(*ks)
    assert rep["defect"] < 1e-8
    assert rep.get("log_defect", 0.0) < 1e-8


@pytest.mark.slow
def test_associativity_on_sphere_with_negative_control():
    S = sphere_szego_kernel(2, 8)
    V = Jet.variables(6, 8)

    def perturbed(c):
        amp = S.amplitude.map(lambda j: j * (1 + c[0] * V[1] * V[5] + c[1] * V[2] + 1j * c[2] * V[4]))
        return PhaseKernel(S.phase, amp, 3, 2)

    a, b, c = perturbed((0.5, 0.3, -0.2)), perturbed((-0.4, 0.6, 0.1)), perturbed((0.2, -0.3, 0.7))
    ab = compose_kernels(a, b)
    left = compose_kernels(ab, c)
    right = compose_kernels(a, compose_kernels(b, c))
    assert leading_coefficient_gap(left, right, a.phase)["defect"] < 1e-8
    swapped = compose_kernels(compose_kernels(b, a), c)
    assert leading_coefficient_gap(left, swapped, a.phase)["defect"] > 1e-4


def test_kernel_json_roundtrip():
    S = sphere_szego_kernel(2, 3)
    back = PhaseKernel.from_json(S.to_json())
    assert back.phase == S.phase and back.dims == 3 and back.n == 2
