import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tll.jets import Jet
from tll.projectors import (
    GradedElement,
    MatrixOperator,
    ProjectorError,
    SymbolOnC,
    conjugated_family,
    correct_projector,
    deform_idempotent_symbols,
    derivative_identity_check,
    frame_normalize,
    idempotency_defect,
    random_near_projector,
    residual,
    rotating_rank_one,
    series_coefficient,
    sign_projector,
    symbol_compose,
    symbol_compose_weighted,
)


def test_series_coefficients():
    assert [series_coefficient(k) for k in (1, 2, 3, 4)] == [1, 3, 10, 35]
    for k in range(1, 12):
        assert series_coefficient(k) == math.comb(2 * k, k) // 2


def test_residual_examples():
    P = np.diag([1.0, 0.0, 1.0])
    assert np.all(residual(P) == 0)
    assert residual(0.9) == pytest.approx(0.09)
    rng = np.random.default_rng(0)
    S0 = rng.standard_normal((6, 6))
    R = residual(S0)
    assert np.linalg.norm(S0 @ R - R @ S0) < 1e-12 * np.linalg.norm(S0) ** 3


def test_scalar_series_matches_sign():
    assert abs(correct_projector(0.9, 60) - 1) < 1e-10
    assert abs(correct_projector(0.1, 60)) < 1e-10


def test_far_from_projector_rejected():
    with pytest.raises(ProjectorError, match="too far"):
        correct_projector(0.5, 10)
    with pytest.raises(ProjectorError):
        correct_projector(np.eye(3) * 0.5)


def test_matrix_example_rank_seven():
    rng = np.random.default_rng(7)
    S0, _ = random_near_projector(20, 7, 0.05, rng)
    S = correct_projector(S0, 40)
    assert np.abs(S - sign_projector(S0)).max() < 1e-8
    assert idempotency_defect(S) < 1e-10
    assert np.linalg.matrix_rank(S, tol=1e-6) == 7
    assert np.linalg.norm(S @ S0 - S0 @ S) < 1e-10


def test_defect_decreases_geometrically():
    rng = np.random.default_rng(3)
    S0, _ = random_near_projector(10, 4, 0.05, rng)
    defects = [idempotency_defect(correct_projector(S0, k)) for k in (2, 4, 6, 8)]
    assert all(b < a * 0.2 for a, b in zip(defects, defects[1:]))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 9))
def test_uniqueness_against_oracle(seed, rank):
    rng = np.random.default_rng(seed)
    S0, _ = random_near_projector(10, rank, 0.05, rng)
    S = correct_projector(S0, 40)
    assert np.abs(S - sign_projector(S0)).max() < 1e-8


def test_matrix_operator_wrapper():
    op = MatrixOperator(np.diag([0.95, 0.02]))
    out = correct_projector(op, 40)
    assert isinstance(out, MatrixOperator)
    np.testing.assert_allclose(out.entries, np.diag([1.0, 0.0]), atol=1e-10)
    back = MatrixOperator.from_json(out.to_json())
    np.testing.assert_array_equal(back.entries, out.entries)


@pytest.mark.parametrize("k_max", [1, 2, 4, 6])
def test_graded_defect_degree(k_max):
    S0 = GradedElement({0: Fraction(1), -1: Fraction(3, 10), -2: Fraction(1, 10)})
    R = residual(S0)
    S = correct_projector(S0, k_max)
    assert (S * S - S).top_degree <= R.top_degree * (k_max + 1)


def test_graded_rejects_degree_zero_residual():
    with pytest.raises(ProjectorError):
        correct_projector(GradedElement({0: 0.5, -1: 1.0}), 3)


def test_graded_with_jet_coefficients():
    x = Jet.variable(0, 1, 3)
    S0 = GradedElement({0: Jet.constant(1.0, 1, 3), -1: 0.2 * x + 0.1})
    S = correct_projector(S0, 4)
    assert (S * S - S).leading_degree(1e-12) <= -5


def test_constant_family():
    P = np.diag([1.0, 0.0])
    rep = derivative_identity_check(lambda t: P, [0.0, 1.0])
    assert rep["max_residual"] == 0.0 and rep["trace_variation"] == 0.0


def test_rotating_rank_one():
    rep = derivative_identity_check(rotating_rank_one, np.linspace(0, 3, 13), h=1e-4)
    assert rep["max_residual"] < 1e-6
    assert rep["trace_variation"] < 1e-12


def test_conjugated_rank_three():
    rep = derivative_identity_check(conjugated_family(8, 3, seed=1), np.linspace(0, 1, 9), h=1e-4)
    assert rep["max_residual"] < 1e-5
    assert rep["trace_variation"] < 1e-12
    assert rep["traces"][0][0] == pytest.approx(3.0)


def test_non_projector_rejected():
    with pytest.raises(ProjectorError):
        derivative_identity_check(lambda t: np.eye(2) * 0.5, [0.0])


# -- symbols on C -----------------------------------------------------------

def product_symbol(rng, nb=4, p=3, m=5):
    f = rng.standard_normal((nb, p)) + 1j * rng.standard_normal((nb, p))
    g = rng.standard_normal((nb, m)) + 1j * rng.standard_normal((nb, m))
    g[:, 0] = 1 / f[:, 0]
    return SymbolOnC.product(f, g)


def test_product_form_is_idempotent():
    a = product_symbol(np.random.default_rng(0))
    np.testing.assert_allclose(symbol_compose(a, a).values, a.values, atol=1e-12)


def test_constant_one_is_idempotent():
    a = SymbolOnC(np.ones((3, 2, 2)))
    np.testing.assert_array_equal(symbol_compose(a, a).values, a.values)


def test_bad_normalization_detected():
    vals = np.ones((2, 2, 2), dtype=complex)
    vals[1] *= 0.5
    a = SymbolOnC(vals)
    assert not np.allclose(symbol_compose(a, a).values, a.values)


def test_unnormalized_compose_rejected():
    a = SymbolOnC(np.ones((1, 2, 2)), normalized=False)
    with pytest.raises(ProjectorError):
        symbol_compose(a, a)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_symbol_compose_associative(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (SymbolOnC(rng.standard_normal((3, 4, 4)) + 1j * rng.standard_normal((3, 4, 4)))
               for _ in range(3))
    left = symbol_compose(symbol_compose(a, b), c)
    right = symbol_compose(a, symbol_compose(b, c))
    np.testing.assert_allclose(left.values, right.values, rtol=1e-14)


def admissible_J(rng, nb=3, p=4, m=4):
    j00 = rng.uniform(0.5, 2, nb) * np.exp(1j * rng.uniform(0, 6, nb))
    J = rng.uniform(0.5, 2, (nb, p, m)) * np.exp(1j * rng.uniform(0, 6, (nb, p, m)))
    J[:, :, 0] = j00[:, None]
    J[:, 0, :] = j00[:, None]
    return SymbolOnC(J, False)


def test_frame_identity_and_constant():
    rng = np.random.default_rng(2)
    a = SymbolOnC(rng.standard_normal((3, 4, 4)), False)
    one = SymbolOnC(np.ones((3, 4, 4)), False)
    np.testing.assert_allclose(frame_normalize(a, one).values, a.values)
    kappa = 2.5 - 0.5j
    const = SymbolOnC(np.full((3, 4, 4), kappa), False)
    np.testing.assert_allclose(frame_normalize(a, const).values, kappa * a.values)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_frame_round_trip(seed):
    rng = np.random.default_rng(seed)
    J = admissible_J(rng)
    a, b = (SymbolOnC(rng.standard_normal((3, 4, 4)) + 1j * rng.standard_normal((3, 4, 4)), False)
            for _ in range(2))
    lhs = frame_normalize(symbol_compose_weighted(a, b, J), J)
    rhs = symbol_compose(frame_normalize(a, J), frame_normalize(b, J))
    np.testing.assert_allclose(lhs.values, rhs.values, rtol=1e-12, atol=1e-12)


def test_frame_constraint_violation_rejected():
    rng = np.random.default_rng(5)
    J = admissible_J(rng)
    vals = J.values.copy()
    vals[0, 2, 0] *= 1.1
    with pytest.raises(ProjectorError, match="associativity"):
        frame_normalize(SymbolOnC(np.ones_like(vals)), SymbolOnC(vals, False))


def test_vanishing_J_rejected():
    J = np.ones((1, 2, 2), dtype=complex)
    J[0, 1, 1] = 0
    with pytest.raises(ProjectorError):
        frame_normalize(SymbolOnC(np.ones((1, 2, 2))), SymbolOnC(J, False))


def test_deform_constant_path():
    a = product_symbol(np.random.default_rng(1))
    path = deform_idempotent_symbols(a, a, 5)
    assert all(np.allclose(s.values, a.values) for s in path)


def test_deform_scaled_factor():
    nb, p, m = 3, 2, 3
    f0 = np.ones((nb, p))
    g0 = np.ones((nb, m))
    a0 = SymbolOnC.product(f0, g0)
    a1 = SymbolOnC.product(2 * f0, g0 / 2)
    path = deform_idempotent_symbols(a0, a1, 10)
    assert len(path) == 11
    for s in path:
        assert np.abs(symbol_compose(s, s).values - s.values).max() < 1e-10


def test_deform_zero_crossing():
    rng = np.random.default_rng(4)
    a0 = product_symbol(rng)
    f, g = a0.factors()
    # same symbol, opposite factorization: the interpolated factors pass through zero
    a1 = SymbolOnC.product(-f, -g)
    with pytest.raises(ProjectorError, match="t = 0.5"):
        deform_idempotent_symbols(a0, a1, factors0=(f, g), factors1=(-f, -g))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_deform_paths_stay_idempotent(seed):
    rng = np.random.default_rng(seed)
    a0, a1 = product_symbol(rng), product_symbol(rng)
    try:
        path = deform_idempotent_symbols(a0, a1, 8)
    except ProjectorError:
        return
    for s in path:
        assert np.abs(symbol_compose(s, s).values - s.values).max() < 1e-10 * max(1, np.abs(s.values).max() ** 2)
