import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tll.symplectic import (
    PositiveQuadratic,
    SplittingError,
    SymplecticSpace,
    convex_path_report,
    hamiltonian_matrix,
    pairing_matrix,
    positivity_signature,
    random_positive_quadratic,
    random_symplectic_space,
    spectral_splitting,
    subspace_gap,
)


def test_plane_example():
    space = SymplecticSpace.standard(1)
    quad = PositiveQuadratic(np.eye(2))
    A = hamiltonian_matrix(space, quad)
    np.testing.assert_allclose(A, [[0, -1], [1, 0]], atol=1e-14)
    pair = spectral_splitting(A, space.omega)
    v = pair.E_plus[:, 0]
    v = v / v[0]
    np.testing.assert_allclose(v, [1, -1j], atol=1e-12)
    sig = positivity_signature(pair, space)
    assert sig["plus_definite"] == 1 and sig["minus_definite"] == -1


def test_defining_identity():
    rng = np.random.default_rng(3)
    space = random_symplectic_space(2, rng)
    quad = random_positive_quadratic(4, rng)
    A = hamiltonian_matrix(space, quad)
    assert np.linalg.norm(quad.q + A.T @ space.omega) < 1e-10


def test_indefinite_real_part_rejected():
    with pytest.raises(SplittingError):
        PositiveQuadratic(np.diag([1.0, -1.0]))


def test_real_eigenvalue_rejected():
    A = np.diag([1.0, -1.0])
    with pytest.raises(SplittingError):
        spectral_splitting(A)


def test_schur_fallback_for_degenerate_spectrum():
    space = SymplecticSpace.standard(2)
    quad = PositiveQuadratic(np.eye(4))
    pair = spectral_splitting(hamiltonian_matrix(space, quad), space.omega)
    assert pair.method == "schur"
    sig = positivity_signature(pair, space)
    assert sig["plus_definite"] == -sig["minus_definite"]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3))
def test_random_splittings(seed, m):
    rng = np.random.default_rng(seed)
    space = random_symplectic_space(m, rng)
    quad = random_positive_quadratic(2 * m, rng)
    pair = spectral_splitting(hamiltonian_matrix(space, quad), space.omega)
    assert pair.E_plus.shape == (2 * m, m) and pair.E_minus.shape == (2 * m, m)
    # spectrum symmetric under lambda -> -lambda
    ev = np.sort_complex(pair.eigenvalues)
    np.testing.assert_allclose(np.sort_complex(-ev), ev, atol=1e-8 * np.abs(ev).max())
    sig = positivity_signature(pair, space)
    assert sig["plus_definite"] == -sig["minus_definite"]
    _, cond = pairing_matrix(pair, space)
    assert np.isfinite(cond)


def test_convex_path_gap_shrinks_with_refinement():
    worst_ratio = np.inf
    for seed in range(20):
        rng = np.random.default_rng(seed)
        space = random_symplectic_space(2, rng)
        q0, q1 = random_positive_quadratic(4, rng), random_positive_quadratic(4, rng)
        coarse = convex_path_report(space, q0, q1, samples=11)
        fine = convex_path_report(space, q0, q1, samples=101)
        assert coarse["min_c"] > 0
        assert fine["max_gap"] < 0.2
        worst_ratio = min(worst_ratio, coarse["max_gap"] / fine["max_gap"])
    assert worst_ratio > 4


def test_subspace_gap_zero_for_same_span():
    U = np.array([[1.0, 0], [0, 1], [0, 0]])
    V = U @ np.array([[2.0, 1], [0, 1]])
    assert subspace_gap(U, V) < 1e-12
