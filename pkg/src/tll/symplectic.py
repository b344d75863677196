"""Linear model of the outgoing/ingoing splitting of a positive complex quadratic form.

Given a real symplectic space ``(E, omega)`` and a complex symmetric form
``q`` with ``Re q(x, x) / 2 >= c |x|^2``, the operator ``A`` defined by
``q(x, y) = -omega(A x, y)`` has no real eigenvalue; its spectral subspaces
with ``Im lambda > 0`` and ``Im lambda < 0`` are complementary complex
Lagrangians.

Matrix conventions: ``omega(x, y) = x^T Omega y`` and ``q(x, y) = x^T Q y``,
so ``A = Omega^{-1} Q`` and the defining identity reads ``Q + A^T Omega = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

__all__ = [
    "LagrangianPair",
    "PositiveQuadratic",
    "SplittingError",
    "SymplecticSpace",
    "convex_path_report",
    "hamiltonian_matrix",
    "pairing_matrix",
    "positivity_signature",
    "random_positive_quadratic",
    "random_symplectic_space",
    "spectral_splitting",
    "subspace_gap",
]

IM_TOL = 1e-8
CLUSTER_TOL = 1e-6


class SplittingError(ValueError):
    """Raised when the input violates positivity or the splitting is ill-conditioned."""


@dataclass(frozen=True)
class SymplecticSpace:
    omega: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        if om.ndim != 2 or om.shape[0] != om.shape[1] or om.shape[0] % 2:
            raise SplittingError("omega must be a square matrix of even size")
        if not np.allclose(om.T, -om, atol=1e-12):
            raise SplittingError("omega must be antisymmetric")
        if abs(np.linalg.det(om)) < 1e-12:
            raise SplittingError("omega is degenerate")
        object.__setattr__(self, "omega", om)

    @property
    def dim(self) -> int:
        return self.omega.shape[0]

    def form(self, x, y) -> complex:
        return np.asarray(x) @ self.omega @ np.asarray(y)

    @classmethod
    def standard(cls, m: int) -> "SymplecticSpace":
        eye = np.eye(m)
        zero = np.zeros((m, m))
        return cls(np.block([[zero, eye], [-eye, zero]]))


def _sphere_samples(dim: int, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class PositiveQuadratic:
    """Complex symmetric form with certified ``Re q(x,x)/2 >= c |x|^2``.

    The certificate is two-sided: the minimum eigenvalue of ``Re Q / 2``
    gives ``c``, and ``2 dim^2`` deterministic unit vectors are evaluated as
    an independent check of the bound.
    """

    q: np.ndarray
    c: float = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=complex)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise SplittingError("q must be square")
        if not np.allclose(q, q.T, atol=1e-12):
            raise SplittingError("q must be symmetric (bilinear, not Hermitian)")
        re = 0.5 * (q.real + q.real.T)
        c = 0.5 * float(np.linalg.eigvalsh(re).min())
        if c <= 0:
            raise SplittingError(f"Re q is not positive definite (c = {c:.3e})")
        xs = _sphere_samples(q.shape[0], 2 * q.shape[0] ** 2)
        sampled = 0.5 * np.einsum("ki,ij,kj->k", xs, re, xs)
        if sampled.min() < c * (1 - 1e-9):
            raise SplittingError("sampled positivity check contradicts eigenvalue bound")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def delta(self, x) -> float:
        x = np.asarray(x)
        return 0.5 * float((x @ self.q @ x).real)


@dataclass(frozen=True)
class LagrangianPair:
    E_plus: np.ndarray
    E_minus: np.ndarray
    eigenvalues: np.ndarray
    method: str = "eig"


def hamiltonian_matrix(space: SymplecticSpace, quad: PositiveQuadratic) -> np.ndarray:
    """The operator ``A`` with ``q(x, y) = -omega(A x, y)``."""
    if space.dim != quad.dim:
        raise SplittingError("dimension mismatch between omega and q")
    A = np.linalg.solve(space.omega, quad.q)
    resid = np.linalg.norm(quad.q + A.T @ space.omega)
    if resid > 1e-12 * max(1.0, np.linalg.norm(quad.q)) * np.linalg.cond(space.omega):
        raise SplittingError(f"residual of q = -omega(A., .) too large: {resid:.2e}")
    return A


def _orthonormal(basis: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(basis)
    return q


def spectral_splitting(A: np.ndarray, omega: np.ndarray | None = None) -> LagrangianPair:
    """Split C^{2m} into the spectral subspaces of ``A`` with ``Im lambda > 0`` / ``< 0``.

    Eigenvectors are used when the spectrum is well separated; clustered
    spectra fall back to an ordered complex Schur form.  If ``omega`` is
    given, the Lagrangian property is verified.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    if n % 2:
        raise SplittingError("A must act on an even-dimensional space")
    m = n // 2
    evals, evecs = np.linalg.eig(A)
    if np.min(np.abs(evals.imag)) < IM_TOL:
        raise SplittingError("positivity violated or ill-conditioned input: "
                             f"eigenvalue with |Im| = {np.min(np.abs(evals.imag)):.2e}")
    plus = evals.imag > 0
    if plus.sum() != m:
        raise SplittingError(f"unbalanced spectrum: {plus.sum()} eigenvalues with Im > 0")
    gaps = np.abs(evals[:, None] - evals[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.min() > CLUSTER_TOL:
        E_plus = _orthonormal(evecs[:, plus])
        E_minus = _orthonormal(evecs[:, ~plus])
        method = "eig"
    else:
        _, Zp, kp = sla.schur(A, output="complex", sort=lambda z: z.imag > 0)
        _, Zm, km = sla.schur(A, output="complex", sort=lambda z: z.imag < 0)
        E_plus, E_minus = Zp[:, :kp], Zm[:, :km]
        method = "schur"
    if omega is not None:
        om = np.asarray(omega)
        for name, E in (("E+", E_plus), ("E-", E_minus)):
            defect = np.linalg.norm(E.T @ om @ E)
            if defect > 1e-10 * max(1.0, np.linalg.norm(om)):
                raise SplittingError(f"{name} is not Lagrangian (defect {defect:.2e})")
    return LagrangianPair(E_plus, E_minus, evals, method)


def _hermitian_restriction(E: np.ndarray, omega: np.ndarray) -> np.ndarray:
    # h(z) = (1/i) omega(z, conj z); on the span of E this is c^T M conj(c)
    M = -1j * (E.T @ omega @ E.conj())
    return 0.5 * (M + M.conj().T)


def positivity_signature(pair: LagrangianPair, space: SymplecticSpace) -> dict:
    """Definite signs of ``z -> (1/i) omega(z, conj z)`` on E+ and E-.

    Convention: with ``A = Omega^{-1} Q`` and E+ the ``Im lambda > 0``
    eigenspaces, the standard R^2 example gives E+ the sign +1.  Only the
    oppositeness of the two signs is convention-free.
    """
    out = {}
    for key, E in (("plus_definite", pair.E_plus), ("minus_definite", pair.E_minus)):
        ev = np.linalg.eigvalsh(_hermitian_restriction(E, space.omega))
        if ev.min() > 0:
            out[key] = 1
        elif ev.max() < 0:
            out[key] = -1
        else:
            raise SplittingError("input pair not positive/negative: restricted form is indefinite")
        out[key.replace("definite", "min_abs_eig")] = float(np.abs(ev).min())
    return out


def pairing_matrix(pair: LagrangianPair, space: SymplecticSpace) -> tuple[np.ndarray, float]:
    """omega restricted to E+ x E-, with its condition number."""
    P = pair.E_plus.T @ space.omega @ pair.E_minus
    return P, float(np.linalg.cond(P))


def subspace_gap(U: np.ndarray, V: np.ndarray) -> float:
    """Sine of the largest principal angle between two subspaces."""
    angles = sla.subspace_angles(U, V)
    return float(np.sin(angles.max()))


def random_symplectic_space(m: int, rng: np.random.Generator) -> SymplecticSpace:
    J = SymplecticSpace.standard(m).omega
    M = rng.standard_normal((2 * m, 2 * m)) + 2 * np.eye(2 * m)
    return SymplecticSpace(M.T @ J @ M)


def random_positive_quadratic(dim: int, rng: np.random.Generator, imag_scale: float = 1.0) -> PositiveQuadratic:
    B = rng.standard_normal((dim, dim))
    re = B @ B.T + 0.5 * np.eye(dim)
    S = rng.standard_normal((dim, dim))
    im = imag_scale * (S + S.T) / 2
    return PositiveQuadratic(re + 1j * im)


def convex_path_report(space: SymplecticSpace, q0: PositiveQuadratic, q1: PositiveQuadratic,
                       samples: int = 11) -> dict:
    """Follow ``(1-t) q0 + t q1``: positivity constant and the E+ gap between samples."""
    cs, gaps = [], []
    prev = None
    for t in np.linspace(0.0, 1.0, samples):
        qt = PositiveQuadratic((1 - t) * q0.q + t * q1.q)
        pair = spectral_splitting(hamiltonian_matrix(space, qt), space.omega)
        cs.append(qt.c)
        if prev is not None:
            gaps.append(subspace_gap(prev, pair.E_plus))
        prev = pair.E_plus
    return {"min_c": float(min(cs)), "max_gap": float(max(gaps)) if gaps else 0.0,
            "samples": samples}
