"""Idempotent corrections, the projector derivative identity and symbols on C.

The correction of an approximate idempotent ``S0`` with ``R = S0 - S0^2`` is

    S = S0 + (2 S0 - 1) sum_{k>=1} (2k-1)! / (k! (k-1)!) R^k,

the series of ``(2S - 1) = (2S0 - 1) (1 - 4R)^(-1/2)``.  It converges when the
spectral radius of ``R`` is below 1/4.

Symbols on ``C`` are stored as arrays ``values[b, i, j]``: ``b`` labels a base
point ``xi0``, ``i`` a point ``xi'`` of the outgoing fiber and ``j`` a point
``xi''`` of the ingoing fiber.  Fiber index 0 is ``xi0`` itself in both fibers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg as sla

__all__ = [
    "GradedElement",
    "MatrixOperator",
    "ProjectorError",
    "SymbolOnC",
    "check_frame",
    "conjugated_family",
    "correct_projector",
    "deform_idempotent_symbols",
    "derivative_identity_check",
    "frame_normalize",
    "idempotency_defect",
    "random_near_projector",
    "residual",
    "rotating_rank_one",
    "series_coefficient",
    "sign_projector",
    "symbol_compose",
    "symbol_compose_weighted",
]

RADIUS_LIMIT = 0.25


class ProjectorError(ValueError):
    pass


def series_coefficient(k: int) -> int:
    """``(2k-1)! / (k! (k-1)!)``: 1, 3, 10, 35, ..."""
    if k < 1:
        raise ValueError("k must be positive")
    return math.factorial(2 * k - 1) // (math.factorial(k) * math.factorial(k - 1))


@dataclass(frozen=True)
class MatrixOperator:
    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ProjectorError("operator must be a square matrix")
        if not np.all(np.isfinite(a)):
            raise ProjectorError("operator has non-finite entries")
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return {"re": self.entries.real.tolist(), "im": self.entries.imag.tolist()}

    @classmethod
    def from_json(cls, data: Mapping) -> "MatrixOperator":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im)


@dataclass(frozen=True)
class GradedElement:
    """Finite sum of components indexed by degree; products add degrees.

    Components below ``floor`` are discarded (they stand for smoothing terms).
    Coefficients may be scalars or any ring elements supporting ``+`` and ``*``.
    """

    components: Mapping[int, object]
    floor: int = -12

    def __post_init__(self):
        comps = {int(d): c for d, c in self.components.items() if d >= self.floor}
        object.__setattr__(self, "components", dict(sorted(comps.items())))

    @classmethod
    def scalar(cls, value, floor: int = -12) -> "GradedElement":
        return cls({0: value}, floor)

    @property
    def top_degree(self) -> int | None:
        return self.leading_degree()

    def leading_degree(self, atol: float = 0.0) -> int | None:
        nz = [d for d, c in self.components.items() if not _is_zero(c, atol)]
        return max(nz) if nz else None

    def _binary(self, other, op):
        if not isinstance(other, GradedElement):
            other = GradedElement.scalar(other, self.floor)
        floor = max(self.floor, other.floor)
        out = dict(self.components)
        for d, c in other.components.items():
            out[d] = op(out[d], c) if d in out else op(0 * c, c)
        return GradedElement(out, floor)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-1) * self + other

    def __mul__(self, other):
        if not isinstance(other, GradedElement):
            return GradedElement({d: c * other for d, c in self.components.items()}, self.floor)
        floor = max(self.floor, other.floor)
        out: dict[int, object] = {}
        for da, ca in self.components.items():
            for db, cb in other.components.items():
                d = da + db
                if d < floor:
                    continue
                out[d] = out[d] + ca * cb if d in out else ca * cb
        return GradedElement(out, floor)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        out = GradedElement.scalar(1.0, self.floor)
        for _ in range(k):
            out = out * self
        return out

    def max_abs_from(self, degree: int) -> float:
        """Largest coefficient size among components of degree >= ``degree``."""
        vals = [float(np.max(np.abs(_as_array(c)))) for d, c in self.components.items() if d >= degree]
        return max(vals, default=0.0)


def _as_array(c):
    if hasattr(c, "coeffs"):
        return np.asarray(c.coeffs, dtype=complex)
    return np.asarray(c, dtype=complex)


def _is_zero(c, atol: float = 0.0) -> bool:
    return bool(np.all(np.abs(_as_array(c)) <= atol))


def _mm(a, b):
    if isinstance(a, np.ndarray) and a.ndim == 2:
        return a @ b
    return a * b


def residual(S0):
    """``R = S0 - S0^2`` for scalars, matrices and graded elements."""
    if isinstance(S0, MatrixOperator):
        return MatrixOperator(residual(S0.entries))
    if isinstance(S0, GradedElement):
        return S0 - S0 * S0
    S0 = np.asarray(S0, dtype=complex) if not np.isscalar(S0) else S0
    return S0 - _mm(S0, S0)


def idempotency_defect(S) -> float:
    if isinstance(S, MatrixOperator):
        S = S.entries
    if isinstance(S, GradedElement):
        return (S * S - S).max_abs_from(S.floor)
    S = np.asarray(S, dtype=complex)
    return float(np.linalg.norm(_mm(S, S) - S, 2 if S.ndim == 2 else None))


def correct_projector(S0, k_max: int = 40):
    """Truncated idempotent-correction series (scalars, matrices, graded elements)."""
    if k_max < 1:
        raise ProjectorError("k_max must be at least 1")
    if isinstance(S0, MatrixOperator):
        return MatrixOperator(correct_projector(S0.entries, k_max))
    R = residual(S0)
    if isinstance(S0, GradedElement):
        top = R.top_degree
        if top is not None and top >= 0:
            raise ProjectorError(f"residual has a component of degree {top} >= 0")
        one = GradedElement.scalar(1, S0.floor)
        two_s = S0 * 2 - one
        graded = True
    else:
        arr = np.asarray(R, dtype=complex)
        rho = float(np.max(np.abs(np.linalg.eigvals(arr)))) if arr.ndim == 2 else abs(complex(arr))
        if rho >= RADIUS_LIMIT:
            raise ProjectorError(f"S0 too far from a projector: spectral radius of R is {rho:.3f} >= 1/4")
        one = np.eye(arr.shape[0]) if arr.ndim == 2 else 1.0
        two_s = 2 * np.asarray(S0, dtype=complex) - one
        graded = False
    acc = None
    power = R
    for k in range(1, k_max + 1):
        c = series_coefficient(k)
        # exact integers keep Fraction-valued graded models exact
        term = power * (c if graded else float(c))
        acc = term if acc is None else acc + term
        if k < k_max:
            power = _mm(power, R)
    return S0 + _mm(two_s, acc)


def sign_projector(S0: np.ndarray) -> np.ndarray:
    """Spectral oracle ``(1 + sign(2 S0 - 1)) / 2`` from an eigendecomposition."""
    A = 2 * np.asarray(S0, dtype=complex) - np.eye(len(S0))
    w, V = np.linalg.eig(A)
    if np.min(np.abs(w.real)) < 1e-12:
        raise ProjectorError("sign function undefined: eigenvalue on the imaginary axis")
    sgn = V @ np.diag(np.sign(w.real)) @ np.linalg.inv(V)
    return 0.5 * (np.eye(len(S0)) + sgn)


def random_near_projector(dim: int, rank: int, eps: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``P + E`` with ``P`` an orthogonal projector of the given rank and ``||E||_2 = eps``."""
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    P = Q[:, :rank] @ Q[:, :rank].conj().T
    E = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    E *= eps / np.linalg.norm(E, 2)
    return P + E, P


# -- derivative identity ----------------------------------------------------

def derivative_identity_check(family: Callable[[float], np.ndarray], t_samples: Sequence[float],
                              h: float = 1e-4, projector_tol: float = 1e-8) -> dict:
    """Central-difference check of ``DS = [S, (2S - 1) DS]`` and of trace constancy."""
    residuals, traces = [], []
    for t in t_samples:
        S = np.asarray(family(t), dtype=complex)
        defect = np.linalg.norm(S @ S - S, 2)
        if defect > projector_tol:
            raise ProjectorError(f"family member at t={t} is not a projector (defect {defect:.2e})")
        DS = (np.asarray(family(t + h)) - np.asarray(family(t - h))) / (2 * h)
        W = (2 * S - np.eye(len(S))) @ DS
        residuals.append(float(np.linalg.norm(DS - (S @ W - W @ S), 2)))
        traces.append(complex(np.trace(S)))
    tr = np.array(traces)
    return {"max_residual": max(residuals), "residuals": residuals,
            "traces": [[z.real, z.imag] for z in tr],
            "trace_variation": float(np.max(np.abs(tr - tr[0]))), "h": h}


def rotating_rank_one(t: float) -> np.ndarray:
    v = np.array([math.cos(t), math.sin(t)])
    return np.outer(v, v)


def conjugated_family(dim: int = 8, rank: int = 3, seed: int = 0) -> Callable[[float], np.ndarray]:
    """``t -> U(t) P U(t)^*`` with ``U(t) = expm(t A)``, ``A`` skew-Hermitian."""
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    A = (B - B.conj().T) / 2
    P = np.diag([1.0] * rank + [0.0] * (dim - rank)).astype(complex)

    def member(t: float) -> np.ndarray:
        U = sla.expm(t * A)
        return U @ P @ U.conj().T

    return member


# -- symbols on the fiber product ------------------------------------------

@dataclass(frozen=True)
class SymbolOnC:
    """Values ``a(xi', xi'')`` over base labels; fiber index 0 is the base point."""

    values: np.ndarray
    normalized: bool = True
    labels: tuple = field(default=())

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[1] < 1 or v.shape[2] < 1:
            raise ProjectorError("symbol values must have shape (base, outgoing, ingoing)")
        object.__setattr__(self, "values", v)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def diagonal(self) -> np.ndarray:
        return self.values[:, 0, 0]

    def factors(self) -> tuple[np.ndarray, np.ndarray]:
        """``f(xi') = a(xi', xi0)`` and ``g(xi'') = a(xi0, xi'')``."""
        return self.values[:, :, 0], self.values[:, 0, :]

    @classmethod
    def product(cls, f: np.ndarray, g: np.ndarray, normalized: bool = True) -> "SymbolOnC":
        f, g = np.asarray(f, dtype=complex), np.asarray(g, dtype=complex)
        return cls(f[:, :, None] * g[:, None, :], normalized)

    def to_json(self) -> dict:
        return {"re": self.values.real.tolist(), "im": self.values.imag.tolist(),
                "normalized": self.normalized}

    @classmethod
    def from_json(cls, data: Mapping) -> "SymbolOnC":
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        return cls(re + 1j * im, bool(data.get("normalized", True)))


def _same_grid(a: SymbolOnC, b: SymbolOnC):
    if a.shape[0] != b.shape[0]:
        raise ProjectorError("symbols live on different base grids")


def symbol_compose(a: SymbolOnC, b: SymbolOnC) -> SymbolOnC:
    """Normalized-frame rule ``(a o b)(xi', xi'') = a(xi', xi0) b(xi0, xi'')``."""
    if not (a.normalized and b.normalized):
        raise ProjectorError("symbols must be frame-normalized before composing")
    _same_grid(a, b)
    return SymbolOnC(a.values[:, :, 0][:, :, None] * b.values[:, 0, :][:, None, :], True)


def symbol_compose_weighted(a: SymbolOnC, b: SymbolOnC, J: SymbolOnC) -> SymbolOnC:
    """Raw rule ``J(xi', xi'') a(xi', xi0) b(xi0, xi'')``."""
    _same_grid(a, b)
    if J.shape[0] != a.shape[0] or J.shape[1] != a.shape[1] or J.shape[2] != b.shape[2]:
        raise ProjectorError("J grid does not match the symbols")
    vals = J.values * a.values[:, :, 0][:, :, None] * b.values[:, 0, :][:, None, :]
    return SymbolOnC(vals, False)


def check_frame(J: SymbolOnC, atol: float = 1e-8) -> float:
    """Associativity constraint ``J(xi', xi0) = J(xi0, xi'') = J(xi0, xi0)``; returns the violation."""
    j00 = J.values[:, 0, 0]
    if np.min(np.abs(J.values)) == 0 or np.min(np.abs(j00)) < 1e-300:
        raise ProjectorError("J vanishes on the grid (not elliptic)")
    viol = max(float(np.max(np.abs(J.values[:, :, 0] - j00[:, None]))),
               float(np.max(np.abs(J.values[:, 0, :] - j00[:, None]))))
    if viol > atol:
        raise ProjectorError(f"J violates the associativity constraint by {viol:.2e}")
    return viol


def frame_normalize(a: SymbolOnC, J: SymbolOnC, atol: float = 1e-8) -> SymbolOnC:
    """``a~ = J(xi0, xi0)^2 J(xi', xi'')^-1 a``, turning the J-weighted rule into the plain one."""
    if a.shape != J.shape:
        raise ProjectorError("J must be sampled on the symbol's grid")
    check_frame(J, atol)
    j00 = J.values[:, 0, 0][:, None, None]
    return SymbolOnC(j00 ** 2 / J.values * a.values, True)


def deform_idempotent_symbols(a0: SymbolOnC, a1: SymbolOnC, steps: int = 10, atol: float = 1e-10,
                              factors0: tuple[np.ndarray, np.ndarray] | None = None,
                              factors1: tuple[np.ndarray, np.ndarray] | None = None) -> list[SymbolOnC]:
    """Path of product-form idempotents from ``a0`` to ``a1``.

    ``f`` and ``g`` are interpolated linearly and ``f`` is divided by
    ``p = f_t(xi0) g_t(xi0)``.  The factorization ``a = f g`` is only fixed up
    to ``f -> c f, g -> g / c``; by default ``f(xi') = a(xi', xi0)`` and
    ``g(xi'') = a(xi0, xi'')``, otherwise explicit factors are used.  ``p`` is
    quadratic in ``t``, so its roots are located exactly.
    """
    _same_grid(a0, a1)
    if a0.shape != a1.shape:
        raise ProjectorError("symbols need matching fiber grids")
    facs = []
    for name, a, given in (("a0", a0, factors0), ("a1", a1, factors1)):
        if not a.normalized:
            raise ProjectorError(f"{name} is not frame-normalized")
        if np.max(np.abs(a.diagonal() - 1)) > atol:
            raise ProjectorError(f"{name} is not idempotent: a(xi0, xi0) != 1")
        f, g = a.factors() if given is None else (np.asarray(given[0], dtype=complex),
                                                  np.asarray(given[1], dtype=complex))
        if np.max(np.abs(f[:, :, None] * g[:, None, :] - a.values)) > atol:
            raise ProjectorError(f"{name} is not of product form f g")
        facs.append((f, g))
    (f0, g0), (f1, g1) = facs
    for u0, u1 in ((f0[:, 0], f1[:, 0]), (g0[:, 0], g1[:, 0])):
        diff = u1 - u0
        with np.errstate(divide="ignore", invalid="ignore"):
            roots = np.where(np.abs(diff) > 0, -u0 / np.where(diff == 0, 1, diff), np.inf)
        bad = (np.abs(roots.imag) < 1e-12) & (roots.real >= 0) & (roots.real <= 1)
        if np.any(bad):
            t_bad = float(roots[bad][0].real)
            raise ProjectorError(f"path leaves the elliptic locus at t = {t_bad:.6g}; "
                                 "choose another interpolation")
    path = []
    for t in np.linspace(0.0, 1.0, steps + 1):
        f = (1 - t) * f0 + t * f1
        g = (1 - t) * g0 + t * g1
        p = f[:, 0] * g[:, 0]
        path.append(SymbolOnC.product(f / p[:, None], g, True))
    return path
