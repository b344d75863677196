"""Laurent symbols, their holonomic singularities and epsilon-regularized traces.

A symbol ``a(x, y, T) = sum_k a_k(x, y) T^k`` (``k <= n - 1``) defines the
kernel ``int_0^oo exp(-T q) a dT``.  Termwise,

* ``T^(k-1)`` (k >= 1) integrates to ``(k-1)! q^-k``, so the pole
  coefficients are ``alpha_k = (k-1)! a_(k-1)``;
* ``T^(-1-k)`` (k >= 0), cut off at ``T = cutoff``, produces
  ``q^k Log q`` with coefficient ``(-1)^(k+1) a_(-1-k) / k!`` plus smooth
  terms.

We keep ``beta_k = a_(-1-k) / k!`` as the recorded log coefficient and read
``q^k Log(q+0)`` as ``-(-q)^k log q``: the overall sign ``LOG_SIGN = -1`` was
measured with :func:`measure_log_sign` (quadrature plus regression) and is
asserted by the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.integrate as si
import scipy.linalg as sla

from .jets import Jet, JetError

__all__ = [
    "LOG_SIGN",
    "EpsilonExpansion",
    "FitError",
    "HolonomicSingularity",
    "LaurentSymbol",
    "epsilon_trace_expansion",
    "fit_epsilon_expansion",
    "kernel_expansion",
    "laplace_transform_numeric",
    "log_coefficient_sign",
    "measure_log_sign",
    "restrict_to_diagonal",
]

LOG_SIGN = -1
DEFAULT_CUTOFF = 1.0
DEFAULT_MAX_BETA = 1


class FitError(ValueError):
    pass


def log_coefficient_sign(k: int) -> int:
    """Sign relating ``beta_k`` to the actual coefficient of ``q^k log q``."""
    return LOG_SIGN * (-1) ** k


@dataclass(frozen=True)
class LaurentSymbol:
    """Finite sum ``sum_k a_k T^k`` with jet coefficients, ``k <= n - 1``."""

    n: int
    terms: Mapping[int, Jet]

    def __post_init__(self):
        terms = {int(k): v for k, v in self.terms.items()}
        if not terms:
            raise JetError("a Laurent symbol needs at least one term")
        nv = {j.num_vars for j in terms.values()}
        if len(nv) != 1:
            raise JetError("all coefficients must be jets in the same variables")
        object.__setattr__(self, "terms", dict(sorted(terms.items())))

    @property
    def top_degree(self) -> int:
        return max(self.terms)

    @property
    def bottom_degree(self) -> int:
        return min(self.terms)

    @property
    def num_vars(self) -> int:
        return next(iter(self.terms.values())).num_vars

    @property
    def order(self) -> int:
        return min(j.order for j in self.terms.values())

    @property
    def exact(self) -> bool:
        return all(j.exact for j in self.terms.values())

    def coefficient(self, k: int) -> Jet:
        if k in self.terms:
            return self.terms[k]
        return Jet.zero(self.num_vars, self.order, self.exact)

    def __add__(self, other: "LaurentSymbol") -> "LaurentSymbol":
        if other.n != self.n:
            raise JetError("symbols built for different n")
        keys = set(self.terms) | set(other.terms)
        return LaurentSymbol(self.n, {k: self.coefficient(k) + other.coefficient(k) for k in keys})

    def scale(self, factor) -> "LaurentSymbol":
        return LaurentSymbol(self.n, {k: v * factor for k, v in self.terms.items()})

    def map(self, fn) -> "LaurentSymbol":
        return LaurentSymbol(self.n, {k: fn(v) for k, v in self.terms.items()})

    def evaluate(self, T: float, point: Sequence | None = None) -> complex:
        total = 0j
        for k, a in self.terms.items():
            val = a.constant_term if point is None else a.eval(point)
            total += complex(val) * T ** k
        return total

    def to_json(self) -> dict:
        return {"n": self.n,
                "terms": [{"degree": k, "jet": v.to_json()} for k, v in self.terms.items()]}

    @classmethod
    def from_json(cls, data: Mapping) -> "LaurentSymbol":
        try:
            return cls(int(data["n"]), {int(t["degree"]): Jet.from_json(t["jet"]) for t in data["terms"]})
        except (KeyError, TypeError) as exc:
            raise JetError(f"malformed LaurentSymbol JSON: {exc}") from exc

    @classmethod
    def constant(cls, n: int, degree_values: Mapping[int, object], num_vars: int,
                 order: int = 6, exact: bool = False) -> "LaurentSymbol":
        return cls(n, {k: Jet.constant(v, num_vars, order, exact) for k, v in degree_values.items()})


@dataclass(frozen=True)
class HolonomicSingularity:
    """``sum_{0<k<=n} alpha_k q^-k + sum_k beta_k q^k Log(q+0)`` near the diagonal."""

    alpha: Mapping[int, Jet]
    beta: Mapping[int, Jet]
    phase: Jet

    def __post_init__(self):
        if 0 not in self.beta:
            raise JetError("beta_0 must be present")
        if any(k <= 0 for k in self.alpha):
            raise JetError("pole indices must be positive")

    @property
    def psi(self) -> Jet:
        """Coefficient of the logarithmic term (beta_0)."""
        return self.beta[0]

    def to_json(self) -> dict:
        return {"alpha": {str(k): v.to_json() for k, v in self.alpha.items()},
                "beta": {str(k): v.to_json() for k, v in self.beta.items()},
                "phase": self.phase.to_json(),
                "log_convention": "q^k Log(q+0) := -(-q)^k log q"}


@dataclass
class EpsilonExpansion:
    """``s(eps) ~ sum pole_k eps^-k + sum log_k eps^k log(eps) + sum smooth_k eps^k``.

    ``log_coeffs`` are the actual coefficients of ``eps^k log eps``.
    """

    pole_coeffs: dict[int, complex] = field(default_factory=dict)
    log_coeffs: dict[int, complex] = field(default_factory=lambda: {0: 0j})
    smooth_coeffs: dict[int, complex] = field(default_factory=dict)
    residual: float | None = None
    condition: float | None = None

    def __post_init__(self):
        self.log_coeffs.setdefault(0, 0j)

    def evaluate(self, eps):
        eps = np.asarray(eps, dtype=float)
        out = np.zeros(eps.shape, dtype=complex)
        for k, c in self.pole_coeffs.items():
            out += c * eps ** (-k)
        for k, c in self.log_coeffs.items():
            out += c * eps ** k * np.log(eps)
        for k, c in self.smooth_coeffs.items():
            out += c * eps ** k
        return out

    def to_json(self) -> dict:
        def enc(d):
            return {str(k): {"re": complex(v).real, "im": complex(v).imag} for k, v in sorted(d.items())}
        return {"pole_coeffs": enc(self.pole_coeffs), "log_coeffs": enc(self.log_coeffs),
                "smooth_coeffs": enc(self.smooth_coeffs), "residual": self.residual,
                "condition": self.condition}


def kernel_expansion(symbol: LaurentSymbol, phase: Jet, max_beta: int = DEFAULT_MAX_BETA,
                     validate: bool = False) -> HolonomicSingularity:
    """Pole and log coefficients of ``int exp(-T q) a dT``; linear in the symbol."""
    if symbol.top_degree > symbol.n - 1:
        raise JetError(f"top degree {symbol.top_degree} exceeds n - 1 = {symbol.n - 1}")
    if validate:
        from .phase import validate_phase_jet
        validate_phase_jet(phase)
    exact = symbol.exact
    zero = Jet.zero(symbol.num_vars, symbol.order, exact)
    alpha = {}
    for k in range(1, symbol.n + 1):
        a = symbol.terms.get(k - 1)
        alpha[k] = zero if a is None else a * math.factorial(k - 1)
    beta = {}
    for k in range(max_beta + 1):
        a = symbol.terms.get(-1 - k)
        if a is None:
            beta[k] = zero
        else:
            beta[k] = a * Fraction(1, math.factorial(k)) if exact else a * (1.0 / math.factorial(k))
    return HolonomicSingularity(alpha, beta, phase)


def laplace_transform_numeric(symbol: LaurentSymbol, q_value: float, epsilon: float,
                              cutoff: float = DEFAULT_CUTOFF, point: Sequence | None = None) -> complex:
    """Adaptive quadrature of ``int exp(-T (q + eps)) a(T) dT``.

    Negative powers of ``T`` are integrated from ``cutoff`` instead of 0; the
    discarded piece is smooth in ``q + eps``.
    """
    s = q_value + epsilon
    if not s > 0:
        raise ValueError(f"q + epsilon must be positive, got {s}")
    total = 0j
    for k, a in symbol.terms.items():
        coeff = complex(a.constant_term if point is None else a.eval(point))
        if coeff == 0:
            continue
        lower = 0.0 if k >= 0 else cutoff
        val, _ = si.quad(lambda T: T ** k * math.exp(-T * s), lower, np.inf,
                         epsabs=0.0, epsrel=1e-11, limit=400)
        total += coeff * val
    return total


def restrict_to_diagonal(f: Jet) -> Jet:
    """Jet of ``f(x, x)`` from a jet in ``(x, y)`` variables."""
    if f.num_vars % 2:
        raise JetError("diagonal restriction needs an even number of variables")
    d = f.num_vars // 2
    xs = Jet.variables(d, f.order, f.exact)
    return f.compose(xs + xs)


def _integrate_diagonal(f: Jet, measure) -> complex:
    diag = restrict_to_diagonal(f)
    weights = np.asarray(measure.weights, dtype=float).ravel()
    coords = getattr(measure, "local_coords", None)
    if coords is None:
        # homogeneous model: the base-point value is the value everywhere
        return complex(diag.constant_term) * float(weights.sum())
    coords = np.asarray(coords)
    if coords.ndim != 2 or coords.shape[1] != diag.num_vars:
        raise JetError(f"measure coordinates have dimension {coords.shape[-1]}, "
                       f"jets live in {diag.num_vars}")
    vals = np.array([diag.eval(c) for c in coords])
    return complex(vals @ weights)


def epsilon_trace_expansion(sing: HolonomicSingularity, diagonal_measure) -> EpsilonExpansion:
    """Integrate the diagonal coefficients: ``s(eps)`` pole and log coefficients.

    ``diagonal_measure`` needs ``weights``; an optional ``local_coords`` array
    gives the jet coordinates of each node, otherwise the model is treated as
    homogeneous and the base-point value is used at every node.
    """
    poles = {k: _integrate_diagonal(a, diagonal_measure) for k, a in sing.alpha.items()}
    logs = {k: log_coefficient_sign(k) * _integrate_diagonal(b, diagonal_measure)
            for k, b in sing.beta.items()}
    return EpsilonExpansion(poles, logs, {})


def fit_epsilon_expansion(samples: Iterable[tuple[float, complex]], max_pole: int, max_taylor: int,
                          max_log: int = 0, cond_limit: float = 1e12) -> EpsilonExpansion:
    """Least-squares fit of ``s(eps)`` in the basis ``eps^-k``, ``eps^k log eps``, ``eps^k``.

    Columns are scaled to unit norm before a QR solve; the condition number
    of the scaled design matrix is reported.
    """
    data = np.array([(float(e), complex(v)) for e, v in samples], dtype=object)
    if data.size == 0:
        raise FitError("no samples")
    eps = data[:, 0].astype(float)
    vals = data[:, 1].astype(complex)
    n_cols = max_pole + (max_log + 1) + (max_taylor + 1)
    if len(eps) < max_pole + max_taylor + 2 or len(eps) < n_cols:
        raise FitError(f"need at least {max(n_cols, max_pole + max_taylor + 2)} samples")
    if np.any(eps <= 0):
        raise FitError("epsilon values must be positive")
    cols, labels = [], []
    for k in range(1, max_pole + 1):
        cols.append(eps ** (-k))
        labels.append(("pole", k))
    for k in range(max_log + 1):
        cols.append(eps ** k * np.log(eps))
        labels.append(("log", k))
    for k in range(max_taylor + 1):
        cols.append(eps ** k)
        labels.append(("smooth", k))
    M = np.column_stack(cols)
    scale = np.linalg.norm(M, axis=0)
    Ms = M / scale
    cond = float(np.linalg.cond(Ms))
    if not np.isfinite(cond) or cond > cond_limit:
        raise FitError("ill-conditioned fit; adjust eps range or model orders "
                       f"(condition number {cond:.2e})")
    Q, R = sla.qr(Ms, mode="economic")
    coef = sla.solve_triangular(R, Q.T @ vals) / scale
    resid = vals - M @ coef
    rms = float(np.sqrt(np.mean(np.abs(resid) ** 2)))
    out = EpsilonExpansion({}, {}, {}, residual=rms, condition=cond)
    for (kind, k), c in zip(labels, coef):
        {"pole": out.pole_coeffs, "log": out.log_coeffs, "smooth": out.smooth_coeffs}[kind][k] = complex(c)
    return out


def measure_log_sign(cutoff: float = DEFAULT_CUTOFF, num: int = 40) -> float:
    """Fitted coefficient of ``log s`` in the regularized transform of ``T^-1``.

    Values of ``s = q + eps`` span ``[1e-3, 0.1]``; the regression basis
    includes smooth Taylor terms so that the slope is not biased by them.
    The window sits well below ``1 / cutoff`` so the Taylor tail stays small.
    """
    sym = LaurentSymbol(1, {-1: Jet.constant(1.0, 1, 0)})
    s_vals = np.geomspace(1e-3, 0.1, num)
    samples = [(s, laplace_transform_numeric(sym, 0.0, s, cutoff)) for s in s_vals]
    fit = fit_epsilon_expansion(samples, max_pole=0, max_taylor=4, max_log=1)
    return fit.log_coeffs[0].real
