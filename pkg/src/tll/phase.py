"""Complex-phase kernels and their composition by stationary phase on jets.

A kernel is ``K(x, y) = int_0^oo exp(-T q(x, y)) a(x, y, T) dT`` with ``q`` a
jet vanishing on the diagonal.  Composing two kernels,

    K1 o K2 (x, y) = int exp(-T q1(x, u) - S q2(u, y)) a1 a2 dT dS du,

we substitute ``T = lam (1 + tau)``, ``S = lam (1 - tau)`` (``dT dS = 2 lam
dlam dtau``) and apply the Laplace method in the interior variables
``(u, tau)`` with large parameter ``lam``.  The critical value of

    Phi = (1 + tau) q1(x, u) + (1 - tau) q2(u, y)

is the composed phase ``q'`` and the expansion gives the composed amplitude.

Variable layout for jets in ``(x, y)``: ``x`` first, then ``y``; the base
point of every jet is the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .jets import Jet, JetError
from .laurent import LaurentSymbol, restrict_to_diagonal

__all__ = [
    "PhaseError",
    "PhaseKernel",
    "StationaryPhaseResult",
    "associativity_defect",
    "compose_fixed",
    "compose_kernels",
    "critical_point",
    "idempotence_defect",
    "jet_det_inverse",
    "leading_coefficient_gap",
    "laplace_expansion",
    "points_on_zero_set",
    "sphere_szego_kernel",
    "sphere_volume",
    "toy_kernel",
    "stationary_phase",
    "unit_factor",
    "validate_phase",
    "validate_phase_jet",
]

ATOL = 1e-10


class PhaseError(JetError):
    pass


@dataclass(frozen=True)
class PhaseKernel:
    """``exp(-T q) a(T)`` with ``q``, ``a_k`` jets in ``(x, y)``.

    ``density`` is the volume density in the ``x`` coordinates (a jet in
    ``dims`` variables); ``None`` means density 1.
    """

    phase: Jet
    amplitude: LaurentSymbol
    dims: int
    n: int
    density: Jet | None = None

    def __post_init__(self):
        if self.phase.num_vars != 2 * self.dims:
            raise PhaseError(f"phase has {self.phase.num_vars} variables, expected {2 * self.dims}")
        if self.amplitude.num_vars != 2 * self.dims:
            raise PhaseError("amplitude jets must live in the same (x, y) variables as the phase")
        if self.density is not None and self.density.num_vars != self.dims:
            raise PhaseError("density must be a jet in the x variables")

    @property
    def order(self) -> int:
        # lower amplitude terms may carry fewer orders; they keep their own
        top = self.amplitude.terms[self.amplitude.top_degree]
        return min(self.phase.order, top.order)

    def scale_amplitude(self, factor) -> "PhaseKernel":
        return PhaseKernel(self.phase, self.amplitude.scale(factor), self.dims, self.n, self.density)

    def to_json(self) -> dict:
        out = {"phase": self.phase.to_json(), "amplitude": self.amplitude.to_json(),
               "dims": self.dims, "n": self.n}
        if self.density is not None:
            out["density"] = self.density.to_json()
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "PhaseKernel":
        try:
            dens = data.get("density")
            return cls(Jet.from_json(data["phase"]), LaurentSymbol.from_json(data["amplitude"]),
                       int(data["dims"]), int(data["n"]),
                       None if dens is None else Jet.from_json(dens))
        except KeyError as exc:
            raise PhaseError(f"malformed kernel JSON: missing {exc}") from exc


# -- validation -------------------------------------------------------------

def _largest(j: Jet) -> tuple[float, tuple[int, ...] | None]:
    worst, where = 0.0, None
    for exp, c in j.terms().items():
        if abs(c) > worst:
            worst, where = abs(c), exp
    return worst, where


def validate_phase_jet(q: Jet, atol: float = ATOL) -> dict:
    """Check ``q(x,x) = 0``, ``d_x q = -d_y q`` on the diagonal and ``Re q >= c |x-y|^2``.

    Returns a report with the certified ``c`` (half the smallest eigenvalue
    of the real Hessian of ``x -> q(x, 0)``).
    """
    if q.num_vars % 2:
        raise PhaseError("phase must have an even number of variables")
    d = q.num_vars // 2
    diag = restrict_to_diagonal(q)
    worst, where = _largest(diag)
    if worst > atol:
        raise PhaseError(f"q(x,x) != 0: coefficient {worst:.3e} at exponent {where}")
    anti = 0.0
    for i in range(d):
        s = restrict_to_diagonal(q.diff(i) + q.diff(d + i))
        w, where = _largest(s)
        if w > atol:
            raise PhaseError(f"d_x q + d_y q != 0 on the diagonal: {w:.3e} in direction {i} at {where}")
        anti = max(anti, w)
    H = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            e = [0] * q.num_vars
            e[i] += 1
            e[j] += 1
            c = complex(q[tuple(e)])
            H[i, j] = (c * (2 if i == j else 1)).real
    c = 0.5 * float(np.linalg.eigvalsh(H).min()) if d else 0.0
    if not c > atol:
        raise PhaseError(f"Re q is not positive transversally: Hessian min eigenvalue {2 * c:.3e}")
    lam = [complex(q[tuple(1 if k == i else 0 for k in range(q.num_vars))]) for i in range(d)]
    return {"passed": True, "c": c, "diagonal_max": worst, "antisymmetry_max": anti,
            "differential": [[z.real, z.imag] for z in lam]}


def validate_phase(kernel: PhaseKernel, atol: float = ATOL) -> dict:
    return validate_phase_jet(kernel.phase, atol)


# -- jet linear algebra -----------------------------------------------------

def jet_det_inverse(M: Sequence[Sequence[Jet]]) -> tuple[Jet, list[list[Jet]]]:
    """Determinant and inverse of a jet matrix by Gauss-Jordan with pivoting on constant terms."""
    n = len(M)
    if n == 0:
        raise PhaseError("empty matrix")
    A = [list(row) for row in M]
    proto = A[0][0]
    one = Jet.constant(1, proto.num_vars, proto.order, proto.exact)
    zero = one * 0
    inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    scale = max(abs(complex(a.constant_term)) for row in A for a in row) or 1.0
    det = one
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(complex(A[r][col].constant_term)))
        if abs(complex(A[piv][col].constant_term)) < 1e-12 * scale:
            raise PhaseError("singular Hessian at the base point")
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            inv[col], inv[piv] = inv[piv], inv[col]
            det = -det
        p = A[col][col]
        det = det * p
        pinv = p.invert()
        A[col] = [a * pinv for a in A[col]]
        inv[col] = [a * pinv for a in inv[col]]
        for r in range(n):
            if r == col:
                continue
            f = A[r][col]
            if f.is_zero(0.0):
                continue
            A[r] = [a - f * b for a, b in zip(A[r], A[col])]
            inv[r] = [a - f * b for a, b in zip(inv[r], inv[col])]
    return det, inv


def _tracked_sqrt(det0: complex, H0: np.ndarray, steps: int = 400) -> complex:
    """Principal square root of ``det H0``, continued along ``(1-s) I + s H0``.

    Raises if the continued branch differs from the principal one, i.e. the
    path crosses the negative real axis, or if the determinant vanishes.
    """
    d = H0.shape[0]
    ss = np.linspace(0.0, 1.0, steps + 1)
    dets = np.array([np.linalg.det((1 - s) * np.eye(d) + s * H0) for s in ss])
    if np.min(np.abs(dets)) < 1e-12 * max(1.0, np.abs(dets).max()):
        raise PhaseError("Hessian determinant vanishes along the homotopy from the identity")
    arg = np.unwrap(np.angle(dets))[-1]
    if abs(arg - cmath.phase(det0)) > 1e-6:
        raise PhaseError("branch cut: determinant path crosses the negative real axis")
    return cmath.sqrt(det0)


def _det_inv_sqrt(det: Jet, H0: np.ndarray) -> Jet:
    det0 = complex(det.constant_term)
    root = _tracked_sqrt(det0, H0)
    return (det * (1 / det0)).sqrt().invert() * (1 / root)


# -- critical points --------------------------------------------------------

def critical_point(total_phase: Jet, num_exterior: int, atol: float = 1e-9) -> list[Jet]:
    """Interior critical point as jets in the exterior variables.

    Variables ``0..num_exterior-1`` are exterior, the rest interior.  The
    base point (origin) must be critical; the solution is built order by
    order with the frozen base Hessian (a contraction gaining one order per
    step).
    """
    N = total_phase.num_vars
    m = N - num_exterior
    if m <= 0:
        raise PhaseError("no interior variables")
    order = total_phase.order - 1
    grads = [total_phase.diff(num_exterior + i) for i in range(m)]
    g0 = max(abs(complex(g.constant_term)) for g in grads)
    if g0 > atol:
        raise PhaseError(f"base point is not critical (|grad| = {g0:.2e})")
    H0 = np.array([[complex(grads[i][tuple(1 if k == num_exterior + j else 0 for k in range(N))])
                    for j in range(m)] for i in range(m)])
    if np.linalg.matrix_rank(H0, tol=1e-10 * max(1.0, np.abs(H0).max())) < m:
        raise PhaseError("singular interior Hessian at the base point")
    Hinv = np.linalg.inv(H0)
    X = Jet.variables(num_exterior, order)
    w = [Jet.zero(num_exterior, order) for _ in range(m)]
    if num_exterior == 0 or order == 0:
        return w
    for _ in range(order + 1):
        G = [g.compose(X + w).with_order(order) for g in grads]
        w = [w[i] - sum((G[j] * complex(Hinv[i, j]) for j in range(m)), Jet.zero(num_exterior, order))
             for i in range(m)]
    resid = max(g.compose(X + w).truncate(order - 1).max_abs() for g in grads) if order >= 1 else 0.0
    if resid > 1e-8:
        raise PhaseError(f"critical point iteration did not converge (residual {resid:.2e})")
    return w


# -- v-series: polynomials in the interior offset with exterior-jet coefficients

def _split_v(f: Jet, num_exterior: int) -> dict[tuple[int, ...], Jet]:
    """Group an ``(X, v)`` jet by ``v`` exponent; each coefficient is an ``X`` jet."""
    buckets: dict[tuple[int, ...], dict] = {}
    for exp, c in f.terms().items():
        buckets.setdefault(exp[num_exterior:], {})[exp[:num_exterior]] = c
    return {beta: Jet.from_terms(t, num_exterior, f.order - sum(beta), f.exact)
            for beta, t in buckets.items()}


def _vmul(a: dict, b: dict, max_deg: int) -> dict:
    out: dict = {}
    for ba, ca in a.items():
        da = sum(ba)
        for bb, cb in b.items():
            if da + sum(bb) > max_deg:
                continue
            key = tuple(i + j for i, j in zip(ba, bb))
            prod = ca * cb
            out[key] = out[key] + prod if key in out else prod
    return out


@lru_cache(maxsize=None)
def _multi_indices(m: int, deg: int) -> tuple[tuple[int, ...], ...]:
    if m == 0:
        return ((),) if deg == 0 else ()
    out = []
    for first in range(deg, -1, -1):
        for rest in _multi_indices(m - 1, deg - first):
            out.append((first,) + rest)
    return tuple(out)


def _gaussian_moments(G: list[list[Jet]], max_deg: int) -> dict:
    """Moments ``E[v^beta]`` of the centered Gaussian with covariance ``G`` (Wick recursion)."""
    m = len(G)
    one = G[0][0] * 0 + 1
    memo = {(0,) * m: one}

    def mom(beta):
        if beta in memo:
            return memo[beta]
        if sum(beta) % 2:
            memo[beta] = None
            return None
        a = next(i for i, e in enumerate(beta) if e)
        rest = list(beta)
        rest[a] -= 1
        total = None
        for b in range(m):
            if rest[b] == 0:
                continue
            r2 = list(rest)
            r2[b] -= 1
            sub = mom(tuple(r2))
            if sub is None:
                continue
            term = G[a][b] * sub * rest[b]
            total = term if total is None else total + term
        memo[beta] = total
        return total

    for deg in range(0, max_deg + 1, 2):
        for beta in _multi_indices(m, deg):
            mom(beta)
    return memo


@dataclass
class StationaryPhaseResult:
    """``int exp(-lam Phi) g dv ~ exp(-lam q') sum_p lam^p A_p``.

    ``amplitude`` maps the (possibly half-integer) power of ``lam`` to a jet
    in the exterior variables; the Gaussian prefactor is included.
    """

    critical_value: Jet
    critical_point: list[Jet]
    amplitude: dict[float, Jet]
    hessian_det: Jet
    interior_dim: int
    orders: dict[float, int] = field(default_factory=dict)


def stationary_phase(phase: Jet, amplitudes: Mapping[int, Jet], num_exterior: int, terms: int = 2,
                     require_positive: bool = False) -> StationaryPhaseResult:
    """Laplace expansion of ``int exp(-lam Phi(X, v)) sum_p lam^p g_p(X, v) dv``.

    Term ``j`` collects ``R^k g`` paired with Gaussian moments of total
    degree ``2(j + k)``, ``k <= 2j``, where ``R`` is the cubic and higher part
    of the phase at the critical point.
    """
    N = phase.num_vars
    m = N - num_exterior
    w = critical_point(phase, num_exterior)
    order = phase.order
    w_full = [wi.with_order(order).embed(N, list(range(num_exterior))) for wi in w]
    shifts = [w_full[i] + Jet.variable(num_exterior + i, N, order) for i in range(m)]

    def shift(f: Jet) -> Jet:
        # interior u_i -> w_i(X) + v_i, one variable at a time
        for i, s in enumerate(shifts):
            f = f.substitute(num_exterior + i, s.truncate(min(s.order, f.order)))
        return f

    phi_v = _split_v(shift(phase), num_exterior)
    zero_x = Jet.zero(num_exterior, 0)
    crit = phi_v.get((0,) * m, zero_x)
    for i in range(m):
        e = tuple(1 if k == i else 0 for k in range(m))
        if e in phi_v and phi_v[e].max_abs() > 1e-8:
            raise PhaseError("gradient does not vanish at the computed critical point")
    H = [[None] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            e = [0] * m
            e[i] += 1
            e[j] += 1
            c = phi_v.get(tuple(e), Jet.zero(num_exterior, max(order - 2, 0)))
            H[i][j] = c * 2 if i == j else c
    H0 = np.array([[complex(h.constant_term) for h in row] for row in H])
    if require_positive and np.linalg.eigvalsh(0.5 * (H0.real + H0.real.T)).min() <= 0:
        raise PhaseError("interior Hessian has non-positive real part")
    det, G = jet_det_inverse(H)
    pref = _det_inv_sqrt(det, H0) * (2 * math.pi) ** (m / 2)
    R = {b: c for b, c in phi_v.items() if sum(b) >= 3}
    max_deg = 6 * (terms - 1)
    moments = _gaussian_moments(G, max_deg)
    amp: dict[float, Jet] = {}
    orders: dict[float, int] = {}
    for p, g in amplitudes.items():
        gv = _split_v(shift(g), num_exterior)
        powers = [gv]
        for k in range(1, 2 * (terms - 1) + 1):
            powers.append(_vmul(powers[-1], R, max_deg))
        for j in range(terms):
            total = None
            for k in range(0, 2 * j + 1):
                coef = (-1) ** k / math.factorial(k)
                for beta in _multi_indices(m, 2 * (j + k)):
                    c, mb = powers[k].get(beta), moments.get(beta)
                    if c is None or mb is None:
                        continue
                    term = c * mb * coef
                    total = term if total is None else total + term
            if total is None:
                continue
            key = p - m / 2 - j
            val = total * pref
            amp[key] = amp[key] + val if key in amp else val
            orders[key] = min(orders.get(key, order), max(order - 2 - 2 * j, 0))
    amp = {k: v.truncate(min(v.order, orders[k])) for k, v in amp.items()}
    return StationaryPhaseResult(crit, w, amp, det, m, orders)


def laplace_expansion(phase: Jet, amplitude: Jet, large_parameter_degree: int = 0, terms: int = 3,
                      num_exterior: int = 0) -> LaurentSymbol:
    """Laplace expansion of ``int exp(-lam Phi) lam^deg g dv`` as a symbol in ``lam``.

    The factors ``exp(-lam Phi_crit) lam^(-d/2)`` (``d`` interior variables)
    are left out; the Gaussian prefactor ``(2 pi)^(d/2) det(H)^(-1/2)`` is
    included, so term ``j`` sits at degree ``deg - j``.
    """
    res = stationary_phase(phase, {large_parameter_degree: amplitude}, num_exterior, terms,
                           require_positive=True)
    shift = res.interior_dim / 2
    symbol_terms = {int(round(k + shift)): v for k, v in res.amplitude.items()}
    return LaurentSymbol(large_parameter_degree + 1, symbol_terms)


# -- kernel composition -----------------------------------------------------

def _pow(j: Jet, k: int) -> Jet:
    return j ** k if k >= 0 else j.invert() ** (-k)


def _composition_data(k1: PhaseKernel, k2: PhaseKernel, with_tau: bool):
    if k1.dims != k2.dims:
        raise PhaseError("kernels act on different dimensions")
    d = k1.dims
    N = min(k1.order, k2.order)
    tot = 3 * d + (1 if with_tau else 0)
    xs, ys, us = list(range(d)), list(range(d, 2 * d)), list(range(2 * d, 3 * d))

    def emb(j: Jet, vmap):
        return j.truncate(min(j.order, N)).embed(tot, vmap)

    q1 = emb(k1.phase, xs + us)
    q2 = emb(k2.phase, us + ys)
    dens = Jet.constant(1.0, tot, N) if k1.density is None else emb(k1.density, us)
    # the middle integration uses the density of the shared space
    if k2.density is not None:
        dens = emb(k2.density, us)
    if with_tau:
        tau = Jet.variable(3 * d, tot, N)
        plus, minus = 1 + tau, 1 - tau
        phi = plus * q1 + minus * q2
    else:
        phi = q1 + q2
    amps: dict[int, Jet] = {}
    for a_deg, a in k1.amplitude.terms.items():
        for b_deg, b in k2.amplitude.terms.items():
            g = emb(a, xs + us) * emb(b, us + ys) * dens
            if with_tau:
                g = g * _pow(plus, a_deg) * _pow(minus, b_deg) * 2
                p = a_deg + b_deg + 1
            else:
                p = a_deg + b_deg
            amps[p] = amps[p] + g if p in amps else g
    return phi, amps, 2 * d


def compose_kernels(k1: PhaseKernel, k2: PhaseKernel, order: int | None = None,
                    terms: int = 2, validate: bool = True) -> PhaseKernel:
    """``K1 o K2`` as a kernel ``int exp(-lam q') a'(lam) dlam``.

    The input jet order must exceed the output order by 2; amplitude term
    ``j`` of the Laplace series is reliable to order ``order - 2j``.
    """
    if validate:
        validate_phase(k1)
        validate_phase(k2)
    N = min(k1.order, k2.order)
    if order is None:
        order = N - 2
    if order > N - 2 or order < 0:
        raise PhaseError(f"output order {order} needs input order >= {order + 2}, got {N}")
    if (k1.dims + 1) % 2:
        raise PhaseError("composition in (u, tau) needs an odd number of dims")
    phi, amps, n_ext = _composition_data(k1, k2, with_tau=True)
    res = stationary_phase(phi, amps, n_ext, terms)
    amp = {int(round(k)): v.truncate(min(v.order, order)) for k, v in res.amplitude.items()}
    if not amp:
        amp = {k1.n - 1: Jet.zero(n_ext, order)}
    n_out = max(k1.n, max(amp) + 1)
    return PhaseKernel(res.critical_value.truncate(order), LaurentSymbol(n_out, amp), k1.dims, n_out,
                       k1.density.truncate(order) if k1.density is not None else None)


def compose_fixed(k1: PhaseKernel, k2: PhaseKernel, terms: int = 2) -> StationaryPhaseResult:
    """Composition at a common fixed large parameter (``exp(-lam q1) o exp(-lam q2)``).

    Only ``u`` is integrated; amplitude degrees may be half-integers.
    """
    phi, amps, n_ext = _composition_data(k1, k2, with_tau=False)
    return stationary_phase(phi, amps, n_ext, terms)


# -- the model sphere -------------------------------------------------------

def sphere_volume(n: int) -> float:
    """Volume ``2 pi^n / (n-1)!`` of the unit sphere in C^n."""
    return 2 * math.pi ** n / math.factorial(n - 1)


def _sphere_point(theta: Jet, zeta: Sequence[tuple[Jet, Jet]]) -> list[Jet]:
    r2 = sum((a * a + b * b for a, b in zeta), theta * 0)
    first = (theta * 1j).exp() * (1 - r2).sqrt()
    return [first] + [a + b * 1j for a, b in zeta]


def sphere_szego_kernel(n: int, order: int = 6) -> PhaseKernel:
    """``(1/c) (1 - z . conj(w))^-n`` on the unit sphere of C^n near ``(1, 0, ..., 0)``.

    Real coordinates ``(theta, a_1, b_1, ..., a_{n-1}, b_{n-1})`` with
    ``z = (exp(i theta) sqrt(1 - |zeta|^2), zeta)``; the surface measure is
    ``dtheta d^2 zeta`` (density 1).
    """
    if n < 1:
        raise PhaseError("n must be at least 1")
    d = 2 * n - 1
    V = Jet.variables(2 * d, order)

    def point(off):
        zeta = [(V[off + 1 + 2 * k], V[off + 2 + 2 * k]) for k in range(n - 1)]
        return _sphere_point(V[off], zeta)

    z, w = point(0), point(d)
    q = 1 - sum((zi * wi.conj() for zi, wi in zip(z, w)), Jet.zero(2 * d, order))
    c = sphere_volume(n)
    amp = LaurentSymbol(n, {n - 1: Jet.constant(1.0 / (c * math.factorial(n - 1)), 2 * d, order)})
    return PhaseKernel(q, amp, d, n)


# -- diagnostics on the complex zero set ------------------------------------

def unit_factor(q_new: Jet, q_old: Jet, order: int | None = None) -> tuple[Jet, float]:
    """Least-squares jet ``e`` with ``q_new = e q_old``; returns ``(e, residual)``."""
    nv = q_old.num_vars
    top = min(q_new.order, q_old.order)
    if order is None:
        order = top - 1
    basis = Jet.zero(nv, order).monomials()
    cols = []
    for exp in basis:
        mono = Jet.from_terms({exp: 1.0}, nv, top)
        cols.append((mono * q_old.truncate(top)).coeffs)
    M = np.array(cols).T
    rhs = q_new.truncate(top).to_float().coeffs
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    resid = float(np.abs(M @ sol - rhs).max())
    return Jet(nv, order, sol), resid


def points_on_zero_set(q: Jet, count: int, radius: float, seed: int = 0, solve_var: int = 0,
                       iters: int = 40) -> np.ndarray:
    """Complex points near the origin with ``q = 0``, solving for one variable by Newton."""
    rng = np.random.default_rng(seed)
    dq = q.diff(solve_var)
    pts = []
    for _ in range(count):
        p = rng.uniform(-radius, radius, q.num_vars).astype(complex)
        d = q.num_vars // 2
        p[solve_var] = p[(solve_var + d) % q.num_vars]
        for _ in range(iters):
            step = q.eval(p) / dq.eval(p)
            p[solve_var] -= step
            if abs(step) < 1e-15:
                break
        if abs(q.eval(p)) > 1e-12:
            raise PhaseError("Newton solve on the zero set did not converge")
        pts.append(p)
    return np.array(pts)


def _leading_on_zero_set(kernel: PhaseKernel, base: Jet, pts: np.ndarray, n: int, solve_var: int = 0):
    top = kernel.amplitude.top_degree
    A = kernel.amplitude.terms[top]
    dq_new = kernel.phase.diff(solve_var)
    dq_old = base.diff(solve_var)
    vals, phase_res = [], []
    for p in pts:
        e = dq_new.eval(p) / dq_old.eval(p)
        vals.append(A.eval(p) * e ** (-n))
        phase_res.append(abs(kernel.phase.eval(p)))
    return np.array(vals), max(phase_res)


def idempotence_defect(n: int = 2, order: int = 4, radius: float = 0.02, samples: int = 8,
                       seed: int = 0, terms: int = 2) -> dict:
    """Leading-singularity defect of ``S o S - S`` for the sphere kernel.

    On the complex zero set of ``q``, ``q' = e q`` and the leading coefficient
    of the composed kernel relative to ``q^-n`` is ``A_0 e^-n``; it must equal
    ``a_(n-1)``.  The defect is relative.
    """
    S = sphere_szego_kernel(n, order + 2)
    SS = compose_kernels(S, S, order, terms=terms)
    base = S.phase.truncate(order)
    pts = points_on_zero_set(base, samples, radius, seed)
    vals, phase_res = _leading_on_zero_set(SS, base, pts, n)
    a_top = complex(S.amplitude.terms[n - 1].constant_term)
    e, div_res = unit_factor(SS.phase, base)
    return {"defect": float(np.abs(vals - a_top).max() / abs(a_top)),
            "phase_on_zero_set": phase_res,
            "unit_constant": complex(e.constant_term),
            "division_residual": div_res,
            "order": order, "radius": radius, "samples": samples}


def toy_kernel(order: int = 8, amplitude: Sequence[complex] = (1.0, 0.3, 0.1j), width: float = 1.0) -> PhaseKernel:
    """One-dimensional kernel with phase ``i(x-y) + width (x-y)^2/2`` (not a projector).

    The amplitude is ``c0 + c1 x y + c2 x``.
    """
    x, y = Jet.variables(2, order)
    q = (x - y) * 1j + (x - y) ** 2 * (0.5 * width)
    c0, c1, c2 = amplitude
    amp = LaurentSymbol(1, {0: Jet.constant(c0, 2, order) + c1 * x * y + c2 * x})
    return PhaseKernel(q, amp, 1, 1)


def associativity_defect(k1: PhaseKernel, k2: PhaseKernel | None = None, k3: PhaseKernel | None = None,
                         radius: float = 0.02, samples: int = 6, seed: int = 0) -> dict:
    """Compare ``(K1 o K2) o K3`` with ``K1 o (K2 o K3)`` on the zero set of ``q1``.

    The two triple products carry different phase parametrizations, so the
    comparison is of the leading coefficient relative to ``q1^-n``.
    """
    k2 = k1 if k2 is None else k2
    k3 = k1 if k3 is None else k3
    left = compose_kernels(compose_kernels(k1, k2), k3)
    right = compose_kernels(k1, compose_kernels(k2, k3))
    return leading_coefficient_gap(left, right, k1.phase, radius, samples, seed)


def leading_coefficient_gap(a: PhaseKernel, b: PhaseKernel, reference: Jet, radius: float = 0.02,
                            samples: int = 6, seed: int = 0) -> dict:
    """Relative gaps of the singular coefficients of two kernels on ``reference = 0``.

    ``defect`` compares the leading coefficient relative to ``reference^-n``.
    For ``n = 1`` the coefficient of ``log`` is the ``lam^-1`` amplitude term
    restricted to the zero set; its gap is reported as ``log_defect``.
    """
    order = min(a.order, b.order)
    base = reference.truncate(order)
    pts = points_on_zero_set(base, samples, radius, seed)
    n = a.amplitude.top_degree + 1
    av, ares = _leading_on_zero_set(a, base, pts, n)
    bv, bres = _leading_on_zero_set(b, base, pts, n)
    out = {"defect": float(np.abs(av - bv).max() / max(np.abs(av).max(), 1e-300)),
           "phase_on_zero_set": max(ares, bres), "order": order}
    if n == 1 and -1 in a.amplitude.terms and -1 in b.amplitude.terms:
        la = np.array([a.amplitude.terms[-1].eval(p) for p in pts])
        lb = np.array([b.amplitude.terms[-1].eval(p) for p in pts])
        out["log_defect"] = float(np.abs(la - lb).max() / max(np.abs(la).max(), np.abs(av).max()))
    return out
