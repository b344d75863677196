"""Maps S^3 -> S^2 from contact forms and their Hopf invariants.

The cotangent bundle of S^3 is trivialized by right translation: a covector
at ``x``, turned into a tangent vector ``v`` by the round metric, is written
``v = u x`` with ``u`` an imaginary quaternion.  Normalizing ``u`` gives a
map ``S^3 -> S^2``; the standard contact form gives the constant map ``I``.

For maps equivariant under the torus action, ``u(phi, theta1, theta2) =
R(p theta1 + q theta2) u(phi, 0, 0)`` about a fixed axis, the equation
``dalpha = u*omega`` is solved in closed form along phi::

    alpha = (p (h - h(pi/2)) dtheta1 + q (h - h(0)) dtheta2) / (4 pi),

with ``h = <u, axis>``, and ``H = int alpha ^ u*omega = (p q / 4) (h(0) -
h(pi/2)) int h' dphi``.  Other maps go through the linking number of two
preimage curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .contact import (
    HALF_PI,
    ContactError,
    ContactFormS3,
    S3Quadrature,
    cartesian_to_torus,
    is_contact,
    qconj,
    qmul,
    torus_to_cartesian,
)

__all__ = [
    "HopfError",
    "HopfMap",
    "HopfResult",
    "covector_map",
    "detect_equivariance",
    "homotopy_path_check",
    "hopf_invariant",
    "linking_number",
    "polygon_linking",
    "preimage_curves",
    "trivialize",
]

_UNITS = np.eye(4)[1:]


class HopfError(ValueError):
    pass


def _normalize(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass
class HopfMap:
    """``u: S^3 -> S^2`` on arrays of points of shape (..., 4), values (..., 3)."""

    u: Callable
    label: str = "map"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.u(np.asarray(x, dtype=float)), dtype=float)

    def samples(self, q: S3Quadrature, atol: float = 1e-10) -> np.ndarray:
        key = (q.n_phi, q.n_theta)
        if key not in self._cache:
            vals = self(q.points())
            dev = np.abs(np.linalg.norm(vals, axis=-1) - 1).max()
            if dev > atol:
                raise HopfError(f"map values leave the unit sphere (|u| - 1 = {dev:.2e})")
            self._cache[key] = vals
        return self._cache[key]

    def rotated(self, R) -> "HopfMap":
        R = np.asarray(R, dtype=float)
        return HopfMap(lambda x: self(x) @ R.T, f"R*{self.label}")

    @classmethod
    def constant(cls, v=(1.0, 0.0, 0.0)) -> "HopfMap":
        v = _normalize(np.asarray(v, dtype=float))
        return cls(lambda x: np.broadcast_to(v, np.shape(x)[:-1] + (3,)).copy(), "constant")

    @classmethod
    def hopf_generator(cls, conjugate: bool = False) -> "HopfMap":
        """``x I x^-1``, or ``x^-1 I x`` when ``conjugate``."""
        unit_i = np.array([0.0, 1.0, 0.0, 0.0])

        def u(x):
            left, right = (qconj(x), x) if conjugate else (x, qconj(x))
            return qmul(qmul(left, unit_i), right)[..., 1:]

        return cls(u, "hopf_conjugate" if conjugate else "hopf")


# -- trivialization ----------------------------------------------------------

def _over_radius(f, df, phi, rsq, sign):
    """``f / r^2`` with the limit ``sign * f' (c + s)^2`` where ``r^2`` vanishes."""
    small = rsq < 1e-12
    safe = np.where(small, 1.0, rsq)
    limit = sign * df(phi) * (np.cos(phi) + np.sin(phi)) ** 2
    return np.where(small, limit, f(phi) / safe)


def covector_map(a, b, da, db, c: Callable | None = None, label: str = "covector") -> HopfMap:
    """Map of the covector ``a dtheta1 + b dtheta2 + c dphi`` (functions of phi)."""

    def u(x):
        x = np.asarray(x, dtype=float)
        phi, _, _, r1sq, r2sq = cartesian_to_torus(x)
        A = _over_radius(a, da, phi, r1sq, -1.0)
        B = _over_radius(b, db, phi, r2sq, 1.0)
        x0, x1, x2, x3 = np.moveaxis(x, -1, 0)
        v = np.stack([-A * x1, A * x0, -B * x3, B * x2], axis=-1)
        if c is not None:
            g = 2 * c(phi) / (r1sq ** 2 + r2sq ** 2)
            v = v + np.stack([-g * r2sq * x0, -g * r2sq * x1, g * r1sq * x2, g * r1sq * x3], axis=-1)
        w = qmul(v, qconj(x))
        norm = np.linalg.norm(w[..., 1:], axis=-1, keepdims=True)
        if np.any(norm < 1e-300):
            raise HopfError("covector vanishes")
        return w[..., 1:] / norm

    return HopfMap(u, label)


def trivialize(form: ContactFormS3, require_contact: bool = True) -> HopfMap:
    if require_contact and not is_contact(form):
        raise ContactError(f"form '{form.label}' is not a positive contact form")
    return covector_map(form.a, form.b, form.da, form.db, label=f"u[{form.label}]")


# -- equivariant reduction ---------------------------------------------------

def _rotate(vectors, axis, angle):
    """Rotate (..., 3) vectors about ``axis`` by ``angle`` (broadcast)."""
    c, s = np.cos(angle)[..., None], np.sin(angle)[..., None]
    k = np.broadcast_to(axis, vectors.shape)
    dot = (vectors * k).sum(axis=-1, keepdims=True)
    return vectors * c + np.cross(k, vectors) * s + k * dot * (1 - c)


def _winding(angles) -> int:
    d = np.diff(np.append(angles, angles[0]))
    d = (d + math.pi) % (2 * math.pi) - math.pi
    return int(round(d.sum() / (2 * math.pi)))


def detect_equivariance(U: np.ndarray, q: S3Quadrature, atol: float = 1e-8):
    """Return ``(axis, p, q)`` if the samples are torus-equivariant, else None."""
    if np.abs(U - U[:1, :1, :1]).max() < atol:
        return U[0, 0, 0], 0, 0
    if np.abs(U - U[:, :1, :1]).max() < atol:
        return np.array([1.0, 0.0, 0.0]), 0, 0
    mean = U.mean(axis=(1, 2))
    _, sv, vt = np.linalg.svd(mean)
    if sv[0] < 1e-6:
        return None
    axis = vt[0]
    e1 = np.cross(axis, np.eye(3)[np.argmin(np.abs(axis))])
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    perp = np.hypot(U @ e1, U @ e2)
    i = int(np.argmax(perp.min(axis=(1, 2))))
    if perp[i].min() < 1e-3:
        return None
    beta = np.arctan2(U[i] @ e2, U[i] @ e1)
    p, qq = _winding(beta[:, 0]), _winding(beta[0, :])
    T1, T2 = np.meshgrid(q.theta, q.theta, indexing="ij")
    pred = _rotate(np.broadcast_to(U[:, :1, :1, :], U.shape), axis, p * T1 + qq * T2)
    if np.abs(pred - U).max() > atol:
        return None
    return axis, p, qq


def _reduced_solve(m: HopfMap, axis, n_phi: int, h0: float, h1: float, step: float = 1e-6):
    """``int h' dphi`` on ``n_phi`` Gauss nodes and its boundary residual."""
    t, w = np.polynomial.legendre.leggauss(n_phi)
    phi = (t + 1) * (HALF_PI / 2)
    hp = m(torus_to_cartesian(phi + step, 0.0, 0.0)) @ axis
    hm = m(torus_to_cartesian(phi - step, 0.0, 0.0)) @ axis
    integral = math.fsum(w * (HALF_PI / 2) * (hp - hm) / (2 * step))
    return integral, abs(integral - (h1 - h0))


@dataclass
class HopfResult:
    value: int
    raw: float
    distance: float
    method: str
    residual: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": self.value, "raw": self.raw, "distance": self.distance,
                "method": self.method, "residual": self.residual, "details": self.details}


def _resolution_jump(U) -> float:
    jumps = [np.linalg.norm(np.diff(U, axis=0), axis=-1).max()]
    for ax in (1, 2):
        jumps.append(np.linalg.norm(U - np.roll(U, 1, axis=ax), axis=-1).max())
    return float(max(jumps))


def _round(raw: float, method: str, residual: float, details: dict) -> HopfResult:
    value = int(round(raw))
    distance = abs(raw - value)
    if distance > 0.1:
        raise HopfError(f"under-resolved: Hopf integral {raw:.4f} is not near an integer")
    return HopfResult(value, float(raw), float(distance), method, float(residual), details)


def hopf_invariant(m: HopfMap, q: S3Quadrature | None = None, method: str = "auto",
                   residual_tol: float = 1e-6, max_phi: int = 512) -> HopfResult:
    """Hopf invariant of ``m`` with its pre-rounding value and distance to the integer.

    ``method`` is "auto" (reduced solve when the map is equivariant, linking
    number otherwise), "reduced" or "linking".  The reduced solve integrates
    ``h'`` on the Gauss nodes; the mismatch with ``h(pi/2) - h(0)`` is the
    residual of the boundary condition on ``alpha``, and the phi grid is
    doubled (up to ``max_phi``) until it is below ``residual_tol``.
    """
    q = S3Quadrature() if q is None else q
    if method == "linking":
        lk = linking_number(m)
        return _round(lk["raw"], "linking", 0.0, lk)
    U = m.samples(q)
    jump = _resolution_jump(U)
    if jump >= 0.5:
        raise HopfError(f"under-resolved: neighbouring samples differ by {jump:.2f} on S^2")
    eq = detect_equivariance(U, q)
    if eq is None:
        if method == "reduced":
            raise HopfError("map is not torus-equivariant")
        lk = linking_number(m)
        return _round(lk["raw"], "linking", 0.0, lk)
    axis, p, qq = eq
    details = {"axis": [float(t) for t in axis], "p": p, "q": qq}
    if p * qq == 0:
        return HopfResult(0, 0.0, 0.0, "reduced", 0.0, details)
    ends = torus_to_cartesian(np.array([0.0, HALF_PI]), 0.0, 0.0)
    h0, h1 = m(ends) @ axis
    n_phi = q.n_phi
    while True:
        integral, residual = _reduced_solve(m, axis, n_phi, h0, h1)
        if residual <= residual_tol or n_phi >= max_phi:
            break
        n_phi *= 2
    if residual > residual_tol:
        raise HopfError(f"Hodge solve residual {residual:.2e} exceeds {residual_tol:g}")
    raw = p * qq / 4 * (h0 - h1) * integral
    details.update(h0=float(h0), h1=float(h1), n_phi=n_phi)
    return _round(raw, "reduced", residual, details)


# -- linking number oracle ---------------------------------------------------

def _frame(x: np.ndarray) -> np.ndarray:
    """Rows ``I x, J x, K x``: a positively oriented orthonormal frame of T_x S^3."""
    return qmul(_UNITS, x[None, :])


def _jacobian(m: HopfMap, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    F = _frame(x)
    pts = _normalize(np.concatenate([x + h * F, x - h * F]))
    vals = m(pts)
    return (vals[:3] - vals[3:]).T / (2 * h)


def _newton(m: HopfMap, x: np.ndarray, y: np.ndarray, tol: float = 1e-11, iters: int = 40):
    for _ in range(iters):
        r = m(x[None])[0] - y
        if np.linalg.norm(r) < tol:
            return x
        d = np.linalg.lstsq(_jacobian(m, x), -r, rcond=1e-6)[0]
        x = _normalize(x + d @ _frame(x))
    return None


def _tangent(m: HopfMap, x: np.ndarray) -> np.ndarray:
    """Positive tangent of the preimage: (t, w1, w2) is positive when (du w1, du w2) is."""
    M = _jacobian(m, x)
    n = m(x[None])[0]
    k = np.array([n @ np.cross(M[:, 1], M[:, 2]), n @ np.cross(M[:, 2], M[:, 0]),
                  n @ np.cross(M[:, 0], M[:, 1])])
    if np.linalg.norm(k) < 1e-8:
        raise HopfError("value is not regular")
    return _normalize(k @ _frame(x))


def _trace(m: HopfMap, start: np.ndarray, y: np.ndarray, step: float, max_steps: int) -> np.ndarray:
    pts = [start]
    x = start
    for i in range(max_steps):
        mid = _normalize(x + 0.5 * step * _tangent(m, x))
        nxt = _newton(m, _normalize(x + step * _tangent(m, mid)), y)
        if nxt is None:
            raise HopfError("lost the preimage curve while tracing")
        x = nxt
        if i > 3 and np.linalg.norm(x - start) < 0.6 * step:
            return np.array(pts)
        pts.append(x)
    raise HopfError("preimage curve did not close")


def preimage_curves(m: HopfMap, y, step: float = 0.02, grid: int = 24,
                    max_steps: int = 20000) -> list:
    """Closed oriented polygons (arrays of points on S^3) forming ``m^{-1}(y)``."""
    y = _normalize(np.asarray(y, dtype=float))
    q = S3Quadrature(grid, grid)
    X = q.points().reshape(-1, 4)
    dist = np.linalg.norm(m(X) - y, axis=-1)
    order = np.argsort(dist)
    curves: list = []
    for idx in order[dist[order] < 0.2]:
        if curves and min(np.linalg.norm(c - X[idx], axis=-1).min() for c in curves) < 4 * step:
            continue
        x = _newton(m, X[idx], y)
        if x is None:
            continue
        if curves and min(np.linalg.norm(c - x, axis=-1).min() for c in curves) < 2 * step:
            continue
        curves.append(_trace(m, x, y, step, max_steps))
    return curves


def polygon_linking(A: np.ndarray, B: np.ndarray) -> float:
    """Gauss linking number of closed polygons in R^3 via exact segment solid angles."""
    p1, p2 = A[:, None, :], np.roll(A, -1, axis=0)[:, None, :]
    p3, p4 = B[None, :, :], np.roll(B, -1, axis=0)[None, :, :]
    r13, r14, r23, r24 = p3 - p1, p4 - p1, p3 - p2, p4 - p2
    ns = [_normalize(np.cross(u, v)) for u, v in ((r13, r14), (r14, r24), (r24, r23), (r23, r13))]
    omega = sum(np.arcsin(np.clip((ns[i] * ns[(i + 1) % 4]).sum(-1), -1, 1)) for i in range(4))
    sign = np.sign((np.cross(p4 - p3, p2 - p1) * r13).sum(-1))
    return float((omega * sign).sum() / (4 * math.pi))


def _stereographic(curves: Sequence[np.ndarray], rng) -> tuple:
    pts = np.concatenate(curves)
    for _ in range(200):
        N = _normalize(rng.standard_normal(4))
        if np.linalg.norm(pts - N, axis=-1).min() > 0.3:
            break
    else:
        raise HopfError("no projection point away from the preimages")
    basis = np.linalg.svd(np.eye(4) - np.outer(N, N))[0][:, :3].T
    if np.linalg.det(np.vstack([N, basis])) > 0:
        basis[0] *= -1
    # orientation preserving: (N, b1, b2, b3) negative, so T_{-N} S^3 has (b1, b2, b3) positive
    return N, basis


def linking_number(m: HopfMap, values=((0.3, 0.8, 0.52), (-0.6, 0.2, 0.77)), step: float = 0.02,
                   seed: int = 0) -> dict:
    """Linking number of the preimages of two regular values."""
    ya, yb = values
    A = preimage_curves(m, ya, step)
    B = preimage_curves(m, yb, step)
    if not A or not B:
        return {"raw": 0.0, "components": [len(A), len(B)]}
    N, basis = _stereographic(A + B, np.random.default_rng(seed))

    def proj(c):
        return (c @ basis.T) / (1 - c @ N)[:, None]

    raw = sum(polygon_linking(proj(a), proj(b)) for a in A for b in B)
    return {"raw": float(raw), "components": [len(A), len(B)]}


# -- the homotopy from lambda_n to its model ---------------------------------

def _default_chi(phi):
    from .contact import _bump

    lo, hi = 0.1, HALF_PI - 0.1
    return _bump(2 * (np.asarray(phi, dtype=float) - lo) / (hi - lo) - 1)


def homotopy_path_check(n: int, q: S3Quadrature | None = None, samples: int = 11,
                        chi: Callable = _default_chi) -> dict:
    """Follow the three linear stages from ``lambda_n`` to ``cos phi dtheta1 +- sin phi dtheta2``.

    Stage 1 adds ``chi dphi``, stage 2 moves (a, b) to the model pair, stage 3
    removes ``chi dphi``.  Reports the smallest coefficient norm met on the
    phi grid, the endpoint conditions and the Hopf class at each stage end.
    """
    m = 2 * n + 1
    sgn = (-1) ** n
    grid = np.linspace(0.0, HALF_PI, 1000)

    def an(p): return np.cos(m * p)
    def bn(p): return np.sin(m * p)
    def dan(p): return -m * np.sin(m * p)
    def dbn(p): return m * np.cos(m * p)
    def am(p): return np.cos(p)
    def bm(p): return sgn * np.sin(p)
    def dam(p): return -np.sin(p)
    def dbm(p): return sgn * np.cos(p)

    def triple(stage, s):
        if stage == 1:
            return an(grid), bn(grid), s * chi(grid)
        if stage == 2:
            return (1 - s) * an(grid) + s * am(grid), (1 - s) * bn(grid) + s * bm(grid), chi(grid)
        return am(grid), bm(grid), (1 - s) * chi(grid)

    min_norm = math.inf
    endpoint = 0.0
    for stage in (1, 2, 3):
        for s in np.linspace(0, 1, samples):
            a, b, c = triple(stage, s)
            min_norm = min(min_norm, float(np.sqrt(a * a + b * b + c * c).min()))
            endpoint = max(endpoint, float(abs(b[0])), float(abs(a[-1])))
    maps = [
        covector_map(an, bn, dan, dbn, label="lambda_n"),
        covector_map(an, bn, dan, dbn, chi, "lambda_n + chi dphi"),
        covector_map(am, bm, dam, dbm, chi, "model + chi dphi"),
        covector_map(am, bm, dam, dbm, label="model"),
    ]
    classes = [hopf_invariant(mp, q, method="reduced").value for mp in maps]
    return {"n": n, "min_coefficient_norm": min_norm, "endpoint_residual": endpoint,
            "classes": classes, "expected": 0 if n % 2 == 0 else -1}
