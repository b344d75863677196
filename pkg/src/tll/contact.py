"""Contact forms on the quaternionic three-sphere.

Points of S^3 are unit quaternions ``x = x0 + I x1 + J x2 + K x3`` and are
also written ``z1 = x0 + i x1 = r1 e^{i theta1}``, ``z2 = x2 + i x3 = r2
e^{i theta2}`` with ``tan phi = (r2 / r1)^2``.  In these coordinates

    r1^2 = cos(phi) / (cos(phi) + sin(phi)),   r2^2 = sin(phi) / (cos(phi) + sin(phi)),

the round volume element is ``dsigma = 1/2 (cos phi + sin phi)^-2 dphi dtheta1
dtheta2``, and ``dtheta1 ^ dphi ^ dtheta2`` is positively oriented.

A form ``a(phi) dtheta1 + b(phi) dtheta2`` has ``lambda ^ dlambda = (a b' - b a')
dtheta1 ^ dphi ^ dtheta2``, so it is a positive contact form iff ``a b' - b a' > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
import scipy.integrate as si
from scipy.interpolate import CubicSpline

__all__ = [
    "CollarProfile",
    "ContactError",
    "ContactFormS3",
    "PeriodicDensity",
    "Quaternion",
    "S3Quadrature",
    "TorusCoords",
    "cartesian_to_torus",
    "contact_value",
    "glue_forms",
    "glue_log_densities",
    "is_contact",
    "lambda_0",
    "lambda_n",
    "lambda_n_periodic_density",
    "lambda_st",
    "lambda_st_tilde",
    "qconj",
    "qmul",
    "reparametrized",
    "spline_form",
    "standard_volume_check",
    "torus_to_cartesian",
    "volume_integral",
]

HALF_PI = 0.5 * math.pi
ENDPOINT_TOL = 1e-12
CHECK_POINTS = 1000


class ContactError(ValueError):
    pass


# -- quaternions ------------------------------------------------------------

def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product of quaternion arrays of shape (..., 4)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(p, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(q, -1, 0)
    return np.stack([
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    ], axis=-1)


def qconj(p: np.ndarray) -> np.ndarray:
    p = np.array(p, dtype=float)
    p[..., 1:] *= -1
    return p


@dataclass(frozen=True)
class Quaternion:
    x0: float
    x1: float = 0.0
    x2: float = 0.0
    x3: float = 0.0

    @classmethod
    def from_array(cls, v) -> "Quaternion":
        return cls(*(float(t) for t in v))

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(qmul(self.as_array(), other.as_array()))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() - other.as_array())

    def norm2(self) -> float:
        return float(np.dot(self.as_array(), self.as_array()))

    def inverse(self) -> "Quaternion":
        n = self.norm2()
        if n == 0:
            raise ZeroDivisionError("zero quaternion")
        return Quaternion.from_array(self.conjugate().as_array() / n)

    def is_unit(self, atol: float = 1e-12) -> bool:
        return abs(self.norm2() - 1) < atol


I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


# -- torus coordinates ------------------------------------------------------

def _radii_sq(phi):
    c, s = np.cos(phi), np.sin(phi)
    return c / (c + s), s / (c + s)


def torus_to_cartesian(phi, theta1, theta2) -> np.ndarray:
    phi, theta1, theta2 = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (phi, theta1, theta2)))
    r1sq, r2sq = _radii_sq(phi)
    r1, r2 = np.sqrt(r1sq), np.sqrt(r2sq)
    return np.stack([r1 * np.cos(theta1), r1 * np.sin(theta1),
                     r2 * np.cos(theta2), r2 * np.sin(theta2)], axis=-1)


def cartesian_to_torus(x: np.ndarray):
    """Return ``(phi, theta1, theta2, r1^2, r2^2)`` for points of shape (..., 4)."""
    x = np.asarray(x, dtype=float)
    r1sq = x[..., 0] ** 2 + x[..., 1] ** 2
    r2sq = x[..., 2] ** 2 + x[..., 3] ** 2
    phi = np.arctan2(r2sq, r1sq)
    t1 = np.mod(np.arctan2(x[..., 1], x[..., 0]), 2 * math.pi)
    t2 = np.mod(np.arctan2(x[..., 3], x[..., 2]), 2 * math.pi)
    return phi, t1, t2, r1sq, r2sq


@dataclass(frozen=True)
class TorusCoords:
    r1: float
    r2: float
    theta1: float
    theta2: float

    def __post_init__(self):
        if self.r1 < 0 or self.r2 < 0 or abs(self.r1 ** 2 + self.r2 ** 2 - 1) > 1e-10:
            raise ValueError("need r1, r2 >= 0 with r1^2 + r2^2 = 1")

    @property
    def phi(self) -> float:
        return math.atan2(self.r2 ** 2, self.r1 ** 2)

    @property
    def z1(self) -> complex:
        return self.r1 * complex(math.cos(self.theta1), math.sin(self.theta1))

    @property
    def z2(self) -> complex:
        return self.r2 * complex(math.cos(self.theta2), math.sin(self.theta2))

    def psi(self, n: int) -> float:
        return (2 * n + 1) * self.phi

    @classmethod
    def from_angles(cls, phi: float, theta1: float, theta2: float) -> "TorusCoords":
        if not 0 <= phi <= HALF_PI:
            raise ValueError("phi must lie in [0, pi/2]")
        r1sq, r2sq = _radii_sq(phi)
        return cls(math.sqrt(r1sq), math.sqrt(r2sq), theta1 % (2 * math.pi), theta2 % (2 * math.pi))

    @classmethod
    def from_quaternion(cls, x: Quaternion) -> "TorusCoords":
        v = x.as_array()
        n = math.sqrt(x.norm2())
        if abs(n - 1) > 1e-10:
            raise ValueError("not a unit quaternion")
        _, t1, t2, r1sq, r2sq = cartesian_to_torus(v / n)
        return cls(math.sqrt(r1sq), math.sqrt(r2sq), float(t1), float(t2))

    def to_quaternion(self) -> Quaternion:
        z1, z2 = self.z1, self.z2
        return Quaternion(z1.real, z1.imag, z2.real, z2.imag)


# -- forms ------------------------------------------------------------------

@dataclass(frozen=True)
class ContactFormS3:
    """``a(phi) dtheta1 + b(phi) dtheta2`` with derivatives ``da``, ``db``.

    ``orientation`` is the orientation of S^3 against which positivity is
    checked (+1: ``dtheta1 ^ dphi ^ dtheta2``).
    """

    a: Callable
    b: Callable
    da: Callable
    db: Callable
    orientation: int = 1
    label: str = "custom"
    source: Mapping | None = None

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        b0 = float(self.b(np.array(0.0)))
        a1 = float(self.a(np.array(HALF_PI)))
        if abs(b0) > ENDPOINT_TOL or abs(a1) > ENDPOINT_TOL:
            raise ContactError(f"endpoint conditions violated: b(0) = {b0:.3g}, a(pi/2) = {a1:.3g}")

    def coefficients(self, phi):
        phi = np.asarray(phi, dtype=float)
        return self.a(phi), self.b(phi)

    def scaled(self, kappa: float) -> "ContactFormS3":
        return ContactFormS3(lambda p: kappa * self.a(p), lambda p: kappa * self.b(p),
                             lambda p: kappa * self.da(p), lambda p: kappa * self.db(p),
                             self.orientation, f"{kappa}*{self.label}")

    def conformal(self, f: Callable, df: Callable) -> "ContactFormS3":
        """``f(phi) * lambda``; ``f`` should be positive."""
        return ContactFormS3(lambda p: f(p) * self.a(p), lambda p: f(p) * self.b(p),
                             lambda p: df(p) * self.a(p) + f(p) * self.da(p),
                             lambda p: df(p) * self.b(p) + f(p) * self.db(p),
                             self.orientation, f"f*{self.label}")

    def to_json(self) -> dict:
        if self.source is None:
            raise ContactError(f"form '{self.label}' has no serializable description")
        return dict(self.source)

    @classmethod
    def from_json(cls, data: Mapping) -> "ContactFormS3":
        if "a_spline" in data:
            a, b = data["a_spline"], data["b_spline"]
            if list(a["phi"]) != list(b["phi"]):
                raise ContactError("a_spline and b_spline must share nodes")
            return spline_form(a["phi"], a["values"], b["values"])
        family = data.get("family")
        if family == "lambda_n":
            return lambda_n(int(data["n"]))
        if family == "lambda_st":
            return lambda_st()
        if family == "lambda_st_tilde":
            return lambda_st_tilde()
        if family == "lambda_0":
            return lambda_0()
        raise ContactError(f"unknown form family {family!r}")


def lambda_n(n: int) -> ContactFormS3:
    """``cos((2n+1) phi) dtheta1 + sin((2n+1) phi) dtheta2``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    m = 2 * n + 1
    sgn = (-1) ** n
    # cos(m phi) written as (-1)^n sin(m (pi/2 - phi)) so that a(pi/2) is exactly 0
    return ContactFormS3(lambda p: sgn * np.sin(m * (HALF_PI - p)), lambda p: np.sin(m * p),
                         lambda p: -m * np.sin(m * p), lambda p: m * np.cos(m * p),
                         label=f"lambda_{n}", source={"family": "lambda_n", "n": n})


def _st_parts(sign_a: float):
    def a(p):
        return sign_a * np.cos(p) / (np.cos(p) + np.sin(p))

    def b(p):
        return np.sin(p) / (np.cos(p) + np.sin(p))

    def da(p):
        return -sign_a / (np.cos(p) + np.sin(p)) ** 2

    def db(p):
        return 1 / (np.cos(p) + np.sin(p)) ** 2

    return a, b, da, db


def lambda_st() -> ContactFormS3:
    """``r1^2 dtheta1 + r2^2 dtheta2``."""
    return ContactFormS3(*_st_parts(1.0), label="lambda_st", source={"family": "lambda_st"})


def lambda_st_tilde() -> ContactFormS3:
    """``-r1^2 dtheta1 + r2^2 dtheta2``: contact for the opposite orientation."""
    return ContactFormS3(*_st_parts(-1.0), orientation=-1, label="lambda_st_tilde",
                         source={"family": "lambda_st_tilde"})


def lambda_0() -> ContactFormS3:
    """``(cos phi + sin phi) lambda_st = cos phi dtheta1 + sin phi dtheta2``."""
    form = lambda_n(0)
    return ContactFormS3(form.a, form.b, form.da, form.db, label="lambda_0", source={"family": "lambda_0"})


def spline_form(phi, a_values, b_values) -> ContactFormS3:
    phi = np.asarray(phi, dtype=float)
    if phi.size < 4:
        raise ContactError("derivative unavailable: need at least 4 spline nodes")
    if abs(phi[0]) > 1e-14 or abs(phi[-1] - HALF_PI) > 1e-14:
        raise ContactError("spline nodes must span [0, pi/2]")
    sa = CubicSpline(phi, np.asarray(a_values, dtype=float))
    sb = CubicSpline(phi, np.asarray(b_values, dtype=float))
    da, db = sa.derivative(), sb.derivative()
    source = {"a_spline": {"phi": phi.tolist(), "values": list(map(float, a_values))},
              "b_spline": {"phi": phi.tolist(), "values": list(map(float, b_values))}}
    return ContactFormS3(sa, sb, da, db, label="spline", source=source)


def reparametrized(form: ContactFormS3, psi: Callable, dpsi: Callable) -> ContactFormS3:
    """Pull back the coefficient pair along ``phi -> psi(phi)`` (psi fixing 0 and pi/2)."""
    return ContactFormS3(lambda p: form.a(psi(p)), lambda p: form.b(psi(p)),
                         lambda p: form.da(psi(p)) * dpsi(p), lambda p: form.db(psi(p)) * dpsi(p),
                         form.orientation, f"{form.label}@psi")


def contact_value(form: ContactFormS3, phi):
    """``a b' - b a'`` at ``phi`` in [0, pi/2]."""
    p = np.asarray(phi, dtype=float)
    if np.any(p < 0) or np.any(p > HALF_PI):
        raise ValueError("phi must lie in [0, pi/2]")
    val = form.a(p) * form.db(p) - form.b(p) * form.da(p)
    return float(val) if np.ndim(val) == 0 else val


def is_contact(form: ContactFormS3, points: int = CHECK_POINTS) -> bool:
    grid = np.linspace(0.0, HALF_PI, points)
    if abs(form.b(np.array(0.0))) > ENDPOINT_TOL or abs(form.a(np.array(HALF_PI))) > ENDPOINT_TOL:
        return False
    return bool(np.all(form.orientation * contact_value(form, grid) > 0))


# -- quadrature -------------------------------------------------------------

@dataclass(frozen=True)
class S3Quadrature:
    """Gauss-Legendre in phi times the uniform trapezoid in theta1, theta2."""

    n_phi: int = 64
    n_theta: int = 64
    phi: np.ndarray = field(init=False, repr=False, compare=False)
    phi_weights: np.ndarray = field(init=False, repr=False, compare=False)
    theta: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_phi < 2 or self.n_theta < 2:
            raise ValueError("resolutions must be at least 2")
        t, w = np.polynomial.legendre.leggauss(self.n_phi)
        object.__setattr__(self, "phi", (t + 1) * (HALF_PI / 2))
        object.__setattr__(self, "phi_weights", w * (HALF_PI / 2))
        object.__setattr__(self, "theta", 2 * math.pi * np.arange(self.n_theta) / self.n_theta)

    @property
    def theta_weight(self) -> float:
        return 2 * math.pi / self.n_theta

    @property
    def density(self) -> np.ndarray:
        """``dsigma / (dphi dtheta1 dtheta2)`` at the phi nodes."""
        return 0.5 / (np.cos(self.phi) + np.sin(self.phi)) ** 2

    @property
    def shape(self) -> tuple:
        return (self.n_phi, self.n_theta, self.n_theta)

    @property
    def weights(self) -> np.ndarray:
        w = self.phi_weights * self.density * self.theta_weight ** 2
        return np.broadcast_to(w[:, None, None], self.shape)

    @property
    def volume(self) -> float:
        return float(self.weights.sum())

    def mesh(self):
        return np.meshgrid(self.phi, self.theta, self.theta, indexing="ij")

    def points(self) -> np.ndarray:
        return torus_to_cartesian(*self.mesh())

    def sample(self, f: Callable) -> np.ndarray:
        """Evaluate ``f(phi, theta1, theta2)`` on the grid."""
        return np.broadcast_to(np.asarray(f(*self.mesh()), dtype=float), self.shape)

    def integrate(self, values) -> float:
        values = np.broadcast_to(np.asarray(values, dtype=float), self.shape)
        return math.fsum((self.weights * values).ravel())

    def refined(self, factor: int = 2) -> "S3Quadrature":
        return S3Quadrature(self.n_phi * factor, self.n_theta * factor)

    def provenance(self) -> dict:
        return {"n_phi": self.n_phi, "n_theta": self.n_theta}


def volume_integral(form: ContactFormS3, q: S3Quadrature) -> float:
    """``int lambda ^ dlambda`` with the orientation ``dtheta1 ^ dphi ^ dtheta2``."""
    dens = contact_value(form, q.phi)
    return (2 * math.pi) ** 2 * math.fsum(q.phi_weights * dens)


def standard_volume_check(q: S3Quadrature, form: ContactFormS3 | None = None) -> float:
    """``int lambda_st ^ dlambda_st``; equals ``2 Vol(S^3) = 4 pi^2``."""
    return volume_integral(lambda_st() if form is None else form, q)


# -- gluing -----------------------------------------------------------------

def _bump(sigma):
    sigma = np.asarray(sigma, dtype=float)
    out = np.zeros_like(sigma)
    inside = np.abs(sigma) < 1
    s2 = sigma[inside] ** 2
    out[inside] = np.exp(1 - 1 / (1 - s2))
    return out


_BUMP_MASS = si.quad(lambda s: float(_bump(np.array(s))), -1, 1, epsabs=0, epsrel=1e-13)[0]


_CDF_T, _CDF_W = np.polynomial.legendre.leggauss(160)


def _bump_cdf(sigma):
    """``int_{-1}^{sigma} bump / mass`` by a Gauss rule on ``[-1, sigma]``."""
    sigma = np.clip(np.asarray(sigma, dtype=float), -1, 1)
    half = (sigma[..., None] + 1) / 2
    vals = (_bump(-1 + half * (_CDF_T + 1)) * _CDF_W).sum(axis=-1) * half[..., 0]
    return vals / _BUMP_MASS


@dataclass(frozen=True)
class CollarProfile:
    """A cutoff ``chi(phi)``: 0 below the corona ``[lo, hi]``, 1 above it."""

    chi: Callable
    dchi: Callable
    corona: tuple = (math.pi / 8, 3 * math.pi / 8)

    def __post_init__(self):
        lo, hi = self.corona
        if not 0 < lo < hi < HALF_PI:
            raise ValueError("corona must satisfy 0 < lo < hi < pi/2")

    @classmethod
    def bump(cls, lo: float = math.pi / 8, hi: float = 3 * math.pi / 8) -> "CollarProfile":
        """Normalized primitive of ``exp(1 - 1/(1 - s^2))`` rescaled to the corona."""
        scale = 2 / (hi - lo)

        def sigma(p):
            return scale * (np.asarray(p, dtype=float) - lo) - 1

        return cls(lambda p: _bump_cdf(sigma(p)), lambda p: _bump(sigma(p)) * scale / _BUMP_MASS, (lo, hi))


def glue_forms(f1: ContactFormS3, f2: ContactFormS3, collar: CollarProfile | None = None) -> ContactFormS3:
    """Connected sum on one S^3: ``f1`` below the corona, ``f2`` above it.

    The coefficient pairs are interpolated by the collar profile; the result
    is checked with ``is_contact``.
    """
    collar = CollarProfile.bump() if collar is None else collar
    chi, dchi = collar.chi, collar.dchi

    def a(p):
        c = chi(p)
        return (1 - c) * f1.a(p) + c * f2.a(p)

    def b(p):
        c = chi(p)
        return (1 - c) * f1.b(p) + c * f2.b(p)

    def da(p):
        c = chi(p)
        return (1 - c) * f1.da(p) + c * f2.da(p) + dchi(p) * (f2.a(p) - f1.a(p))

    def db(p):
        c = chi(p)
        return (1 - c) * f1.db(p) + c * f2.db(p) + dchi(p) * (f2.b(p) - f1.b(p))

    glued = ContactFormS3(a, b, da, db, f1.orientation, f"{f1.label}#{f2.label}")
    if not is_contact(glued):
        raise ContactError("collar deformation failed; supply a different profile")
    return glued


def glue_log_densities(d1, d2, q: S3Quadrature, collar: CollarProfile | None = None,
                       atol: float = 0.0) -> np.ndarray:
    """Glue grid fields: ``d1`` must vanish for ``phi >= lo``, ``d2`` for ``phi <= hi``."""
    lo, hi = (CollarProfile.bump() if collar is None else collar).corona
    d1 = np.broadcast_to(np.asarray(d1, dtype=float), q.shape)
    d2 = np.broadcast_to(np.asarray(d2, dtype=float), q.shape)
    cap1 = q.phi >= lo
    cap2 = q.phi <= hi
    if np.abs(d1[cap1]).max(initial=0.0) > atol:
        raise ContactError("first density does not vanish on its cap")
    if np.abs(d2[cap2]).max(initial=0.0) > atol:
        raise ContactError("second density does not vanish on its cap")
    return np.where(cap1[:, None, None], d2, d1)


# -- periodic densities for lambda_n -----------------------------------------

@dataclass
class PeriodicDensity:
    n: int
    field: Callable
    integral: float
    copies: int
    seed_integral: float

    def to_json(self) -> dict:
        return {"n": self.n, "copies": self.copies, "integral": self.integral,
                "seed_integral": self.seed_integral}


def _period_symmetry_inverse(t1, t2, k: int):
    """Apply the inverse of ``(theta1, theta2) -> (-theta2, theta1)`` k times."""
    for _ in range(k % 4):
        t1, t2 = t2, -t1
    return t1, t2


def lambda_n_periodic_density(n: int, seed: Callable, n_psi: int = 32, n_theta: int = 64,
                              end_tol: float = 1e-12) -> PeriodicDensity:
    """Extend a one-period seed to the log density of ``lambda_n``.

    ``seed(s, theta1, theta2)`` lives on one period ``s in [0, pi/2]`` of
    ``psi = (2n+1) phi`` and vanishes near both ends.  Copy ``k`` (k < 2n)
    sits on ``psi in [pi/4 + k pi/2, 3 pi/4 + k pi/2]`` and is the image of
    the seed under the k-th power of ``(psi, theta1, theta2) -> (psi + pi/2,
    -theta2, theta1)``.  Integrals are taken against ``lambda_n ^ dlambda_n =
    dpsi dtheta1 dtheta2``, which the symmetry preserves.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    T1, T2 = np.meshgrid(theta, theta, indexing="ij")
    for end in (0.0, HALF_PI):
        if np.abs(np.asarray(seed(np.full_like(T1, end), T1, T2))).max() > end_tol:
            raise ContactError("seed density does not vanish at the period ends")
    t, w = np.polynomial.legendre.leggauss(n_psi)
    s_nodes = (t + 1) * (HALF_PI / 2)
    s_w = w * (HALF_PI / 2)
    tw = (2 * math.pi / n_theta) ** 2
    copies = 2 * n
    terms = []
    for k in range(copies):
        for s, ws in zip(s_nodes, s_w):
            u1, u2 = _period_symmetry_inverse(T1, T2, k)
            vals = np.broadcast_to(np.asarray(seed(np.full_like(T1, s), u1, u2), dtype=float), T1.shape)
            terms.extend((ws * tw * vals).ravel())
    seed_terms = []
    for s, ws in zip(s_nodes, s_w):
        vals = np.broadcast_to(np.asarray(seed(np.full_like(T1, s), T1, T2), dtype=float), T1.shape)
        seed_terms.extend((ws * tw * vals).ravel())
    m = 2 * n + 1

    def density(phi, theta1, theta2):
        psi = m * np.asarray(phi, dtype=float)
        theta1, theta2 = np.broadcast_arrays(np.asarray(theta1, dtype=float), np.asarray(theta2, dtype=float))
        psi = np.broadcast_to(psi, theta1.shape)
        out = np.zeros(theta1.shape)
        local = psi - math.pi / 4
        k = np.floor(local / HALF_PI).astype(int)
        for j in range(copies):
            mask = k == j
            if np.any(mask):
                u1, u2 = _period_symmetry_inverse(theta1[mask], theta2[mask], j)
                out[mask] = seed(local[mask] - j * HALF_PI, u1, u2)
        return out

    return PeriodicDensity(n, density, math.fsum(terms), copies, math.fsum(seed_terms))
