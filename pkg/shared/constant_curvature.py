"""
Constant-curvature geometries: the circle S^1, the unit sphere S^2 and the
hyperbolic upper half-plane H^2.

The half-plane exponential and logarithm go through ``MoebiusTransform``:
a point z = x + iy is carried to i by the inverse of

    g_z = [[sqrt(y), x / sqrt(y)], [0, 1 / sqrt(y)]]

and a rotation about i aligns the tangent direction with the vertical
geodesic t -> i e^t. The same transform moves Gaussian samples drawn at i to
their center (see ``shared.sampling``).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Union

import numpy as np

from .errors import CutLocusError, InvalidPointError, InvalidTangentError
from .manifold_core import (
    MEMBERSHIP_TOL,
    Geometry,
    ManifoldId,
    ManifoldKind,
    register_geometry,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
ANTIPODAL_MARGIN = 1e-6
ZERO_DISTANCE = 1e-12


def normalize_angle(theta: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Map angles into [0, 2pi)."""
    wrapped = np.mod(theta, TWO_PI)
    wrapped = np.where(wrapped >= TWO_PI, wrapped - TWO_PI, wrapped)
    if np.ndim(wrapped) == 0:
        return float(wrapped)
    return wrapped


def _signed_angle(delta: np.ndarray) -> np.ndarray:
    # (-pi, pi], exact pi stays +pi
    d = np.mod(delta, TWO_PI)
    d = np.where(d >= TWO_PI, 0.0, d)
    return np.where(d > math.pi, d - TWO_PI, d)


def _arc(delta: np.ndarray) -> np.ndarray:
    # unsigned arc length; exact when both angles already lie in [0, 2pi)
    a = np.abs(delta)
    a = np.where(a >= TWO_PI, np.mod(a, TWO_PI), a)
    return np.minimum(a, TWO_PI - a)


# =============================================================================
# CIRCLE
# =============================================================================

@register_geometry(ManifoldKind.CIRCLE)
class CircleGeometry(Geometry):
    def project_point(self, coords):
        coords = np.asarray(coords, dtype=float).ravel()
        if coords.size != 1 or not np.isfinite(coords[0]):
            raise InvalidPointError(f"circle point must be one finite angle, got {coords}")
        return np.array([normalize_angle(coords[0])])

    def project_tangent(self, base, vec):
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != 1 or not np.isfinite(vec[0]):
            raise InvalidTangentError(f"circle tangent must be one finite real, got {vec}")
        return vec

    def distance(self, x, y) -> float:
        return float(_arc(float(np.ravel(y)[0]) - float(np.ravel(x)[0])))

    def distances(self, points, y):
        return _arc(np.atleast_2d(points)[:, 0] - float(np.ravel(y)[0]))

    def exp(self, x, v):
        return np.array([normalize_angle(float(np.ravel(x)[0]) + float(np.ravel(v)[0]))])

    def log(self, x, y):
        return np.array([float(_signed_angle(float(np.ravel(y)[0]) - float(np.ravel(x)[0])))])

    def logs(self, x, points):
        return _signed_angle(np.atleast_2d(points)[:, 0] - float(np.ravel(x)[0]))[:, None]

    def inner(self, x, u, w) -> float:
        return float(np.ravel(u)[0] * np.ravel(w)[0])

    def tangent_basis(self, x):
        return [np.array([1.0])]

    def initial_mean(self, points):
        theta = np.atleast_2d(points)[:, 0]
        c, s = np.mean(np.cos(theta)), np.mean(np.sin(theta))
        if math.hypot(c, s) < 1e-12:
            return np.array([theta[0]])
        return np.array([normalize_angle(math.atan2(s, c))])

    def normalize_output(self, coords):
        return np.array([normalize_angle(float(np.ravel(coords)[0]))])


def circle_distance(theta1: float, theta2: float) -> float:
    """Arc length between two angles, in [0, pi]."""
    return float(_arc(float(theta1) - float(theta2)))


def circle_exp(theta: float, v: float) -> float:
    return normalize_angle(float(theta) + float(v))


def circle_log(theta1: float, theta2: float) -> float:
    """Signed angular difference in (-pi, pi]; exactly pi maps to +pi."""
    return float(_signed_angle(float(theta2) - float(theta1)))


# =============================================================================
# SPHERE
# =============================================================================

@register_geometry(ManifoldKind.SPHERE2)
class SphereGeometry(Geometry):
    def project_point(self, coords):
        coords = np.asarray(coords, dtype=float).ravel()
        if coords.size != 3 or not np.all(np.isfinite(coords)):
            raise InvalidPointError(f"sphere2 point must be a finite 3-vector, got {coords}")
        n = float(np.linalg.norm(coords))
        if abs(n - 1.0) > MEMBERSHIP_TOL:
            raise InvalidPointError(f"sphere2 point has norm {n:.12g}, expected 1")
        return coords / n

    def project_tangent(self, base, vec):
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != 3 or not np.all(np.isfinite(vec)):
            raise InvalidTangentError(f"sphere2 tangent must be a finite 3-vector, got {vec}")
        base = np.asarray(base, dtype=float)
        radial = float(np.dot(base, vec))
        if abs(radial) > MEMBERSHIP_TOL * max(1.0, float(np.linalg.norm(vec))):
            raise InvalidTangentError(f"sphere2 tangent not orthogonal to base (p.v = {radial:.3g})")
        return vec - radial * base

    def distance(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return float(math.atan2(np.linalg.norm(np.cross(x, y)), float(np.dot(x, y))))

    def distances(self, points, y):
        points = np.atleast_2d(points)
        y = np.asarray(y, dtype=float)
        return np.arctan2(np.linalg.norm(np.cross(points, y), axis=1), points @ y)

    def exp(self, x, v):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        n = float(np.linalg.norm(v))
        if n == 0.0:
            return x.copy()
        if n >= math.pi:
            logger.debug("sphere exp with |v| = %.6g >= pi: beyond the injectivity radius", n)
        out = math.cos(n) * x + math.sin(n) * (v / n)
        return out / np.linalg.norm(out)

    def log(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        d = self.distance(x, y)
        if d < ZERO_DISTANCE:
            return np.zeros(3)
        if math.pi - d < ANTIPODAL_MARGIN:
            raise CutLocusError(f"sphere log at near-antipodal points (d = {d:.12g})")
        w = y - float(np.dot(x, y)) * x
        return (d / float(np.linalg.norm(w))) * w

    def logs(self, x, points):
        points = np.atleast_2d(points)
        x = np.asarray(x, dtype=float)
        d = self.distances(points, x)
        if np.any(math.pi - d < ANTIPODAL_MARGIN):
            raise CutLocusError("sphere log at near-antipodal points")
        w = points - np.outer(points @ x, x)
        wn = np.linalg.norm(w, axis=1)
        scale = np.divide(d, wn, out=np.zeros_like(d), where=d >= ZERO_DISTANCE)
        return w * scale[:, None]

    def inner(self, x, u, w) -> float:
        return float(np.dot(u, w))

    def tangent_basis(self, x):
        x = np.asarray(x, dtype=float)
        e = np.zeros(3)
        e[int(np.argmin(np.abs(x)))] = 1.0
        u1 = e - np.dot(e, x) * x
        u1 /= np.linalg.norm(u1)
        return [u1, np.cross(x, u1)]

    def initial_mean(self, points):
        points = np.atleast_2d(points)
        m = points.mean(axis=0)
        n = float(np.linalg.norm(m))
        if n < 1e-9:
            return points[0].copy()
        return m / n

    def normalize_output(self, coords):
        coords = np.asarray(coords, dtype=float)
        return coords / np.linalg.norm(coords)


def _unit(p: Sequence[float]) -> np.ndarray:
    return _SPHERE.project_point(np.asarray(p, dtype=float))


def sphere_distance(p: Sequence[float], q: Sequence[float]) -> float:
    return _SPHERE.distance(_unit(p), _unit(q))


def sphere_exp(p: Sequence[float], v: Sequence[float]) -> np.ndarray:
    base = _unit(p)
    return _SPHERE.exp(base, _SPHERE.project_tangent(base, v))


def sphere_log(p: Sequence[float], q: Sequence[float]) -> np.ndarray:
    return _SPHERE.log(_unit(p), _unit(q))


# =============================================================================
# HYPERBOLIC HALF-PLANE
# =============================================================================

@dataclass(frozen=True)
class MoebiusTransform:
    """Element of SL(2, R) acting on the upper half-plane by z -> (az + b)/(cz + d)."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence[float]]) -> "MoebiusTransform":
        m = np.asarray(m, dtype=float)
        det = float(np.linalg.det(m))
        if det <= 0.0:
            raise ValueError(f"Moebius matrix needs a positive determinant, got {det}")
        m = m / math.sqrt(det)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def translation_to(cls, z: complex) -> "MoebiusTransform":
        """The element carrying i to z = x + iy."""
        x, y = z.real, z.imag
        s = math.sqrt(y)
        return cls(s, x / s, 0.0, 1.0 / s)

    @classmethod
    def rotation_about_i(cls, theta: float) -> "MoebiusTransform":
        """Stabilizer of i; rotates tangent vectors at i by 2*theta."""
        c, s = math.cos(theta), math.sin(theta)
        return cls(c, s, -s, c)

    @classmethod
    def random(cls, rng: np.random.Generator, scale: float = 1.0) -> "MoebiusTransform":
        while True:
            m = np.eye(2) + scale * rng.standard_normal((2, 2))
            det = np.linalg.det(m)
            if abs(det) > 1e-3:
                break
        if det < 0:
            m[0] = -m[0]
        return cls.from_matrix(m)

    def __call__(self, z):
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        return 1.0 / (self.c * z + self.d) ** 2

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """self after other."""
        return MoebiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def push_tangent(self, z: complex, v: complex) -> complex:
        return self.derivative(z) * v


def _as_complex(p) -> complex:
    p = np.ravel(np.asarray(p, dtype=float))
    return complex(p[0], p[1])


def exp_at_i(w):
    """Exponential map at i for complex tangent coordinates (scalar or array)."""
    w = np.asarray(w, dtype=complex)
    r = np.abs(w)
    # rotation about i turning the vertical direction onto arg(w)
    theta = 0.5 * (np.angle(w) - 0.5 * math.pi)
    c, s = np.cos(theta), np.sin(theta)
    top = 1j * np.exp(r)
    out = (c * top + s) / (-s * top + c)
    if out.ndim == 0:
        return complex(out)
    return out


def log_at_i(w):
    """Inverse of ``exp_at_i``; accepts scalars or arrays of complex numbers."""
    a = np.real(w)
    r = 2.0 * np.arcsinh(np.abs(w - 1j) / (2.0 * np.sqrt(np.imag(w))))
    # rotation angle bringing w onto the upward vertical geodesic from i
    two_theta = np.arctan2(-2.0 * a, np.abs(w) ** 2 - 1.0)
    return r * np.exp(1j * (two_theta + 0.5 * math.pi))


@register_geometry(ManifoldKind.HYPERBOLIC2)
class HalfPlaneGeometry(Geometry):
    def project_point(self, coords):
        coords = np.asarray(coords, dtype=float).ravel()
        if coords.size != 2 or not np.all(np.isfinite(coords)):
            raise InvalidPointError(f"hyperbolic2 point must be finite (x, y), got {coords}")
        if coords[1] <= 0.0:
            raise InvalidPointError(f"hyperbolic2 point needs y > 0, got y = {coords[1]}")
        return coords

    def project_tangent(self, base, vec):
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != 2 or not np.all(np.isfinite(vec)):
            raise InvalidTangentError(f"hyperbolic2 tangent must be a finite 2-vector, got {vec}")
        return vec

    def distance(self, x, y) -> float:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        chord = math.hypot(x[0] - y[0], x[1] - y[1])
        return float(2.0 * math.asinh(chord / (2.0 * math.sqrt(x[1] * y[1]))))

    def distances(self, points, y):
        points = np.atleast_2d(points)
        y = np.asarray(y, dtype=float)
        chord = np.hypot(points[:, 0] - y[0], points[:, 1] - y[1])
        return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(points[:, 1] * y[1])))

    def exp(self, x, v):
        z = _as_complex(x)
        g = MoebiusTransform.translation_to(z)
        # g^{-1} has derivative 1/y at z
        w = complex(v[0], v[1]) / z.imag
        out = g(exp_at_i(w))
        return np.array([out.real, out.imag])

    def log(self, x, y):
        z = _as_complex(x)
        w = (_as_complex(y) - z.real) / z.imag
        if w == 1j:
            return np.zeros(2)
        out = z.imag * complex(log_at_i(w))
        return np.array([out.real, out.imag])

    def logs(self, x, points):
        z = _as_complex(x)
        points = np.atleast_2d(points)
        w = ((points[:, 0] - z.real) + 1j * points[:, 1]) / z.imag
        out = z.imag * log_at_i(w)
        return np.column_stack([out.real, out.imag])

    def inner(self, x, u, w) -> float:
        y = float(np.ravel(x)[1])
        return float(np.dot(u, w)) / (y * y)

    def tangent_basis(self, x):
        y = float(np.ravel(x)[1])
        return [np.array([y, 0.0]), np.array([0.0, y])]

    def initial_mean(self, points):
        return np.mean(np.atleast_2d(points), axis=0)


def _half_plane(z) -> np.ndarray:
    if isinstance(z, complex):
        z = (z.real, z.imag)
    return _H2.project_point(np.asarray(z, dtype=float))


def h2_distance(z1, z2) -> float:
    return _H2.distance(_half_plane(z1), _half_plane(z2))


def h2_exp(z, v) -> np.ndarray:
    return _H2.exp(_half_plane(z), np.asarray(v, dtype=float))


def h2_log(z1, z2) -> np.ndarray:
    return _H2.log(_half_plane(z1), _half_plane(z2))


def moebius_apply(g: MoebiusTransform, points: np.ndarray) -> np.ndarray:
    """Apply ``g`` to rows (x, y) of a half-plane point array."""
    points = np.atleast_2d(points)
    out = g(points[:, 0] + 1j * points[:, 1])
    return np.column_stack([np.real(out), np.imag(out)])


_SPHERE = SphereGeometry(ManifoldId.sphere2())
_H2 = HalfPlaneGeometry(ManifoldId.hyperbolic2())

__all__: List[str] = [
    "CircleGeometry",
    "SphereGeometry",
    "HalfPlaneGeometry",
    "MoebiusTransform",
    "normalize_angle",
    "circle_distance",
    "circle_exp",
    "circle_log",
    "sphere_distance",
    "sphere_exp",
    "sphere_log",
    "h2_distance",
    "h2_exp",
    "h2_log",
    "moebius_apply",
    "exp_at_i",
    "log_at_i",
]
