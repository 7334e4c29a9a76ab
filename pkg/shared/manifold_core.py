"""
Geometric contract shared by every manifold, plus the Euclidean baseline.

Points are stored in one global chart per manifold:
- euclidean(d): coordinate vector of length d
- circle: one angle in [0, 2pi)
- sphere2: unit 3-vector
- hyperbolic2: upper half-plane (x, y) with y > 0
- spd(n): row-major symmetric positive-definite n x n matrix

Each manifold provides a ``Geometry`` working on raw numpy coordinates; the
public functions (``distance``, ``exp_map``, ``log_map``, ``inner``) wrap
those with membership validation and manifold checks.

Usage:
    from shared.manifold_core import ManifoldId, make_point, distance, log_map

    plane = ManifoldId.euclidean(2)
    d = distance(make_point(plane, [0, 0]), make_point(plane, [3, 4]))  # 5.0
"""
from __future__ import annotations

import importlib
import logging
import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidPointError, InvalidTangentError, ManifoldMismatchError, UsageError

logger = logging.getLogger(__name__)

MEMBERSHIP_TOL = 1e-9


class ManifoldKind(str, Enum):
    EUCLIDEAN = "euclidean"
    CIRCLE = "circle"
    SPHERE2 = "sphere2"
    HYPERBOLIC2 = "hyperbolic2"
    SPD = "spd"


_TAG_PATTERN = re.compile(r"^\s*([a-z0-9]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


@dataclass(frozen=True)
class ManifoldId:
    """Identifies a manifold; ``dim`` is d for euclidean and n for spd, else 0."""

    kind: ManifoldKind
    dim: int = 0

    def __post_init__(self):
        kind = ManifoldKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ManifoldKind.EUCLIDEAN and self.dim < 1:
            raise UsageError(f"euclidean manifold needs d >= 1, got {self.dim}")
        if kind is ManifoldKind.SPD and self.dim < 2:
            raise UsageError(f"spd manifold needs n >= 2, got {self.dim}")
        if kind not in (ManifoldKind.EUCLIDEAN, ManifoldKind.SPD):
            object.__setattr__(self, "dim", 0)

    @classmethod
    def euclidean(cls, d: int) -> "ManifoldId":
        return cls(ManifoldKind.EUCLIDEAN, d)

    @classmethod
    def circle(cls) -> "ManifoldId":
        return cls(ManifoldKind.CIRCLE)

    @classmethod
    def sphere2(cls) -> "ManifoldId":
        return cls(ManifoldKind.SPHERE2)

    @classmethod
    def hyperbolic2(cls) -> "ManifoldId":
        return cls(ManifoldKind.HYPERBOLIC2)

    @classmethod
    def spd(cls, n: int = 2) -> "ManifoldId":
        return cls(ManifoldKind.SPD, n)

    @classmethod
    def parse(cls, tag: str) -> "ManifoldId":
        """Parse tags such as ``circle``, ``euclidean(3)``, ``spd(2)`` or ``spd``."""
        match = _TAG_PATTERN.match(str(tag).lower())
        if not match:
            raise UsageError(f"Unrecognized manifold tag: {tag!r}")
        name, dim = match.group(1), match.group(2)
        try:
            kind = ManifoldKind(name)
        except ValueError:
            raise UsageError(f"Unrecognized manifold tag: {tag!r}") from None
        if kind is ManifoldKind.EUCLIDEAN:
            if dim is None:
                raise UsageError("euclidean manifold tag needs a dimension, e.g. euclidean(2)")
            return cls(kind, int(dim))
        if kind is ManifoldKind.SPD:
            return cls(kind, int(dim) if dim is not None else 2)
        if dim is not None:
            raise UsageError(f"Manifold {name} takes no dimension")
        return cls(kind)

    @property
    def tag(self) -> str:
        if self.kind in (ManifoldKind.EUCLIDEAN, ManifoldKind.SPD):
            return f"{self.kind.value}({self.dim})"
        return self.kind.value

    @property
    def coord_size(self) -> int:
        return {
            ManifoldKind.EUCLIDEAN: self.dim,
            ManifoldKind.CIRCLE: 1,
            ManifoldKind.SPHERE2: 3,
            ManifoldKind.HYPERBOLIC2: 2,
            ManifoldKind.SPD: self.dim * self.dim,
        }[self.kind]

    @property
    def intrinsic_dim(self) -> int:
        return {
            ManifoldKind.EUCLIDEAN: self.dim,
            ManifoldKind.CIRCLE: 1,
            ManifoldKind.SPHERE2: 2,
            ManifoldKind.HYPERBOLIC2: 2,
            ManifoldKind.SPD: self.dim * (self.dim + 1) // 2,
        }[self.kind]

    def __str__(self) -> str:
        return self.tag


def _frozen(coords: np.ndarray) -> np.ndarray:
    arr = np.array(coords, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ManifoldPoint:
    """Point coordinates together with their manifold.

    Construct through ``make_point`` to get membership validation; the raw
    constructor trusts its input.
    """

    manifold: ManifoldId
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(np.ravel(self.coords)))

    def as_matrix(self) -> np.ndarray:
        if self.manifold.kind is not ManifoldKind.SPD:
            raise UsageError("as_matrix() is only defined for spd points")
        n = self.manifold.dim
        return self.coords.reshape(n, n)

    def __repr__(self) -> str:
        values = ", ".join(f"{v:.6g}" for v in self.coords)
        return f"ManifoldPoint({self.manifold.tag}, [{values}])"


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: ManifoldPoint
    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", _frozen(np.ravel(self.vec)))

    @property
    def manifold(self) -> ManifoldId:
        return self.base.manifold

    def norm(self) -> float:
        return float(np.sqrt(max(inner(self, self), 0.0)))

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, self.vec * float(factor))

    def __repr__(self) -> str:
        values = ", ".join(f"{v:.6g}" for v in self.vec)
        return f"TangentVector(at {self.base!r}, [{values}])"


# =============================================================================
# GEOMETRY CONTRACT
# =============================================================================

class Geometry(ABC):
    """Riemannian operations on raw coordinate arrays of one manifold.

    Single points are 1-D arrays of length ``manifold.coord_size``; batches
    are 2-D arrays with one point per row.
    """

    def __init__(self, manifold: ManifoldId):
        self.manifold = manifold

    @abstractmethod
    def project_point(self, coords: np.ndarray) -> np.ndarray:
        """Validate coordinates, absorbing drift below MEMBERSHIP_TOL."""

    @abstractmethod
    def project_tangent(self, base: np.ndarray, vec: np.ndarray) -> np.ndarray:
        """Validate tangent coordinates at ``base``."""

    @abstractmethod
    def distance(self, x: np.ndarray, y: np.ndarray) -> float: ...

    @abstractmethod
    def exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def inner(self, x: np.ndarray, u: np.ndarray, w: np.ndarray) -> float: ...

    @abstractmethod
    def tangent_basis(self, x: np.ndarray) -> List[np.ndarray]:
        """Orthonormal basis of the tangent space at ``x`` (normal coordinates)."""

    def norm(self, x: np.ndarray, v: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(x, v, v), 0.0)))

    def distances(self, points: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Distances from every row of ``points`` to ``y``."""
        return np.array([self.distance(p, y) for p in points], dtype=float)

    def logs(self, x: np.ndarray, points: np.ndarray) -> np.ndarray:
        """log_x of every row of ``points``."""
        return np.array([self.log(x, p) for p in points], dtype=float).reshape(len(points), -1)

    def distance_matrix(self, points: np.ndarray, centers: np.ndarray) -> np.ndarray:
        """(N, n) matrix of distances from data rows to center rows."""
        points = np.atleast_2d(points)
        centers = np.atleast_2d(centers)
        out = np.empty((points.shape[0], centers.shape[0]), dtype=float)
        for j, c in enumerate(centers):
            out[:, j] = self.distances(points, c)
        return out

    def initial_mean(self, points: np.ndarray) -> np.ndarray:
        """Starting guess for the Karcher flow; the first point by default."""
        return np.array(points[0], dtype=float)

    def normalize_output(self, coords: np.ndarray) -> np.ndarray:
        return coords


class EuclideanGeometry(Geometry):
    def project_point(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords, dtype=float).ravel()
        if coords.size != self.manifold.dim:
            raise InvalidPointError(
                f"{self.manifold.tag} point needs {self.manifold.dim} coordinates, got {coords.size}"
            )
        if not np.all(np.isfinite(coords)):
            raise InvalidPointError(f"Non-finite coordinates: {coords}")
        return coords

    def project_tangent(self, base: np.ndarray, vec: np.ndarray) -> np.ndarray:
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != self.manifold.dim or not np.all(np.isfinite(vec)):
            raise InvalidTangentError(f"Invalid tangent for {self.manifold.tag}: {vec}")
        return vec

    def distance(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))

    def distances(self, points, y) -> np.ndarray:
        return np.linalg.norm(np.atleast_2d(points) - np.asarray(y, dtype=float), axis=1)

    def exp(self, x, v):
        return np.asarray(x, dtype=float) + np.asarray(v, dtype=float)

    def log(self, x, y):
        return np.asarray(y, dtype=float) - np.asarray(x, dtype=float)

    def logs(self, x, points):
        return np.atleast_2d(points) - np.asarray(x, dtype=float)

    def inner(self, x, u, w) -> float:
        return float(np.dot(u, w))

    def tangent_basis(self, x):
        return list(np.eye(self.manifold.dim))

    def initial_mean(self, points):
        return np.mean(np.atleast_2d(points), axis=0)


# =============================================================================
# REGISTRY
# =============================================================================

_GEOMETRY_FACTORIES: Dict[ManifoldKind, Callable[[ManifoldId], Geometry]] = {
    ManifoldKind.EUCLIDEAN: EuclideanGeometry,
}
_GEOMETRY_MODULES = {
    ManifoldKind.CIRCLE: "shared.constant_curvature",
    ManifoldKind.SPHERE2: "shared.constant_curvature",
    ManifoldKind.HYPERBOLIC2: "shared.constant_curvature",
    ManifoldKind.SPD: "shared.spd",
}
_GEOMETRY_CACHE: Dict[ManifoldId, Geometry] = {}


def register_geometry(kind: ManifoldKind):
    """Class decorator registering a Geometry implementation for ``kind``."""

    def _wrap(cls):
        _GEOMETRY_FACTORIES[ManifoldKind(kind)] = cls
        return cls

    return _wrap


def geometry_for(manifold: ManifoldId) -> Geometry:
    cached = _GEOMETRY_CACHE.get(manifold)
    if cached is not None:
        return cached
    if manifold.kind not in _GEOMETRY_FACTORIES:
        importlib.import_module(_GEOMETRY_MODULES[manifold.kind])
    geometry = _GEOMETRY_FACTORIES[manifold.kind](manifold)
    _GEOMETRY_CACHE[manifold] = geometry
    return geometry


# =============================================================================
# PUBLIC OPERATIONS
# =============================================================================

def make_point(manifold: Union[ManifoldId, str], coords: Any) -> ManifoldPoint:
    """Validated point constructor (re-projects drift below 1e-9)."""
    if isinstance(manifold, str):
        manifold = ManifoldId.parse(manifold)
    geometry = geometry_for(manifold)
    return ManifoldPoint(manifold, geometry.project_point(np.asarray(coords, dtype=float)))


def make_tangent(base: ManifoldPoint, vec: Any) -> TangentVector:
    geometry = geometry_for(base.manifold)
    return TangentVector(base, geometry.project_tangent(base.coords, np.asarray(vec, dtype=float)))


def _same_manifold(*points: ManifoldPoint) -> ManifoldId:
    manifold = points[0].manifold
    for p in points[1:]:
        if p.manifold != manifold:
            raise ManifoldMismatchError(f"Manifold mismatch: {manifold.tag} vs {p.manifold.tag}")
    return manifold


def _checked_point(p: ManifoldPoint) -> np.ndarray:
    return geometry_for(p.manifold).project_point(p.coords)


def _checked_tangent(v: TangentVector) -> Tuple[np.ndarray, np.ndarray]:
    base = _checked_point(v.base)
    return base, geometry_for(v.manifold).project_tangent(base, v.vec)


def distance(p: ManifoldPoint, q: ManifoldPoint) -> float:
    manifold = _same_manifold(p, q)
    return geometry_for(manifold).distance(_checked_point(p), _checked_point(q))


def exp_map(v: TangentVector) -> ManifoldPoint:
    geometry = geometry_for(v.manifold)
    base, vec = _checked_tangent(v)
    if v.manifold.kind is ManifoldKind.SPHERE2:
        size = geometry.norm(base, vec)
        if size >= math.pi:
            logger.warning("sphere exp with |v| = %.6g >= pi is past the injectivity radius", size)
    out = geometry.exp(base, vec)
    return ManifoldPoint(v.manifold, geometry.normalize_output(out))


def log_map(p: ManifoldPoint, q: ManifoldPoint) -> TangentVector:
    manifold = _same_manifold(p, q)
    return TangentVector(p, geometry_for(manifold).log(_checked_point(p), _checked_point(q)))


def inner(u: TangentVector, w: TangentVector) -> float:
    if u.base is not w.base and (
        u.manifold != w.manifold or not np.array_equal(u.base.coords, w.base.coords)
    ):
        raise ManifoldMismatchError("Inner product of tangent vectors at different base points")
    base, u_vec = _checked_tangent(u)
    w_vec = geometry_for(w.manifold).project_tangent(base, w.vec)
    return geometry_for(u.manifold).inner(base, u_vec, w_vec)


def norm(v: TangentVector) -> float:
    return v.norm()


# =============================================================================
# POINT SETS
# =============================================================================

@dataclass(frozen=True, eq=False)
class PointSet:
    """A finite ordered collection of points on one manifold, stored as rows."""

    manifold: ManifoldId
    coords: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.coords, dtype=float).reshape(-1, self.manifold.coord_size)
        arr.setflags(write=False)
        object.__setattr__(self, "coords", arr)

    @classmethod
    def from_points(cls, points: Sequence[ManifoldPoint]) -> "PointSet":
        points = list(points)
        if not points:
            raise UsageError("PointSet.from_points needs at least one point (use PointSet.empty)")
        manifold = _same_manifold(*points)
        return cls(manifold, np.stack([p.coords for p in points]))

    @classmethod
    def validated(cls, manifold: ManifoldId, coords: Any) -> "PointSet":
        geometry = geometry_for(manifold)
        rows = np.asarray(coords, dtype=float).reshape(-1, manifold.coord_size)
        return cls(manifold, np.stack([geometry.project_point(r) for r in rows]) if len(rows) else rows)

    @classmethod
    def empty(cls, manifold: ManifoldId) -> "PointSet":
        return cls(manifold, np.empty((0, manifold.coord_size)))

    def __len__(self) -> int:
        return self.coords.shape[0]

    def __getitem__(self, index: int) -> ManifoldPoint:
        return ManifoldPoint(self.manifold, self.coords[index])

    def __iter__(self) -> Iterator[ManifoldPoint]:
        for row in self.coords:
            yield ManifoldPoint(self.manifold, row)

    def subset(self, indices: Iterable[int]) -> "PointSet":
        return PointSet(self.manifold, self.coords[np.asarray(list(indices), dtype=int)])

    @property
    def geometry(self) -> Geometry:
        return geometry_for(self.manifold)


PointsLike = Union[PointSet, Sequence[ManifoldPoint]]


def as_point_set(data: PointsLike, manifold: Optional[ManifoldId] = None) -> PointSet:
    if isinstance(data, PointSet):
        if manifold is not None and data.manifold != manifold:
            raise ManifoldMismatchError(f"Manifold mismatch: {manifold.tag} vs {data.manifold.tag}")
        return data
    points = list(data)
    if not points:
        if manifold is None:
            raise UsageError("Cannot infer the manifold of an empty point list")
        return PointSet.empty(manifold)
    result = PointSet.from_points(points)
    if manifold is not None and result.manifold != manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {manifold.tag} vs {result.manifold.tag}")
    return result


# =============================================================================
# SERIALIZATION
# =============================================================================

def point_to_json(point: ManifoldPoint) -> Dict[str, Any]:
    manifold = point.manifold
    coords = geometry_for(manifold).normalize_output(np.array(point.coords))
    if manifold.kind is ManifoldKind.SPD:
        return {"manifold": "spd", "n": manifold.dim, "entries": [float(v) for v in coords]}
    payload: Dict[str, Any] = {"manifold": manifold.kind.value}
    if manifold.kind is ManifoldKind.EUCLIDEAN:
        payload["d"] = manifold.dim
    payload["coords"] = [float(v) for v in coords]
    return payload


def point_from_json(payload: Dict[str, Any]) -> ManifoldPoint:
    try:
        tag = payload["manifold"]
        if tag == "spd":
            return make_point(ManifoldId.spd(int(payload["n"])), payload["entries"])
        if tag == "euclidean":
            coords = payload["coords"]
            return make_point(ManifoldId.euclidean(int(payload.get("d", len(coords)))), coords)
        return make_point(ManifoldId.parse(tag), payload["coords"])
    except KeyError as exc:
        raise InvalidPointError(f"Point JSON missing field {exc}") from None
