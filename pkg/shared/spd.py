"""
Affine-invariant geometry of symmetric positive-definite matrices.

Metric at Sigma:   <W1, W2>_Sigma = tr(Sigma^-1/2 W1 Sigma^-1 W2 Sigma^-1/2)
Distance:          sqrt(sum_i log^2 lambda_i(Sigma1^-1/2 Sigma2 Sigma1^-1/2))
Exponential:       Sigma^1/2 expm(Sigma^-1/2 W Sigma^-1/2) Sigma^1/2
Logarithm:         Sigma1^1/2 logm(Sigma1^-1/2 Sigma2 Sigma1^-1/2) Sigma1^1/2

All matrix functions go through a symmetric eigendecomposition; 2x2
matrices use the closed-form quadratic.
"""
from __future__ import annotations

import logging
import math
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import InvalidTangentError, SpdDomainError, UsageError
from .manifold_core import (
    MEMBERSHIP_TOL,
    Geometry,
    ManifoldKind,
    register_geometry,
)

logger = logging.getLogger(__name__)

EIGEN_FLOOR = 1e-12
LOEWNER_TOL = 1e-10


class LoewnerRelation(str, Enum):
    LESS_EQUAL = "less_equal"
    GREATER_EQUAL = "greater_equal"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


# =============================================================================
# EIGENDECOMPOSITION
# =============================================================================

def _eigh_2x2(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    a, c = float(s[0, 0]), float(s[1, 1])
    b = 0.5 * (float(s[0, 1]) + float(s[1, 0]))
    mean = 0.5 * (a + c)
    half_diff = 0.5 * (a - c)
    disc = math.hypot(half_diff, b)
    if disc == 0.0:
        return np.array([mean, mean]), np.eye(2)
    det = a * c - b * b
    # the eigenvalue of larger magnitude comes from the sum, the other from det
    if mean >= 0.0:
        big = mean + disc
        small = det / big
    else:
        small = mean - disc
        big = det / small
    phi = 0.5 * math.atan2(b, half_diff)
    cp, sp = math.cos(phi), math.sin(phi)
    # columns: eigenvector of the small eigenvalue, then of the big one
    return np.array([small, big]), np.array([[-sp, cp], [cp, sp]])


def symmetric_eigh(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (as columns)."""
    s = np.asarray(s, dtype=float)
    if s.shape == (2, 2):
        return _eigh_2x2(s)
    return np.linalg.eigh(0.5 * (s + s.T))


def _matrix_function(s: np.ndarray, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    w, u = symmetric_eigh(s)
    out = (u * fn(w)) @ u.T
    return 0.5 * (out + out.T)


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.swapaxes(-1, -2))


# =============================================================================
# VALIDATION
# =============================================================================

def validate_symmetric(w: np.ndarray, what: str = "matrix") -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise UsageError(f"{what} must be square, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise SpdDomainError(f"{what} has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(w))))
    asym = float(np.max(np.abs(w - w.T))) if w.size else 0.0
    if asym > MEMBERSHIP_TOL * scale:
        raise SpdDomainError(f"{what} is not symmetric (max asymmetry {asym:.3g})")
    return 0.5 * (w + w.T)


def validate_spd(s: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    """Symmetrize drift and reject matrices with eigenvalues below EIGEN_FLOOR."""
    s = np.asarray(s, dtype=float)
    if n is not None and s.ndim == 1:
        if s.size != n * n:
            raise SpdDomainError(f"spd({n}) point needs {n * n} entries, got {s.size}")
        s = s.reshape(n, n)
    if n is not None and s.shape != (n, n):
        raise SpdDomainError(f"expected a {n}x{n} matrix, got shape {s.shape}")
    s = validate_symmetric(s, "SPD matrix")
    w, _ = symmetric_eigh(s)
    if float(np.min(w)) < EIGEN_FLOOR:
        raise SpdDomainError(f"SPD matrix has eigenvalue {float(np.min(w)):.3g} below floor {EIGEN_FLOOR}")
    return s


def is_spd(s: np.ndarray) -> bool:
    try:
        validate_spd(s)
    except (SpdDomainError, UsageError):
        return False
    return True


# =============================================================================
# OPERATIONS
# =============================================================================

def spd_sqrt(s: np.ndarray) -> np.ndarray:
    return _matrix_function(validate_spd(s), np.sqrt)


def spd_inv_sqrt(s: np.ndarray) -> np.ndarray:
    return _matrix_function(validate_spd(s), lambda w: 1.0 / np.sqrt(w))


def _sqrt_pair(s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    w, u = symmetric_eigh(s)
    root = np.sqrt(w)
    return (u * root) @ u.T, (u / root) @ u.T


def _whiten(s: np.ndarray, mats: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Express ``mats`` in the eigenbasis of ``s`` scaled by ``s``'s eigenvalues.

    Returns (eigvals of s, eigvecs of s, whitened stack). The whitened matrix
    is congruent to s^-1/2 M s^-1/2 and is formed without the inverse root.
    """
    w, u = symmetric_eigh(s)
    rotated = u.T @ mats @ u
    return w, u, _symmetrize(rotated / np.sqrt(np.outer(w, w)))


def _pencil_eigh(s1: np.ndarray, stack: np.ndarray, vectors: bool = True):
    """Eigenvalues (and eigenvectors) of s1^-1 s2 for each s2 in ``stack``.

    For 2x2 matrices the smaller eigenvalue is taken from det(s2)/det(s1),
    so both orderings of a near-singular pair agree.
    """
    w, u, m = _whiten(s1, stack)
    if s1.shape[0] != 2:
        if vectors:
            lam, v = np.linalg.eigh(m)
            return u, w, lam, v
        return u, w, np.linalg.eigvalsh(m), None
    a, c, b = m[:, 0, 0], m[:, 1, 1], m[:, 0, 1]
    half_diff = 0.5 * (a - c)
    big = 0.5 * (a + c) + np.hypot(half_diff, b)
    det2 = stack[:, 0, 0] * stack[:, 1, 1] - stack[:, 0, 1] * stack[:, 1, 0]
    small = np.minimum(det2 / (w[0] * w[1]) / big, big)
    lam = np.stack([small, big], axis=1)
    if not vectors:
        return u, w, lam, None
    phi = 0.5 * np.arctan2(b, half_diff)
    cp, sp = np.cos(phi), np.sin(phi)
    v = np.stack([np.stack([-sp, cp], axis=1), np.stack([cp, sp], axis=1)], axis=1)
    return u, w, lam, v


def _log_eigs(lam: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(lam, np.finfo(float).tiny))


def spd_inner(s: np.ndarray, w1: np.ndarray, w2: np.ndarray) -> float:
    s = validate_spd(s)
    w1 = validate_symmetric(w1, "tangent matrix")
    w2 = validate_symmetric(w2, "tangent matrix")
    return _inner_unchecked(s, w1, w2)


def _inner_unchecked(s, w1, w2) -> float:
    _, _, pair = _whiten(s, np.stack([w1, w2]))
    return float(np.sum(pair[0] * pair[1]))


def spd_distance(s1: np.ndarray, s2: np.ndarray) -> float:
    return _distance_unchecked(validate_spd(s1), validate_spd(s2))


def _distance_unchecked(s1, s2) -> float:
    _, _, lam, _ = _pencil_eigh(s1, s2[None], vectors=False)
    return float(math.sqrt(float(np.sum(_log_eigs(lam[0]) ** 2))))


def spd_exp(s: np.ndarray, w: np.ndarray) -> np.ndarray:
    return _exp_unchecked(validate_spd(s), validate_symmetric(w, "tangent matrix"))


def _exp_unchecked(s, w) -> np.ndarray:
    ev, u, m = _whiten(s, w[None])
    inner_exp = _matrix_function(m[0], np.exp)
    half = u * np.sqrt(ev)
    return _symmetrize(half @ inner_exp @ half.T)


def spd_log(s1: np.ndarray, s2: np.ndarray) -> np.ndarray:
    return _log_unchecked(validate_spd(s1), validate_spd(s2))


def _logs_unchecked(s1: np.ndarray, stack: np.ndarray) -> np.ndarray:
    u, w, lam, v = _pencil_eigh(s1, stack)
    inner_log = (v * _log_eigs(lam)[:, None, :]) @ v.swapaxes(-1, -2)
    half = u * np.sqrt(w)
    return _symmetrize(half @ inner_log @ half.T)


def _log_unchecked(s1, s2) -> np.ndarray:
    return _logs_unchecked(s1, s2[None])[0]


def loewner_leq(a: np.ndarray, b: np.ndarray, tol: float = LOEWNER_TOL) -> LoewnerRelation:
    """Relation of ``a`` to ``b`` in the Loewner order (a >= b iff a - b is PSD)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise UsageError(f"Loewner comparison of shapes {a.shape} and {b.shape}")
    lam, _ = symmetric_eigh(_symmetrize(a - b))
    if np.all(np.abs(lam) <= tol):
        return LoewnerRelation.EQUAL
    if np.all(lam >= -tol):
        return LoewnerRelation.GREATER_EQUAL
    if np.all(lam <= tol):
        return LoewnerRelation.LESS_EQUAL
    return LoewnerRelation.INCOMPARABLE


# =============================================================================
# GEOMETRY
# =============================================================================

@register_geometry(ManifoldKind.SPD)
class SpdGeometry(Geometry):
    """spd(n) with points and tangents flattened row-major."""

    @property
    def n(self) -> int:
        return self.manifold.dim

    def _mat(self, flat) -> np.ndarray:
        return np.asarray(flat, dtype=float).reshape(self.n, self.n)

    def project_point(self, coords):
        coords = np.asarray(coords, dtype=float)
        return validate_spd(coords.reshape(-1), self.n).ravel()

    def project_tangent(self, base, vec):
        vec = np.asarray(vec, dtype=float).ravel()
        if vec.size != self.n * self.n:
            raise InvalidTangentError(f"spd({self.n}) tangent needs {self.n * self.n} entries")
        try:
            return validate_symmetric(vec.reshape(self.n, self.n), "tangent matrix").ravel()
        except SpdDomainError as exc:
            raise InvalidTangentError(str(exc)) from None

    def distance(self, x, y) -> float:
        return _distance_unchecked(self._mat(x), self._mat(y))

    def distances(self, points, y):
        stack = np.asarray(points, dtype=float).reshape(-1, self.n, self.n)
        _, _, lam, _ = _pencil_eigh(self._mat(y), stack, vectors=False)
        return np.sqrt(np.sum(_log_eigs(lam) ** 2, axis=1))

    def exp(self, x, v):
        return _exp_unchecked(self._mat(x), self._mat(v)).ravel()

    def log(self, x, y):
        return _log_unchecked(self._mat(x), self._mat(y)).ravel()

    def logs(self, x, points):
        stack = np.asarray(points, dtype=float).reshape(-1, self.n, self.n)
        return _logs_unchecked(self._mat(x), stack).reshape(len(stack), -1)

    def inner(self, x, u, w) -> float:
        return _inner_unchecked(self._mat(x), self._mat(u), self._mat(w))

    def tangent_basis(self, x) -> List[np.ndarray]:
        root, _ = _sqrt_pair(self._mat(x))
        basis = []
        for i in range(self.n):
            for j in range(i, self.n):
                e = np.zeros((self.n, self.n))
                if i == j:
                    e[i, i] = 1.0
                else:
                    e[i, j] = e[j, i] = 1.0 / math.sqrt(2.0)
                basis.append((root @ e @ root).ravel())
        return basis

    def initial_mean(self, points):
        return np.mean(np.atleast_2d(points), axis=0)

    def normalize_output(self, coords):
        return _symmetrize(self._mat(coords)).ravel()


__all__ = [
    "EIGEN_FLOOR",
    "LOEWNER_TOL",
    "LoewnerRelation",
    "SpdGeometry",
    "symmetric_eigh",
    "validate_spd",
    "validate_symmetric",
    "is_spd",
    "spd_sqrt",
    "spd_inv_sqrt",
    "spd_inner",
    "spd_distance",
    "spd_exp",
    "spd_log",
    "loewner_leq",
]
