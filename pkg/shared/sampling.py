"""
Random generators for the quantization experiments.

Distributions:
- uniform on the circle and the sphere
- von Mises on the circle (Best-Fisher rejection)
- von Mises-Fisher on S^2 (closed-form inverse CDF of the polar cosine)
- isotropic Gaussian on H^2 (radial rejection at i, moved by a Moebius map)

Every draw comes from a numpy ``Generator(PCG64)`` whose ``SeedSequence`` is
keyed by the user seed and a stream name, so independent stages of a run
(initialization, visit order, sampling) never share a live generator.
"""
from __future__ import annotations

import logging
import math
import zlib
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Union

import numpy as np

from .constant_curvature import (
    TWO_PI,
    MoebiusTransform,
    exp_at_i,
    moebius_apply,
    normalize_angle,
)
from .errors import SamplerEnvelopeError, UsageError
from .manifold_core import ManifoldId, ManifoldKind, PointSet, geometry_for

logger = logging.getLogger(__name__)

PRNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence(seed, spawn_key=(crc32(stream),))"
MIN_ACCEPTANCE_RATE = 0.10


@dataclass(frozen=True)
class RngSeed:
    seed: int

    def __post_init__(self):
        if not isinstance(self.seed, (int, np.integer)) or isinstance(self.seed, bool):
            raise UsageError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise UsageError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))

    def generator(self, stream: str) -> np.random.Generator:
        """Independent generator for a named sub-stream."""
        key = zlib.crc32(stream.encode("utf-8"))
        sequence = np.random.SeedSequence(self.seed, spawn_key=(key,))
        return np.random.Generator(np.random.PCG64(sequence))

    def to_dict(self) -> Dict[str, object]:
        return {"seed": self.seed, "prng": PRNG_ALGORITHM}


def as_seed(seed: Union[int, RngSeed]) -> RngSeed:
    return seed if isinstance(seed, RngSeed) else RngSeed(int(seed))


@dataclass
class AcceptanceStats:
    """Running record of a rejection sampler."""

    sampler: str = ""
    proposed: int = 0
    accepted: int = 0

    @property
    def rate(self) -> float:
        return self.accepted / self.proposed if self.proposed else 1.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "sampler": self.sampler,
            "proposed": self.proposed,
            "accepted": self.accepted,
            "acceptance_rate": round(self.rate, 6),
        }


def _check_count(count: int) -> int:
    if int(count) < 1:
        raise UsageError(f"sample count must be >= 1, got {count}")
    return int(count)


def _rejection(
    count: int,
    propose: Callable[[int], np.ndarray],
    stats: AcceptanceStats,
) -> np.ndarray:
    """Collect ``count`` accepted values from batches returned by ``propose``.

    ``propose(m)`` returns the accepted subset of m proposals.
    """
    accepted = []
    have = 0
    budget = int(count / MIN_ACCEPTANCE_RATE) + 1000
    while have < count:
        batch = max(64, int(1.25 * (count - have) / max(stats.rate, MIN_ACCEPTANCE_RATE)) + 16)
        values = propose(batch)
        stats.proposed += batch
        stats.accepted += len(values)
        accepted.append(values)
        have += len(values)
        if stats.proposed > budget and have < count:
            break
    logger.debug("%s acceptance rate %.3f over %d proposals", stats.sampler, stats.rate, stats.proposed)
    if stats.rate < MIN_ACCEPTANCE_RATE or have < count:
        raise SamplerEnvelopeError(
            f"{stats.sampler}: acceptance rate {stats.rate:.3f} below {MIN_ACCEPTANCE_RATE}"
        )
    return np.concatenate(accepted)[:count]


# =============================================================================
# UNIFORM
# =============================================================================

def uniform_coords(manifold: ManifoldId, count: int, rng: np.random.Generator) -> np.ndarray:
    """Rows of ``count`` uniform points on the circle or the sphere."""
    if manifold.kind is ManifoldKind.CIRCLE:
        return np.asarray(normalize_angle(rng.uniform(0.0, TWO_PI, size=count))).reshape(-1, 1)
    if manifold.kind is ManifoldKind.SPHERE2:
        g = rng.standard_normal((count, 3))
        return g / np.linalg.norm(g, axis=1, keepdims=True)
    raise UsageError(f"uniform sampling is only defined for circle and sphere2, not {manifold.tag}")


def sample_uniform(manifold: ManifoldId, count: int, seed: Union[int, RngSeed]) -> PointSet:
    count = _check_count(count)
    rng = as_seed(seed).generator("uniform")
    return PointSet(manifold, uniform_coords(manifold, count, rng))


# =============================================================================
# VON MISES (CIRCLE)
# =============================================================================

def sample_von_mises(
    center: float,
    kappa: float,
    count: int,
    seed: Union[int, RngSeed],
    stats: Optional[AcceptanceStats] = None,
) -> PointSet:
    """Angles with density proportional to exp(kappa * cos(theta - center))."""
    count = _check_count(count)
    kappa = float(kappa)
    if not kappa > 0 or not math.isfinite(kappa):
        raise UsageError(f"von Mises kappa must be > 0, got {kappa}")
    rng = as_seed(seed).generator("von-mises")
    stats = stats if stats is not None else AcceptanceStats()
    stats.sampler = "von-mises/best-fisher"

    tau = 1.0 + math.sqrt(1.0 + 4.0 * kappa * kappa)
    rho = (tau - math.sqrt(2.0 * tau)) / (2.0 * kappa)
    r = (1.0 + rho * rho) / (2.0 * rho)

    def propose(m: int) -> np.ndarray:
        u1, u2, u3 = rng.random((3, m))
        z = np.cos(math.pi * u1)
        f = np.clip((1.0 + r * z) / (r + z), -1.0, 1.0)
        c = kappa * (r - f)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (c * (2.0 - c) - u2 > 0.0) | (np.log(c / u2) + 1.0 - c >= 0.0)
        return np.sign(u3[ok] - 0.5) * np.arccos(f[ok])

    offsets = _rejection(count, propose, stats)
    theta = normalize_angle(float(center) + offsets)
    return PointSet(ManifoldId.circle(), np.asarray(theta).reshape(-1, 1))


# =============================================================================
# VON MISES-FISHER (SPHERE)
# =============================================================================

def sample_vmf_sphere(
    center,
    kappa: float,
    count: int,
    seed: Union[int, RngSeed],
) -> PointSet:
    count = _check_count(count)
    kappa = float(kappa)
    if not kappa > 0 or not math.isfinite(kappa):
        raise UsageError(f"von Mises-Fisher kappa must be > 0, got {kappa}")
    sphere = geometry_for(ManifoldId.sphere2())
    mu = sphere.project_point(np.asarray(center, dtype=float))
    rng = as_seed(seed).generator("vmf-sphere")

    u = 1.0 - rng.random(count)  # (0, 1]
    w = 1.0 + np.log(u + (1.0 - u) * math.exp(-2.0 * kappa)) / kappa
    w = np.clip(w, -1.0, 1.0)
    phi = rng.uniform(0.0, TWO_PI, size=count)
    e1, e2 = sphere.tangent_basis(mu)
    radial = np.sqrt(np.maximum(0.0, 1.0 - w * w))
    points = (
        w[:, None] * mu
        + (radial * np.cos(phi))[:, None] * e1
        + (radial * np.sin(phi))[:, None] * e2
    )
    points /= np.linalg.norm(points, axis=1, keepdims=True)
    return PointSet(ManifoldId.sphere2(), points)


# =============================================================================
# GAUSSIAN (HYPERBOLIC HALF-PLANE)
# =============================================================================

def _h2_radii(sigma: float, count: int, rng: np.random.Generator, stats: AcceptanceStats) -> np.ndarray:
    """Radii with density proportional to exp(-r^2 / 2 sigma^2) sinh(r) on r > 0."""
    s2 = sigma * sigma
    if s2 < 2.0:
        # Rayleigh envelope; sinh(r)/r <= exp(r^2/6) bounds the ratio by 1
        stats.sampler = "h2-gaussian/rayleigh"
        scale = math.sqrt(3.0 * s2 / (3.0 - s2))

        def propose(m: int) -> np.ndarray:
            r = rng.rayleigh(scale, size=m)
            u = rng.random(m)
            r = np.maximum(r, 1e-300)
            small = r < 1.0
            ratio = np.empty_like(r)
            ratio[small] = np.sinh(r[small]) / r[small] * np.exp(-r[small] ** 2 / 6.0)
            big = ~small
            rb = r[big]
            ratio[big] = np.exp(rb + np.log1p(-np.exp(-2.0 * rb)) - np.log(2.0 * rb) - rb ** 2 / 6.0)
            return r[u < ratio]

    else:
        # folded N(sigma^2, sigma^2) envelope; acceptance tanh(r)
        stats.sampler = "h2-gaussian/folded-normal"

        def propose(m: int) -> np.ndarray:
            r = np.abs(rng.normal(s2, sigma, size=m))
            u = rng.random(m)
            return r[(u < np.tanh(r)) & (r > 0.0)]

    return _rejection(count, propose, stats)


def sample_gaussian_h2(
    center,
    sigma: float,
    count: int,
    seed: Union[int, RngSeed],
    stats: Optional[AcceptanceStats] = None,
) -> PointSet:
    """Isotropic Riemannian Gaussian on the half-plane centered at ``center``."""
    count = _check_count(count)
    sigma = float(sigma)
    if not sigma > 0 or not math.isfinite(sigma):
        raise UsageError(f"H2 Gaussian sigma must be > 0, got {sigma}")
    h2 = geometry_for(ManifoldId.hyperbolic2())
    c = h2.project_point(np.asarray(center, dtype=float))
    rng = as_seed(seed).generator("h2-gaussian")
    stats = stats if stats is not None else AcceptanceStats()

    r = _h2_radii(sigma, count, rng, stats)
    phi = rng.uniform(0.0, TWO_PI, size=count)
    at_i = np.atleast_1d(exp_at_i(r * np.exp(1j * phi)))
    points = moebius_apply(
        MoebiusTransform.translation_to(complex(c[0], c[1])),
        np.column_stack([at_i.real, at_i.imag]),
    )
    # guard against underflow for extreme radii
    points[:, 1] = np.maximum(points[:, 1], np.finfo(float).tiny)
    return PointSet(ManifoldId.hyperbolic2(), points)


def sample_distribution(
    manifold: ManifoldId,
    dist: str,
    count: int,
    seed: Union[int, RngSeed],
    *,
    kappa: Optional[float] = None,
    sigma: Optional[float] = None,
    center=None,
    stats: Optional[AcceptanceStats] = None,
) -> PointSet:
    """Dispatch by distribution name, as used by the ``sample`` command."""
    dist = dist.lower().replace("_", "-")
    if dist == "uniform":
        return sample_uniform(manifold, count, seed)
    if dist in ("von-mises", "vmf"):
        if kappa is None:
            raise UsageError(f"--kappa is required for {dist}")
        if manifold.kind is ManifoldKind.CIRCLE:
            mu = 0.0 if center is None else float(np.ravel(center)[0])
            return sample_von_mises(mu, kappa, count, seed, stats=stats)
        if manifold.kind is ManifoldKind.SPHERE2:
            mu = (0.0, 0.0, 1.0) if center is None else center
            return sample_vmf_sphere(mu, kappa, count, seed)
        raise UsageError(f"{dist} is defined on circle and sphere2, not {manifold.tag}")
    if dist == "gaussian":
        if manifold.kind is not ManifoldKind.HYPERBOLIC2:
            raise UsageError(f"gaussian sampling is defined on hyperbolic2, not {manifold.tag}")
        if sigma is None:
            raise UsageError("--sigma is required for gaussian")
        mu = (0.0, 1.0) if center is None else center
        return sample_gaussian_h2(mu, sigma, count, seed, stats=stats)
    raise UsageError(f"Unknown distribution: {dist}")
