"""
Online Riemannian quantization.

Provides:
- Codebook / QuantizedMeasure value types
- Voronoi assignment with lowest-index tie-breaking
- empirical distortion and its quadratic gradient
- Frechet means by Karcher flow
- the competitive-learning step and the full online run (RunReport)

Usage:
    from shared.quantization import clrq_run, StepSchedule
    from shared.sampling import sample_uniform

    data = sample_uniform(ManifoldId.circle(), 4000, seed=1)
    report = clrq_run(data, n=6, repeat_m=10, seed=1)
    print(report.checkpoints[-1].distortion)
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .errors import (
    CutLocusError,
    DataError,
    EmptyDataError,
    InsufficientDataError,
    ManifoldMismatchError,
    UsageError,
)
from .manifold_core import (
    Geometry,
    ManifoldId,
    ManifoldKind,
    ManifoldPoint,
    PointSet,
    PointsLike,
    TangentVector,
    as_point_set,
    geometry_for,
    point_from_json,
    point_to_json,
)
from .sampling import RngSeed, as_seed, uniform_coords

logger = logging.getLogger(__name__)

DISTINCT_TOL = 1e-10
WEIGHT_TOL = 1e-12
TIE_RTOL = 1e-12
SUBSAMPLE_SIZE = 10_000
# passes over a finite dataset
DEFAULT_EPOCHS = 3
SETTLED_FRACTION = 0.1


# =============================================================================
# VALUE TYPES
# =============================================================================

@dataclass(frozen=True, eq=False)
class Codebook:
    """Ordered tuple of pairwise-distinct centers on one manifold (rows of ``centers``)."""

    manifold: ManifoldId
    centers: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array(self.centers, dtype=float).reshape(-1, self.manifold.coord_size)
        arr.setflags(write=False)
        object.__setattr__(self, "centers", arr)
        if arr.shape[0] < 1:
            raise UsageError("A codebook needs at least one center")
        if self.validate:
            geometry = geometry_for(self.manifold)
            for row in arr:
                geometry.project_point(row)
            gap = min_pairwise_distance(geometry, arr)
            if gap <= DISTINCT_TOL:
                raise DataError(f"Codebook centers must be pairwise distinct (min distance {gap:.3g})")

    @classmethod
    def from_points(cls, points: Sequence[ManifoldPoint]) -> "Codebook":
        ps = as_point_set(points)
        return cls(ps.manifold, ps.coords)

    @classmethod
    def trusted(cls, manifold: ManifoldId, centers: np.ndarray) -> "Codebook":
        return cls(manifold, centers, validate=False)

    @property
    def n(self) -> int:
        return self.centers.shape[0]

    @property
    def geometry(self) -> Geometry:
        return geometry_for(self.manifold)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, index: int) -> ManifoldPoint:
        return ManifoldPoint(self.manifold, self.centers[index])

    def points(self) -> List[ManifoldPoint]:
        return [self[i] for i in range(self.n)]

    def permuted(self, order: Sequence[int]) -> "Codebook":
        return Codebook.trusted(self.manifold, self.centers[np.asarray(order, dtype=int)])

    def to_json(self) -> List[Dict[str, Any]]:
        return [point_to_json(p) for p in self.points()]


def min_pairwise_distance(geometry: Geometry, centers: np.ndarray) -> float:
    if len(centers) < 2:
        return math.inf
    gaps = [float(np.min(geometry.distances(centers[i + 1:], centers[i]))) for i in range(len(centers) - 1)]
    return min(gaps)


@dataclass(frozen=True, eq=False)
class QuantizedMeasure:
    """Discrete measure: each center carries the mass of its Voronoi cell."""

    codebook: Codebook
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).ravel()
        if w.size != self.codebook.n:
            raise DataError(f"{w.size} weights for {self.codebook.n} centers")
        if np.any(~np.isfinite(w)) or np.any(w < 0.0):
            raise DataError("Quantized measure weights must be finite and nonnegative")
        total = math.fsum(w)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DataError(f"Quantized measure weights sum to {total!r}, expected 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def manifold(self) -> ManifoldId:
        return self.codebook.manifold

    @property
    def n(self) -> int:
        return self.codebook.n

    def to_json(self) -> Dict[str, Any]:
        return {
            "manifold": self.manifold.tag,
            "centers": self.codebook.to_json(),
            "weights": [float(v) for v in self.weights],
        }

    @classmethod
    def from_json(cls, payload: Dict[str, Any]) -> "QuantizedMeasure":
        try:
            points = [point_from_json(p) for p in payload["centers"]]
            weights = np.asarray(payload["weights"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise DataError(f"Malformed quantized measure: {exc}") from None
        if not points:
            raise DataError("Quantized measure has no centers")
        # renormalize JSON round-off only
        total = math.fsum(weights)
        if abs(total - 1.0) < 1e-9:
            weights = weights / total
        return cls(Codebook.from_points(points), weights)


@dataclass(frozen=True)
class StepSchedule:
    """Step sizes gamma_k = gamma0 * b / (b + k), k >= 1."""

    gamma0: float = 0.9
    b: float = 50.0

    def __post_init__(self):
        if not (0.0 < float(self.gamma0) < 1.0):
            raise UsageError(f"schedule gamma0 must lie in (0, 1), got {self.gamma0}")
        if not (float(self.b) > 0.0 and math.isfinite(float(self.b))):
            raise UsageError(f"schedule b must be a positive real, got {self.b}")
        object.__setattr__(self, "gamma0", float(self.gamma0))
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def parse(cls, text: str) -> "StepSchedule":
        """Parse ``"gamma0,b"``."""
        try:
            gamma0, b = (float(v) for v in str(text).split(","))
        except ValueError:
            raise UsageError(f"--schedule expects 'gamma0,b', got {text!r}") from None
        return cls(gamma0, b)

    def gamma(self, k: int) -> float:
        if k < 1:
            raise UsageError(f"step index must be >= 1, got {k}")
        return self.gamma0 * self.b / (self.b + k)

    def to_dict(self) -> Dict[str, Any]:
        return {"rule": "gamma0 * b / (b + k)", "gamma0": self.gamma0, "b": self.b}


class InitPolicy(str, Enum):
    PREFIX = "prefix"
    KMEANS_PP = "kmeans++"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class EvaluationPolicy:
    """Which data checkpoints evaluate the distortion on."""

    mode: str = "auto"
    memory_budget_mb: float = 256.0
    subsample_size: int = SUBSAMPLE_SIZE

    def __post_init__(self):
        if self.mode not in ("auto", "full", "subsample"):
            raise UsageError(f"evaluation mode must be auto, full or subsample, got {self.mode!r}")

    def select(self, data: PointSet, rng: np.random.Generator) -> PointSet:
        mode = self.mode
        if mode == "auto":
            nbytes = len(data) * data.manifold.coord_size * 8
            mode = "full" if nbytes <= self.memory_budget_mb * 2 ** 20 else "subsample"
        if mode == "full" or len(data) <= self.subsample_size:
            return data
        idx = np.sort(rng.choice(len(data), size=self.subsample_size, replace=False))
        return data.subset(idx)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "memory_budget_mb": self.memory_budget_mb,
            "subsample_size": self.subsample_size,
        }


@dataclass
class Checkpoint:
    iteration: int
    distortion: float
    w1: Optional[float] = None
    centers: Optional[np.ndarray] = None

    def to_dict(self, manifold: ManifoldId) -> Dict[str, Any]:
        out: Dict[str, Any] = {"k": self.iteration, "distortion": self.distortion}
        if self.w1 is not None:
            out["w1"] = self.w1
        if self.centers is not None:
            out["centers"] = Codebook.trusted(manifold, self.centers).to_json()
        return out


@dataclass
class RunReport:
    manifold: ManifoldId
    checkpoints: List[Checkpoint]
    codebook: Codebook
    measure: QuantizedMeasure
    metadata: Dict[str, Any] = field(default_factory=dict)
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def final_distortion(self) -> float:
        return self.checkpoints[-1].distortion

    def trace(self) -> List[Dict[str, Any]]:
        rows = []
        for cp in self.checkpoints:
            row: Dict[str, Any] = {"k": cp.iteration, "distortion": cp.distortion}
            if cp.w1 is not None:
                row["w1"] = cp.w1
            rows.append(row)
        return rows

    def distortion_trend(self) -> Dict[str, Any]:
        """Convergence check on the checkpointed distortion.

        The run counts as settled when the final distortion does not exceed
        the initial one and the range over the last quarter of iterations is
        below ``SETTLED_FRACTION`` of the full range.
        """
        ks = np.array([cp.iteration for cp in self.checkpoints])
        values = np.array([cp.distortion for cp in self.checkpoints])
        total_range = float(values.max() - values.min())
        tail = values[ks >= 0.75 * ks[-1]]
        tail_range = float(tail.max() - tail.min())
        decreased = bool(values[-1] <= values[0])
        return {
            "decreased": decreased,
            "total_range": total_range,
            "last_quarter_range": tail_range,
            "settled": decreased and tail_range <= SETTLED_FRACTION * total_range,
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "metadata": self.metadata,
            "checkpoints": [cp.to_dict(self.manifold) for cp in self.checkpoints],
            "quantized_measure": self.measure.to_json(),
            "diagnostics": self.diagnostics,
        }


# =============================================================================
# VORONOI CELLS AND DISTORTION
# =============================================================================

def _check_manifold(codebook: Codebook, data: PointSet) -> None:
    if data.manifold != codebook.manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {codebook.manifold.tag} vs {data.manifold.tag}")


def _nearest(distances: np.ndarray) -> np.ndarray:
    """Row-wise nearest column; near-equal distances resolve to the lowest index."""
    distances = np.atleast_2d(distances)
    dmin = distances.min(axis=1, keepdims=True)
    tied = distances <= dmin * (1.0 + TIE_RTOL) + 1e-300
    return np.argmax(tied, axis=1)


def assign_cells(codebook: Codebook, data: PointsLike) -> np.ndarray:
    """Zero-based Voronoi cell of every data point."""
    ps = as_point_set(data, codebook.manifold)
    _check_manifold(codebook, ps)
    if len(ps) == 0:
        return np.empty(0, dtype=int)
    dmat = codebook.geometry.distance_matrix(ps.coords, codebook.centers)
    return _nearest(dmat)


def voronoi_assign(codebook: Codebook, x: ManifoldPoint) -> int:
    """Cell number in 1..n of ``x`` (ties go to the lowest number)."""
    if x.manifold != codebook.manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {codebook.manifold.tag} vs {x.manifold.tag}")
    d = codebook.geometry.distances(codebook.centers, x.coords)
    return int(_nearest(d[None, :])[0]) + 1


def _nonempty(data: PointsLike, codebook: Codebook) -> PointSet:
    ps = as_point_set(data, codebook.manifold)
    if len(ps) == 0:
        raise EmptyDataError("Empty dataset")
    return ps


def empirical_distortion(codebook: Codebook, data: PointsLike, p: float = 2.0) -> float:
    """Mean over the data of the p-th power of the distance to the nearest center."""
    if not p >= 1.0:
        raise UsageError(f"distortion exponent p must be >= 1, got {p}")
    ps = _nonempty(data, codebook)
    dmat = codebook.geometry.distance_matrix(ps.coords, codebook.centers)
    return float(np.mean(dmat.min(axis=1) ** p))


def distortion_gradient(codebook: Codebook, data: PointsLike, p: float = 2.0) -> List[TangentVector]:
    """Quadratic distortion gradient: -(2/N) sum of log_{a_i}(x) over cell i."""
    if p != 2:
        raise UsageError("distortion_gradient is only defined for p = 2")
    ps = _nonempty(data, codebook)
    geometry = codebook.geometry
    cells = assign_cells(codebook, ps)
    n_total = len(ps)
    grads = []
    for i in range(codebook.n):
        members = ps.coords[cells == i]
        base = codebook[i]
        if len(members) == 0:
            grads.append(TangentVector(base, np.zeros(codebook.manifold.coord_size)))
            continue
        total = geometry.logs(codebook.centers[i], members).sum(axis=0)
        grads.append(TangentVector(base, -2.0 * total / n_total))
    return grads


def gradient_norm(grads: Iterable[TangentVector]) -> float:
    return float(math.sqrt(sum(g.norm() ** 2 for g in grads)))


def quantized_measure(codebook: Codebook, data: PointsLike) -> QuantizedMeasure:
    ps = _nonempty(data, codebook)
    cells = assign_cells(codebook, ps)
    counts = np.bincount(cells, minlength=codebook.n)
    return QuantizedMeasure(codebook, counts / float(len(ps)))


def empirical_measure(data: PointsLike, merge_tol: float = DISTINCT_TOL) -> QuantizedMeasure:
    """Uniform measure on the data; atoms closer than ``merge_tol`` are merged."""
    ps = as_point_set(data)
    if len(ps) == 0:
        raise EmptyDataError("Empty dataset")
    geometry = ps.geometry
    atoms: List[np.ndarray] = []
    counts: List[int] = []
    kept = np.empty((0, ps.manifold.coord_size))
    for row in ps.coords:
        if len(atoms):
            d = geometry.distances(kept, row)
            j = int(np.argmin(d))
            if d[j] <= merge_tol:
                counts[j] += 1
                continue
        atoms.append(row)
        counts.append(1)
        kept = np.vstack([kept, row])
    weights = np.asarray(counts, dtype=float) / float(len(ps))
    return QuantizedMeasure(Codebook.trusted(ps.manifold, np.asarray(atoms)), weights)


# =============================================================================
# FRECHET MEAN
# =============================================================================

@dataclass
class KarcherResult:
    point: ManifoldPoint
    gradient_norm: float
    iterations: int
    converged: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mean": point_to_json(self.point),
            "gradient_norm": self.gradient_norm,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def karcher_mean(data: PointsLike, tol: float = 1e-9, max_iter: int = 200) -> KarcherResult:
    """Frechet mean by the fixed-point flow x <- exp_x(mean of log_x(x_i))."""
    ps = as_point_set(data)
    if len(ps) == 0:
        raise EmptyDataError("karcher_mean needs at least one point")
    geometry = ps.geometry
    x = geometry.normalize_output(geometry.initial_mean(ps.coords))
    gnorm = math.inf
    iterations = 0
    for iterations in range(max_iter + 1):
        step = geometry.logs(x, ps.coords).mean(axis=0)
        gnorm = geometry.norm(x, step)
        if gnorm < tol or iterations == max_iter:
            break
        x = geometry.normalize_output(geometry.exp(x, step))
    converged = gnorm < tol
    if not converged:
        logger.warning("Karcher flow stopped after %d iterations (gradient norm %.3g)", max_iter, gnorm)
    return KarcherResult(ManifoldPoint(ps.manifold, x), float(gnorm), iterations, converged)


# =============================================================================
# COMPETITIVE LEARNING
# =============================================================================

def _check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 0.0 < gamma < 1.0:
        raise UsageError(f"step size must lie in (0, 1), got {gamma}")
    return gamma


def update_winner(geometry: Geometry, centers: np.ndarray, x: np.ndarray, gamma: float) -> int:
    """Move the winning row of ``centers`` (in place) toward ``x``; returns its index."""
    d = geometry.distances(centers, x)
    i = int(_nearest(d[None, :])[0])
    v = geometry.log(centers[i], x)
    centers[i] = geometry.normalize_output(geometry.exp(centers[i], gamma * v))
    return i


def clrq_step(codebook: Codebook, x: ManifoldPoint, gamma: float) -> Codebook:
    """One competitive-learning update: only the nearest center moves, by ``gamma``."""
    gamma = _check_gamma(gamma)
    if x.manifold != codebook.manifold:
        raise ManifoldMismatchError(f"Manifold mismatch: {codebook.manifold.tag} vs {x.manifold.tag}")
    centers = np.array(codebook.centers)
    update_winner(codebook.geometry, centers, x.coords, gamma)
    return Codebook.trusted(codebook.manifold, centers)


def _distinct_indices(
    geometry: Geometry,
    coords: np.ndarray,
    order: Iterable[int],
    n: int,
    chosen: Optional[List[int]] = None,
) -> List[int]:
    chosen = list(chosen or [])
    for idx in order:
        if len(chosen) >= n:
            break
        if chosen:
            d = geometry.distances(coords[chosen], coords[idx])
            if float(np.min(d)) <= DISTINCT_TOL:
                continue
        chosen.append(int(idx))
    return chosen


def _kmeans_pp(geometry: Geometry, coords: np.ndarray, n: int, rng: np.random.Generator) -> List[int]:
    first = int(rng.integers(len(coords)))
    chosen = [first]
    nearest = geometry.distances(coords, coords[first]) ** 2
    while len(chosen) < n:
        weights = np.where(nearest > DISTINCT_TOL ** 2, nearest, 0.0)
        total = float(weights.sum())
        if total <= 0.0:
            break
        idx = int(rng.choice(len(coords), p=weights / total))
        chosen.append(idx)
        nearest = np.minimum(nearest, geometry.distances(coords, coords[idx]) ** 2)
    return chosen


def initial_codebook(
    data: PointSet,
    n: int,
    policy: InitPolicy,
    rng: np.random.Generator,
    prefix_size: Optional[int] = None,
) -> Codebook:
    """Initial centers drawn according to ``policy``."""
    geometry = data.geometry
    policy = InitPolicy(policy)
    if policy is InitPolicy.UNIFORM:
        centers = uniform_coords(data.manifold, n, rng)
        return Codebook(data.manifold, centers)

    size = len(data) if prefix_size is None else max(n, min(int(prefix_size), len(data)))
    prefix = data.coords[:size]
    if policy is InitPolicy.KMEANS_PP:
        chosen = _kmeans_pp(geometry, prefix, n, rng)
    else:
        chosen = _distinct_indices(geometry, prefix, rng.permutation(size), n)
    if len(chosen) < n and size < len(data):
        logger.debug("prefix of %d observations holds fewer than %d distinct points; widening", size, n)
        rest = size + rng.permutation(len(data) - size)
        chosen = _distinct_indices(geometry, data.coords, rest, n, chosen)
    if len(chosen) < n:
        raise InsufficientDataError(f"Data holds fewer than n = {n} distinct points")
    return Codebook(data.manifold, data.coords[chosen])


def clrq_run(
    data: PointsLike,
    n: int,
    schedule: Optional[StepSchedule] = None,
    repeat_m: int = 1,
    init: Union[InitPolicy, str] = InitPolicy.PREFIX,
    checkpoint_every: Optional[int] = None,
    seed: Union[int, RngSeed] = 0,
    *,
    epochs: int = DEFAULT_EPOCHS,
    initial: Optional[Codebook] = None,
    prefix_size: Optional[int] = None,
    evaluation: Optional[EvaluationPolicy] = None,
    eval_data: Optional[PointsLike] = None,
    distortion_p: float = 2.0,
    trace_w1: bool = False,
    record_centers: bool = False,
    snapshot_steps: Optional[Iterable[int]] = None,
) -> RunReport:
    """Competitive Learning Riemannian Quantization over a finite stream.

    Observations are processed in order (cycled ``epochs`` times). The step
    size gamma_k with k = t // repeat_m + 1 is held for ``repeat_m``
    consecutive observations. Checkpoints are taken before the first step,
    every ``checkpoint_every`` observations, at ``snapshot_steps`` and at the
    end; each evaluates the distortion on the evaluation set and, with
    ``trace_w1`` on the circle, the W1 distance between the current quantized
    measure and the empirical measure of the data.
    """
    ps = as_point_set(data)
    if len(ps) == 0:
        raise EmptyDataError("clrq_run needs a nonempty data stream")
    if int(n) < 1:
        raise UsageError(f"number of centers must be >= 1, got {n}")
    if int(repeat_m) < 1:
        raise UsageError(f"repeat_m must be >= 1, got {repeat_m}")
    if int(epochs) < 1:
        raise UsageError(f"epochs must be >= 1, got {epochs}")
    n, repeat_m, epochs = int(n), int(repeat_m), int(epochs)
    schedule = schedule or StepSchedule()
    evaluation = evaluation or EvaluationPolicy()
    rng_seed = as_seed(seed)
    geometry = ps.geometry
    manifold = ps.manifold
    if trace_w1 and manifold.kind is not ManifoldKind.CIRCLE:
        raise UsageError("the W1 trace is only available on the circle")

    if initial is not None:
        if initial.manifold != manifold:
            raise ManifoldMismatchError(f"Initial codebook on {initial.manifold.tag}, data on {manifold.tag}")
        if initial.n != n:
            raise UsageError(f"Initial codebook has {initial.n} centers, expected {n}")
        codebook = initial
        init_label = "given"
    else:
        codebook = initial_codebook(ps, n, InitPolicy(init), rng_seed.generator("init"), prefix_size)
        init_label = InitPolicy(init).value

    if eval_data is not None:
        eval_set = as_point_set(eval_data, manifold)
    else:
        eval_set = evaluation.select(ps, rng_seed.generator("evaluation"))

    total = epochs * len(ps)
    every = int(checkpoint_every) if checkpoint_every else max(1, total // 20)
    if every < 1:
        raise UsageError(f"checkpoint_every must be >= 1, got {checkpoint_every}")
    snapshots = {int(s) for s in (snapshot_steps or []) if 0 <= int(s) <= total}

    empirical = None
    if trace_w1:
        from .transport import circle_w1

        empirical = empirical_measure(ps)

    centers = np.array(codebook.centers)
    checkpoints: List[Checkpoint] = []

    def _checkpoint(k: int) -> None:
        current = Codebook.trusted(manifold, centers.copy())
        w1 = None
        if empirical is not None:
            w1 = circle_w1(quantized_measure(current, ps), empirical)
        keep = record_centers or k in snapshots
        checkpoints.append(
            Checkpoint(
                iteration=k,
                distortion=empirical_distortion(current, eval_set, distortion_p),
                w1=w1,
                centers=current.centers.copy() if keep else None,
            )
        )
        logger.debug("checkpoint k=%d distortion=%.6g", k, checkpoints[-1].distortion)

    _checkpoint(0)
    cut_locus_skips = 0
    for t in range(total):
        gamma = schedule.gamma(t // repeat_m + 1)
        try:
            update_winner(geometry, centers, ps.coords[t % len(ps)], gamma)
        except CutLocusError:
            cut_locus_skips += 1
        k = t + 1
        if k % every == 0 or k in snapshots or k == total:
            _checkpoint(k)

    if cut_locus_skips:
        logger.warning("skipped %d steps at the cut locus", cut_locus_skips)

    final = Codebook.trusted(manifold, centers)
    measure = quantized_measure(final, ps)
    metadata = {
        "manifold": manifold.tag,
        "n": n,
        "schedule": schedule.to_dict(),
        "repeat_m": repeat_m,
        "epochs": epochs,
        "init_policy": init_label,
        "prefix_size": prefix_size,
        "checkpoint_every": every,
        "observations": total,
        "distortion_exponent": distortion_p,
        "evaluation": evaluation.to_dict() if eval_data is None else {"mode": "explicit"},
        "evaluation_size": len(eval_set),
        **rng_seed.to_dict(),
    }
    diagnostics = {
        "cut_locus_skips": cut_locus_skips,
        "steps_applied": total - cut_locus_skips,
        "min_center_separation": min_pairwise_distance(geometry, final.centers)
        if final.n > 1
        else None,
    }
    report = RunReport(manifold, checkpoints, final, measure, metadata, diagnostics)
    report.diagnostics["distortion_trend"] = report.distortion_trend()
    if not report.diagnostics["distortion_trend"]["settled"]:
        logger.info("distortion has not settled over the last quarter of the run")
    return report


__all__ = [
    "Codebook",
    "QuantizedMeasure",
    "DEFAULT_EPOCHS",
    "SETTLED_FRACTION",
    "StepSchedule",
    "InitPolicy",
    "EvaluationPolicy",
    "Checkpoint",
    "RunReport",
    "KarcherResult",
    "assign_cells",
    "voronoi_assign",
    "empirical_distortion",
    "distortion_gradient",
    "gradient_norm",
    "quantized_measure",
    "empirical_measure",
    "karcher_mean",
    "clrq_step",
    "update_winner",
    "clrq_run",
    "initial_codebook",
    "min_pairwise_distance",
]
