"""
Air-traffic complexity pipeline.

Traffic samples (planar position, velocity) are turned into a field of local
velocity covariance matrices by a Nadaraya-Watson estimate with a truncated
Gaussian kernel. The empirical distribution of those SPD matrices is then
quantized online on spd(2) and the resulting classes are ranked by the
Loewner order (low complexity first).

Provides:
- project_planar / ingest_traffic_csv: CSV ingestion (planar or lat/lon)
- standardize_velocities: centered and reduced velocity components
- KernelConfig / KernelEstimator / nw_estimate / estimate_field
- atm_quantize -> TrafficSummary
- compare_summaries / label_agreement
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.spatial import cKDTree

from shared.cache_manager import FIELD_COLUMNS, CovarianceFieldCache
from shared.errors import (
    CsvFormatError,
    DataError,
    EmptyDataError,
    EmptyKernelError,
    InsufficientDataError,
    UsageError,
)
from shared.manifold_core import ManifoldId, PointSet, geometry_for
from shared.quantization import (
    DISTINCT_TOL,
    Codebook,
    QuantizedMeasure,
    StepSchedule,
    assign_cells,
    update_winner,
)
from shared.quantization_io import read_frame_csv
from shared.sampling import RngSeed, as_seed
from shared.spd import LoewnerRelation, loewner_leq
from shared.transport import distance_matrix

logger = logging.getLogger(__name__)

EARTH_RADIUS_KM = 6371.0
DEFAULT_RIDGE = 1e-8
MAX_SKIP_FRACTION = 0.5
SAMPLE_COLUMNS = ["x", "y", "vx", "vy"]
SPD2 = ManifoldId.spd(2)
METRICS = ("affine", "frobenius")


# ==============================================================================
# INGESTION
# ==============================================================================

def project_planar(lat, lon, ref: Tuple[float, float]) -> Tuple[np.ndarray, np.ndarray]:
    """Stereographic projection onto the tangent plane at ``ref``, in km.

    Accepts scalars or arrays of degrees. A point antipodal to ``ref`` has no
    image and raises DataError.
    """
    phi = np.radians(np.asarray(lat, dtype=float))
    lam = np.radians(np.asarray(lon, dtype=float))
    phi0, lam0 = math.radians(float(ref[0])), math.radians(float(ref[1]))
    if np.any(np.abs(np.degrees(phi)) > 90.0) or abs(float(ref[0])) > 90.0:
        raise DataError("latitudes must lie in [-90, 90]")
    dlam = lam - lam0
    cos_c = math.sin(phi0) * np.sin(phi) + math.cos(phi0) * np.cos(phi) * np.cos(dlam)
    denom = 1.0 + cos_c
    if np.any(denom <= 1e-12):
        raise DataError("point antipodal to the projection reference has no planar image")
    k = 2.0 / denom
    x = EARTH_RADIUS_KM * k * np.cos(phi) * np.sin(dlam)
    y = EARTH_RADIUS_KM * k * (math.cos(phi0) * np.sin(phi) - math.sin(phi0) * np.cos(phi) * np.cos(dlam))
    if np.ndim(x) == 0:
        return float(x), float(y)
    return x, y


@dataclass
class IngestResult:
    samples: pd.DataFrame
    rejected_lines: List[int] = field(default_factory=list)
    source: str = "planar"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": len(self.samples),
            "rejected_rows": len(self.rejected_lines),
            "rejected_lines": self.rejected_lines[:50],
            "coordinates": self.source,
        }


def ingest_traffic_csv(
    path: Union[str, Path],
    ref: Optional[Tuple[float, float]] = None,
    window: Optional[Tuple[float, float]] = None,
) -> IngestResult:
    """Traffic samples from a CSV with x,y,vx,vy (or lat,lon,vx,vy plus ``ref``)."""
    frame, _, first_line = read_frame_csv(path)
    columns = set(frame.columns)
    if {"x", "y", "vx", "vy"} <= columns:
        source = "planar"
        position_cols = ["x", "y"]
    elif {"lat", "lon", "vx", "vy"} <= columns:
        if ref is None:
            raise UsageError(f"{path} has lat/lon columns; a reference point (--ref LAT,LON) is required")
        source = "stereographic"
        position_cols = ["lat", "lon"]
    else:
        raise CsvFormatError(f"{path}: expected columns x,y,vx,vy or lat,lon,vx,vy, got {sorted(columns)}")

    wanted = position_cols + ["vx", "vy"]
    if window is not None:
        if "t" not in columns:
            raise UsageError(f"{path}: --window needs a 't' column")
        wanted.append("t")
    values = frame[wanted].apply(pd.to_numeric, errors="coerce")
    line_numbers = np.arange(len(values)) + first_line
    finite = np.isfinite(values.to_numpy(dtype=float)).all(axis=1)
    rejected = [int(n) for n in line_numbers[~finite]]
    if rejected:
        logger.warning("rejected %d rows with missing or non-finite fields (lines %s)",
                       len(rejected), ", ".join(str(n) for n in rejected[:20]))
    values = values[finite]

    if window is not None:
        start, end = window
        values = values[(values["t"] >= start) & (values["t"] < end)]
        logger.info("window [%g, %g) keeps %d rows", start, end, len(values))

    if values.empty:
        raise EmptyDataError(f"{path}: no valid traffic rows")

    if source == "stereographic":
        x, y = project_planar(values["lat"].to_numpy(), values["lon"].to_numpy(), ref)
        samples = pd.DataFrame({"x": x, "y": y})
    else:
        samples = pd.DataFrame({"x": values["x"].to_numpy(), "y": values["y"].to_numpy()})
    samples["vx"] = values["vx"].to_numpy(dtype=float)
    samples["vy"] = values["vy"].to_numpy(dtype=float)
    if "t" in values.columns:
        samples["t"] = values["t"].to_numpy(dtype=float)
    return IngestResult(samples.reset_index(drop=True), rejected, source)


def standardize_velocities(samples: pd.DataFrame) -> pd.DataFrame:
    """Center and reduce vx, vy (population standard deviation, ddof=0).

    A zero-variance component is only centered, with a warning.
    """
    if len(samples) < 2:
        raise InsufficientDataError("standardizing velocities needs at least 2 samples")
    out = samples.copy()
    for col in ("vx", "vy"):
        values = out[col].to_numpy(dtype=float)
        if _zero_variance(values):
            logger.warning("velocity component %s has zero variance; centered only", col)
            out[col] = np.zeros_like(values)
        else:
            out[col] = (values - values.mean()) / values.std(ddof=0)
    return out


def _zero_variance(values: np.ndarray) -> bool:
    # summation round-off on a constant column must not be amplified
    return float(np.ptp(values)) <= 1e-12 * max(1.0, float(np.max(np.abs(values))))


def degenerate_components(samples: pd.DataFrame) -> List[str]:
    return [col for col in ("vx", "vy") if _zero_variance(samples[col].to_numpy(dtype=float))]


# ==============================================================================
# KERNEL ESTIMATE
# ==============================================================================

@dataclass(frozen=True)
class KernelConfig:
    """Truncated Gaussian kernel: K_h(d) = phi(d / h) / h for d < r."""

    radius: float
    bandwidth: Optional[float] = None

    def __post_init__(self):
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0.0):
            raise UsageError(f"kernel radius must be a positive number, got {self.radius}")
        h = r / 3.0 if self.bandwidth is None else float(self.bandwidth)
        if not (math.isfinite(h) and h > 0.0):
            raise UsageError(f"kernel bandwidth must be a positive number, got {self.bandwidth}")
        if r < h:
            logger.warning("kernel radius r=%g is smaller than the bandwidth h=%g", r, h)
        object.__setattr__(self, "radius", r)
        object.__setattr__(self, "bandwidth", h)

    @property
    def r(self) -> float:
        return self.radius

    @property
    def h(self) -> float:
        return float(self.bandwidth)

    def weights(self, distances: np.ndarray) -> np.ndarray:
        d = np.asarray(distances, dtype=float)
        w = np.exp(-0.5 * (d / self.h) ** 2) / (math.sqrt(2.0 * math.pi) * self.h)
        return np.where(d < self.r, w, 0.0)

    def to_dict(self) -> Dict[str, float]:
        return {"bandwidth": self.h, "radius": self.r}


def _weighted_moments(v: np.ndarray, w: np.ndarray, ridge: float) -> Tuple[np.ndarray, np.ndarray]:
    total = float(np.sum(w))
    if not total > 0.0:
        raise EmptyKernelError("kernel weights sum to zero")
    mean = (w @ v) / total
    centered = v - mean
    cov = (centered * w[:, None]).T @ centered / total
    cov = 0.5 * (cov + cov.T) + ridge * np.eye(2)
    return mean, cov


class KernelEstimator:
    """Nadaraya-Watson mean and covariance of the velocity field."""

    def __init__(self, samples: pd.DataFrame, cfg: KernelConfig, ridge: float = DEFAULT_RIDGE):
        if ridge < 0.0:
            raise UsageError(f"ridge must be >= 0, got {ridge}")
        self.positions = samples[["x", "y"]].to_numpy(dtype=float)
        self.velocities = samples[["vx", "vy"]].to_numpy(dtype=float)
        self.cfg = cfg
        self.ridge = float(ridge)
        self.tree = cKDTree(self.positions)

    def at(self, z: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
        z = np.asarray(z, dtype=float)
        idx = np.asarray(self.tree.query_ball_point(z, self.cfg.r), dtype=int)
        if idx.size:
            d = np.linalg.norm(self.positions[idx] - z, axis=1)
            idx = idx[d < self.cfg.r]
        # a sample always lies in its own kernel, so only foreign query points land here
        if idx.size == 0:
            raise EmptyKernelError(f"no traffic sample within r={self.cfg.r:g} of ({z[0]:g}, {z[1]:g})")
        d = np.linalg.norm(self.positions[idx] - z, axis=1)
        return _weighted_moments(self.velocities[idx], self.cfg.weights(d), self.ridge)

    def field(self, positions: Optional[np.ndarray] = None) -> pd.DataFrame:
        """Mean and covariance at every position; NaN rows where the kernel is empty."""
        positions = self.positions if positions is None else np.asarray(positions, dtype=float)
        out = np.full((len(positions), len(FIELD_COLUMNS)), np.nan)
        for i, z in enumerate(positions):
            try:
                mean, cov = self.at(z)
            except EmptyKernelError:
                continue
            out[i, :2] = mean
            out[i, 2:] = cov.ravel()
        return pd.DataFrame(out, columns=FIELD_COLUMNS)


def nw_estimate(
    samples: pd.DataFrame,
    z: Sequence[float],
    cfg: KernelConfig,
    ridge: float = DEFAULT_RIDGE,
) -> Tuple[np.ndarray, np.ndarray]:
    """Kernel-weighted mean velocity and covariance (plus ridge * I) at ``z``."""
    return KernelEstimator(samples, cfg, ridge).at(z)


def estimate_field(
    samples: pd.DataFrame,
    cfg: KernelConfig,
    ridge: float = DEFAULT_RIDGE,
    cache_dir: Optional[Union[str, Path]] = None,
) -> pd.DataFrame:
    """Covariance field at every sample position, through the parquet cache when given."""
    settings = {**cfg.to_dict(), "ridge": ridge}
    cache = key = None
    if cache_dir:
        cache = CovarianceFieldCache(cache_dir)
        key = cache.key_for(samples, settings)
        cached = cache.load(key, expected_rows=len(samples))
        if cached is not None:
            return cached
    frame = KernelEstimator(samples, cfg, ridge).field()
    if cache is not None:
        cache.save(key, frame, settings)
    return frame


# ==============================================================================
# QUANTIZATION
# ==============================================================================

@dataclass
class ClassOrder:
    """Class ranks of the cells: rank 1 is the lowest complexity."""

    ranks: List[int]
    status: str
    ordered_by: str
    incomparable_pairs: List[Tuple[int, int]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status,
            "ordered_by": self.ordered_by,
            "rank_of_cell": self.ranks,
            "incomparable_pairs": [list(p) for p in self.incomparable_pairs],
        }


def loewner_class_order(codebook: Codebook) -> ClassOrder:
    """Rank centers by trace; the order is reported total when every pair is Loewner-comparable."""
    mats = codebook.centers.reshape(codebook.n, 2, 2)
    incomparable = [
        (i + 1, j + 1)
        for i, j in combinations(range(codebook.n), 2)
        if loewner_leq(mats[i], mats[j]) is LoewnerRelation.INCOMPARABLE
    ]
    traces = np.trace(mats, axis1=1, axis2=2)
    order = np.argsort(traces, kind="stable")
    ranks = np.empty(codebook.n, dtype=int)
    ranks[order] = np.arange(1, codebook.n + 1)
    if incomparable:
        logger.warning("Loewner order of the %d centers is partial (%d incomparable pairs); ranking by trace",
                       codebook.n, len(incomparable))
        return ClassOrder(ranks.tolist(), "partial", "trace", incomparable)
    return ClassOrder(ranks.tolist(), "total", "loewner")


@dataclass
class TrafficSummary:
    measure: QuantizedMeasure
    order: ClassOrder
    cell_labels: np.ndarray
    metric: str = "affine"
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.measure.n

    @property
    def class_labels(self) -> np.ndarray:
        """Loewner class rank of every sample (0 where the kernel was empty)."""
        ranks = np.asarray([0] + self.order.ranks)
        return ranks[self.cell_labels]

    def ordered_measure(self) -> QuantizedMeasure:
        """The measure with centers listed from rank 1 upward."""
        cells = np.argsort(self.order.ranks, kind="stable")
        return QuantizedMeasure(self.measure.codebook.permuted(cells), self.measure.weights[cells])

    def to_dict(self) -> Dict[str, Any]:
        class_counts = np.bincount(self.class_labels, minlength=self.n + 1)[1:]
        cells = np.argsort(self.order.ranks, kind="stable")
        ordered = self.ordered_measure()
        classes = []
        for rank in range(1, self.n + 1):
            classes.append({
                "rank": rank,
                "cell": int(cells[rank - 1]) + 1,
                "weight": float(ordered.weights[rank - 1]),
                "count": int(class_counts[rank - 1]),
                "trace": float(np.trace(ordered.codebook[rank - 1].as_matrix())),
            })
        return {
            "metric": self.metric,
            "n": self.n,
            "quantized_measure": self.measure.to_json(),
            "class_order": self.order.to_dict(),
            "classes": classes,
            "diagnostics": self.diagnostics,
        }


def _field_points(field_frame: pd.DataFrame) -> Tuple[np.ndarray, np.ndarray]:
    cov = field_frame[["s11", "s12", "s21", "s22"]].to_numpy(dtype=float)
    valid = np.isfinite(cov).all(axis=1)
    return cov, valid


def _initial_centers(geometry, cov: np.ndarray, valid_idx: np.ndarray, n: int, rng) -> np.ndarray:
    chosen: List[int] = []
    for idx in rng.permutation(valid_idx):
        if chosen and float(np.min(geometry.distances(cov[chosen], cov[idx]))) <= DISTINCT_TOL:
            continue
        chosen.append(int(idx))
        if len(chosen) == n:
            break
    if len(chosen) < n:
        raise InsufficientDataError(f"covariance field holds fewer than n = {n} distinct matrices")
    return np.array(cov[chosen])


def assign_labels(codebook: Codebook, field_frame: pd.DataFrame) -> np.ndarray:
    """1-based Voronoi cell of every sample's covariance (0 where the kernel was empty)."""
    cov, valid = _field_points(field_frame)
    labels = np.zeros(len(cov), dtype=int)
    if valid.any():
        labels[valid] = assign_cells(codebook, PointSet(codebook.manifold, cov[valid])) + 1
    return labels


def atm_quantize(
    samples: pd.DataFrame,
    n: int = 3,
    cfg: Optional[KernelConfig] = None,
    schedule: Optional[StepSchedule] = None,
    seed: Union[int, RngSeed] = 0,
    *,
    repeat_m: int = 1,
    epochs: int = 1,
    ridge: float = DEFAULT_RIDGE,
    metric: str = "affine",
    standardize: bool = True,
    field_frame: Optional[pd.DataFrame] = None,
    cache_dir: Optional[Union[str, Path]] = None,
) -> TrafficSummary:
    """Quantize the covariance field of a traffic set into ``n`` complexity classes.

    Initial centers are the covariances at n random sample positions; the
    samples are then visited in a seeded random order (redrawn every epoch)
    and the winning center moves along the geodesic of ``metric``
    ("affine": spd(2); "frobenius": straight lines in euclidean(4)).
    """
    if cfg is None:
        raise UsageError("a kernel radius is required")
    if int(n) < 1:
        raise UsageError(f"number of classes must be >= 1, got {n}")
    if metric not in METRICS:
        raise UsageError(f"metric must be one of {METRICS}, got {metric!r}")
    if int(repeat_m) < 1 or int(epochs) < 1:
        raise UsageError("repeat_m and epochs must be >= 1")
    n, repeat_m, epochs = int(n), int(repeat_m), int(epochs)
    if len(samples) < n:
        raise InsufficientDataError(f"{len(samples)} samples for n = {n} classes")
    schedule = schedule or StepSchedule()
    rng_seed = as_seed(seed)

    prepared = standardize_velocities(samples) if standardize else samples
    if field_frame is None:
        field_frame = estimate_field(prepared, cfg, ridge, cache_dir)
    # NaN rows only arrive through a field_frame estimated at other positions
    cov, valid = _field_points(field_frame)
    empty_kernel = int(np.count_nonzero(~valid))
    if empty_kernel:
        logger.warning("%d of %d positions have an empty kernel and are skipped", empty_kernel, len(cov))
    if empty_kernel > MAX_SKIP_FRACTION * len(cov):
        raise EmptyKernelError(
            f"{empty_kernel} of {len(cov)} positions have an empty kernel; increase the radius"
        )

    working = ManifoldId.euclidean(4) if metric == "frobenius" else SPD2
    geometry = geometry_for(working)
    valid_idx = np.flatnonzero(valid)
    centers = _initial_centers(geometry, cov, valid_idx, n, rng_seed.generator("atm-init"))

    order_rng = rng_seed.generator("atm-order")
    t = 0
    for _ in range(epochs):
        for idx in order_rng.permutation(len(cov)):
            if not valid[idx]:
                continue
            update_winner(geometry, centers, cov[idx], schedule.gamma(t // repeat_m + 1))
            t += 1

    if metric == "frobenius":
        centers = 0.5 * (centers + centers.reshape(-1, 2, 2).swapaxes(1, 2).reshape(-1, 4))
    codebook = Codebook(SPD2, centers)
    cell_labels = assign_labels(codebook, field_frame)
    counts = np.bincount(cell_labels[cell_labels > 0] - 1, minlength=n)
    measure = QuantizedMeasure(codebook, counts / float(counts.sum()))
    order = loewner_class_order(codebook)

    diagnostics = {
        "samples": len(samples),
        "steps": t,
        "empty_kernel_skipped": empty_kernel,
        "zero_variance_components": degenerate_components(samples) if standardize else [],
    }
    config = {
        "n": n,
        "kernel": cfg.to_dict(),
        "ridge": ridge,
        "schedule": schedule.to_dict(),
        "repeat_m": repeat_m,
        "epochs": epochs,
        "metric": metric,
        **rng_seed.to_dict(),
    }
    return TrafficSummary(measure, order, cell_labels, metric, diagnostics, config)


# ==============================================================================
# COMPARISON
# ==============================================================================

def compare_summaries(summaries: Sequence[Union[TrafficSummary, QuantizedMeasure]], p: float = 1.0) -> np.ndarray:
    """Pairwise Wasserstein distances between summaries (spd ground metric)."""
    measures = [s.measure if isinstance(s, TrafficSummary) else s for s in summaries]
    for m in measures:
        if m.manifold != SPD2:
            raise DataError(f"traffic summaries must live on spd(2), got {m.manifold.tag}")
    return distance_matrix(measures, p)


def label_agreement(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Fraction of samples that share a class rank in two runs."""
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape:
        raise DataError(f"label vectors differ in length ({a.size} vs {b.size})")
    if a.size == 0:
        raise EmptyDataError("no labels to compare")
    return float(np.mean(a == b))
