"""
Parquet cache for estimated covariance fields.

Estimating Sigma_hat(z_i) at every traffic sample is the expensive part of a
traffic run; the field depends only on the (standardized) samples and the
kernel settings, so it is cached under a digest of both.

Provides:
- Parquet-based storage of the per-sample mean velocity and covariance
- Metadata sidecar (creation time, sample count, kernel settings)
- Self-healing: a corrupt or mismatching entry is ignored and recomputed

Usage:
    from shared.cache_manager import CovarianceFieldCache

    cache = CovarianceFieldCache(cache_dir="cache")
    key = cache.key_for(samples, kernel_settings)
    field = cache.load(key, expected_rows=len(samples))
    if field is None:
        field = estimate(...)
        cache.save(key, field, kernel_settings)
"""
from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FIELD_COLUMNS = ["m1", "m2", "s11", "s12", "s21", "s22"]
DEFAULT_MAX_AGE_HOURS = 24 * 30


@dataclass
class CacheMetadata:
    """Metadata for one cached covariance field."""

    last_update: datetime
    sample_count: int
    kernel: Dict[str, Any]
    key: str

    def to_dict(self) -> dict:
        return {
            "last_update": self.last_update.isoformat(),
            "sample_count": self.sample_count,
            "kernel": self.kernel,
            "key": self.key,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CacheMetadata":
        return cls(
            last_update=pd.Timestamp(data["last_update"]).to_pydatetime(),
            sample_count=int(data["sample_count"]),
            kernel=dict(data.get("kernel", {})),
            key=str(data["key"]),
        )

    def age_hours(self) -> float:
        return (datetime.now() - self.last_update).total_seconds() / 3600

    def is_valid(self, key: str, expected_rows: int, max_age_hours: float = DEFAULT_MAX_AGE_HOURS) -> bool:
        if self.key != key or self.sample_count != expected_rows:
            return False
        return self.age_hours() <= max_age_hours


class CovarianceFieldCache:
    """Covariance fields keyed by a digest of samples and kernel settings."""

    def __init__(self, cache_dir: Optional[Union[str, Path]] = None):
        self.cache_dir = Path(cache_dir) if cache_dir else Path("cache")
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key_for(samples: pd.DataFrame, kernel: Dict[str, Any]) -> str:
        digest = hashlib.sha256()
        block = np.ascontiguousarray(samples[["x", "y", "vx", "vy"]].to_numpy(dtype=float))
        digest.update(block.tobytes())
        digest.update(json.dumps(kernel, sort_keys=True).encode("utf-8"))
        return digest.hexdigest()[:24]

    def _paths(self, key: str):
        return self.cache_dir / f"covfield_{key}.parquet", self.cache_dir / f"covfield_{key}_metadata.json"

    def load(self, key: str, expected_rows: int) -> Optional[pd.DataFrame]:
        cache_file, metadata_file = self._paths(key)
        if not cache_file.exists() or not metadata_file.exists():
            return None
        try:
            metadata = CacheMetadata.from_dict(json.loads(metadata_file.read_text()))
        except (ValueError, KeyError, TypeError) as exc:
            logger.warning("Could not load cache metadata %s: %s", metadata_file, exc)
            return None
        if not metadata.is_valid(key, expected_rows):
            logger.info("Cache entry %s is stale or mismatched; recomputing", key)
            return None
        try:
            frame = pd.read_parquet(cache_file, engine="pyarrow")
        except (OSError, ValueError) as exc:
            logger.warning("Could not load cache %s: %s", cache_file, exc)
            return None
        if list(frame.columns) != FIELD_COLUMNS or len(frame) != expected_rows:
            logger.warning("Cache %s has an unexpected layout; recomputing", cache_file)
            return None
        logger.info("Loaded covariance field from cache (%d rows, age %.1fh)", len(frame), metadata.age_hours())
        return frame

    def save(self, key: str, frame: pd.DataFrame, kernel: Dict[str, Any]) -> None:
        cache_file, metadata_file = self._paths(key)
        try:
            frame[FIELD_COLUMNS].to_parquet(cache_file, engine="pyarrow", compression="snappy", index=False)
            metadata = CacheMetadata(datetime.now(), len(frame), kernel, key)
            metadata_file.write_text(json.dumps(metadata.to_dict(), indent=2) + "\n")
            logger.info("Saved covariance field cache: %d rows", len(frame))
        except (OSError, ValueError) as exc:
            logger.warning("Could not save cache %s: %s", cache_file, exc)
