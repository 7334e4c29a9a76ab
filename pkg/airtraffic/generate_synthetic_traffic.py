#!/usr/bin/env python3
"""
Synthetic traffic scenarios for the complexity pipeline.

Every scenario lives in a 100 x 100 square (abstract length units) and is a
set of straight tracks flown at constant velocity; sample positions are
drawn uniformly along each track, ``density`` samples per unit length.

Scenarios:
- parallel:        isolated eastbound tracks plus two close pairs flown at
                   different speeds
- crossing:        isolated tracks plus one east/north crossing
- multi_crossing:  a slow and a fast two-way grid (speed x3) plus isolated tracks
- dense_x:         two dense flows of four tracks crossing at right angles

Usage:
    python generate_synthetic_traffic.py --scenario all --seed 7
    python generate_synthetic_traffic.py --scenario crossing --density 1.5 --output-dir out/
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from shared.errors import ClrqError, UsageError
from shared.quantization_io import (
    configure_logging,
    default_config_path,
    load_config,
    pick,
    print_banner,
    report_error,
    write_frame_csv,
)
from shared.sampling import as_seed

logger = logging.getLogger("airtraffic.synthetic")

SIDE = 100.0


@dataclass(frozen=True)
class Track:
    x0: float
    y0: float
    x1: float
    y1: float
    speed: float = 1.0

    @property
    def length(self) -> float:
        return float(np.hypot(self.x1 - self.x0, self.y1 - self.y0))

    @property
    def velocity(self) -> np.ndarray:
        direction = np.array([self.x1 - self.x0, self.y1 - self.y0]) / self.length
        return self.speed * direction


def _east(y: float, x0: float = 0.0, x1: float = SIDE, speed: float = 1.0) -> Track:
    return Track(x0, y, x1, y, speed)


def _north(x: float, y0: float = 0.0, y1: float = SIDE, speed: float = 1.0) -> Track:
    return Track(x, y0, x, y1, speed)


def parallel_tracks() -> List[Track]:
    tracks = [_east(y) for y in (8.0, 22.0, 36.0, 50.0, 64.0)]
    tracks += [_east(78.0), _east(80.5, speed=1.5)]
    tracks += [_east(90.0), _east(92.5, speed=2.5)]
    return tracks


def crossing_tracks() -> List[Track]:
    tracks = [_east(y) for y in (8.0, 20.0, 32.0, 44.0, 56.0)]
    tracks += [_east(80.0), _north(50.0, 68.0, 92.0)]
    return tracks


def _two_way_grid(lo: float, hi: float, spacing: float, speed: float) -> List[Track]:
    tracks = []
    for i, c in enumerate(np.arange(lo, hi + 1e-9, spacing)):
        c = float(c)
        if i % 2 == 0:
            tracks.append(Track(lo, c, hi, c, speed))
            tracks.append(Track(c, lo, c, hi, speed))
        else:
            tracks.append(Track(hi, c, lo, c, speed))
            tracks.append(Track(c, hi, c, lo, speed))
    return tracks


def multi_crossing_tracks() -> List[Track]:
    tracks = _two_way_grid(10.0, 40.0, 2.0, 1.0) + _two_way_grid(60.0, 90.0, 2.0, 3.0)
    tracks += [_east(50.0), _east(2.0, 50.0, SIDE), _north(2.0, 60.0, SIDE)]
    return tracks


def dense_x_tracks() -> List[Track]:
    offsets = (47.0, 49.0, 51.0, 53.0)
    speeds = (1.0, 1.3, 1.0, 1.3)
    tracks = [_east(y, 20.0, 80.0, s) for y, s in zip(offsets, speeds)]
    tracks += [_north(x, 20.0, 80.0, s) for x, s in zip(offsets, speeds)]
    return tracks


SCENARIOS: Dict[str, Callable[[], List[Track]]] = {
    "parallel": parallel_tracks,
    "crossing": crossing_tracks,
    "multi_crossing": multi_crossing_tracks,
    "dense_x": dense_x_tracks,
}

# where the densest interaction happens, for plots and checks
CROSSING_REGIONS = {
    "crossing": (50.0, 80.0),
    "dense_x": (50.0, 50.0),
}


def generate_scenario(name: str, seed: int = 0, density: float = 2.0) -> pd.DataFrame:
    """Samples x, y, vx, vy, t of one scenario (t is the time along the track)."""
    if name not in SCENARIOS:
        raise UsageError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    if not density > 0:
        raise UsageError(f"density must be positive, got {density}")
    rng = as_seed(seed).generator(f"synthetic-{name}")
    blocks = []
    for track in SCENARIOS[name]():
        count = max(1, int(round(track.length * density)))
        u = rng.uniform(0.0, 1.0, size=count)
        vx, vy = track.velocity
        blocks.append(pd.DataFrame({
            "x": track.x0 + u * (track.x1 - track.x0),
            "y": track.y0 + u * (track.y1 - track.y0),
            "vx": np.full(count, vx),
            "vy": np.full(count, vy),
            "t": u * track.length / track.speed,
        }))
    return pd.concat(blocks, ignore_index=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Write synthetic traffic scenarios as CSV")
    parser.add_argument("--scenario", choices=sorted(SCENARIOS) + ["all"], default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--density", type=float, default=None, help="Samples per unit track length")
    parser.add_argument("--output-dir", default=None)
    parser.add_argument("--config", default=None, help="Path to config.yml")
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    try:
        cfg = load_config(args.config or default_config_path(__file__)).get("synthetic", {})
        scenario = pick(args.scenario, cfg, "scenario", "all")
        seed = int(pick(args.seed, cfg, "seed", 0))
        density = float(pick(args.density, cfg, "density", 2.0))
        output_dir = Path(pick(args.output_dir, cfg, "output_dir", "."))
        names = sorted(SCENARIOS) if scenario == "all" else [scenario]

        print_banner("SYNTHETIC TRAFFIC", [f"Scenarios: {', '.join(names)}", f"Seed: {seed}  Density: {density}"])
        for name in names:
            frame = generate_scenario(name, seed, density)
            header = {"scenario": name, "seed": seed, "density": density, "extent": [0.0, SIDE]}
            path = write_frame_csv(output_dir / f"{name}.csv", frame, header)
            logger.info("%s: %d samples -> %s", name, len(frame), path)
    except ClrqError as exc:
        return report_error(exc)

    print(f"[ok] Wrote {len(names)} scenario file(s) to {output_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
