#!/usr/bin/env python3
"""
Distortion decay of optimal quantizers on the sphere.

For uniform samples on S^2 the optimal distortion of n centers behaves like
C * n^(-p/d) with p = 2 and d = 2, so the log-log slope of distortion
against n should be close to -1. For every n the best final distortion over
several seeds is kept and the slope is fitted with numpy.polyfit.

Usage:
    python run_decay_study.py
    python run_decay_study.py --n-values 2,4,8,16,32 --seeds 5 --samples 2000 -o decay.json
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from shared.errors import ClrqError, UsageError
from shared.manifold_core import ManifoldId
from shared.quantization import InitPolicy, StepSchedule, clrq_run
from shared.quantization_io import (
    build_metadata,
    configure_logging,
    default_config_path,
    format_table,
    load_config,
    pick,
    print_banner,
    report_error,
    write_frame_csv,
    write_json,
)
from shared.sampling import sample_uniform

logger = logging.getLogger("manifoldquantization.decay")

THEORETICAL_SLOPE = -1.0


@dataclass
class DecayResult:
    n_values: List[int]
    distortions: Dict[int, List[float]] = field(default_factory=dict)

    @property
    def best(self) -> List[float]:
        return [min(self.distortions[n]) for n in self.n_values]

    @property
    def slope(self) -> float:
        coeffs = np.polyfit(np.log(self.n_values), np.log(self.best), 1)
        return float(coeffs[0])

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "n": self.n_values,
            "best_distortion": self.best,
            "n_times_distortion": [n * d for n, d in zip(self.n_values, self.best)],
        })

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_values": self.n_values,
            "best_distortion": self.best,
            "distortions_by_seed": {str(n): self.distortions[n] for n in self.n_values},
            "slope": self.slope,
            "theoretical_slope": THEORETICAL_SLOPE,
        }


def decay_study(
    n_values: Sequence[int],
    seeds: Sequence[int],
    samples: int = 2000,
    schedule: Optional[StepSchedule] = None,
    epochs: int = 2,
    init: InitPolicy = InitPolicy.KMEANS_PP,
) -> DecayResult:
    """Best final distortion per n over ``seeds`` on uniform S^2 samples."""
    n_values = sorted(int(n) for n in n_values)
    if len(n_values) < 2:
        raise UsageError("the decay fit needs at least two values of n")
    if not seeds:
        raise UsageError("the decay study needs at least one seed")
    result = DecayResult(n_values)
    sphere = ManifoldId.sphere2()
    for n in n_values:
        result.distortions[n] = []
        for seed in seeds:
            data = sample_uniform(sphere, samples, seed)
            report = clrq_run(data, n, schedule, init=init, seed=seed, epochs=epochs)
            result.distortions[n].append(report.final_distortion)
        logger.info("n=%d best distortion %.5f", n, min(result.distortions[n]))
    return result


def parse_ints(text: Any, flag: str) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Log-log slope of quantization distortion on uniform S^2")
    parser.add_argument("--n-values", default=None, help="Comma-separated numbers of centers")
    parser.add_argument("--seeds", type=int, default=None, help="Seeds 0..K-1 per n")
    parser.add_argument("--samples", type=int, default=None, help="Uniform samples per run")
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--schedule", default=None, help="gamma0,b")
    parser.add_argument("--output", "-o", default=None, help="Output JSON")
    parser.add_argument("--csv", default=None, help="Optional n,best_distortion table")
    parser.add_argument("--config", default=None, help="Path to config.yml")
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    try:
        cfg = load_config(args.config or default_config_path(__file__))
        decay_cfg = cfg.get("decay", {})
        output_cfg = cfg.get("output", {})
        n_values = parse_ints(pick(args.n_values, decay_cfg, "n_values", "2,4,8,16,32"), "--n-values")
        seeds = list(range(int(pick(args.seeds, decay_cfg, "seeds", 5))))
        samples = int(pick(args.samples, decay_cfg, "samples", 2000))
        epochs = int(pick(args.epochs, decay_cfg, "epochs", 2))
        schedule = StepSchedule.parse(pick(args.schedule, decay_cfg, "schedule", "0.9,50"))
        output = Path(args.output) if args.output else (
            Path(output_cfg.get("directory") or ".") / output_cfg.get("decay", "decay_study.json"))

        run_config = {
            "subcommand": "decay",
            "manifold": "sphere2",
            "distribution": "uniform",
            "n_values": n_values,
            "seeds": seeds,
            "samples": samples,
            "epochs": epochs,
            "schedule": schedule.to_dict(),
            "init": InitPolicy.KMEANS_PP.value,
        }
        print_banner("DISTORTION DECAY ON S^2", [f"n: {n_values}  Seeds: {len(seeds)}  Samples: {samples}"])

        result = decay_study(n_values, seeds, samples, schedule, epochs)
        write_json(output, {
            "_README": {
                "title": "Distortion Decay Study",
                "description": "Best final CLRQ distortion on uniform S^2 samples for increasing numbers of centers.",
                "fields_explained": {
                    "best_distortion": "Smallest final distortion over the seeds, per n.",
                    "slope": "Least-squares slope of log(best_distortion) against log(n).",
                    "theoretical_slope": "-p/d = -1 for squared distances on a 2-dimensional manifold.",
                },
            },
            "metadata": build_metadata("decay", run_config),
            "result": result.to_dict(),
        })
        if args.csv:
            write_frame_csv(args.csv, result.frame(), {"manifold": "sphere2", "run_config": run_config})
    except ClrqError as exc:
        return report_error(exc)

    rows = [[n, d, n * d] for n, d in zip(result.n_values, result.best)]
    print(format_table(rows, ["n", "best_distortion", "n_times_distortion"]), file=sys.stderr)
    print(f"[ok] Wrote {output} (slope {result.slope:.3f}, theoretical {THEORETICAL_SLOPE:g})", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
