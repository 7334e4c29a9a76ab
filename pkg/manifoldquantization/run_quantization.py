#!/usr/bin/env python3
"""
Run Competitive Learning Riemannian Quantization on a sample.

Reads a points CSV (as written by generate_samples.py), runs the online
quantizer and writes a report with the distortion at every checkpoint, the
final codebook and the quantized measure (centers and Voronoi cell weights).

Outputs:
- report JSON (_README, metadata with the full run config, report)
- optional trace CSV: k,distortion[,w1]
- optional SVG line plot of the trace

Usage:
    python run_quantization.py --input vm.csv --n 5 --repeat-m 50 --trace-w1 --trace-csv trace.csv
    python run_quantization.py --input s2.csv --n 8 --init kmeans++ --snapshot-steps 100,200
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from shared.errors import ClrqError, UsageError
from shared.manifold_core import ManifoldId
from shared.quantization import DEFAULT_EPOCHS, EvaluationPolicy, InitPolicy, StepSchedule, clrq_run
from shared.quantization_io import (
    build_metadata,
    configure_logging,
    default_config_path,
    load_config,
    pick,
    print_banner,
    read_points_csv,
    report_error,
    write_frame_csv,
    write_json,
    write_text,
)
from shared.sampling import as_seed
from shared.svg_plot import line_plot

logger = logging.getLogger("manifoldquantization")


def parse_steps(text: Any) -> List[int]:
    if not text:
        return []
    if isinstance(text, (list, tuple)):
        text = ",".join(str(v) for v in text)
    try:
        steps = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--snapshot-steps expects comma-separated integers, got {text!r}") from None
    if any(s < 0 for s in steps):
        raise UsageError("--snapshot-steps must be nonnegative")
    return steps


def build_readme_section() -> Dict[str, Any]:
    return {
        "title": "CLRQ Quantization Report",
        "description": "Online quantization of a sample on a Riemannian manifold; only the nearest center moves toward each observation.",
        "fields_explained": {
            "checkpoints": "k = observations processed; distortion = mean squared geodesic distance to the nearest center; w1 = circle Wasserstein-1 distance to the empirical measure (--trace-w1).",
            "quantized_measure": "Final centers and the fraction of the sample in each Voronoi cell (ties go to the lowest index).",
            "diagnostics": "Steps skipped at the cut locus, steps applied and the smallest distance between two final centers.",
        },
        "step_size": "gamma_k = gamma0 * b / (b + k), with k = floor(t / m) + 1 held for m consecutive observations.",
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Quantize a sample on a manifold with CLRQ")
    parser.add_argument("--input", "-i", required=True, help="Points CSV")
    parser.add_argument("--manifold", "-m", default=None, help="Expected manifold (default: from the CSV header)")
    parser.add_argument("--n", type=int, default=None, help="Number of centers")
    parser.add_argument("--schedule", default=None, help="gamma0,b")
    parser.add_argument("--repeat-m", type=int, default=None, help="Observations per step size")
    parser.add_argument("--init", choices=[p.value for p in InitPolicy], default=None)
    parser.add_argument("--epochs", type=int, default=None)
    parser.add_argument("--checkpoint-every", type=int, default=None)
    parser.add_argument("--snapshot-steps", default=None, help="Steps whose codebooks are recorded, e.g. 100,200")
    parser.add_argument("--record-centers", action="store_true", help="Record the codebook at every checkpoint")
    parser.add_argument("--trace-w1", action="store_true", help="Circle only: W1 to the empirical measure")
    parser.add_argument("--eval-mode", choices=["auto", "full", "subsample"], default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--output", "-o", default=None, help="Report JSON")
    parser.add_argument("--trace-csv", default=None)
    parser.add_argument("--svg", default=None, help="Line plot of the trace")
    parser.add_argument("--config", default=None, help="Path to config.yml")
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    try:
        cfg = load_config(args.config or default_config_path(__file__))
        run_cfg = cfg.get("quantize", {})
        eval_cfg = cfg.get("evaluation", {})
        output_cfg = cfg.get("output", {})

        n = int(pick(args.n, run_cfg, "n", 6))
        schedule = StepSchedule.parse(pick(args.schedule, run_cfg, "schedule", "0.9,50"))
        repeat_m = int(pick(args.repeat_m, run_cfg, "repeat_m", 1))
        init_name = pick(args.init, run_cfg, "init", "prefix")
        if init_name not in [p.value for p in InitPolicy]:
            raise UsageError(f"unknown init policy {init_name!r}")
        init = InitPolicy(init_name)
        epochs = int(pick(args.epochs, run_cfg, "epochs", DEFAULT_EPOCHS))
        every = pick(args.checkpoint_every, run_cfg, "checkpoint_every", None)
        seed = as_seed(int(pick(args.seed, run_cfg, "seed", 0)))
        snapshots = parse_steps(pick(args.snapshot_steps, run_cfg, "snapshot_steps", None))
        evaluation = EvaluationPolicy(
            mode=str(pick(args.eval_mode, eval_cfg, "mode", "auto")),
            memory_budget_mb=float(pick(None, eval_cfg, "memory_budget_mb", 256.0)),
        )
        expected = ManifoldId.parse(args.manifold) if args.manifold else None
        output = Path(args.output) if args.output else (
            Path(output_cfg.get("directory") or ".") / output_cfg.get("report", "quantization_report.json"))

        points = read_points_csv(args.input, expected)
        run_config = {
            "subcommand": "quantize",
            "input": str(args.input),
            "manifold": points.manifold.tag,
            "n": n,
            "schedule": schedule.to_dict(),
            "repeat_m": repeat_m,
            "init": init.value,
            "epochs": epochs,
            "checkpoint_every": every,
            "snapshot_steps": snapshots,
            "trace_w1": bool(args.trace_w1),
            "evaluation": evaluation.to_dict(),
            **seed.to_dict(),
        }
        print_banner("CLRQ QUANTIZATION", [
            f"Input: {args.input} ({len(points)} points on {points.manifold.tag})",
            f"Centers: {n}  Schedule: {schedule.gamma0:g},{schedule.b:g}  m: {repeat_m}  Seed: {seed.seed}",
        ])

        report = clrq_run(
            points, n, schedule, repeat_m, init,
            checkpoint_every=int(every) if every else None,
            seed=seed,
            epochs=epochs,
            evaluation=evaluation,
            trace_w1=args.trace_w1,
            record_centers=args.record_centers,
            snapshot_steps=snapshots,
        )

        write_json(output, {
            "_README": build_readme_section(),
            "metadata": build_metadata("quantize", run_config),
            "report": report.to_dict(),
        })
        trace = pd.DataFrame(report.trace())
        if args.trace_csv:
            write_frame_csv(args.trace_csv, trace, {"manifold": points.manifold.tag, "run_config": run_config})
        if args.svg:
            series = {"distortion": trace["distortion"].tolist()}
            if "w1" in trace:
                series["w1"] = trace["w1"].tolist()
            svg = line_plot(trace["k"].tolist(), series, title=f"CLRQ on {points.manifold.tag}, n = {n}",
                            ylabel="distortion")
            write_text(args.svg, svg)
    except ClrqError as exc:
        return report_error(exc)

    first, last = report.checkpoints[0].distortion, report.final_distortion
    print(f"[ok] Wrote {output} (distortion {first:.5f} -> {last:.5f} over {len(report.checkpoints)} checkpoints)",
          file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
