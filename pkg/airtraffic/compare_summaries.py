#!/usr/bin/env python3
"""
Compare quantized summaries with the discrete Wasserstein distance.

Accepts traffic summary JSONs (``run_traffic_summary.py``) or quantization
reports (``run_quantization.py``); all inputs must live on the same manifold.
The ground metric is the geodesic distance of that manifold (affine-invariant
for spd(2) traffic summaries).

Outputs:
- distance matrix CSV, one row per summary, values to 3 decimals
- plan JSON with the optimal coupling of every pair

Usage:
    python compare_summaries.py summary_a.json summary_b.json summary_c.json
    python compare_summaries.py *.json --p 2 --output distances.csv --plans plans.json
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

sys.path.insert(0, str(Path(__file__).parent.parent))

from shared.errors import ClrqError, DataError, ManifoldMismatchError, UsageError
from shared.quantization import QuantizedMeasure
from shared.quantization_io import (
    build_metadata,
    configure_logging,
    default_config_path,
    format_table,
    load_config,
    load_json,
    pick,
    print_banner,
    report_error,
    write_frame_csv,
    write_json,
)
from shared.transport import pairwise_transport

logger = logging.getLogger("airtraffic.compare")

# blocks that may hold a quantized measure, in lookup order
MEASURE_BLOCKS = ("summary", "report")


def load_measure(path: str) -> QuantizedMeasure:
    """The quantized measure stored in a summary or report JSON."""
    payload = load_json(path)
    for block in MEASURE_BLOCKS:
        section = payload.get(block)
        if isinstance(section, dict) and "quantized_measure" in section:
            return QuantizedMeasure.from_json(section["quantized_measure"])
    if "quantized_measure" in payload:
        return QuantizedMeasure.from_json(payload["quantized_measure"])
    raise DataError(f"{path} holds no quantized measure")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Pairwise Wasserstein distances between quantized summaries")
    parser.add_argument("inputs", nargs="+", help="Summary or report JSON files")
    parser.add_argument("--names", default=None, help="Comma-separated row names (default: file stems)")
    parser.add_argument("--p", type=float, default=None, help="Transport exponent (default 1)")
    parser.add_argument("--output", "-o", default=None, help="Distance matrix CSV")
    parser.add_argument("--plans", default=None, help="Plan JSON")
    parser.add_argument("--config", default=None, help="Path to config.yml")
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    try:
        cfg = load_config(args.config or default_config_path(__file__))
        compare_cfg = cfg.get("compare", {})
        output_cfg = cfg.get("output", {})
        p = float(pick(args.p, compare_cfg, "p", 1.0))

        if len(args.inputs) < 2:
            raise UsageError("compare needs at least two summaries")
        names = args.names.split(",") if args.names else [Path(x).stem for x in args.inputs]
        if len(names) != len(args.inputs):
            raise UsageError(f"{len(names)} names for {len(args.inputs)} inputs")

        output_dir = Path(output_cfg.get("directory") or ".")
        matrix_path = Path(args.output) if args.output else output_dir / output_cfg.get("distances", "distances.csv")
        plans_path = Path(args.plans) if args.plans else output_dir / output_cfg.get("plans", "plans.json")

        print_banner("SUMMARY COMPARISON", [f"Summaries: {', '.join(names)}", f"Exponent p: {p:g}"])
        measures = [load_measure(path) for path in args.inputs]
        manifold = measures[0].manifold
        for name, measure in zip(names, measures):
            if measure.manifold != manifold:
                raise ManifoldMismatchError(f"{name} lives on {measure.manifold.tag}, expected {manifold.tag}")

        matrix, pairs = pairwise_transport(measures, p)
        plans = [{"source": i, "target": j, **plan.to_dict()} for i, j, plan in pairs]
        run_config = {
            "subcommand": "compare",
            "inputs": [str(x) for x in args.inputs],
            "names": names,
            "p": p,
            "manifold": manifold.tag,
        }

        frame = pd.DataFrame(matrix, columns=names)
        frame.insert(0, "summary", names)
        write_frame_csv(matrix_path, frame, {"manifold": manifold.tag, "run_config": run_config},
                        float_format="%.3f")
        write_json(plans_path, {
            "_README": {
                "title": "Optimal Transport Plans",
                "description": "Optimal couplings between every pair of summaries.",
                "fields_explained": {
                    "cost": "Wasserstein-p distance (total cost to the power 1/p).",
                    "plan": "Mass moved from source center i (row) to target center j (column).",
                    "ground_metric": "Geodesic distance of the manifold the summaries live on.",
                },
            },
            "metadata": build_metadata("compare", run_config, ground_metric=f"geodesic distance on {manifold.tag}"),
            "names": names,
            "distances": matrix.tolist(),
            "plans": plans,
        })
    except ClrqError as exc:
        return report_error(exc)

    rows = [[name] + [f"{v:.3f}" for v in row] for name, row in zip(names, matrix)]
    print(format_table(rows, ["summary"] + names), file=sys.stderr)
    print(f"[ok] Wrote {matrix_path} and {plans_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
