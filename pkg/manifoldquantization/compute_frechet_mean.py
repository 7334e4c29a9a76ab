#!/usr/bin/env python3
"""
Frechet (Karcher) mean of a sample.

With --report, the mean is computed per Voronoi cell of the report's final
codebook instead, together with the geodesic distance between each center
and the mean of its cell (zero at a stationary codebook).

Usage:
    python compute_frechet_mean.py --input s2.csv
    python compute_frechet_mean.py --input vm.csv --report quantization_report.json -o cell_means.json
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from shared.errors import ClrqError
from shared.manifold_core import ManifoldId, PointSet, distance
from shared.quantization import Codebook, QuantizedMeasure, assign_cells, karcher_mean
from shared.quantization_io import (
    build_metadata,
    configure_logging,
    default_config_path,
    format_table,
    load_config,
    load_json,
    pick,
    print_banner,
    read_points_csv,
    report_error,
    write_json,
)

logger = logging.getLogger("manifoldquantization.mean")


def cell_means(codebook: Codebook, points: PointSet, tol: float, max_iter: int) -> List[Dict[str, Any]]:
    cells = assign_cells(codebook, points)
    rows = []
    for i in range(codebook.n):
        members = points.subset(np.flatnonzero(cells == i))
        row: Dict[str, Any] = {"cell": i + 1, "count": len(members)}
        if len(members):
            result = karcher_mean(members, tol, max_iter)
            row.update(result.to_dict())
            row["center_to_mean"] = distance(codebook[i], result.point)
        else:
            logger.warning("cell %d is empty", i + 1)
        rows.append(row)
    return rows


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Karcher mean of a sample or of each Voronoi cell")
    parser.add_argument("--input", "-i", required=True, help="Points CSV")
    parser.add_argument("--manifold", "-m", default=None, help="Expected manifold")
    parser.add_argument("--report", default=None, help="Quantization report JSON: one mean per cell")
    parser.add_argument("--tol", type=float, default=None, help="Gradient-norm tolerance")
    parser.add_argument("--max-iter", type=int, default=None)
    parser.add_argument("--output", "-o", default=None, help="Output JSON")
    parser.add_argument("--config", default=None, help="Path to config.yml")
    parser.add_argument("--verbose", "-v", action="store_true")
    args = parser.parse_args(argv)

    configure_logging(args.verbose)
    try:
        cfg = load_config(args.config or default_config_path(__file__))
        mean_cfg = cfg.get("mean", {})
        output_cfg = cfg.get("output", {})
        tol = float(pick(args.tol, mean_cfg, "tol", 1e-9))
        max_iter = int(pick(args.max_iter, mean_cfg, "max_iter", 200))
        output = Path(args.output) if args.output else (
            Path(output_cfg.get("directory") or ".") / output_cfg.get("mean", "frechet_mean.json"))

        points = read_points_csv(args.input, ManifoldId.parse(args.manifold) if args.manifold else None)
        run_config = {
            "subcommand": "mean",
            "input": str(args.input),
            "manifold": points.manifold.tag,
            "report": args.report,
            "tol": tol,
            "max_iter": max_iter,
        }
        print_banner("FRECHET MEAN", [f"Input: {args.input} ({len(points)} points on {points.manifold.tag})"])

        payload: Dict[str, Any] = {
            "_README": {
                "title": "Frechet Mean",
                "description": "Minimizer of the mean squared geodesic distance, found by the Karcher fixed-point flow.",
                "fields_explained": {
                    "mean": "The mean point in the manifold's JSON point format.",
                    "gradient_norm": "Norm of the mean logarithm at the returned point; below tol when converged.",
                    "center_to_mean": "Per cell: geodesic distance between the codebook center and the mean of its cell.",
                },
            },
            "metadata": build_metadata("mean", run_config),
        }
        if args.report:
            report = load_json(args.report).get("report", {})
            measure = QuantizedMeasure.from_json(report.get("quantized_measure", {}))
            payload["cells"] = cell_means(measure.codebook, points, tol, max_iter)
            rows = [[c["cell"], c["count"], c.get("center_to_mean", float("nan"))] for c in payload["cells"]]
            print(format_table(rows, ["cell", "count", "center_to_mean"]), file=sys.stderr)
        else:
            result = karcher_mean(points, tol, max_iter)
            payload["result"] = result.to_dict()
            logger.info("mean found in %d iterations (gradient norm %.3g)", result.iterations, result.gradient_norm)

        write_json(output, payload)
    except ClrqError as exc:
        return report_error(exc)

    print(f"[ok] Wrote {output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
