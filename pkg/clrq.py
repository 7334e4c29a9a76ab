#!/usr/bin/env python3
"""
Command-line entry point.

Dispatches a subcommand to the workflow script that implements it:

    python clrq.py sample    --manifold circle --dist von-mises --kappa 5 --n 1000 --seed 7
    python clrq.py quantize  --input vm.csv --n 5 --repeat-m 50 --trace-w1
    python clrq.py mean      --input s2.csv
    python clrq.py decay     --n-values 2,4,8,16,32
    python clrq.py synthetic --scenario all
    python clrq.py traffic   --input crossing.csv --radius 5
    python clrq.py compare   parallel.json crossing.json

Every script keeps its own ``--help``. Exit codes: 0 success, 2 usage error,
3 data error, 4 numerical failure.
"""
from __future__ import annotations

import importlib
import sys
from pathlib import Path
from typing import List, Optional, Sequence

sys.path.insert(0, str(Path(__file__).parent))

from shared import __version__

COMMANDS = [
    {
        "name": "sample",
        "module": "manifoldsamples.generate_samples",
        "description": "Draw points from a distribution on a manifold",
    },
    {
        "name": "quantize",
        "module": "manifoldquantization.run_quantization",
        "description": "Run CLRQ on a points CSV",
    },
    {
        "name": "mean",
        "module": "manifoldquantization.compute_frechet_mean",
        "description": "Karcher mean of a sample or of each Voronoi cell",
    },
    {
        "name": "decay",
        "module": "manifoldquantization.run_decay_study",
        "description": "Distortion decay against n on uniform S^2",
    },
    {
        "name": "synthetic",
        "module": "airtraffic.generate_synthetic_traffic",
        "description": "Write synthetic traffic scenarios",
    },
    {
        "name": "traffic",
        "module": "airtraffic.run_traffic_summary",
        "description": "Complexity classes of a traffic sample",
    },
    {
        "name": "compare",
        "module": "airtraffic.compare_summaries",
        "description": "Wasserstein distances between summaries",
    },
]

EXIT_USAGE = 2


def usage() -> str:
    lines = [f"clrq {__version__}", "", "usage: clrq.py <command> [options]", "", "commands:"]
    width = max(len(c["name"]) for c in COMMANDS)
    lines += [f"  {c['name'].ljust(width)}  {c['description']}" for c in COMMANDS]
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    if not args or args[0] in ("-h", "--help"):
        print(usage(), file=sys.stderr)
        return 0 if args else EXIT_USAGE
    if args[0] == "--version":
        print(f"clrq {__version__}")
        return 0

    command = next((c for c in COMMANDS if c["name"] == args[0]), None)
    if command is None:
        print(f"[error] clrq: unknown command {args[0]!r}\n\n{usage()}", file=sys.stderr)
        return EXIT_USAGE

    module = importlib.import_module(command["module"])
    return int(module.main(args[1:]) or 0)


if __name__ == "__main__":
    raise SystemExit(main())
