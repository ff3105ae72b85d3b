#!/usr/bin/env python3
"""Sweep every scheme over a list of mission lengths and collect rate curves.

Thin wrapper over the package CLI that defaults to the bundled scenario and
the four-point mission-length sweep.  ``rates.csv`` under ``--out`` is the
figure-ready artifact (one row per (T, scheme)); per-cell trajectory CSVs,
solution dumps and iteration traces land next to it.

    python3 scripts/run_sweep.py --out sweep_out
    python3 scripts/run_sweep.py --scenario my_scenario.json --T 150,300
"""

import argparse
import sys

from skyjam.cli import run_cli
from skyjam.model import default_scenario_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default=str(default_scenario_path()),
                        help="scenario JSON (default: bundled scenario)")
    parser.add_argument("--T", default="200,250,300,350",
                        help="comma list of mission lengths, seconds")
    parser.add_argument("--scheme", default="all",
                        choices=("jtp", "tnp", "ltp", "nj", "all"))
    parser.add_argument("--mc-samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="sweep_out")
    args = parser.parse_args(argv)
    return run_cli([
        "--scenario", args.scenario,
        "--T", args.T,
        "--scheme", args.scheme,
        "--mc-samples", str(args.mc_samples),
        "--seed", str(args.seed),
        "--out", args.out,
    ])


if __name__ == "__main__":
    sys.exit(main())
