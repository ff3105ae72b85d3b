"""Command-line front end: run schemes over mission durations, write artifacts.

For every (scheme, T) cell the tool writes a waypoint/power CSV, a solution
JSON dump and a JSON-lines iteration trace; one aggregated ``rates.csv``
collects the surrogate and Monte-Carlo rates of all cells.  Outputs are
deterministic: a re-run with the same flags reproduces every CSV byte for
byte.  The ``SKYJAM_THREADS`` environment variable caps the number of cells
solved concurrently.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .baselines import SchemeId, run_scheme
from .driver import BcdConfig
from .model import (Scenario, ScenarioError, Solution, SolverError,
                    build_scenario, default_scenario_path, read_config)
from .objective import mc_secrecy_rate

_ALL_SCHEMES = (SchemeId.JTP, SchemeId.TNP, SchemeId.LTP, SchemeId.NJ)


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one CLI invocation."""

    scenario_path: str
    schemes: tuple
    t_values: tuple
    dt: float | None
    epsilon: float | None
    mc_samples: int
    seed: int
    out_dir: str
    version: str

    def __post_init__(self):
        if len(self.schemes) < 1:
            raise ValueError("at least one scheme is required")
        if len(self.t_values) < 1:
            raise ValueError("at least one T value is required")
        if self.mc_samples < 1:
            raise ValueError(f"mc_samples must be >= 1, got {self.mc_samples}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def to_dict(self) -> dict:
        return {
            "scenario_path": self.scenario_path,
            "schemes": [sch.value for sch in self.schemes],
            "t_values": list(self.t_values),
            "dt": self.dt,
            "epsilon": self.epsilon,
            "mc_samples": self.mc_samples,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "version": self.version,
        }


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _t_list(text: str) -> tuple:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad T list {text!r}") from exc
    if not values:
        raise argparse.ArgumentTypeError("empty T list")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skyjam",
        description="Jammer trajectory / transmit power optimizer for ground "
                    "wiretap links.",
    )
    parser.add_argument("--scenario", required=True,
                        help="scenario config JSON (see data/default_scenario.json)")
    parser.add_argument("--scheme", default="all",
                        choices=["jtp", "tnp", "ltp", "nj", "all"],
                        help="which scheme(s) to run (default: all)")
    parser.add_argument("--T", type=_t_list, default=None, metavar="T1,T2,...",
                        help="comma-separated mission durations in seconds "
                             "(default: the scenario file's T)")
    parser.add_argument("--dt", type=float, default=None,
                        help="slot length in seconds (overrides the scenario file)")
    parser.add_argument("--epsilon", type=float, default=None,
                        help="fractional-increase stopping threshold override")
    parser.add_argument("--mc-samples", type=_positive_int, default=100000,
                        help="Monte-Carlo fading samples per slot (default 100000)")
    parser.add_argument("--seed", type=_non_negative_int, default=0,
                        help="Monte-Carlo seed (default 0)")
    parser.add_argument("--out", default="skyjam_out",
                        help="output directory (default ./skyjam_out)")
    return parser


def _worker_count(n_cells: int) -> int:
    limit = os.environ.get("SKYJAM_THREADS")
    workers = os.cpu_count() or 1
    if limit is not None:
        try:
            workers = max(1, int(limit))
        except ValueError:
            raise ScenarioError(f"SKYJAM_THREADS: expected an integer, got {limit!r}")
    return max(1, min(workers, n_cells))


def _cell_scenario(config: dict, manifest: RunManifest, t_value: float) -> Scenario:
    cell = dict(config)
    cell["T"] = t_value
    if manifest.dt is not None:
        cell["dt_or_N"] = float(manifest.dt)
    if manifest.epsilon is not None:
        cell["epsilon"] = manifest.epsilon
    return build_scenario(cell)


def _fmt(value: float) -> str:
    return repr(float(value))


def _write_trajectory_csv(path: Path, solution: Solution):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["slot", "x_m", "y_m", "p_s_w", "p_u_w"])
        q = solution.trajectory.q
        for n in range(q.shape[0]):
            writer.writerow([n + 1, _fmt(q[n, 0]), _fmt(q[n, 1]),
                             _fmt(solution.schedule.p_s[n]),
                             _fmt(solution.schedule.p_u[n])])


def _solution_dict(scheme: SchemeId, t_value: float, s: Scenario,
                   solution: Solution, report) -> dict:
    return {
        "scheme": scheme.value,
        "T": t_value,
        "n_slots": s.n_slots,
        "objective": solution.objective,
        "trace": list(solution.trace),
        "trajectory": [[float(x), float(y)] for x, y in solution.trajectory.q],
        "p_s": [float(v) for v in solution.schedule.p_s],
        "p_u": [float(v) for v in solution.schedule.p_u],
        "per_slot_rates": [[float(lo), float(up)] for lo, up in solution.per_slot_rates],
        "monte_carlo": report.to_dict(),
        "version": __version__,
    }


def _run_cell(config: dict, manifest: RunManifest, scheme: SchemeId,
              t_value: float, out_dir: Path) -> dict:
    s = _cell_scenario(config, manifest, t_value)
    tag = f"{scheme.value}_T{t_value:g}"
    records = []

    def hook(iteration, objective, wall_time):
        records.append({"iteration": iteration, "objective": objective,
                        "wall_time_s": wall_time})

    cfg = BcdConfig(epsilon=s.epsilon)
    solution = run_scheme(scheme, s, cfg, trace_hook=hook)
    report = mc_secrecy_rate(s, solution.trajectory, solution.schedule,
                             samples=manifest.mc_samples, seed=manifest.seed)
    _write_trajectory_csv(out_dir / f"trajectory_{tag}.csv", solution)
    with open(out_dir / f"solution_{tag}.json", "w", encoding="utf-8") as fh:
        json.dump(_solution_dict(scheme, t_value, s, solution, report), fh,
                  sort_keys=True, indent=2)
        fh.write("\n")
    with open(out_dir / f"trace_{tag}.jsonl", "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    return {
        "T_s": t_value,
        "scheme": scheme.value,
        "surrogate_bps_hz": report.surrogate_rate,
        "mc_expectation_bps_hz": report.mc_rate_expectation_form,
        "mc_realization_bps_hz": report.mc_rate_realization_form,
        "mc_stderr": report.std_errors["expectation_form"],
    }


def _write_rates_csv(path: Path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["T_s", "scheme", "surrogate_bps_hz",
                         "mc_expectation_bps_hz", "mc_realization_bps_hz",
                         "mc_stderr"])
        for row in rows:
            writer.writerow([_fmt(row["T_s"]), row["scheme"],
                             _fmt(row["surrogate_bps_hz"]),
                             _fmt(row["mc_expectation_bps_hz"]),
                             _fmt(row["mc_realization_bps_hz"]),
                             _fmt(row["mc_stderr"])])


def run_cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        config = read_config(args.scenario)
        schemes = _ALL_SCHEMES if args.scheme == "all" else (SchemeId(args.scheme),)
        t_values = args.T if args.T is not None else (float(config.get("T", 0.0)),)
        manifest = RunManifest(
            scenario_path=str(args.scenario),
            schemes=schemes,
            t_values=tuple(t_values),
            dt=args.dt,
            epsilon=args.epsilon,
            mc_samples=args.mc_samples,
            seed=args.seed,
            out_dir=str(args.out),
            version=__version__,
        )
        out_dir = Path(manifest.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        cells = [(scheme, t_value) for t_value in manifest.t_values
                 for scheme in manifest.schemes]
        workers = _worker_count(len(cells))
        if workers == 1:
            rows = [_run_cell(config, manifest, scheme, t_value, out_dir)
                    for scheme, t_value in cells]
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(
                    lambda cell: _run_cell(config, manifest, cell[0], cell[1], out_dir),
                    cells))
        rows.sort(key=lambda row: (row["T_s"], row["scheme"]))
        _write_rates_csv(out_dir / "rates.csv", rows)
        with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest.to_dict(), fh, sort_keys=True, indent=2)
            fh.write("\n")
    except (ScenarioError, SolverError, OSError, ValueError) as exc:
        print(f"skyjam: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
