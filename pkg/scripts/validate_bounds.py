#!/usr/bin/env python3
"""Monte-Carlo spot check of the analytic per-slot rate bounds.

Draws random feasible (trajectory, schedule) pairs on a scenario and checks
slot by slot that the destination's lower-bound rate stays below the
simulated mean rate plus three standard errors, and the eavesdropper's
upper-bound rate stays above the simulated mean minus three standard errors.
Prints the slimmest margin per pair and exits non-zero on any violation.

    python3 scripts/validate_bounds.py --pairs 20 --samples 100000
"""

import argparse
import sys

import numpy as np

from skyjam.model import (PowerSchedule, Trajectory, build_scenario,
                          default_scenario_path, read_config,
                          uniform_line_trajectory)
from skyjam.objective import mc_secrecy_rate, per_slot_bound_rates
from skyjam.trajectory import project_steps


def random_pair(s, rng):
    """Feasible random pair: jittered line pushed back onto the mobility
    set, powers scaled under both budgets."""
    base = uniform_line_trajectory(s).q + rng.normal(scale=s.l_max,
                                                     size=(s.n_slots, 2))
    steps = np.diff(np.vstack([s.q0[None, :], base]), axis=0)
    v, ok = project_steps(steps, s.qf - s.q0, s.l_max)
    if not ok:
        raise RuntimeError("projection of the jittered line did not converge")
    q = s.q0[None, :] + np.cumsum(v, axis=0)
    q[-1] = s.qf

    def draw(avg, peak):
        p = rng.uniform(0.0, peak, s.n_slots)
        if p.mean() > avg:
            p *= avg / p.mean()
        return p

    return Trajectory(q), PowerSchedule(p_s=draw(s.p_s_avg, s.p_s_peak),
                                        p_u=draw(s.p_u_avg, s.p_u_peak))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scenario", default=str(default_scenario_path()),
                        help="scenario JSON (default: bundled scenario)")
    parser.add_argument("--pairs", type=int, default=20)
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    s = build_scenario(read_config(args.scenario))
    rng = np.random.default_rng(args.seed)
    failures = 0
    for pair in range(args.pairs):
        t, p = random_pair(s, rng)
        lo, up = per_slot_bound_rates(s, t, p)
        report = mc_secrecy_rate(s, t, p, samples=args.samples,
                                 seed=args.seed * args.pairs + pair)
        d_margin = float(np.min(report.rate_d_mean + 3.0 * report.rate_d_se - lo))
        e_margin = float(np.min(up - (report.rate_e_mean - 3.0 * report.rate_e_se)))
        ok = d_margin >= 0.0 and e_margin >= 0.0
        failures += not ok
        print(f"pair {pair:3d}  dest margin {d_margin:+.3e}  "
              f"eve margin {e_margin:+.3e}  {'ok' if ok else 'VIOLATED'}")
    verdict = "all bounds hold" if failures == 0 else f"{failures} pair(s) violated"
    print(f"{args.pairs} pairs x {s.n_slots} slots at {args.samples} samples: "
          f"{verdict}")
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
