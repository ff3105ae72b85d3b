"""UAV cooperative-jamming trajectory and power optimization toolkit."""

__version__ = "0.1.0"

from .baselines import (SchemeId, build_ltp_trajectory, run_jtp, run_ltp,
                        run_nj, run_scheme, run_tnp)
from .channel import (EULER_GAMMA, SlotGains, expected_ln_exponential,
                      rate_lb_dest, rate_ub_eve, slot_gains, uav_gain)
from .driver import BcdConfig, bcd_optimize
from .model import (FeasibilityVerdict, PowerSchedule, Scenario, ScenarioError,
                    Solution, SolverError, Trajectory, Violation,
                    build_scenario, check_schedule, check_trajectory,
                    db_to_linear, dbm_to_watts, default_scenario_path,
                    linear_to_db, read_config, uniform_line_trajectory,
                    watts_to_dbm)
from .objective import SecrecyReport, mc_secrecy_rate, surrogate_objective
from .source_power import P3Coefficients, p3_coefficients, solve_p3
from .trajectory import P7Coefficients, p6_objective, p7_coefficients, solve_p7
from .uav_power import P5Coefficients, p4_objective, p5_coefficients, solve_p5

__all__ = [
    "BcdConfig", "EULER_GAMMA", "FeasibilityVerdict", "P3Coefficients",
    "P5Coefficients", "P7Coefficients", "PowerSchedule", "Scenario",
    "ScenarioError", "SchemeId", "SecrecyReport", "SlotGains", "Solution",
    "SolverError", "Trajectory", "Violation", "bcd_optimize",
    "build_ltp_trajectory", "build_scenario", "check_schedule",
    "check_trajectory", "db_to_linear", "dbm_to_watts",
    "default_scenario_path", "expected_ln_exponential", "linear_to_db",
    "mc_secrecy_rate", "p3_coefficients", "p4_objective", "p5_coefficients",
    "p6_objective", "p7_coefficients", "rate_lb_dest", "rate_ub_eve",
    "read_config", "run_jtp", "run_ltp", "run_nj", "run_scheme", "run_tnp",
    "slot_gains", "solve_p3", "solve_p5", "solve_p7", "surrogate_objective",
    "uav_gain", "uniform_line_trajectory", "watts_to_dbm",
]
