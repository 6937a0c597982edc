"""Simulation and inference for the stopped clock failure model.

Y_n repeats the last available record of a stationary sequence X_n whenever
the indicator U_n signals a failure.
"""

from .core import (
    IndexSeries,
    StoppedClockPath,
    build_y_failures,
    build_y_random_index,
    check_recursive_degeneracy,
    compute_indices,
)
from .estimators import (
    EstimateSummary,
    empirical_tdc,
    estimate_change_probs,
    estimate_kappa,
    estimate_run_pattern_prob,
    estimate_theta_x_from_y,
    extremal_index_intervals,
    extremal_index_runs,
)
from .harness import ModelConfig, run_table1_study, run_tdc_validation, run_theta_validation, simulate
from .patterns import BinaryPattern, PatternProb, fresh_gap_probs, pattern_prob_exact
from .processes import (
    ArmaxParams,
    BinarySeries,
    SeriesPath,
    WindowRuleParams,
    gen_armax,
    gen_iid_frechet,
    gen_u_window_rule,
    make_stream,
    sample_frechet,
)
from .theory import (
    TheoryInputs,
    TheoryReport,
    armax_inputs,
    beta_armax,
    tdc_y_lag1,
    tdc_y_lagm,
    theta_y_closed_form,
    theta_y_upcrossing,
)

__version__ = "0.1.0"
