"""Calibrated nonconvex penalized regression toolkit.

Sparse linear and logistic regression with SCAD/MCP penalties solved by a
two-step calibrated concave-convex procedure, high-dimensional BIC tuning,
baseline estimators, optimality diagnostics, and a Monte Carlo harness.
"""

from .baselines import HlassoConfig, hlasso_fit, hlasso_path_select
from .data import (
    Dataset,
    FitResult,
    Metrics,
    TrueModel,
    oracle_fit,
    selection_metrics,
    standardize,
)
from .diagnostics import KktReport, kkt_violation, l2_bound_check, xi_min
from .logistic import (
    BinaryDataset,
    LogisticFit,
    hbic_logistic,
    lambda_grid_logistic,
    logistic_calibrated_cccp,
    logistic_lasso,
    logistic_oracle,
    logistic_path_select,
    neg_loglik,
    predict_class,
    standardize_binary,
)
from .penalty import (
    Family,
    PenaltySpec,
    concave_grad,
    concave_value,
    penalty_deriv,
    penalty_value,
    soft_threshold,
)
from .selection import CvConfig, HbicConfig, cv_select, hbic_score, select_hbic
from .sim import (
    SCENARIOS,
    SimDesign,
    SimReport,
    aggregate_report,
    gen_design,
    run_monte_carlo,
    scenario,
)
from .solver import (
    SolutionPath,
    SolverConfig,
    SurrogateProblem,
    calibrated_cccp,
    cccp_full,
    lambda_grid,
    lasso,
    nonconvex_kkt_residual,
    path,
    penalized_objective,
    resolve_tau,
    solve_surrogate,
)

__version__ = "0.1.0"
