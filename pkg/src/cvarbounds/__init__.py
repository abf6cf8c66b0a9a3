"""VaR/CVaR estimation, finite-sample concentration bounds, and a seeded
Monte Carlo harness that validates every bound against distributions with
closed-form risk measures."""

from .distributions import (
    Distribution,
    Exponential,
    Gaussian,
    SubExponential,
    SubGaussian,
    TailModel,
    Uniform,
    cdf,
    default_tail_model,
    density,
    format_distribution,
    parse_distribution,
    sample,
    true_cvar,
    true_var,
)
from .estimators import (
    RiskLevel,
    SortedSample,
    empirical_cdf,
    empirical_quantile,
    estimate_cvar,
    estimate_var,
)
from .harness import (
    ExperimentPlan,
    ExperimentRecord,
    default_grid_plans,
    recompute_pass,
    run_convergence,
    run_cvar_deviation,
    run_plan,
    run_var_coverage,
    run_var_deviation,
)
from .tailbounds import (
    ConditionCheck,
    ConditionNotSatisfiedError,
    ConditionReport,
    DeltaEpsilon,
    DeviationBound,
    InfeasibleParametersError,
    SampleSizeResult,
    VarConfidenceInterval,
    check_subexp_condition,
    check_subgauss_condition,
    cvar_bound_subexp,
    cvar_bound_subexp_general,
    cvar_bound_subgauss,
    cvar_bound_subgauss_general,
    delta_epsilon,
    dkw_bound,
    sample_size_for_cvar,
    sample_size_for_var,
    var_deviation_bound,
    var_interval,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "RiskLevel",
    "SortedSample",
    "empirical_cdf",
    "empirical_quantile",
    "estimate_var",
    "estimate_cvar",
    "Gaussian",
    "Exponential",
    "Uniform",
    "Distribution",
    "SubGaussian",
    "SubExponential",
    "TailModel",
    "cdf",
    "density",
    "true_var",
    "true_cvar",
    "sample",
    "default_tail_model",
    "parse_distribution",
    "format_distribution",
    "ConditionCheck",
    "ConditionReport",
    "ConditionNotSatisfiedError",
    "InfeasibleParametersError",
    "DeltaEpsilon",
    "DeviationBound",
    "VarConfidenceInterval",
    "SampleSizeResult",
    "dkw_bound",
    "var_interval",
    "delta_epsilon",
    "var_deviation_bound",
    "check_subgauss_condition",
    "check_subexp_condition",
    "cvar_bound_subgauss",
    "cvar_bound_subgauss_general",
    "cvar_bound_subexp",
    "cvar_bound_subexp_general",
    "sample_size_for_var",
    "sample_size_for_cvar",
    "ExperimentPlan",
    "ExperimentRecord",
    "run_var_coverage",
    "run_var_deviation",
    "run_cvar_deviation",
    "run_convergence",
    "run_plan",
    "default_grid_plans",
    "recompute_pass",
]
