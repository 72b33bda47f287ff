"""Accelerated gradient-descent learning over noisy fading multiple access channels.

Thin Python layer over the C++ core: synthetic problem generators, fading
channel models, momentum schedules, the AGMA/GBMA/FDM iterate loops, and the
closed-form error bounds.
"""

from ._agma import (
    BoundInputs,
    ChannelModel,
    DivergenceError,
    MeanTrace,
    MomentCheckResult,
    MomentumSchedule,
    ProblemConstants,
    ProblemInstance,
    RunTrace,
    ValidationError,
    compute_constants,
    decomposition_terms,
    default_alpha0,
    delta_n,
    eta_k,
    fdm_aggregate,
    gamma0,
    global_gradient,
    global_objective,
    k0_bound_minimizing,
    k0_cap,
    l_beta_tilde,
    lambda_bound,
    load_csv,
    local_gradient,
    local_objective,
    mac_aggregate,
    make_bound_inputs,
    moment_check,
    monte_carlo,
    next_alpha,
    power_scaling_recommendation,
    run,
    sample_realization,
    stepsize_upper_limit,
    synthesize_logistic,
    synthesize_quadratic,
    theorem1_bound,
    theorem2_bound,
    theorem2_bound_accumulated,
    verify,
)

__all__ = [
    "BoundInputs",
    "ChannelModel",
    "DivergenceError",
    "MeanTrace",
    "MomentCheckResult",
    "MomentumSchedule",
    "ProblemConstants",
    "ProblemInstance",
    "RunTrace",
    "ValidationError",
    "compute_constants",
    "decomposition_terms",
    "default_alpha0",
    "delta_n",
    "eta_k",
    "fdm_aggregate",
    "gamma0",
    "global_gradient",
    "global_objective",
    "k0_bound_minimizing",
    "k0_cap",
    "l_beta_tilde",
    "lambda_bound",
    "load_csv",
    "local_gradient",
    "local_objective",
    "mac_aggregate",
    "make_bound_inputs",
    "moment_check",
    "monte_carlo",
    "next_alpha",
    "power_scaling_recommendation",
    "run",
    "sample_realization",
    "stepsize_upper_limit",
    "synthesize_logistic",
    "synthesize_quadratic",
    "theorem1_bound",
    "theorem2_bound",
    "theorem2_bound_accumulated",
    "verify",
]

__version__ = "0.1.0"
