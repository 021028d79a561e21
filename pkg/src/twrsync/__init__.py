"""Two-way ranging and clock synchronization toolkit.

Simulates timing exchanges between a perfect-clock and a drifting-clock
transceiver, estimates propagation delay, clock drift, and clock offset with
empirical and maximum-likelihood estimators, and checks the observed spread
against Cramer-Rao bounds through a deterministic Monte Carlo harness.
"""
from .config import (
    ConfigError,
    RunConfig,
    default_config,
    load_config,
    parse_config,
    serialize_config,
)
from .crlb import CrlbReport, SingularInformationError, crlb_alpha_tau, fim, toa_crlb
from .empirical import (
    EmpiricalEstimate,
    estimate_alpha1,
    estimate_empirical,
    estimate_gamma_empirical,
    estimate_tau1,
)
from .mle import (
    DEGENERATE_REL_TOL,
    MleEstimate,
    estimate_gamma_mle,
    estimate_mle,
    predicted_variances,
)
from .model import (
    ClockParams,
    NoiseModel,
    ProtocolConfig,
    local_from_true,
    true_from_local,
)
from .montecarlo import (
    ESTIMATOR_NAMES,
    SWEEP_AXES,
    ColumnStats,
    EstimatorStats,
    Scenario,
    SweepRow,
    SweepSpec,
    SweepTable,
    TrialEstimates,
    run_estimators,
    run_sweep,
    run_trials,
)
from .numerics import (
    CovX,
    NotSpdError,
    QuadForms,
    alpha1_cov,
    covx_dense,
    covx_inv_apply,
    generic_spd_inverse,
    quad_forms,
)
from .protocol import (
    MissingToaError,
    ObservationSet,
    RngSpec,
    ideal_observations,
    linear_delays,
    run_exchange,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ClockParams",
    "ProtocolConfig",
    "NoiseModel",
    "local_from_true",
    "true_from_local",
    "ObservationSet",
    "RngSpec",
    "MissingToaError",
    "run_exchange",
    "ideal_observations",
    "linear_delays",
    "EmpiricalEstimate",
    "estimate_alpha1",
    "estimate_tau1",
    "estimate_gamma_empirical",
    "estimate_empirical",
    "MleEstimate",
    "DEGENERATE_REL_TOL",
    "estimate_mle",
    "predicted_variances",
    "estimate_gamma_mle",
    "CrlbReport",
    "SingularInformationError",
    "fim",
    "crlb_alpha_tau",
    "toa_crlb",
    "CovX",
    "QuadForms",
    "NotSpdError",
    "covx_inv_apply",
    "covx_dense",
    "quad_forms",
    "generic_spd_inverse",
    "alpha1_cov",
    "ESTIMATOR_NAMES",
    "SWEEP_AXES",
    "Scenario",
    "TrialEstimates",
    "ColumnStats",
    "EstimatorStats",
    "SweepSpec",
    "SweepRow",
    "SweepTable",
    "run_estimators",
    "run_trials",
    "run_sweep",
    "ConfigError",
    "RunConfig",
    "parse_config",
    "load_config",
    "serialize_config",
    "default_config",
]
