"""Risk-averse online learning under drifting noise distributions.

Library and CLI simulator for restarted zeroth-order CVaR descent: sphere
smoothing, batch/epoch schedules, Wasserstein variation budgets, a
ground-truth regret oracle, and a seeded multi-trial experiment harness.
"""

from .core import (
    AdmissibleSet,
    Ball,
    Box,
    ConfigurationError,
    CostModel,
    NoiseSequence,
    project,
    set_diameter,
    shrunk_set,
)
from .learner import IterationRecord, LearnerConfig, run
from .risk import (
    EmpiricalCdf,
    build_ecdf,
    cvar_discrete,
    cvar_error_bound,
    dkw_epsilon,
    ecdf_eval,
    ru_functional,
    sup_cdf_distance,
)
from .schedule import (
    BatchIndex,
    ConstantRate,
    ConstantSampling,
    InverseEpochRate,
    PolynomialSampling,
    batch_epoch,
    check_sampling_requirement,
    learning_rate,
    sampling_count_poly,
    theorem1_params,
    theorem2_params,
)
from .smoothing import gradient_estimate, perturb, sample_unit_sphere, smoothed_cvar_mc

__version__ = "0.1.0"

__all__ = [
    "AdmissibleSet",
    "Ball",
    "BatchIndex",
    "Box",
    "ConfigurationError",
    "ConstantRate",
    "ConstantSampling",
    "CostModel",
    "EmpiricalCdf",
    "InverseEpochRate",
    "IterationRecord",
    "LearnerConfig",
    "NoiseSequence",
    "PolynomialSampling",
    "batch_epoch",
    "build_ecdf",
    "check_sampling_requirement",
    "cvar_discrete",
    "cvar_error_bound",
    "dkw_epsilon",
    "ecdf_eval",
    "gradient_estimate",
    "learning_rate",
    "perturb",
    "project",
    "ru_functional",
    "run",
    "sample_unit_sphere",
    "sampling_count_poly",
    "set_diameter",
    "shrunk_set",
    "smoothed_cvar_mc",
    "sup_cdf_distance",
    "theorem1_params",
    "theorem2_params",
]
