"""Random-depth quantum amplitude estimation, simulated classically.

MLAE and its random-depth variants are run against a classical model of the
amplitude oracle that samples the exact measurement distributions.
"""

from .errors import ConfigurationError, DomainError, NoDataError, NotUnitaryError
from .estimators import (
    MLAE,
    RQAE,
    MonteCarloEstimator,
    RandomRule,
    TrialBatch,
    adaptive_weights,
    run_mc,
    run_mlae,
    run_rqae,
    simulate_mc,
    simulate_mlae,
    simulate_rqae,
)
from .likelihood import (
    EstimationOutcome,
    PosteriorGrid,
    crlb_rmse,
    fisher_information,
    log_likelihood,
    mle_estimate,
    posterior,
)
from .qpe import QPEEstimator, qpe_outcome_distribution, run_qpe, simulate_qpe
from .sampling import (
    AmplitudeModel,
    Record,
    Schedule,
    angle_of,
    hit_probability,
    measure_r,
    oracle_cost,
    trial_rng,
)
from .schedules import (
    CriticalPointSet,
    critical_points,
    schedule_djqae,
    schedule_eis,
    schedule_lis,
    score,
)
from .statevector import build_oracle, grover_q, grover_q_prime, verify_depths

__version__ = "0.1.0"

__all__ = [
    "AmplitudeModel",
    "ConfigurationError",
    "CriticalPointSet",
    "DomainError",
    "EstimationOutcome",
    "MLAE",
    "MonteCarloEstimator",
    "NoDataError",
    "NotUnitaryError",
    "PosteriorGrid",
    "QPEEstimator",
    "RQAE",
    "RandomRule",
    "Record",
    "Schedule",
    "TrialBatch",
    "adaptive_weights",
    "angle_of",
    "build_oracle",
    "critical_points",
    "crlb_rmse",
    "fisher_information",
    "grover_q",
    "grover_q_prime",
    "hit_probability",
    "log_likelihood",
    "measure_r",
    "mle_estimate",
    "oracle_cost",
    "posterior",
    "qpe_outcome_distribution",
    "run_mc",
    "run_mlae",
    "run_qpe",
    "run_rqae",
    "schedule_djqae",
    "schedule_eis",
    "schedule_lis",
    "score",
    "simulate_mc",
    "simulate_mlae",
    "simulate_qpe",
    "simulate_rqae",
    "trial_rng",
    "verify_depths",
]
