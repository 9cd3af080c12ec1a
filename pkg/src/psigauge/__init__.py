"""Tools for probing how far quantum states can be told apart by conclusive
exclusion: reference state families with perfect-exclusion measurements,
finite ontological models with overlap bounds, finite-shot protocols, and a
measurement optimizer."""

__version__ = "0.1.0"

from .ensembles import (
    NoGoEnsemble,
    ensemble_from_json,
    ensemble_to_json,
    gamma_coefficient,
    scaling_report,
    theorem1_ensemble,
    theorem2_ensemble,
    theorem2_states,
    theorem4_ensemble,
    theorem4_states,
)
from .exclusion import ExclusionProblem, ExclusionResult, exclusion_value, optimize
from .experiment import (
    EstimateReport,
    NoiseSpec,
    noisy_outcome_distribution,
    run_protocol,
    sweep,
)
from .ontic import (
    ContinuityReport,
    DiscreteOnticModel,
    OverlapReport,
    ParametricModel,
    classify,
    delta_continuity_probe,
    epsilon_overlap,
    ks_qubit_model,
    model_from_parametric,
    nogo_check,
    product_model,
    psi_ontic_fixture,
    total_variation,
)
from .orbit import OrbitCloud, coverage, initial_cloud, orbit_step, steps_to_cover
from .qcore import (
    Ball,
    ContractViolation,
    Operator,
    Povm,
    StateVector,
    born_prob,
    gram,
    inner,
    normalized,
    projector,
    sample_state_in_ball,
    tensor_power,
    unitary_from_correspondence,
    validate_povm,
)

__all__ = [
    "Ball",
    "ContinuityReport",
    "ContractViolation",
    "DiscreteOnticModel",
    "EstimateReport",
    "ExclusionProblem",
    "ExclusionResult",
    "NoGoEnsemble",
    "NoiseSpec",
    "Operator",
    "OrbitCloud",
    "OverlapReport",
    "ParametricModel",
    "Povm",
    "StateVector",
    "born_prob",
    "classify",
    "coverage",
    "delta_continuity_probe",
    "ensemble_from_json",
    "ensemble_to_json",
    "epsilon_overlap",
    "exclusion_value",
    "gamma_coefficient",
    "gram",
    "initial_cloud",
    "inner",
    "ks_qubit_model",
    "model_from_parametric",
    "nogo_check",
    "noisy_outcome_distribution",
    "normalized",
    "optimize",
    "orbit_step",
    "product_model",
    "projector",
    "psi_ontic_fixture",
    "run_protocol",
    "sample_state_in_ball",
    "scaling_report",
    "steps_to_cover",
    "sweep",
    "tensor_power",
    "theorem1_ensemble",
    "theorem2_ensemble",
    "theorem2_states",
    "theorem4_ensemble",
    "theorem4_states",
    "total_variation",
    "unitary_from_correspondence",
    "validate_povm",
]
