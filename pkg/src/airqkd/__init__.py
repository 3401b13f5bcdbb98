"""Security analysis of squeezed-state QKD over noisy open-air links.

The package models a displaced-squeezed-state protocol whose channel is a
thermal-loss beam splitter (collective entangling-cloner attack), with
microwave and telecom carrier options, weather-dependent attenuation, and
imperfect detectors.  It computes mutual information, Holevo bound,
secret-key fraction and rate, and solves for secure distances, noise
thresholds, and the microwave/telecom crossover distance.
"""

from .gaussian import (
    GaussianState,
    PhysicalityError,
    Transform,
    apply,
    beam_splitter_transform,
    homodyne_condition,
    reduce,
    squeeze_rotate_transform,
    symplectic_eigenvalues,
    tensor,
    two_mode_squeezed_state,
    vacuum_state,
    von_neumann_entropy,
)
from .link import (
    AttenuationBudget,
    ChannelParams,
    LinkScenario,
    OutOfModelError,
    WeatherCondition,
    antenna_directivity,
    antenna_gain,
    channel_params,
    kruse_attenuation,
    path_loss_db,
    planck_occupancy,
    specific_attenuation,
    transmissivity,
)
from .protocol import (
    DetectorModel,
    ProtocolParams,
    RoundStates,
    alice_variances,
    build_round,
    detector_from_efficiency,
    friis_cascade,
)
from .security import (
    KeyReport,
    SolverResult,
    crossover_distance,
    holevo_dr,
    holevo_rr,
    key_at_distance,
    mutual_information,
    noise_threshold,
    secret_key,
    secure_distance,
)
from .scenario import (
    ResultRow,
    Scenario,
    ScenarioError,
    SweepAxis,
    evaluate_sweep,
    parse_scenario,
    validate_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "GaussianState", "PhysicalityError", "Transform", "apply",
    "beam_splitter_transform", "homodyne_condition", "reduce",
    "squeeze_rotate_transform", "symplectic_eigenvalues", "tensor",
    "two_mode_squeezed_state", "vacuum_state", "von_neumann_entropy",
    "AttenuationBudget", "ChannelParams", "LinkScenario", "OutOfModelError",
    "WeatherCondition", "antenna_directivity", "antenna_gain",
    "channel_params", "kruse_attenuation", "path_loss_db",
    "planck_occupancy", "specific_attenuation", "transmissivity",
    "DetectorModel", "ProtocolParams", "RoundStates", "alice_variances",
    "build_round", "detector_from_efficiency", "friis_cascade",
    "KeyReport", "SolverResult", "crossover_distance", "holevo_dr",
    "holevo_rr", "key_at_distance", "mutual_information", "noise_threshold",
    "secret_key", "secure_distance",
    "ResultRow", "Scenario", "ScenarioError", "SweepAxis", "evaluate_sweep",
    "parse_scenario", "validate_scenario",
]
