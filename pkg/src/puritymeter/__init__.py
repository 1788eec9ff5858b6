"""Purity measurement of N-level systems with two sqrt(SWAP) gates."""
from .algebra import GeneratorSet, build_generators, casimir_direction, cross, star
from .gates import embed_gate, fractional_swap, sqrt_swap, swap_operator
from .protocol import (
    EstimateReport,
    ProtocolOutcome,
    ancilla_after_protocol,
    bloch_map,
    channel_lambda,
    estimate,
    estimate_purity_casimir,
    estimate_purity_populations,
    estimate_purity_qubit,
    estimate_purity_qutrit,
    measure_protocol,
)
from .sampling import ExperimentConfig, run_experiment, run_repeats
from .states import (
    bloch_to_density,
    density_to_bloch,
    is_physical,
    population,
    purity_exact,
    purity_from_bloch,
    random_density,
)

__version__ = "0.1.0"
__all__ = [
    "EstimateReport",
    "ExperimentConfig",
    "GeneratorSet",
    "ProtocolOutcome",
    "ancilla_after_protocol",
    "bloch_map",
    "bloch_to_density",
    "build_generators",
    "casimir_direction",
    "channel_lambda",
    "cross",
    "density_to_bloch",
    "embed_gate",
    "estimate",
    "estimate_purity_casimir",
    "estimate_purity_populations",
    "estimate_purity_qubit",
    "estimate_purity_qutrit",
    "fractional_swap",
    "is_physical",
    "measure_protocol",
    "population",
    "purity_exact",
    "purity_from_bloch",
    "random_density",
    "run_experiment",
    "run_repeats",
    "sqrt_swap",
    "star",
    "swap_operator",
]
