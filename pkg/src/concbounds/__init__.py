"""Concurrence and its measurable lower/upper bounds for two-qubit states,
with a simulator for the twofold-copy parity experiment."""

from .coincidence import CountRecord, SimConfig, estimate_bounds, expected_rates, simulate_run
from .concurrence import (
    BoundEstimate,
    bound_observable,
    lower_bound,
    parity_projectors,
    purity_oracle,
    twofold_state,
    upper_bound,
    wootters_concurrence,
)
from .qlinalg import DensityMatrix
from .states import bell_singlet, dephased_singlet, phase_damp, random_density, random_pure, werner

__version__ = "0.1.0"
