"""Exact counterdiabatic driving of the transverse-field Ising chain.

Closed-form coupling coefficients, free-fermion mode evolution, a dense
spin-basis oracle for small chains, and experiment drivers that write the
reference data sets.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .coefficients import (
    CouplingKind,
    CouplingModel,
    correlation_length,
    cos_multiple_expansion,
    cos_sum,
    cos_sum_exact,
    cos_sum_series,
    coupling_exact,
    coupling_series,
    coupling_set,
    coupling_sum,
    coupling_thermo,
    coupling_truncated,
    identity_residuals,
    momentum_grid,
    period_sign,
    power_sum,
    power_sum_exact,
    sin_product_expansion,
)
from .dynamics import (
    ChainConfig,
    EvolutionResult,
    IntegrationError,
    ModeResult,
    ModeState,
    Schedule,
    bogoliubov_angle,
    cd_drive_exact,
    cd_drive_from_couplings,
    cd_drive_thermo,
    dispersion_ground_energy,
    drive_function,
    evolve_chain,
    evolve_mode,
    ground_amplitudes,
    ground_state_probability,
)
from .spin_oracle import (
    cd_hamiltonian,
    dense_evolve,
    ising_hamiltonian,
    multi_spin_term,
    parity_ground_state,
    parity_operator,
    pauli_string,
    sector_ground_energy,
)

__all__ = [
    "__version__",
    "CouplingKind",
    "CouplingModel",
    "correlation_length",
    "cos_multiple_expansion",
    "cos_sum",
    "cos_sum_exact",
    "cos_sum_series",
    "coupling_exact",
    "coupling_series",
    "coupling_set",
    "coupling_sum",
    "coupling_thermo",
    "coupling_truncated",
    "identity_residuals",
    "momentum_grid",
    "period_sign",
    "power_sum",
    "power_sum_exact",
    "sin_product_expansion",
    "ChainConfig",
    "EvolutionResult",
    "IntegrationError",
    "ModeResult",
    "ModeState",
    "Schedule",
    "bogoliubov_angle",
    "cd_drive_exact",
    "cd_drive_from_couplings",
    "cd_drive_thermo",
    "dispersion_ground_energy",
    "drive_function",
    "evolve_chain",
    "evolve_mode",
    "ground_amplitudes",
    "ground_state_probability",
    "multi_spin_term",
    "cd_hamiltonian",
    "dense_evolve",
    "ising_hamiltonian",
    "parity_ground_state",
    "parity_operator",
    "pauli_string",
    "sector_ground_energy",
]
