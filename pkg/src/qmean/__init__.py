"""Desk-scale quantum-circuit statevector simulation and mean estimation.

Exposes the statevector core, the oracle / amplification / Fourier
primitives, three mean estimators (classical Monte Carlo, Fourier-readout
supersampling, and the hybrid quantum-coin method), NISQ-style noise
emulation, and the experiment harness behind the ``qmean`` CLI.
"""

from .statevector import (
    GateMatrix,
    MeasurementOutcome,
    StateVector,
    apply_gate,
    apply_rotation,
    expectation_of_basis_state,
    measure,
)
from .primitives import (
    AAOperator,
    OracleSpec,
    QueryLedger,
    apply_aa,
    prepare_coin,
    prepare_qss_state,
    qft,
    reflection_about_zero,
)
from .estimators import (
    Estimate,
    estimate_monte_carlo,
    estimate_qcoin,
    estimate_qss,
    select_optimal_k,
)
from .noise import NoiseModel, HARDWARE_PRESET, noisy_execute

__all__ = [
    "AAOperator",
    "Estimate",
    "GateMatrix",
    "HARDWARE_PRESET",
    "MeasurementOutcome",
    "NoiseModel",
    "OracleSpec",
    "QueryLedger",
    "StateVector",
    "apply_aa",
    "apply_gate",
    "apply_rotation",
    "estimate_monte_carlo",
    "estimate_qcoin",
    "estimate_qss",
    "expectation_of_basis_state",
    "measure",
    "noisy_execute",
    "prepare_coin",
    "prepare_qss_state",
    "qft",
    "reflection_about_zero",
    "select_optimal_k",
]
