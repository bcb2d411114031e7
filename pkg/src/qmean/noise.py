"""NISQ-style error injection: stochastic Pauli gate noise plus readout
bit flips, and the simplified single-qubit hardware circuits used for the
noisy-machine emulation experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import (
    GateMatrix,
    MeasurementOutcome,
    StateVector,
    X_GATE,
    Y_GATE,
    Z_GATE,
    apply_gate,
    gate_to_full_matrix,
    measure,
    rotation_gate,
)

_PAULIS = (X_GATE, Y_GATE, Z_GATE)


@dataclass(frozen=True)
class NoiseModel:
    """Readout flip probability plus depolarizing gate-error probabilities."""

    readout_flip_prob: float = 0.0
    gate_error_1q: float = 0.0
    gate_error_mq: float = 0.0

    def __post_init__(self):
        for name in ("readout_flip_prob", "gate_error_1q", "gate_error_mq"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be a probability, got {p}")

    @property
    def is_zero(self) -> bool:
        return self.readout_flip_prob == 0 and self.gate_error_1q == 0 and self.gate_error_mq == 0


# Hardware-like preset: the multi-qubit figure follows published device data;
# the other two are package defaults, not measured values.
HARDWARE_PRESET = NoiseModel(readout_flip_prob=0.05, gate_error_1q=0.001, gate_error_mq=0.05)

PRESETS = {
    "none": NoiseModel(),
    "hardware": HARDWARE_PRESET,
}


@dataclass
class CircuitOp:
    gate: GateMatrix
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()

    @property
    def touched(self) -> tuple[int, ...]:
        return self.targets + self.controls

    @property
    def is_multi_qubit(self) -> bool:
        return len(self.touched) > 1


@dataclass
class Circuit:
    """A straight-line gate sequence with a final measurement."""

    n_qubits: int
    ops: list[CircuitOp] = field(default_factory=list)
    measured_qubits: Sequence[int] = ()

    def add(self, gate: GateMatrix, targets: Sequence[int], controls: Sequence[int] = ()):
        self.ops.append(CircuitOp(gate, tuple(targets), tuple(controls)))
        return self


def noisy_execute(
    circuit: Circuit,
    model: NoiseModel,
    rng: np.random.Generator,
) -> MeasurementOutcome:
    """One stochastic trajectory of the circuit under the noise model.

    After each gate, each touched qubit suffers a uniformly random Pauli with
    the corresponding gate-error probability; each measured bit then flips
    independently with the readout probability.  With an all-zero model no
    random draws happen before measurement, so the trajectory is bit-identical
    to the noiseless path for any seed.  The returned post_state is the
    collapsed pre-readout state; only the observed bits carry readout flips.
    """
    state = StateVector.zero(circuit.n_qubits)
    for op in circuit.ops:
        state = apply_gate(state, op.gate, op.targets, op.controls)
        g = model.gate_error_mq if op.is_multi_qubit else model.gate_error_1q
        if g > 0:
            for q in op.touched:
                if rng.random() < g:
                    pauli = _PAULIS[rng.integers(3)]
                    state = apply_gate(state, pauli, [q])
    outcome = measure(state, circuit.measured_qubits, rng)
    if model.readout_flip_prob > 0:
        flipped = [
            bit ^ (rng.random() < model.readout_flip_prob)
            for bit in outcome.observed_bits
        ]
        outcome = MeasurementOutcome(outcome.qubit_indices, flipped, outcome.post_state)
    return outcome


def _pauli_channel(rho: np.ndarray, qubit: int, g: float, n: int) -> np.ndarray:
    if g == 0:
        return rho
    acc = (1.0 - g) * rho
    for pauli in _PAULIS:
        full = gate_to_full_matrix(pauli, [qubit], [], n)
        acc = acc + (g / 3.0) * (full @ rho @ full.conj().T)
    return acc


def outcome_probabilities(circuit: Circuit, model: NoiseModel) -> np.ndarray:
    """Exact observed-bit distribution under the noise model.

    The stochastic Pauli channel is averaged exactly via density-matrix
    evolution, readout flips via a per-bit confusion matrix; equals the
    infinite-trajectory limit of noisy_execute.  Intended for small circuits.
    """
    n = circuit.n_qubits
    dim = 1 << n
    rho = np.zeros((dim, dim), dtype=np.complex128)
    rho[0, 0] = 1.0
    for op in circuit.ops:
        full = gate_to_full_matrix(op.gate, op.targets, op.controls, n)
        rho = full @ rho @ full.conj().T
        g = model.gate_error_mq if op.is_multi_qubit else model.gate_error_1q
        for q in op.touched:
            rho = _pauli_channel(rho, q, g, n)

    diag = np.real(np.diag(rho))
    measured = list(circuit.measured_qubits)
    m = len(measured)
    basis = np.arange(dim)
    keys = np.zeros(dim, dtype=np.int64)
    for j, q in enumerate(measured):
        keys |= ((basis >> q) & 1) << j
    marginal = np.zeros(1 << m)
    np.add.at(marginal, keys, diag)

    r = model.readout_flip_prob
    if r > 0:
        confusion = np.array([[1 - r, r], [r, 1 - r]])
        flipped = np.zeros_like(marginal)
        for observed in range(1 << m):
            weight = 0.0
            for actual in range(1 << m):
                w = marginal[actual]
                for j in range(m):
                    w *= confusion[(observed >> j) & 1, (actual >> j) & 1]
                weight += w
            flipped[observed] = weight
        marginal = flipped
    return marginal / marginal.sum()


def head_probability(circuit: Circuit, model: NoiseModel, head_outcome: int | None = None) -> float:
    """Probability of observing the head pattern (all measured bits 1 by
    default) under the noise model."""
    probs = outcome_probabilities(circuit, model)
    if head_outcome is None:
        head_outcome = probs.shape[0] - 1
    return float(probs[head_outcome])


def direct_value_gate(amplitude: float) -> GateMatrix:
    """Single-qubit oracle holding the target value directly:
    |0> -> sqrt(1 - a^2)|0> + a|1>."""
    if not -1.0 <= amplitude <= 1.0:
        raise ValueError(f"amplitude must lie in [-1, 1], got {amplitude}")
    return rotation_gate(math.asin(amplitude))


def simple_coin_circuit(f: float) -> Circuit:
    """Minimal 1-qubit coin with head probability f^2 (amplitude f)."""
    circuit = Circuit(1, measured_qubits=[0])
    circuit.add(direct_value_gate(f), [0])
    return circuit


def simple_sqrt_coin_circuit(f: float) -> Circuit:
    """Minimal 1-qubit coin with head probability f (amplitude sqrt(f))."""
    circuit = Circuit(1, measured_qubits=[0])
    circuit.add(direct_value_gate(math.sqrt(f)), [0])
    return circuit


def simple_qcoin_circuit(f: float, offset: float, repetitions: int) -> Circuit:
    """Shifted 1-qubit coin followed by m amplifications G = Q Z Q^-1 Z.

    With no input qubits both reflections collapse to Pauli Z.
    """
    q = direct_value_gate(f - offset)
    circuit = Circuit(1, measured_qubits=[0])
    circuit.add(q, [0])
    for _ in range(repetitions):
        circuit.add(Z_GATE, [0])
        circuit.add(q.inverse(), [0])
        circuit.add(Z_GATE, [0])
        circuit.add(q, [0])
    return circuit


def simple_qss_circuit(f: float, resolution: int) -> Circuit:
    """Minimal Fourier-readout circuit: no input qubits, target plus register.

    Register qubit j controls G^(2^j) with G = Q Z Q^-1 Z.  Measurement
    covers target then register; the Fourier transform on the register is
    part of the circuit.
    """
    if resolution < 2 or resolution & (resolution - 1):
        raise ValueError("resolution must be a power of two >= 2")
    n_reg = resolution.bit_length() - 1
    q = direct_value_gate(math.sqrt(f))
    from .statevector import H_GATE
    from .primitives import dft_matrix

    circuit = Circuit(1 + n_reg, measured_qubits=list(range(1 + n_reg)))
    for j in range(n_reg):
        circuit.add(H_GATE, [1 + j])
    circuit.add(q, [0])
    for j in range(n_reg):
        for _ in range(1 << j):
            circuit.add(Z_GATE, [0], [1 + j])
            circuit.add(q.inverse(), [0], [1 + j])
            circuit.add(Z_GATE, [0], [1 + j])
            circuit.add(q, [0], [1 + j])
    circuit.add(GateMatrix(dft_matrix(resolution), "QFT"), list(range(1, 1 + n_reg)))
    return circuit
