"""Algorithmic building blocks: oracle gates, coin preparation, amplitude
amplification operators, reflections and the quantum Fourier transform.

Register layout used throughout: input qubits occupy indices
``0 .. n_input-1`` (least significant), the target qubit sits at index
``n_input``, and any outer register (used by the Fourier-readout estimator)
occupies the indices above the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .statevector import (
    GateMatrix,
    H_GATE,
    SimulatorError,
    StateVector,
    Z_GATE,
    apply_gate,
)

SQRT_AMPLITUDE = "sqrt-amplitude"
LINEAR_AMPLITUDE = "linear-amplitude"


class OracleError(Exception):
    """Invalid oracle specification or encoding mismatch."""


@dataclass
class QueryLedger:
    """Counts oracle invocations; one application of Q or Q^-1 is one query."""

    count: int = 0

    def add(self, n: int = 1):
        if n < 0:
            raise ValueError("ledger is monotonically non-decreasing")
        self.count += n


@dataclass
class OracleSpec:
    """Tabulated integrand F over N bins, plus offset E and encoding mode.

    ``sqrt-amplitude`` puts amplitude sqrt(F(i)) on the target |1> branch;
    ``linear-amplitude`` puts amplitude F(i) - E.
    """

    values: np.ndarray
    offset: float = 0.0
    encoding: str = SQRT_AMPLITUDE

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        n = self.values.shape[0]
        if n < 1 or n & (n - 1):
            raise OracleError(f"number of bins must be a power of two, got {n}")
        if np.any(self.values < 0) or np.any(self.values > 1):
            raise OracleError("integrand values must lie in [0, 1]")
        if not 0.0 <= self.offset < 1.0:
            raise OracleError(f"offset must lie in [0, 1), got {self.offset}")
        if np.any(np.abs(self.values - self.offset) > 1.0):
            raise OracleError("|F(i) - offset| must not exceed 1")
        if self.encoding not in (SQRT_AMPLITUDE, LINEAR_AMPLITUDE):
            raise OracleError(f"unknown encoding {self.encoding!r}")

    @property
    def n_bins(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_input_qubits(self) -> int:
        return self.n_bins.bit_length() - 1

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    def target_amplitudes(self) -> np.ndarray:
        """Per-bin amplitude placed on the target |1> branch."""
        if self.encoding == SQRT_AMPLITUDE:
            return np.sqrt(self.values)
        return self.values - self.offset


def oracle_gate(oracle: OracleSpec) -> GateMatrix:
    """The oracle as a dense unitary on (input qubits, target qubit).

    Realized as a per-input-basis-state rotation of the target qubit; the
    oracle is treated as a black box, no gate decomposition is attempted.
    Gate qubit order: inputs are the low bits, target is the top bit.
    """
    n_in = oracle.n_input_qubits
    amps = oracle.target_amplitudes()
    dim = 2 * oracle.n_bins
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for i, a in enumerate(amps):
        theta = math.asin(min(max(float(a), -1.0), 1.0))
        c, s = math.cos(theta), math.sin(theta)
        mat[i, i] = c
        mat[(1 << n_in) | i, i] = s
        mat[i, (1 << n_in) | i] = -s
        mat[(1 << n_in) | i, (1 << n_in) | i] = c
    return GateMatrix(mat, name=f"Q[{oracle.encoding}]")


def reflection_about_zero(n_qubits: int) -> GateMatrix:
    """2|0...0><0...0| - I as a diagonal gate (sign fixed up to global phase)."""
    if n_qubits < 1:
        raise SimulatorError("reflection needs at least one qubit")
    diag = -np.ones(1 << n_qubits)
    diag[0] = 1.0
    return GateMatrix(np.diag(diag), name=f"RZERO({n_qubits})")


def flip_basis_state(n_qubits: int, index: int) -> GateMatrix:
    """I - 2|b><b|: flips the amplitude sign of one basis state."""
    diag = np.ones(1 << n_qubits)
    diag[index] = -1.0
    return GateMatrix(np.diag(diag), name=f"FLIP({index})")


@dataclass
class AAOperator:
    """Amplitude-amplification operator G for one of the two coin variants.

    ``qss``: G = Q (H on inputs) (2|0><0| - I) (H on inputs) Q^-1 Z_target.
    ``qcoin``: G = (H in) Q (H in) (2|0><0| - I) (H in) Q^-1 (H in) F_{|1>|0)}
    where F flips the amplitude of the head state |1> (x) |0).
    Each application costs two oracle queries.
    """

    oracle: OracleSpec
    variant: str

    def __post_init__(self):
        if self.variant not in ("qss", "qcoin"):
            raise OracleError(f"unknown AA variant {self.variant!r}")
        if self.variant == "qss" and self.oracle.encoding != SQRT_AMPLITUDE:
            raise OracleError("qss variant requires a sqrt-amplitude oracle")
        if self.variant == "qcoin" and self.oracle.encoding != LINEAR_AMPLITUDE:
            raise OracleError("qcoin variant requires a linear-amplitude oracle")

    @property
    def n_qubits(self) -> int:
        return self.oracle.n_input_qubits + 1


def _coin_qubits(oracle: OracleSpec) -> tuple[list[int], int]:
    n_in = oracle.n_input_qubits
    return list(range(n_in)), n_in


def prepare_qss_state(oracle: OracleSpec, ledger: QueryLedger | None = None) -> StateVector:
    """Uniform superposition over inputs followed by the sqrt-encoding oracle.

    The target qubit's |1> probability mass equals mean(F).  One query.
    """
    if oracle.encoding != SQRT_AMPLITUDE:
        raise OracleError("prepare_qss_state requires a sqrt-amplitude oracle")
    if oracle.offset != 0.0:
        raise OracleError("prepare_qss_state requires offset 0")
    inputs, target = _coin_qubits(oracle)
    state = StateVector.zero(len(inputs) + 1)
    for q in inputs:
        state = apply_gate(state, H_GATE, [q])
    state = apply_gate(state, oracle_gate(oracle), inputs + [target])
    if ledger is not None:
        ledger.add(1)
    return state


def prepare_coin(oracle: OracleSpec, ledger: QueryLedger | None = None) -> StateVector:
    """Linear-encoding coin: oracle application framed by Hadamards on inputs.

    The amplitude of the head state |1> (x) |0) equals mean(F) - offset.
    One query.
    """
    if oracle.encoding != LINEAR_AMPLITUDE:
        raise OracleError("prepare_coin requires a linear-amplitude oracle")
    inputs, target = _coin_qubits(oracle)
    state = StateVector.zero(len(inputs) + 1)
    for q in inputs:
        state = apply_gate(state, H_GATE, [q])
    state = apply_gate(state, oracle_gate(oracle), inputs + [target])
    for q in inputs:
        state = apply_gate(state, H_GATE, [q])
    if ledger is not None:
        ledger.add(1)
    return state


def head_state_index(oracle: OracleSpec) -> int:
    """Basis index of the head state |1> (x) |0) in the coin layout."""
    return 1 << oracle.n_input_qubits


def apply_aa(
    state: StateVector,
    op: AAOperator,
    repetitions: int,
    ledger: QueryLedger | None = None,
    controls: Sequence[int] = (),
    input_qubits: Sequence[int] | None = None,
    target_qubit: int | None = None,
) -> StateVector:
    """Apply G ``repetitions`` times; the target-component angle goes from
    theta to (2m+1) theta.  Two queries per repetition.

    By default the coin occupies qubits 0..n_input with the target on top;
    pass ``input_qubits``/``target_qubit`` to act inside a larger register,
    and ``controls`` to condition every constituent gate (used by the
    Fourier-readout circuit).
    """
    if repetitions < 0:
        raise OracleError("repetitions must be non-negative")
    oracle = op.oracle
    if input_qubits is None:
        input_qubits = list(range(oracle.n_input_qubits))
    else:
        input_qubits = list(input_qubits)
    if target_qubit is None:
        target_qubit = oracle.n_input_qubits
    coin = input_qubits + [target_qubit]
    controls = list(controls)

    q_gate = oracle_gate(oracle)
    q_inv = q_gate.inverse()
    rzero = reflection_about_zero(len(coin))
    flip_head = flip_basis_state(len(coin), 1 << len(input_qubits))

    def h_inputs(s):
        for q in input_qubits:
            s = apply_gate(s, H_GATE, [q], controls)
        return s

    for _ in range(repetitions):
        if op.variant == "qss":
            state = apply_gate(state, Z_GATE, [target_qubit], controls)
            state = apply_gate(state, q_inv, coin, controls)
            state = h_inputs(state)
            state = apply_gate(state, rzero, coin, controls)
            state = h_inputs(state)
            state = apply_gate(state, q_gate, coin, controls)
        else:
            state = apply_gate(state, flip_head, coin, controls)
            state = h_inputs(state)
            state = apply_gate(state, q_inv, coin, controls)
            state = h_inputs(state)
            state = apply_gate(state, rzero, coin, controls)
            state = h_inputs(state)
            state = apply_gate(state, q_gate, coin, controls)
            state = h_inputs(state)
        if ledger is not None:
            ledger.add(2)
    return state


def aa_operator_matrix(op: AAOperator) -> np.ndarray:
    """Brute-force matrix of one G application on the coin qubits."""
    n = op.n_qubits
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[col] = 1.0
        out = apply_aa(StateVector(n, amps), op, 1)
        full[:, col] = out.amplitudes
    return full


def dft_matrix(size: int) -> np.ndarray:
    """Forward transform b_j = (1/sqrt(P)) sum_k exp(-i 2 pi j k / P) a_k."""
    j, k = np.meshgrid(np.arange(size), np.arange(size), indexing="ij")
    return np.exp(-2j * np.pi * j * k / size) / np.sqrt(size)


def qft(state: StateVector, qubit_indices: Sequence[int]) -> StateVector:
    """Fourier-transform the amplitudes of a sub-register.

    ``qubit_indices[0]`` is the least-significant bit of the sub-register
    index.  Applied as a dense unitary; no approximate decomposition.
    """
    qubit_indices = list(qubit_indices)
    size = 1 << len(qubit_indices)
    gate = GateMatrix(dft_matrix(size), name=f"QFT({len(qubit_indices)})")
    return apply_gate(state, gate, qubit_indices)


def dump_circuit(algorithm: str, n_input: int, resolution: int = 0, repetitions: int = 1) -> str:
    """Plain-text gate listing, one gate per line: name, targets, controls, angle.

    ``qss`` lists the full Fourier-readout circuit for AA resolution
    ``resolution`` (power of two); ``qcoin`` lists one coin preparation plus
    ``repetitions`` G blocks.  Used by docs and golden tests.
    """

    def line(name, targets, controls=(), angle=None):
        t = ",".join(str(q) for q in targets) if targets else "-"
        c = ",".join(str(q) for q in controls) if controls else "-"
        a = f"{angle:.12g}" if angle is not None else "-"
        return f"{name} {t} {c} {a}"

    inputs = list(range(n_input))
    target = n_input
    coin = inputs + [target]
    lines = []

    if algorithm == "qss":
        if resolution < 2 or resolution & (resolution - 1):
            raise ValueError("resolution must be a power of two >= 2")
        n_reg = resolution.bit_length() - 1
        register = [target + 1 + j for j in range(n_reg)]
        for q in register:
            lines.append(line("H", [q]))
        for q in inputs:
            lines.append(line("H", [q]))
        lines.append(line("Q", coin))
        for j, ctrl in enumerate(register):
            for _ in range(1 << j):
                lines.append(line("Z", [target], [ctrl]))
                lines.append(line("Q_INV", coin, [ctrl]))
                for q in inputs:
                    lines.append(line("H", [q], [ctrl]))
                lines.append(line("RZERO", coin, [ctrl]))
                for q in inputs:
                    lines.append(line("H", [q], [ctrl]))
                lines.append(line("Q", coin, [ctrl]))
        lines.append(line("M", [target]))
        # textbook QFT decomposition on the register
        for j in reversed(range(n_reg)):
            lines.append(line("H", [register[j]]))
            for jj in reversed(range(j)):
                angle = -math.pi / (1 << (j - jj))
                lines.append(line("CPHASE", [register[jj]], [register[j]], angle))
        for j in range(n_reg // 2):
            lines.append(line("SWAP", [register[j], register[n_reg - 1 - j]]))
        lines.append(line("M", register))
    elif algorithm == "qcoin":
        for q in inputs:
            lines.append(line("H", [q]))
        lines.append(line("Q", coin))
        for q in inputs:
            lines.append(line("H", [q]))
        for _ in range(repetitions):
            lines.append(line("FLIP_HEAD", coin))
            for q in inputs:
                lines.append(line("H", [q]))
            lines.append(line("Q_INV", coin))
            for q in inputs:
                lines.append(line("H", [q]))
            lines.append(line("RZERO", coin))
            for q in inputs:
                lines.append(line("H", [q]))
            lines.append(line("Q", coin))
            for q in inputs:
                lines.append(line("H", [q]))
        lines.append(line("M", coin))
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return "\n".join(lines) + "\n"
