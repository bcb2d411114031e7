"""Three mean estimators over a tabulated integrand: classical Monte Carlo
sampling of a quantum coin, Fourier-readout estimation (amplified-rotation
period extraction), and the hybrid shift-and-scale coin estimator.

All estimators share one interface: oracle in, seeded estimate out, with an
exact query count on the ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import noise as noise_mod
from .primitives import (
    AAOperator,
    LINEAR_AMPLITUDE,
    OracleError,
    OracleSpec,
    QueryLedger,
    SQRT_AMPLITUDE,
    apply_aa,
    head_state_index,
    prepare_coin,
    prepare_qss_state,
    qft,
)
from .statevector import H_GATE, StateVector, apply_gate, measure
from .primitives import oracle_gate


@dataclass
class Estimate:
    """Result of one estimator run."""

    algorithm: str
    value: float
    queries_used: int
    seed: int | None = None
    per_step_trace: list[dict] = field(default_factory=list)

    def to_record(self, f_true: float | None = None) -> dict:
        """Flat record for CSV emission."""
        rec = {
            "algorithm": self.algorithm,
            "f_est": self.value,
            "queries": self.queries_used,
            "seed": self.seed,
        }
        if f_true is not None:
            rec["f_true"] = f_true
            rec["abs_error"] = abs(self.value - f_true)
        return rec


def monte_carlo_queries(trials: int) -> int:
    return trials


def qss_queries(resolution: int) -> int:
    """State preparation plus two queries per amplification: 2P - 1."""
    return 2 * resolution - 1


def qcoin_queries(k: int, trials_per_step: int) -> int:
    """Closed form: L for step 0, L * (1 + 2 * 2^(i-1)) for step i."""
    return trials_per_step * (k + (1 << (k + 1)) - 1)


def _sqrt_oracle(oracle: OracleSpec) -> OracleSpec:
    if oracle.encoding == SQRT_AMPLITUDE and oracle.offset == 0.0:
        return oracle
    return OracleSpec(oracle.values, 0.0, SQRT_AMPLITUDE)


def estimate_monte_carlo(
    oracle: OracleSpec,
    trials: int,
    seed: int | None = None,
    noise: "noise_mod.NoiseModel | None" = None,
    rng: np.random.Generator | None = None,
) -> Estimate:
    """Head-fraction estimate from repeated single-shot coin measurements.

    Noiseless trials are i.i.d. Bernoulli with the head probability read off
    the prepared statevector, so they are drawn as one binomial.  One query
    per trial.  With a noise model the hardware-style single-qubit coin
    (head probability f^2, square-root recovery) is used instead.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if rng is None:
        rng = np.random.default_rng(seed)
    ledger = QueryLedger()

    if noise is None or noise.is_zero:
        state = prepare_qss_state(_sqrt_oracle(oracle))
        p_head = float(np.sum(state.probabilities()[head_state_index(oracle):]))
        heads = int(rng.binomial(trials, p_head))
        value = heads / trials
    else:
        p_head = noise_mod.head_probability(
            noise_mod.simple_coin_circuit(oracle.mean), noise
        )
        heads = int(rng.binomial(trials, p_head))
        value = math.sqrt(heads / trials)
    ledger.add(monte_carlo_queries(trials))
    return Estimate("monte-carlo", value, ledger.count, seed)


def qss_pre_measurement_state(
    oracle: OracleSpec, resolution: int, ledger: QueryLedger | None = None
) -> StateVector:
    """Full statevector after the controlled amplification cascade.

    Layout: input qubits low, target at n_input, register on top with its
    qubit j controlling G^(2^j).  Query cost 2P - 1 including preparation.
    """
    if resolution < 2 or resolution & (resolution - 1):
        raise ValueError(f"resolution must be a power of two >= 2, got {resolution}")
    oracle = _sqrt_oracle(oracle)
    n_in = oracle.n_input_qubits
    target = n_in
    n_reg = resolution.bit_length() - 1
    register = [target + 1 + j for j in range(n_reg)]

    state = StateVector.zero(n_in + 1 + n_reg)
    for q in range(n_in):
        state = apply_gate(state, H_GATE, [q])
    for q in register:
        state = apply_gate(state, H_GATE, [q])
    state = apply_gate(state, oracle_gate(oracle), list(range(n_in)) + [target])
    if ledger is not None:
        ledger.add(1)

    op = AAOperator(oracle, "qss")
    for j, ctrl in enumerate(register):
        state = apply_aa(
            state,
            op,
            1 << j,
            ledger,
            controls=[ctrl],
            input_qubits=range(n_in),
            target_qubit=target,
        )
    return state


def qss_exact_distribution(oracle: OracleSpec, resolution: int) -> np.ndarray:
    """Exact readout distribution over register outcomes t = 0..P-1.

    Deterministic: the Fourier transform is applied to the pre-measurement
    statevector and the register index is marginalized.
    """
    state = qss_pre_measurement_state(oracle, resolution)
    n_in = _sqrt_oracle(oracle).n_input_qubits
    n_reg = resolution.bit_length() - 1
    register = [n_in + 1 + j for j in range(n_reg)]
    state = qft(state, register)
    probs = state.probabilities()
    reg_index = (np.arange(probs.shape[0]) >> (n_in + 1)) & (resolution - 1)
    dist = np.zeros(resolution)
    np.add.at(dist, reg_index, probs)
    return dist


def qss_value_grid(resolution: int) -> np.ndarray:
    """The estimator's support: sin^2(t pi / P) for t = 0..P-1."""
    t = np.arange(resolution)
    return np.sin(t * np.pi / resolution) ** 2


def estimate_qss(
    oracle: OracleSpec,
    resolution: int,
    seed: int | None = None,
    rng: np.random.Generator | None = None,
) -> Estimate:
    """Fourier-readout estimate: measure the target, transform the register,
    map the measured register value t to sin^2(t pi / P)."""
    if rng is None:
        rng = np.random.default_rng(seed)
    ledger = QueryLedger()
    state = qss_pre_measurement_state(oracle, resolution, ledger)
    n_in = _sqrt_oracle(oracle).n_input_qubits
    target = n_in
    n_reg = resolution.bit_length() - 1
    register = [target + 1 + j for j in range(n_reg)]

    out = measure(state, [target], rng)
    state = qft(out.post_state, register)
    out = measure(state, register, rng)
    t = 0
    for j, bit in enumerate(out.observed_bits):
        t |= bit << j
    value = math.sin(t * math.pi / resolution) ** 2
    trace = [{"step": 0, "t": t, "target_bit": None}]
    return Estimate("qss", value, ledger.count, seed, trace)


def shift_scale_schedule(k: int) -> list[tuple[float, int]]:
    """Per-step (hypothetical error delta, amplification count m) pairs."""
    return [(math.sin(math.pi / (1 << (i + 1))), 1 << (i - 1)) for i in range(1, k + 1)]


def _coin_head_probability(
    values: np.ndarray,
    offset: float,
    repetitions: int,
    noise: "noise_mod.NoiseModel | None",
) -> tuple[float, int]:
    """Head probability of one shifted, amplified coin shot plus its query cost."""
    per_shot = 1 + 2 * repetitions
    if noise is None or noise.is_zero:
        coin_oracle = OracleSpec(values, offset, LINEAR_AMPLITUDE)
        state = prepare_coin(coin_oracle)
        if repetitions:
            state = apply_aa(state, AAOperator(coin_oracle, "qcoin"), repetitions)
        p = float(state.probabilities()[head_state_index(coin_oracle)])
    else:
        f = float(np.mean(values))
        circuit = noise_mod.simple_qcoin_circuit(f, offset, repetitions)
        p = noise_mod.head_probability(circuit, noise)
    return p, per_shot


def run_shift_scale(
    oracle: OracleSpec,
    schedule: Sequence[tuple[float, int]],
    trials_per_step: int | Sequence[int],
    rng: np.random.Generator,
    ledger: QueryLedger,
    noise: "noise_mod.NoiseModel | None" = None,
    exact_divisor: bool = True,
    asin_on_fraction: bool = False,
) -> tuple[float, list[dict]]:
    """Core shift-and-scale loop shared by the k-step estimator and the
    delta-sweep harness.

    Step 0 measures the direct coin; each scheduled step (delta, m) shifts by
    the interval's lower bound, amplifies m times and recovers the angle with
    divisor 2m+1 (exact) or 2^i (compatibility mode).
    """
    n_steps = len(schedule) + 1
    if isinstance(trials_per_step, int):
        trials = [trials_per_step] * n_steps
    else:
        trials = list(trials_per_step)
        if len(trials) != n_steps:
            raise ValueError("trial schedule must cover step 0 and every scaling step")
    if any(t < 1 for t in trials):
        raise ValueError("every step needs at least one trial")

    if noise is None or noise.is_zero:
        state = prepare_qss_state(_sqrt_oracle(oracle))
        p0 = float(np.sum(state.probabilities()[head_state_index(oracle):]))
        f_cur = rng.binomial(trials[0], p0) / trials[0]
    else:
        circuit = noise_mod.simple_coin_circuit(oracle.mean)
        p0 = noise_mod.head_probability(circuit, noise)
        f_cur = math.sqrt(rng.binomial(trials[0], p0) / trials[0])
    ledger.add(trials[0])
    trace = [{"step": 0, "e_minus": 0.0, "e_plus": 1.0, "fraction": f_cur, "f_i": f_cur}]

    e_minus, e_plus = 0.0, 1.0
    for step, ((delta, reps), n_trials) in enumerate(zip(schedule, trials[1:]), start=1):
        e_minus = max(f_cur - delta / 2.0, e_minus)
        e_plus = min(f_cur + delta / 2.0, e_plus)
        p, per_shot = _coin_head_probability(oracle.values, e_minus, reps, noise)
        fraction = rng.binomial(n_trials, p) / n_trials
        ledger.add(n_trials * per_shot)

        amp = fraction if asin_on_fraction else math.sqrt(fraction)
        amp = min(max(amp, 0.0), 1.0)
        divisor = (2 * reps + 1) if exact_divisor else 2 * reps
        f_cur = min(e_minus + math.sin(math.asin(amp) / divisor), e_plus)
        trace.append(
            {"step": step, "e_minus": e_minus, "e_plus": e_plus,
             "fraction": fraction, "f_i": f_cur}
        )
    return f_cur, trace


def estimate_qcoin(
    oracle: OracleSpec,
    k: int,
    trials_per_step: int,
    seed: int | None = None,
    noise: "noise_mod.NoiseModel | None" = None,
    rng: np.random.Generator | None = None,
    exact_divisor: bool = True,
    asin_on_fraction: bool = False,
) -> Estimate:
    """Hybrid coin estimator with k shift-and-scale steps of L trials each.

    With k = 0 this reduces to the Monte Carlo estimator and, given the same
    seed, produces the identical estimate.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if rng is None:
        rng = np.random.default_rng(seed)
    ledger = QueryLedger()
    value, trace = run_shift_scale(
        oracle,
        shift_scale_schedule(k),
        trials_per_step,
        rng,
        ledger,
        noise=noise,
        exact_divisor=exact_divisor,
        asin_on_fraction=asin_on_fraction,
    )
    return Estimate("qcoin", value, ledger.count, seed, trace)


def select_optimal_k(budget: int, error_table: dict[int, dict[int, float]]) -> int:
    """Pick the calibrated k with minimum error for the given query budget.

    ``error_table`` maps calibrated budget -> {k: mean error}.  The largest
    calibrated budget not exceeding ``budget`` is consulted; budgets below
    the calibration range fall back to the smallest calibrated budget.  Ties
    break toward smaller k.
    """
    if not error_table:
        raise ValueError("empty calibration table")
    budgets = sorted(error_table)
    eligible = [b for b in budgets if b <= budget]
    row = error_table[eligible[-1] if eligible else budgets[0]]
    best_k = min(sorted(row), key=lambda kk: (row[kk], kk))
    return best_k
