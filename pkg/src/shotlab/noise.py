"""Depolarizing noise via stochastic Pauli-insertion trajectories.

Each shot (or batch of shots) follows one concrete error realization: after
every gate, with probability p1 (1-qubit gates) or p2 (2-qubit gates) a
uniformly chosen non-identity Pauli lands on the gate's qubits — uniform over
{X, Y, Z} for one qubit and over the 15 non-identity pairs for two.

Trajectories that draw no error all share the noiseless outcome law, so they
are pooled into a single multinomial from the "measure" stream. That makes
p1 = p2 = 0 bit-identical to `sampling.sample_counts` under the same seed and
keeps realistic error rates cheap: only erroneous trajectories are simulated
gate by gate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import rng_for
from .sampling import Counts, counts_from_array, DistributionError
from .statevector import (
    Circuit,
    _apply_gate_inplace,
    _apply_1q_inplace,
    _1q_matrix,
    exact_distribution,
    run_circuit,
)

# Uniform draws are chunked while sampling error locations; the chunk size is
# a fixed constant so results never depend on shot count granularity.
_LOCATION_CHUNK = 4096

_PAULI_MATS = None


class NoiseError(ValueError):
    """Invalid noise configuration or request."""


@dataclass(frozen=True)
class NoiseModel:
    """Gate-depolarizing probabilities: p1 for 1-qubit gates, p2 for 2-qubit."""

    p1: float
    p2: float
    label: str = ""

    def __post_init__(self):
        for name, p in (("p1", self.p1), ("p2", self.p2)):
            if not 0.0 <= p <= 1.0:
                raise NoiseError(f"{name}={p} outside [0, 1]")

    def is_noiseless(self) -> bool:
        return self.p1 == 0.0 and self.p2 == 0.0


# Representative error magnitudes for the two superconducting architectures the
# benchmarks reference. These are NOT calibrated hardware values — the real
# per-gate rates are device- and date-specific — they just give experiments a
# sane default scale.
PRESETS = {
    "heron": NoiseModel(p1=2.5e-4, p2=2.5e-3, label="heron-like"),
    "eagle": NoiseModel(p1=5.0e-4, p2=8.0e-3, label="eagle-like"),
}


def trajectory_plan(shots: int, shots_per_trajectory: int = 1) -> tuple[list[int], bool]:
    """Per-trajectory shot sizes, plus whether the batch size was clamped.

    ``shots_per_trajectory`` > 1 reuses one error realization for that many
    shots; a batch larger than ``shots`` collapses to a single trajectory
    (clamped=True, recorded by callers in the run log).
    """
    if shots < 1:
        raise NoiseError("shots must be >= 1")
    if shots_per_trajectory < 1:
        raise NoiseError("shots_per_trajectory must be >= 1")
    if shots_per_trajectory >= shots:
        return [shots], shots_per_trajectory > shots
    n_full, rem = divmod(shots, shots_per_trajectory)
    sizes = [shots_per_trajectory] * n_full
    if rem:
        sizes.append(rem)
    return sizes, False


def _pauli_matrices():
    global _PAULI_MATS
    if _PAULI_MATS is None:
        _PAULI_MATS = (
            _1q_matrix("X", None),
            _1q_matrix("Y", None),
            _1q_matrix("Z", None),
        )
    return _PAULI_MATS


def _resolve_gate_plan(circuit: Circuit, parameters) -> tuple[list, np.ndarray]:
    """Fix gate angles and per-gate error probabilities (filled at sample time)."""
    params = np.asarray(parameters, dtype=np.float64)
    plan = []
    is_2q = []
    for gate in circuit.gates:
        angle = None
        if gate.parameter_slot is not None:
            angle = gate.scale * float(params[gate.parameter_slot])
        plan.append((gate, angle))
        is_2q.append(len(gate.targets) == 2)
    return plan, np.asarray(is_2q, dtype=bool)


def _run_trajectory(
    circuit: Circuit,
    plan: list,
    error_gates: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Distribution of one error realization: Paulis inserted after the flagged gates."""
    paulis = _pauli_matrices()
    amps = np.zeros(1 << circuit.n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    flagged = set(int(g) for g in error_gates)
    for g, (gate, angle) in enumerate(plan):
        _apply_gate_inplace(amps, circuit.n_qubits, gate, angle)
        if g not in flagged:
            continue
        if len(gate.targets) == 1:
            choice = int(rng.integers(3))
            _apply_1q_inplace(amps, paulis[choice], gate.targets[0])
        else:
            # 15 non-identity pairs: index+1 in base 4 gives (first, second).
            choice = int(rng.integers(15)) + 1
            first, second = divmod(choice, 4)
            if first:
                _apply_1q_inplace(amps, paulis[first - 1], gate.targets[0])
            if second:
                _apply_1q_inplace(amps, paulis[second - 1], gate.targets[1])
    probs = np.abs(amps) ** 2
    return probs / probs.sum()


def sample_counts_noisy(
    circuit: Circuit,
    parameters,
    shots: int,
    noise: NoiseModel,
    seed: int,
    shots_per_trajectory: int = 1,
) -> Counts:
    """Shot histogram of ``circuit`` under gate-depolarizing noise.

    Deterministic given ``seed`` and independent of internal chunking. Error
    locations come from the "noise" stream, Pauli choices and erroneous-
    trajectory measurements from per-trajectory streams, and the pooled
    error-free shots from the same "measure" stream the noiseless sampler
    uses.
    """
    if shots < 1:
        raise DistributionError("shots must be >= 1")
    sizes, _ = trajectory_plan(shots, shots_per_trajectory)
    plan, is_2q = _resolve_gate_plan(circuit, parameters)
    gate_probs = np.where(is_2q, noise.p2, noise.p1)

    # Pass 1: error locations per trajectory, in fixed chunks.
    rng_noise = rng_for(seed, "noise")
    n_gates = len(plan)
    erroneous: list[tuple[int, np.ndarray]] = []
    clean_shots = 0
    if noise.is_noiseless() or n_gates == 0:
        clean_shots = shots
    else:
        for start in range(0, len(sizes), _LOCATION_CHUNK):
            block = sizes[start : start + _LOCATION_CHUNK]
            uniforms = rng_noise.random((len(block), n_gates))
            hits = uniforms < gate_probs[np.newaxis, :]
            for row, size in enumerate(block):
                flagged = np.nonzero(hits[row])[0]
                if flagged.size:
                    erroneous.append((start + row, flagged))
                else:
                    clean_shots += size

    draws = np.zeros(1 << circuit.n_qubits, dtype=np.int64)
    if clean_shots:
        probs = exact_distribution(run_circuit(circuit, parameters))
        probs = probs / probs.sum()
        draws += rng_for(seed, "measure").multinomial(clean_shots, probs)
    for t, flagged in erroneous:
        rng_t = rng_for(seed, "trajectory", t)
        probs = _run_trajectory(circuit, plan, flagged, rng_t)
        draws += rng_t.multinomial(sizes[t], probs)
    return counts_from_array(circuit.n_qubits, draws)
