"""Dense statevector simulation of small parameterized circuits.

Bit convention is little-endian throughout the package: qubit 0 is the
least significant bit of a basis-state index, so |q1 q0> = |10> is index 2.
States are double-precision complex vectors; the gate set is the minimum
needed for QAOA and hardware-efficient ansaetze.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_QUBITS = 16

GATE_ARITY = {
    "H": 1, "X": 1, "Y": 1, "Z": 1,
    "RX": 1, "RY": 1, "RZ": 1,
    "RZZ": 2, "CNOT": 2,
}
PARAMETERIZED = {"RX", "RY", "RZ", "RZZ"}


class SimulationError(ValueError):
    """Invalid circuit, gate, or state input."""


@dataclass(frozen=True)
class Gate:
    """One gate application.

    Parameterized kinds (RX/RY/RZ/RZZ) reference a slot in the circuit's
    parameter vector; the applied angle is ``scale * parameters[slot]``
    (the scale carries e.g. QAOA edge weights). Non-parameterized kinds
    carry no slot.
    """

    kind: str
    targets: tuple[int, ...]
    parameter_slot: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in GATE_ARITY:
            raise SimulationError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if len(targets) != GATE_ARITY[self.kind]:
            raise SimulationError(
                f"{self.kind} expects {GATE_ARITY[self.kind]} target(s), got {targets}"
            )
        if len(set(targets)) != len(targets):
            raise SimulationError(f"duplicate targets in {self.kind}{targets}")
        if any(t < 0 for t in targets):
            raise SimulationError(f"negative target in {self.kind}{targets}")
        if self.is_parameterized and self.parameter_slot is None:
            raise SimulationError(f"{self.kind} gate requires a parameter_slot")
        if not self.is_parameterized and self.parameter_slot is not None:
            raise SimulationError(f"{self.kind} gate cannot carry a parameter_slot")

    @property
    def is_parameterized(self) -> bool:
        return self.kind in PARAMETERIZED


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list over ``n_qubits`` with ``n_parameters`` slots."""

    n_qubits: int
    gates: tuple[Gate, ...] = ()
    n_parameters: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise SimulationError("circuit needs at least 1 qubit")
        if self.n_qubits > MAX_QUBITS:
            raise SimulationError(
                f"n_qubits={self.n_qubits} exceeds the dense-simulation cap of {MAX_QUBITS}"
            )
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if max(g.targets) >= self.n_qubits:
                raise SimulationError(f"gate {g.kind}{g.targets} out of range for n={self.n_qubits}")
            if g.parameter_slot is not None and not (0 <= g.parameter_slot < self.n_parameters):
                raise SimulationError(
                    f"parameter_slot {g.parameter_slot} outside [0, {self.n_parameters})"
                )


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector over the 2^n computational basis states."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise SimulationError("state needs at least 1 qubit")
        if self.n_qubits > MAX_QUBITS:
            raise SimulationError(
                f"n_qubits={self.n_qubits} exceeds the dense-simulation cap of {MAX_QUBITS}"
            )
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise SimulationError(
                f"amplitude vector must have length 2^{self.n_qubits}, got shape {amps.shape}"
            )
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-6:
            raise SimulationError(f"state is not normalized (sum |a|^2 = {norm})")
        object.__setattr__(self, "amplitudes", amps)


def zero_state(n_qubits: int) -> QuantumState:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(n_qubits, amps)


@lru_cache(maxsize=MAX_QUBITS + 1)
def basis_indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


def _1q_matrix(kind: str, angle: float | None) -> np.ndarray:
    if kind == "H":
        return np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=np.complex128)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
    if kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=np.complex128)
    half = 0.5 * angle
    c, s = math.cos(half), math.sin(half)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    if kind == "RZ":
        return np.array([[complex(c, -s), 0], [0, complex(c, s)]], dtype=np.complex128)
    raise SimulationError(f"not a 1-qubit gate kind: {kind}")


def _apply_1q_inplace(amps: np.ndarray, mat: np.ndarray, qubit: int) -> None:
    # View as (high bits, target bit, low bits); the middle axis is this qubit.
    view = amps.reshape(-1, 2, 1 << qubit)
    lo = view[:, 0, :].copy()
    hi = view[:, 1, :]
    view[:, 0, :] = mat[0, 0] * lo + mat[0, 1] * hi
    view[:, 1, :] = mat[1, 0] * lo + mat[1, 1] * hi


def _apply_rzz_inplace(amps: np.ndarray, n_qubits: int, u: int, v: int, angle: float) -> None:
    idx = basis_indices(n_qubits)
    parity = ((idx >> u) ^ (idx >> v)) & 1
    half = 0.5 * angle
    phase_same = complex(math.cos(half), -math.sin(half))
    amps *= np.where(parity == 1, np.conj(phase_same), phase_same)


def _apply_cnot_inplace(amps: np.ndarray, n_qubits: int, control: int, target: int) -> None:
    idx = basis_indices(n_qubits)
    src = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    dst = src | (1 << target)
    tmp = amps[src].copy()
    amps[src] = amps[dst]
    amps[dst] = tmp


def _apply_gate_inplace(amps: np.ndarray, n_qubits: int, gate: Gate, angle: float | None) -> None:
    if gate.kind == "RZZ":
        _apply_rzz_inplace(amps, n_qubits, gate.targets[0], gate.targets[1], angle)
    elif gate.kind == "CNOT":
        _apply_cnot_inplace(amps, n_qubits, gate.targets[0], gate.targets[1])
    else:
        _apply_1q_inplace(amps, _1q_matrix(gate.kind, angle), gate.targets[0])


def apply_gate(state: QuantumState, gate: Gate, angle: float | None = None) -> QuantumState:
    """Apply one gate and return the new state (pure; norm preserved).

    ``angle`` must be supplied iff the gate kind is parameterized; it is the
    final angle in radians (any slot/scale on the gate is ignored here).
    """
    if max(gate.targets) >= state.n_qubits:
        raise SimulationError(f"gate {gate.kind}{gate.targets} out of range for n={state.n_qubits}")
    if gate.is_parameterized and angle is None:
        raise SimulationError(f"{gate.kind} requires an angle")
    if not gate.is_parameterized and angle is not None:
        raise SimulationError(f"{gate.kind} takes no angle")
    amps = state.amplitudes.copy()
    _apply_gate_inplace(amps, state.n_qubits, gate, angle)
    return QuantumState(state.n_qubits, amps)


def run_circuit(
    circuit: Circuit,
    parameters,
    initial_state: QuantumState | None = None,
) -> QuantumState:
    """Run all gates in order from |0...0> (or ``initial_state``)."""
    params = np.asarray(parameters, dtype=np.float64)
    if params.shape != (circuit.n_parameters,):
        raise SimulationError(
            f"expected {circuit.n_parameters} parameters, got shape {params.shape}"
        )
    if initial_state is None:
        amps = np.zeros(1 << circuit.n_qubits, dtype=np.complex128)
        amps[0] = 1.0
    else:
        if initial_state.n_qubits != circuit.n_qubits:
            raise SimulationError("initial state qubit count does not match circuit")
        amps = initial_state.amplitudes.copy()
    for gate in circuit.gates:
        angle = None
        if gate.parameter_slot is not None:
            angle = gate.scale * float(params[gate.parameter_slot])
        _apply_gate_inplace(amps, circuit.n_qubits, gate, angle)
    return QuantumState(circuit.n_qubits, amps)


def exact_distribution(state: QuantumState) -> np.ndarray:
    """Born-rule outcome probabilities |a_i|^2 over all 2^n basis states."""
    return np.abs(state.amplitudes) ** 2
