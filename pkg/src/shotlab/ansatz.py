"""Circuit construction and cost estimation.

Two problem flavors share one estimator interface:

* QAOA max-cut circuits built from a weighted graph (H layer, then per layer
  an RZZ per edge and an RX mixer per qubit). Costs are *negated* average
  cuts, so training minimizes and optimal values are negative.
* Externally supplied Pauli observables measured on a hardware-efficient
  ansatz, with greedy qubit-wise-commuting grouping and per-group basis
  rotations.

Parameter ordering for QAOA is all gammas then all betas; RZZ angles are
2*gamma*weight and mixer angles 2*beta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .graphs import WeightedGraph, cut_values_table
from .rng import derive_seed
from .sampling import Counts, sample_counts
from .statevector import Circuit, Gate, QuantumState, exact_distribution, run_circuit

PAULI_CHARS = "IXYZ"


class ObservableError(ValueError):
    """Malformed observable text or incompatible observable."""


class MeasurementError(ValueError):
    """Invalid measurement request."""


@dataclass(frozen=True)
class Observable:
    """Weighted Pauli-string sum plus a constant offset."""

    terms: tuple[tuple[float, str], ...]
    constant_offset: float = 0.0

    def __post_init__(self):
        if not self.terms:
            raise ObservableError("observable needs at least one term")
        merged: dict[str, float] = {}
        order: list[str] = []
        n = None
        for coeff, pauli in self.terms:
            if n is None:
                n = len(pauli)
            if len(pauli) != n:
                raise ObservableError(
                    f"pauli string {pauli!r} has length {len(pauli)}, expected {n}"
                )
            if any(c not in PAULI_CHARS for c in pauli):
                raise ObservableError(f"pauli string {pauli!r} has characters outside I/X/Y/Z")
            if pauli not in merged:
                merged[pauli] = 0.0
                order.append(pauli)
            merged[pauli] += float(coeff)
        object.__setattr__(self, "terms", tuple((merged[p], p) for p in order))

    @property
    def n_qubits(self) -> int:
        return len(self.terms[0][1])


@dataclass(frozen=True)
class MeasurementGroup:
    """Qubit-wise commuting terms measurable after one basis rotation.

    ``basis`` has X/Y/Z at constrained qubits and I where any Pauli fits.
    ``basis_rotation`` maps the group's basis to the computational one; its
    parameter slots (one per Y qubit) take ``rotation_angles`` (-pi/2 each).
    """

    basis: str
    basis_rotation: Circuit
    rotation_angles: tuple[float, ...]
    terms: tuple[tuple[float, str], ...]

    def is_z_basis(self) -> bool:
        return all(c in "IZ" for c in self.basis)


def parse_hamiltonian(text: str) -> Observable:
    """Parse "<coefficient> <pauli-string>" lines; ``#`` starts a comment.

    An optional ``offset <float>`` line adds a constant; repeated offsets
    accumulate. Duplicate Pauli strings merge by summing coefficients.
    """
    terms: list[tuple[float, str]] = []
    offset = 0.0
    length = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0].lower() == "offset":
            if len(parts) != 2:
                raise ObservableError(f"line {lineno}: expected 'offset <float>'")
            try:
                offset += float(parts[1])
            except ValueError:
                raise ObservableError(f"line {lineno}: bad offset value {parts[1]!r}") from None
            continue
        if len(parts) != 2:
            raise ObservableError(
                f"line {lineno}: expected '<coefficient> <pauli-string>', got {line!r}"
            )
        try:
            coeff = float(parts[0])
        except ValueError:
            raise ObservableError(f"line {lineno}: bad coefficient {parts[0]!r}") from None
        pauli = parts[1].upper()
        if any(c not in PAULI_CHARS for c in pauli):
            raise ObservableError(f"line {lineno}: pauli string {pauli!r} not over I/X/Y/Z")
        if length is None:
            length = len(pauli)
        elif len(pauli) != length:
            raise ObservableError(
                f"line {lineno}: pauli string length {len(pauli)} != {length} seen earlier"
            )
        terms.append((coeff, pauli))
    if not terms:
        raise ObservableError("no terms found in hamiltonian text")
    return Observable(tuple(terms), offset)


def build_qaoa_circuit(graph: WeightedGraph, layers: int) -> Circuit:
    """H wall, then per layer RZZ(2*gamma_l*w) per edge and RX(2*beta_l) per qubit."""
    if layers < 1:
        raise MeasurementError("layers must be >= 1")
    if not graph.edges:
        raise MeasurementError("graph has no edges")
    n = graph.n_nodes
    gates = [Gate("H", (q,)) for q in range(n)]
    for layer in range(layers):
        gamma_slot = layer
        beta_slot = layers + layer
        for u, v, w in graph.edges:
            gates.append(Gate("RZZ", (u, v), parameter_slot=gamma_slot, scale=2.0 * w))
        for q in range(n):
            gates.append(Gate("RX", (q,), parameter_slot=beta_slot, scale=2.0))
    return Circuit(n, tuple(gates), n_parameters=2 * layers)


def build_hw_efficient_circuit(n_qubits: int, layers: int) -> Circuit:
    """Per layer: RY then RZ on every qubit, then a CNOT ladder.

    Slot layout per layer l: RY(q) at 2*l*n + q, RZ(q) at 2*l*n + n + q.
    """
    if layers < 1:
        raise MeasurementError("layers must be >= 1")
    gates: list[Gate] = []
    for layer in range(layers):
        base = 2 * layer * n_qubits
        for q in range(n_qubits):
            gates.append(Gate("RY", (q,), parameter_slot=base + q))
        for q in range(n_qubits):
            gates.append(Gate("RZ", (q,), parameter_slot=base + n_qubits + q))
        for q in range(n_qubits - 1):
            gates.append(Gate("CNOT", (q, q + 1)))
    return Circuit(n_qubits, tuple(gates), n_parameters=2 * n_qubits * layers)


def qaoa_cost_from_counts(counts: Counts, graph: WeightedGraph) -> float:
    """Negated average cut of the sampled outcomes."""
    if counts.n_qubits != graph.n_nodes:
        raise MeasurementError(
            f"counts over {counts.n_qubits} qubits vs graph on {graph.n_nodes} nodes"
        )
    table = cut_values_table(graph)
    acc = 0.0
    for outcome, count in sorted(counts.histogram.items()):
        acc += count * table[outcome]
    return -acc / counts.total_shots


def exact_qaoa_cost(state: QuantumState, graph: WeightedGraph) -> float:
    """Infinite-shot cost: negated expected cut under the Born distribution."""
    if state.n_qubits != graph.n_nodes:
        raise MeasurementError(
            f"state over {state.n_qubits} qubits vs graph on {graph.n_nodes} nodes"
        )
    probs = exact_distribution(state)
    return -float(probs @ cut_values_table(graph))


def group_observable(observable: Observable) -> list[MeasurementGroup]:
    """Greedy qubit-wise-commuting grouping in term order."""
    n = observable.n_qubits
    bases: list[list[str]] = []
    members: list[list[tuple[float, str]]] = []
    for coeff, pauli in observable.terms:
        placed = False
        for basis, terms in zip(bases, members):
            if all(p == "I" or basis[q] == "I" or basis[q] == p for q, p in enumerate(pauli)):
                for q, p in enumerate(pauli):
                    if p != "I":
                        basis[q] = p
                terms.append((coeff, pauli))
                placed = True
                break
        if not placed:
            bases.append([p for p in pauli])
            members.append([(coeff, pauli)])

    groups = []
    for basis, terms in zip(bases, members):
        gates: list[Gate] = []
        angles: list[float] = []
        for q, b in enumerate(basis):
            if b == "X":
                gates.append(Gate("H", (q,)))
            elif b == "Y":
                # S-dagger then H rotates Y eigenstates onto the Z axis.
                gates.append(Gate("RZ", (q,), parameter_slot=len(angles)))
                gates.append(Gate("H", (q,)))
                angles.append(-math.pi / 2.0)
        rotation = Circuit(n, tuple(gates), n_parameters=len(angles))
        groups.append(MeasurementGroup("".join(basis), rotation, tuple(angles), tuple(terms)))
    return groups


def split_shots(shots: int, n_groups: int) -> list[int]:
    """Even split with the remainder going to the earliest groups."""
    if shots < n_groups:
        raise MeasurementError(f"{shots} shots cannot give each of {n_groups} groups >= 1")
    base, rem = divmod(shots, n_groups)
    return [base + (1 if i < rem else 0) for i in range(n_groups)]


def term_estimate_from_counts(counts: Counts, pauli: str) -> float:
    """<P> from rotated-frame counts: each non-I position contributes (-1)^bit."""
    mask = 0
    for q, p in enumerate(pauli):
        if p != "I":
            mask |= 1 << q
    if mask == 0:
        return 1.0
    acc = 0
    for outcome, count in counts.histogram.items():
        parity = bin(outcome & mask).count("1") & 1
        acc += -count if parity else count
    return acc / counts.total_shots


def rotated_state(state: QuantumState, group: MeasurementGroup) -> QuantumState:
    if not group.basis_rotation.gates:
        return state
    return run_circuit(group.basis_rotation, group.rotation_angles, initial_state=state)


def group_and_measure(
    state: QuantumState,
    observable: Observable,
    shots: int,
    seed: int,
    entropy_feedback: str = "z-group",
) -> tuple[float, Counts]:
    """Estimate <observable> on ``state`` from ``shots`` total measurements.

    Shots split evenly over the qubit-wise-commuting groups; each group is
    sampled in its rotated basis with a per-group derived stream. Returns the
    estimate (including the constant offset) plus the counts used for entropy
    feedback: the Z-basis group's by default, or the highest-entropy group's
    with ``entropy_feedback="max-entropy"``. If no group is Z/I-only the
    first group stands in.
    """
    groups = group_observable(observable)
    if state.n_qubits != observable.n_qubits:
        raise MeasurementError(
            f"state over {state.n_qubits} qubits vs observable on {observable.n_qubits}"
        )
    allocation = split_shots(shots, len(groups))
    expectation = observable.constant_offset
    all_counts: list[Counts] = []
    for i, (group, group_shots) in enumerate(zip(groups, allocation)):
        counts = sample_counts(rotated_state(state, group), group_shots, derive_seed(seed, "group", i))
        all_counts.append(counts)
        for coeff, pauli in group.terms:
            expectation += coeff * term_estimate_from_counts(counts, pauli)
    return expectation, pick_feedback_counts(groups, all_counts, entropy_feedback)


def pick_feedback_counts(
    groups: list[MeasurementGroup],
    counts_per_group: list[Counts],
    entropy_feedback: str,
) -> Counts:
    from .sampling import entropy as _entropy

    if entropy_feedback == "max-entropy":
        best = max(range(len(counts_per_group)), key=lambda i: (_entropy(counts_per_group[i]), -i))
        return counts_per_group[best]
    if entropy_feedback != "z-group":
        raise MeasurementError(f"unknown entropy_feedback mode {entropy_feedback!r}")
    for group, counts in zip(groups, counts_per_group):
        if group.is_z_basis():
            return counts
    return counts_per_group[0]
