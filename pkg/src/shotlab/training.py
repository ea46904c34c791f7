"""Hybrid training loop with per-iteration shot allocation.

One "iteration" is one objective evaluation (one circuit-sampling round):
the shot count for evaluation i comes from the policy and the entropy of
evaluation i-1's counts (entropy-driven policies start from the policy's
initial entropy, default 10 bits). After the optimizer stops, the cost is
re-measured once at a fixed 1024 shots so runs with different policies
compare on equal footing; that final evaluation is excluded from the
iteration and shot totals.

The classical optimizer is COBYLA (scipy backend), recorded in the log
metadata; it sees exactly the sampled costs, one per iteration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .allocation import ShotPolicy, next_shots
from .ansatz import (
    Observable,
    build_hw_efficient_circuit,
    build_qaoa_circuit,
    group_observable,
    pick_feedback_counts,
    qaoa_cost_from_counts,
    rotated_state,
    split_shots,
    term_estimate_from_counts,
)
from .graphs import BRUTE_FORCE_MAX_NODES, WeightedGraph, brute_force_max_cut
from .noise import NoiseModel, sample_counts_noisy
from .rng import derive_seed, rng_for
from .sampling import entropy, sample_counts
from .statevector import Circuit, Gate, run_circuit

FINAL_EVALUATION_SHOTS = 1024
OPTIMIZER_METHOD = "scipy-cobyla"


class TrainingError(RuntimeError):
    """Aborted run: bad problem, non-finite objective, or empty sampling."""


@dataclass(frozen=True)
class OptimizerOptions:
    max_iterations: int = 1000
    initial_step: float = 0.5
    convergence_tolerance: float = 1e-4
    initial_parameters: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tolerance <= 0:
            raise ValueError("convergence_tolerance must be > 0")
        if self.initial_parameters is not None:
            object.__setattr__(
                self, "initial_parameters", tuple(float(x) for x in self.initial_parameters)
            )


@dataclass
class OptimizeOutcome:
    x_best: np.ndarray
    history: list[tuple[np.ndarray, float]]
    n_evaluations: int
    converged: bool
    message: str
    method: str = OPTIMIZER_METHOD


def minimize(objective, x0, options: OptimizerOptions | None = None) -> OptimizeOutcome:
    """Derivative-free minimization; every objective evaluation is recorded in order."""
    options = options or OptimizerOptions()
    history: list[tuple[np.ndarray, float]] = []

    def wrapped(x):
        value = float(objective(np.asarray(x, dtype=np.float64)))
        if not np.isfinite(value):
            raise TrainingError(f"objective returned non-finite value {value} at x={x}")
        history.append((np.array(x, dtype=np.float64), value))
        return value

    result = _scipy_minimize(
        wrapped,
        np.asarray(x0, dtype=np.float64),
        method="COBYLA",
        options={
            "rhobeg": options.initial_step,
            "tol": options.convergence_tolerance,
            "maxiter": options.max_iterations,
        },
    )
    return OptimizeOutcome(
        x_best=np.asarray(result.x, dtype=np.float64),
        history=history,
        n_evaluations=len(history),
        converged=bool(result.success),
        message=str(result.message),
    )


def arg_metric(e_ideal: float, e_real: float) -> float:
    """Percent gap 100*|(e_ideal - e_real)/e_ideal|; undefined at e_ideal = 0."""
    if e_ideal == 0:
        raise ValueError("arg_metric undefined for e_ideal = 0")
    return 100.0 * abs((e_ideal - e_real) / e_ideal)


@dataclass(frozen=True)
class QaoaProblem:
    graph: WeightedGraph
    layers: int

    def build(self) -> Circuit:
        return build_qaoa_circuit(self.graph, self.layers)

    def ideal_cost(self) -> float | None:
        if self.graph.n_nodes > BRUTE_FORCE_MAX_NODES:
            return None
        return -brute_force_max_cut(self.graph).best_value


@dataclass(frozen=True)
class HamiltonianProblem:
    observable: Observable
    layers: int
    reference_energy: float | None = None

    def build(self) -> Circuit:
        return build_hw_efficient_circuit(self.observable.n_qubits, self.layers)

    def ideal_cost(self) -> float | None:
        return self.reference_energy


@dataclass
class IterationRecord:
    iteration: int
    shots: int
    entropy_bits: float
    cost: float
    parameters: tuple[float, ...]
    elapsed_s: float = field(default=0.0, compare=False)


@dataclass
class FinalEvaluation:
    cost: float
    shots: int
    entropy_bits: float
    parameters: tuple[float, ...]


@dataclass
class TrainLog:
    records: list[IterationRecord]
    final_evaluation: FinalEvaluation
    metadata: dict

    @property
    def i_tot(self) -> int:
        return len(self.records)

    @property
    def s_tot(self) -> int:
        return sum(r.shots for r in self.records)

    @property
    def s_avg(self) -> float:
        return self.s_tot / self.i_tot

    def validate(self) -> None:
        if not self.records:
            raise TrainingError("log has no iterations")
        for i, rec in enumerate(self.records):
            if rec.iteration != i:
                raise TrainingError(f"record {i} carries iteration index {rec.iteration}")
            if rec.shots < 1:
                raise TrainingError(f"iteration {i} used {rec.shots} shots")

    def to_dict(self) -> dict:
        """JSON-ready form. Timing stays out so reruns are byte-identical."""
        return {
            "metadata": self.metadata,
            "s_tot": self.s_tot,
            "i_tot": self.i_tot,
            "s_avg": self.s_avg,
            "final_evaluation": {
                "cost": self.final_evaluation.cost,
                "shots": self.final_evaluation.shots,
                "entropy_bits": self.final_evaluation.entropy_bits,
                "parameters": list(self.final_evaluation.parameters),
            },
            "iterations": [
                {
                    "iteration": r.iteration,
                    "shots": r.shots,
                    "entropy_bits": r.entropy_bits,
                    "cost": r.cost,
                    "parameters": list(r.parameters),
                }
                for r in self.records
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainLog":
        records = [
            IterationRecord(
                iteration=int(r["iteration"]),
                shots=int(r["shots"]),
                entropy_bits=float(r["entropy_bits"]),
                cost=float(r["cost"]),
                parameters=tuple(float(x) for x in r["parameters"]),
            )
            for r in doc["iterations"]
        ]
        fe = doc["final_evaluation"]
        final = FinalEvaluation(
            cost=float(fe["cost"]),
            shots=int(fe["shots"]),
            entropy_bits=float(fe["entropy_bits"]),
            parameters=tuple(float(x) for x in fe["parameters"]),
        )
        return cls(records=records, final_evaluation=final, metadata=dict(doc["metadata"]))

    def total_elapsed_s(self) -> float:
        return sum(r.elapsed_s for r in self.records)


def _rotated_measurement_circuits(circuit: Circuit, observable: Observable):
    """Per-group circuits for noisy grouped measurement: ansatz + basis rotation."""
    groups = group_observable(observable)
    extended = []
    for group in groups:
        gates = list(circuit.gates)
        extra = list(group.rotation_angles)
        for g in group.basis_rotation.gates:
            if g.parameter_slot is None:
                gates.append(g)
            else:
                gates.append(
                    Gate(g.kind, g.targets, parameter_slot=circuit.n_parameters + g.parameter_slot)
                )
        extended.append(
            (group, Circuit(circuit.n_qubits, tuple(gates), circuit.n_parameters + len(extra)), extra)
        )
    return extended


def _make_sampler(problem, circuit, noise, shots_per_trajectory, entropy_feedback):
    """Returns sample(parameters, shots, seed) -> (cost, feedback_counts)."""
    if isinstance(problem, QaoaProblem):
        if noise is None:
            def sampler(params, shots, seed):
                state = run_circuit(circuit, params)
                counts = sample_counts(state, shots, seed)
                return qaoa_cost_from_counts(counts, problem.graph), counts
        else:
            def sampler(params, shots, seed):
                counts = sample_counts_noisy(
                    circuit, params, shots, noise, seed, shots_per_trajectory
                )
                return qaoa_cost_from_counts(counts, problem.graph), counts
        return sampler

    observable = problem.observable
    groups_ext = _rotated_measurement_circuits(circuit, observable)

    def sampler(params, shots, seed):
        allocation = split_shots(shots, len(groups_ext))
        expectation = observable.constant_offset
        groups = []
        counts_per_group = []
        for i, (group, ext_circuit, extra_angles) in enumerate(groups_ext):
            group_seed = derive_seed(seed, "group", i)
            if noise is None:
                state = rotated_state(run_circuit(circuit, params), group)
                counts = sample_counts(state, allocation[i], group_seed)
            else:
                full_params = np.concatenate([np.asarray(params, float), extra_angles])
                counts = sample_counts_noisy(
                    ext_circuit, full_params, allocation[i], noise, group_seed, shots_per_trajectory
                )
            groups.append(group)
            counts_per_group.append(counts)
            for coeff, pauli in group.terms:
                expectation += coeff * term_estimate_from_counts(counts, pauli)
        return expectation, pick_feedback_counts(groups, counts_per_group, entropy_feedback)

    return sampler


def train(
    problem,
    policy: ShotPolicy,
    noise: NoiseModel | None = None,
    options: OptimizerOptions | None = None,
    seed: int = 0,
    shots_per_trajectory: int = 1,
    entropy_feedback: str = "z-group",
    extra_metadata: dict | None = None,
) -> TrainLog:
    """Run one seeded training job and return its full log.

    Deterministic: identical (problem, policy, noise, options, seed) give
    bit-identical logs. Initial parameters are uniform in [-pi, pi) from the
    run seed unless the options pin them.
    """
    options = options or OptimizerOptions()
    circuit = problem.build()
    policy = policy.resolved(circuit.n_qubits)
    sampler = _make_sampler(problem, circuit, noise, shots_per_trajectory, entropy_feedback)

    if options.initial_parameters is not None:
        x0 = np.asarray(options.initial_parameters, dtype=np.float64)
        if x0.shape != (circuit.n_parameters,):
            raise TrainingError(
                f"initial_parameters has shape {x0.shape}, circuit needs {circuit.n_parameters}"
            )
    else:
        x0 = rng_for(seed, "init").uniform(-np.pi, np.pi, circuit.n_parameters)

    records: list[IterationRecord] = []
    state = {"prev_entropy": float(policy.initial_entropy)}

    def objective(x):
        i = len(records)
        shots = next_shots(policy, i, state["prev_entropy"])
        if shots < 1:
            raise TrainingError(f"policy produced {shots} shots at iteration {i}")
        t0 = time.perf_counter()
        cost, counts = sampler(x, shots, derive_seed(seed, "eval", i))
        ent = entropy(counts)
        records.append(
            IterationRecord(
                iteration=i,
                shots=shots,
                entropy_bits=ent,
                cost=cost,
                parameters=tuple(float(v) for v in x),
                elapsed_s=time.perf_counter() - t0,
            )
        )
        state["prev_entropy"] = ent
        return cost

    outcome = minimize(objective, x0, options)

    final_cost, final_counts = sampler(
        outcome.x_best, FINAL_EVALUATION_SHOTS, derive_seed(seed, "final")
    )
    final = FinalEvaluation(
        cost=final_cost,
        shots=FINAL_EVALUATION_SHOTS,
        entropy_bits=entropy(final_counts),
        parameters=tuple(float(v) for v in outcome.x_best),
    )

    clamped = (
        noise is not None
        and shots_per_trajectory > 1
        and any(r.shots < shots_per_trajectory for r in records)
    )
    metadata = {
        "seed": seed,
        "policy": {
            "kind": policy.kind,
            "name": policy.label,
            "s_fixed": policy.s_fixed,
            "s_begin": policy.s_begin,
            "slope_l": policy.slope_l,
            "floor": policy.floor,
            "k": policy.k,
            "cap": policy.cap,
            "initial_entropy": policy.initial_entropy,
        },
        "optimizer": {
            "method": outcome.method,
            "max_iterations": options.max_iterations,
            "initial_step": options.initial_step,
            "convergence_tolerance": options.convergence_tolerance,
            "converged": outcome.converged,
            "message": outcome.message,
        },
        "noise": None if noise is None else {"label": noise.label, "p1": noise.p1, "p2": noise.p2},
        "shots_per_trajectory": shots_per_trajectory,
        "trajectory_batch_clamped": bool(clamped),
        "entropy_feedback": entropy_feedback,
        "e_ideal": problem.ideal_cost(),
    }
    metadata.update(extra_metadata or {})

    log = TrainLog(records=records, final_evaluation=final, metadata=metadata)
    log.validate()
    return log
