import numpy as np
import pytest

from shotlab.ansatz import build_qaoa_circuit
from shotlab.graphs import WeightedGraph, generate_graph
from shotlab.noise import (
    NoiseError,
    NoiseModel,
    PRESETS,
    sample_counts_noisy,
    trajectory_plan,
)
from shotlab.rng import derive_seed, rng_for
from shotlab.sampling import entropy, hellinger, sample_counts
from shotlab.statevector import Circuit, Gate, exact_distribution, run_circuit

RING4 = WeightedGraph(4, ((0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)))


def test_noise_model_validation():
    with pytest.raises(NoiseError):
        NoiseModel(p1=-0.1, p2=0.0)
    with pytest.raises(NoiseError):
        NoiseModel(p1=0.0, p2=1.5)
    assert PRESETS["heron"].p2 == 2.5e-3
    assert PRESETS["eagle"].p1 == 5e-4


def test_trajectory_plan_rules():
    sizes, clamped = trajectory_plan(1024, 1)
    assert sizes == [1] * 1024 and not clamped
    sizes, clamped = trajectory_plan(1024, 16)
    assert len(sizes) == 64 and all(s == 16 for s in sizes) and not clamped
    sizes, clamped = trajectory_plan(10, 16)
    assert sizes == [10] and clamped
    sizes, clamped = trajectory_plan(100, 30)
    assert sizes == [30, 30, 30, 10] and not clamped
    with pytest.raises(NoiseError):
        trajectory_plan(0, 1)
    with pytest.raises(NoiseError):
        trajectory_plan(10, 0)


def test_zero_noise_bit_identical_to_noiseless():
    circuit = build_qaoa_circuit(RING4, layers=3)
    params = rng_for(2, "angles").uniform(-np.pi, np.pi, circuit.n_parameters)
    quiet = NoiseModel(0.0, 0.0, "off")
    for seed in (0, 7, 123456789):
        noisy = sample_counts_noisy(circuit, params, 2048, quiet, seed)
        clean = sample_counts(run_circuit(circuit, params), 2048, seed)
        assert noisy == clean


def test_fully_depolarizing_single_hadamard():
    # p1=1 after H: uniform Pauli yields the maximally mixed qubit.
    circuit = Circuit(1, (Gate("H", (0,)),))
    counts = sample_counts_noisy(circuit, [], 10**5, NoiseModel(1.0, 0.0), seed=5)
    # binomial(1e5, 0.5) six-sigma band
    assert abs(counts.histogram[0] - 50000) <= 949
    assert abs(counts.histogram[1] - 50000) <= 949


def test_heavy_two_qubit_noise_maximizes_entropy():
    circuit = build_qaoa_circuit(RING4, layers=20)
    params = rng_for(3, "angles").uniform(-np.pi, np.pi, circuit.n_parameters)
    counts = sample_counts_noisy(circuit, params, 4096, NoiseModel(0.0, 0.5), seed=9)
    assert entropy(counts) >= 0.95 * 4


def test_noisy_sampling_deterministic():
    circuit = build_qaoa_circuit(RING4, layers=2)
    params = rng_for(4, "angles").uniform(-np.pi, np.pi, circuit.n_parameters)
    noise = PRESETS["eagle"]
    a = sample_counts_noisy(circuit, params, 1024, noise, seed=42)
    b = sample_counts_noisy(circuit, params, 1024, noise, seed=42)
    assert a == b
    c = sample_counts_noisy(circuit, params, 1024, noise, seed=43)
    assert a != c


def test_batched_trajectories_still_deterministic():
    circuit = build_qaoa_circuit(RING4, layers=2)
    params = rng_for(5, "angles").uniform(-np.pi, np.pi, circuit.n_parameters)
    noise = NoiseModel(1e-3, 1e-2)
    a = sample_counts_noisy(circuit, params, 1000, noise, seed=8, shots_per_trajectory=16)
    b = sample_counts_noisy(circuit, params, 1000, noise, seed=8, shots_per_trajectory=16)
    assert a == b
    assert a.total_shots == 1000


def test_monotone_degradation_in_p2():
    # Mean exact-vs-empirical Hellinger over 20 seeds must not decrease as p2
    # grows (allowing one pooled standard error of slack between neighbors).
    g = generate_graph("pl", 6, seed=1)
    circuit = build_qaoa_circuit(g, layers=5)
    params = rng_for(6, "angles").uniform(-np.pi, np.pi, circuit.n_parameters)
    ideal = exact_distribution(run_circuit(circuit, params))
    levels = [0.0, 1e-3, 1e-2, 1e-1]
    seeds = range(20)
    means, sems = [], []
    for p2 in levels:
        noise = NoiseModel(0.0, p2)
        values = []
        for s in seeds:
            counts = sample_counts_noisy(
                circuit, params, 1024, noise, seed=derive_seed(1000, "dg", s)
            )
            values.append(hellinger(counts.to_probabilities(), ideal))
        values = np.array(values)
        means.append(values.mean())
        sems.append(values.std(ddof=1) / np.sqrt(len(values)))
    for i in range(len(levels) - 1):
        pooled = float(np.hypot(sems[i], sems[i + 1]))
        assert means[i + 1] >= means[i] - pooled


def test_shots_validation():
    circuit = Circuit(1, (Gate("H", (0,)),))
    from shotlab.sampling import DistributionError

    with pytest.raises(DistributionError):
        sample_counts_noisy(circuit, [], 0, NoiseModel(0.0, 0.0), seed=1)
