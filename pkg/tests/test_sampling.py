import math

import numpy as np
import pytest

from shotlab.rng import derive_seed, rng_for
from shotlab.sampling import Counts, DistributionError, entropy, hellinger, sample_counts
from shotlab.statevector import Circuit, Gate, apply_gate, run_circuit, zero_state


def test_point_mass_state_sampling():
    one = apply_gate(zero_state(1), Gate("X", (0,)))
    counts = sample_counts(one, 100, seed=5)
    assert counts.histogram == {1: 100}
    assert counts.total_shots == 100


def test_bell_sampling_band():
    bell = run_circuit(Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1)))), [])
    counts = sample_counts(bell, 10**5, seed=17)
    assert set(counts.histogram) <= {0, 3}
    # binomial(1e5, 0.5) six-sigma band, rounded outward
    for outcome in (0, 3):
        assert 48500 <= counts.histogram[outcome] <= 51500


def test_single_shot():
    bell = run_circuit(Circuit(2, (Gate("H", (0,)), Gate("CNOT", (0, 1)))), [])
    counts = sample_counts(bell, 1, seed=99)
    assert counts.total_shots == 1
    assert sum(counts.histogram.values()) == 1
    assert len(counts.histogram) == 1


def test_sampling_deterministic():
    state = run_circuit(Circuit(3, tuple(Gate("H", (q,)) for q in range(3))), [])
    a = sample_counts(state, 4096, seed=123)
    b = sample_counts(state, 4096, seed=123)
    assert a == b
    c = sample_counts(state, 4096, seed=124)
    assert a != c


def test_shots_validation():
    with pytest.raises(DistributionError):
        sample_counts(zero_state(1), 0, seed=1)


def test_entropy_examples():
    assert entropy([0.25, 0.25, 0.25, 0.25]) == 2.0
    assert entropy([0.0, 1.0, 0.0]) == 0.0
    # GHZ-style distribution: two equally likely outcomes
    assert entropy([0.5, 0, 0, 0, 0, 0, 0, 0.5]) == 1.0


def test_entropy_uniform_is_qubit_count_exactly():
    for n in range(1, 11):
        dist = np.full(2**n, 1.0 / 2**n)
        assert entropy(dist) == float(n)


def test_entropy_of_counts():
    counts = Counts(2, {0: 50, 3: 50}, 100)
    assert entropy(counts) == 1.0
    counts = Counts(2, {2: 7}, 7)
    assert entropy(counts) == 0.0


def test_entropy_errors():
    with pytest.raises(DistributionError):
        entropy([])
    with pytest.raises(DistributionError):
        entropy([0.5, -0.5, 1.0])
    with pytest.raises(DistributionError):
        entropy([0.0, 0.0])


def test_entropy_bounds_random():
    rng = rng_for(8, "entropy-bounds")
    for _ in range(200):
        size = int(rng.integers(2, 64))
        p = rng.random(size)
        p /= p.sum()
        h = entropy(p)
        assert -1e-12 <= h <= math.log2(size) + 1e-12


def test_hellinger_examples():
    assert hellinger([0.3, 0.7], [0.3, 0.7]) == 0.0
    assert abs(hellinger([1, 0], [0, 1]) - 1.0) < 1e-15
    # hand evaluation: (1/sqrt2)*sqrt((1-sqrt(0.5))^2 + 0.5) = sqrt(1 - sqrt(0.5))
    expected = 0.5411961001461971
    assert abs(hellinger([1, 0], [0.5, 0.5]) - expected) < 1e-12
    assert abs(hellinger([0.5, 0.5], [1, 0]) - expected) < 1e-12


def test_hellinger_size_mismatch():
    with pytest.raises(DistributionError):
        hellinger([1.0], [0.5, 0.5])


def test_hellinger_metric_axioms():
    rng = rng_for(21, "hellinger-axioms")
    for _ in range(200):
        size = int(rng.integers(2, 32))
        p, q, r = rng.random((3, size))
        p, q, r = p / p.sum(), q / q.sum(), r / r.sum()
        dpq, dqp = hellinger(p, q), hellinger(q, p)
        assert dpq >= 0.0
        assert abs(dpq - dqp) < 1e-14
        assert hellinger(p, p) < 1e-12
        assert hellinger(p, r) <= dpq + hellinger(q, r) + 1e-12
    assert hellinger([0.2, 0.8], [0.2, 0.8]) == 0.0


def test_counts_validation():
    with pytest.raises(DistributionError):
        Counts(1, {0: 5}, 6)
    with pytest.raises(DistributionError):
        Counts(1, {2: 5}, 5)
    with pytest.raises(DistributionError):
        Counts(1, {0: -1, 1: 6}, 5)


def test_counts_to_probabilities_aligns_support():
    counts = Counts(2, {0: 75, 3: 25}, 100)
    np.testing.assert_allclose(counts.to_probabilities(), [0.75, 0, 0, 0.25], atol=0)


def test_sampler_hellinger_consistency_uniform_4q():
    # E[H^2] ~ (M-1)/(8N) for an M-outcome uniform target at N shots:
    # sqrt(15 / 8e5) = 0.00433; the observed mean must land within +/-30%.
    state = run_circuit(Circuit(4, tuple(Gate("H", (q,)) for q in range(4))), [])
    uniform = np.full(16, 1.0 / 16)
    total = 0.0
    trials = 200
    for t in range(trials):
        counts = sample_counts(state, 10**5, seed=derive_seed(31415, "consistency", t))
        total += hellinger(counts.to_probabilities(), uniform)
    mean = total / trials
    assert 0.7 * 0.00433 <= mean <= 1.3 * 0.00433
