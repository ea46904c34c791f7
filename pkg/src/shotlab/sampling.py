"""Shot sampling and distribution metrics (Shannon entropy, Hellinger).

Entropy is always in bits, with the 0*log2(0) = 0 convention. Empirical
histograms (`Counts`) normalize to probabilities by basis-state index, so
outcomes never observed have probability 0 when compared against an exact
distribution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import rng_for
from .statevector import QuantumState, exact_distribution


class DistributionError(ValueError):
    """Invalid histogram or probability vector."""


@dataclass(frozen=True)
class Counts:
    """Outcome histogram from one shot batch."""

    n_qubits: int
    histogram: dict[int, int]
    total_shots: int

    def __post_init__(self):
        if self.total_shots < 1:
            raise DistributionError("total_shots must be >= 1")
        dim = 1 << self.n_qubits
        total = 0
        for outcome, count in self.histogram.items():
            if not 0 <= outcome < dim:
                raise DistributionError(f"outcome {outcome} outside [0, {dim})")
            if count < 0:
                raise DistributionError(f"negative count for outcome {outcome}")
            total += count
        if total != self.total_shots:
            raise DistributionError(
                f"histogram sums to {total}, expected total_shots={self.total_shots}"
            )

    def to_probabilities(self) -> np.ndarray:
        """Empirical distribution over all 2^n outcomes (missing ones are 0)."""
        probs = np.zeros(1 << self.n_qubits, dtype=np.float64)
        for outcome, count in self.histogram.items():
            probs[outcome] = count / self.total_shots
        return probs


def counts_from_array(n_qubits: int, draws: np.ndarray) -> Counts:
    """Build Counts from a per-outcome draw vector, dropping zero entries."""
    nonzero = np.nonzero(draws)[0]
    hist = {int(i): int(draws[i]) for i in nonzero}
    return Counts(n_qubits, hist, int(draws.sum()))


def sample_counts(state: QuantumState, shots: int, seed: int) -> Counts:
    """Aggregate ``shots`` independent basis-state measurements of ``state``.

    Deterministic given ``seed``: draws come from the derived "measure"
    stream, shared with the zero-noise path of the trajectory sampler.
    """
    if shots < 1:
        raise DistributionError("shots must be >= 1")
    probs = exact_distribution(state)
    probs = probs / probs.sum()
    draws = rng_for(seed, "measure").multinomial(shots, probs)
    return counts_from_array(state.n_qubits, draws)


def _as_prob_vector(dist) -> np.ndarray:
    if isinstance(dist, Counts):
        # Entropy of counts only needs the observed outcomes.
        vec = np.array(sorted(dist.histogram.values()), dtype=np.float64)
    else:
        vec = np.asarray(dist, dtype=np.float64).ravel()
    if vec.size == 0:
        raise DistributionError("empty distribution")
    if np.any(vec < 0):
        raise DistributionError("negative probability entry")
    total = vec.sum()
    if total <= 0:
        raise DistributionError("distribution sums to zero")
    return vec / total


def entropy(dist) -> float:
    """Shannon entropy -sum p*log2(p) in bits of a Counts or probability vector."""
    probs = _as_prob_vector(dist)
    nz = probs[probs > 0]
    return float(-np.sum(nz * np.log2(nz)))


def hellinger(p, q) -> float:
    """Hellinger distance (1/sqrt2)*sqrt(sum (sqrt p - sqrt q)^2), in [0, 1]."""
    pv = np.asarray(p, dtype=np.float64).ravel()
    qv = np.asarray(q, dtype=np.float64).ravel()
    if pv.shape != qv.shape:
        raise DistributionError(f"support sizes differ: {pv.shape} vs {qv.shape}")
    diff = np.sqrt(pv) - np.sqrt(qv)
    dist = float(np.sqrt(0.5 * np.sum(diff * diff)))
    return min(max(dist, 0.0), 1.0)
