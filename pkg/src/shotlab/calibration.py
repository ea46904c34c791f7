"""Empirical shot-requirement calibration.

How many shots does it take before a sampled histogram sits within a
Hellinger budget of its target distribution? `required_shots` answers with a
confidence quantile: the smallest shot count at which at least a given
fraction of Monte-Carlo trials meet the budget. Sweeping a family of targets
of increasing entropy exposes the (empirically exponential) entropy-to-shots
relationship that the adaptive policies exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import derive_seed, rng_for
from .sampling import entropy, hellinger
from .statevector import run_circuit, exact_distribution
from .ansatz import build_hw_efficient_circuit

SHOT_CAP = 10_000_000


class CalibrationError(RuntimeError):
    """Unreachable budget or invalid sweep specification."""


@dataclass(frozen=True)
class CalibrationPoint:
    entropy_bits: float
    required_shots: int
    target_distance: float
    confidence: float
    trials: int

    def __post_init__(self):
        if self.required_shots < 1:
            raise CalibrationError("required_shots must be >= 1")
        if not 0.0 < self.target_distance < 1.0:
            raise CalibrationError("target_distance must be in (0, 1)")


def _probe(target: np.ndarray, shots: int, hd_budget: float, confidence: float,
           trials: int, seed: int) -> bool:
    """Do >= confidence of the trials land within the budget at this shot count?"""
    rng = rng_for(seed, "probe", shots)
    draws = rng.multinomial(shots, target, size=trials)
    empirical = draws / shots
    diff = np.sqrt(empirical) - np.sqrt(target)[np.newaxis, :]
    distances = np.sqrt(0.5 * np.sum(diff * diff, axis=1))
    needed = int(np.ceil(confidence * trials - 1e-9))
    return int(np.sum(distances <= hd_budget)) >= needed


def required_shots(
    target_dist,
    hd_budget: float,
    confidence: float = 0.9,
    trials: int = 100,
    seed: int = 0,
    shot_cap: int = SHOT_CAP,
) -> int:
    """Smallest shot count meeting the Hellinger budget at the given confidence.

    Geometric doubling brackets the answer, then integer bisection pins it.
    Probes at a given shot count are keyed by (seed, shots), so the result is
    deterministic and independent of the search path.
    """
    if not 0.0 < hd_budget < 1.0:
        raise CalibrationError("hd_budget must be in (0, 1)")
    if not 0.0 < confidence <= 1.0:
        raise CalibrationError("confidence must be in (0, 1]")
    if trials < 30:
        raise CalibrationError("trials must be >= 30 for a stable quantile")
    target = np.asarray(target_dist, dtype=np.float64).ravel()
    if target.size == 0 or np.any(target < 0):
        raise CalibrationError("target must be a nonnegative distribution")
    target = target / target.sum()

    cache: dict[int, bool] = {}

    def probe(shots: int) -> bool:
        if shots not in cache:
            cache[shots] = _probe(target, shots, hd_budget, confidence, trials, seed)
        return cache[shots]

    if probe(1):
        return 1
    lo, hi = 1, 2
    while not probe(hi):
        lo, hi = hi, hi * 2
        if hi > shot_cap:
            raise CalibrationError(
                f"budget {hd_budget} unreachable within the {shot_cap}-shot cap"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(mid):
            hi = mid
        else:
            lo = mid
    return hi


def entropy_shots_sweep(
    family,
    hd_budget: float,
    confidence: float = 0.9,
    trials: int = 100,
    seed: int = 0,
) -> list[CalibrationPoint]:
    """One CalibrationPoint per target distribution, in family order."""
    family = list(family)
    if not family:
        raise CalibrationError("empty target family")
    points = []
    for j, dist in enumerate(family):
        shots = required_shots(
            dist, hd_budget, confidence, trials, derive_seed(seed, "point", j)
        )
        points.append(
            CalibrationPoint(
                entropy_bits=entropy(dist),
                required_shots=shots,
                target_distance=hd_budget,
                confidence=confidence,
                trials=trials,
            )
        )
    return points


def make_target_family(kind: str, n_qubits: int, sizes=None, depth: int = 3, seed: int = 0):
    """Deterministic target distributions of known entropy.

    kinds:
      uniform            -- one maximal-entropy target (n bits)
      ghz                -- half mass on |0..0> and |1..1> (1 bit)
      truncated-uniform  -- uniform over the first j outcomes, per j in ``sizes``
      random-circuit     -- Born distributions of seeded random ansaetze, one
                            per entry of ``sizes`` (used as circuit seeds)
    """
    if n_qubits < 1:
        raise CalibrationError("n_qubits must be >= 1")
    dim = 1 << n_qubits
    kind = kind.lower()
    if kind == "uniform":
        return [np.full(dim, 1.0 / dim)]
    if kind == "ghz":
        dist = np.zeros(dim)
        dist[0] = 0.5
        dist[-1] = 0.5
        return [dist]
    if kind == "truncated-uniform":
        if not sizes:
            raise CalibrationError("truncated-uniform needs outcome sizes")
        family = []
        for j in sizes:
            j = int(j)
            if not 1 <= j <= dim:
                raise CalibrationError(f"truncated size {j} outside [1, {dim}]")
            dist = np.zeros(dim)
            dist[:j] = 1.0 / j
            family.append(dist)
        return family
    if kind == "random-circuit":
        circuit_seeds = [int(s) for s in (sizes or [seed])]
        family = []
        for s in circuit_seeds:
            circuit = build_hw_efficient_circuit(n_qubits, depth)
            params = rng_for(s, "target-circuit").uniform(-np.pi, np.pi, circuit.n_parameters)
            family.append(exact_distribution(run_circuit(circuit, params)))
        return family
    raise CalibrationError(f"unknown target family kind {kind!r}")


def default_calibration_family(n_qubits: int = 8, points: int = 12):
    """Truncated uniforms with geometrically spaced supports, 1..n bits.

    The exact point mass is deliberately excluded: its one-shot requirement
    sits far below the exponential entropy-shots regime and would dominate a
    small-sample regression.
    """
    dim = 1 << n_qubits
    raw = np.geomspace(2, dim, points)
    sizes = sorted(set(int(round(x)) for x in raw))
    return make_target_family("truncated-uniform", n_qubits, sizes=sizes)


def fit_log2_shots_vs_entropy(points: list[CalibrationPoint]) -> tuple[float, float, float]:
    """Least-squares line log2(shots) = slope*entropy + intercept, plus R^2."""
    if len(points) < 2:
        raise CalibrationError("need at least 2 calibration points to fit")
    x = np.array([p.entropy_bits for p in points])
    y = np.log2(np.array([float(p.required_shots) for p in points]))
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
