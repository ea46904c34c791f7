"""shotlab: entropy-adaptive measurement-shot allocation for VQA training.

Library surface (the CLI in `shotlab.cli` wraps these):

* statevector  -- Circuit/Gate/QuantumState, run_circuit, exact_distribution
* sampling     -- Counts, sample_counts, entropy, hellinger
* graphs       -- graph families, cut_value, brute_force_max_cut
* ansatz       -- QAOA + hardware-efficient circuits, observables, estimators
* noise        -- NoiseModel, trajectory sampler sample_counts_noisy
* allocation   -- ShotPolicy, next_shots, default_k
* training     -- train (the adaptive-shot loop), minimize, TrainLog, arg_metric
* calibration  -- required_shots, entropy_shots_sweep, target families
* report       -- per-policy summaries and baseline comparisons
"""

__version__ = "0.1.0"

from .allocation import ShotPolicy, default_k, next_shots
from .ansatz import (
    Observable,
    build_hw_efficient_circuit,
    build_qaoa_circuit,
    exact_qaoa_cost,
    group_and_measure,
    parse_hamiltonian,
    qaoa_cost_from_counts,
)
from .calibration import (
    CalibrationPoint,
    entropy_shots_sweep,
    make_target_family,
    required_shots,
)
from .graphs import (
    CutResult,
    WeightedGraph,
    brute_force_max_cut,
    cut_value,
    generate_graph,
)
from .noise import NoiseModel, sample_counts_noisy, trajectory_plan
from .report import PolicySummary, reduction_vs_baseline, summarize
from .rng import derive_seed, rng_for
from .sampling import Counts, entropy, hellinger, sample_counts
from .statevector import (
    Circuit,
    Gate,
    QuantumState,
    apply_gate,
    exact_distribution,
    run_circuit,
    zero_state,
)
from .training import (
    HamiltonianProblem,
    OptimizerOptions,
    QaoaProblem,
    TrainLog,
    arg_metric,
    minimize,
    train,
)
