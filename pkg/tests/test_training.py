import math

import numpy as np
import pytest

from shotlab.allocation import ShotPolicy, next_shots
from shotlab.ansatz import parse_hamiltonian
from shotlab.graphs import WeightedGraph, brute_force_max_cut, generate_graph
from shotlab.noise import NoiseModel
from shotlab.training import (
    HamiltonianProblem,
    OptimizerOptions,
    QaoaProblem,
    TrainLog,
    TrainingError,
    arg_metric,
    minimize,
    train,
)

SINGLE_EDGE = WeightedGraph(2, ((0, 1, 1.0),))


class TestMinimize:
    def test_quadratic_1d(self):
        out = minimize(lambda x: (x[0] - 1.0) ** 2, [0.0], OptimizerOptions())
        assert abs(out.x_best[0] - 1.0) < 1e-3

    def test_sphere_2d(self):
        out = minimize(lambda x: x[0] ** 2 + x[1] ** 2, [3.0, -2.0], OptimizerOptions())
        assert np.linalg.norm(out.x_best) < 1e-3

    def test_rosenbrock_within_budget(self):
        def rosen(x):
            return (1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2

        options = OptimizerOptions(
            max_iterations=1000, initial_step=2.0, convergence_tolerance=1e-8
        )
        out = minimize(rosen, [-1.2, 1.0], options)
        assert out.n_evaluations <= 1000
        assert rosen(out.x_best) < 1e-2

    def test_history_records_every_evaluation_in_order(self):
        seen = []

        def f(x):
            seen.append(float(x[0]))
            return (x[0] - 2.0) ** 2

        out = minimize(f, [0.0], OptimizerOptions(max_iterations=50))
        assert [x for (x, _) in out.history] == [pytest.approx([v]) for v in seen]
        assert len(out.history) == len(seen)

    def test_non_finite_objective_aborts(self):
        with pytest.raises(TrainingError):
            minimize(lambda x: float("nan"), [0.0], OptimizerOptions())

    def test_options_validation(self):
        with pytest.raises(ValueError):
            OptimizerOptions(max_iterations=0)
        with pytest.raises(ValueError):
            OptimizerOptions(convergence_tolerance=0.0)


class TestArgMetric:
    def test_examples(self):
        assert arg_metric(-2.0, -1.9) == pytest.approx(5.0)
        assert arg_metric(-2.0, -2.0) == 0.0
        assert arg_metric(-2.0, -2.2) == pytest.approx(10.0)

    def test_zero_ideal_rejected(self):
        with pytest.raises(ValueError):
            arg_metric(0.0, 1.0)


def _quick_options(**kw):
    defaults = dict(max_iterations=60, initial_step=0.5, convergence_tolerance=1e-4)
    defaults.update(kw)
    return OptimizerOptions(**defaults)


class TestTrainQaoa:
    def test_single_edge_reaches_max_cut(self):
        log = train(
            QaoaProblem(SINGLE_EDGE, layers=1),
            ShotPolicy("fixed", s_fixed=4096),
            options=OptimizerOptions(max_iterations=300),
            seed=11,
        )
        assert abs(log.final_evaluation.cost - (-1.0)) <= 0.05
        assert log.final_evaluation.shots == 1024

    def test_capped_dds_matches_fixed_at_cap(self):
        problem = QaoaProblem(generate_graph("pl", 4, seed=2), layers=2)
        huge_k = ShotPolicy("dds", k=1e9, cap=1024)
        fixed = ShotPolicy("fixed", s_fixed=1024)
        log_dds = train(problem, huge_k, options=_quick_options(), seed=5)
        log_fixed = train(problem, fixed, options=_quick_options(), seed=5)
        assert all(r.shots == 1024 for r in log_dds.records)
        assert [r.cost for r in log_dds.records] == [r.cost for r in log_fixed.records]
        assert log_dds.final_evaluation.cost == log_fixed.final_evaluation.cost

    def test_deterministic_logs(self):
        problem = QaoaProblem(generate_graph("ba", 4, seed=3), layers=2)
        policy = ShotPolicy("dds", k=16.0)
        a = train(problem, policy, options=_quick_options(), seed=9)
        b = train(problem, policy, options=_quick_options(), seed=9)
        assert a.to_dict() == b.to_dict()
        c = train(problem, policy, options=_quick_options(), seed=10)
        assert a.to_dict() != c.to_dict()

    def test_totals_identity_and_replay(self):
        problem = QaoaProblem(generate_graph("ws", 5, seed=4), layers=2)
        policy = ShotPolicy("dds", k=8.0, cap=1024, initial_entropy=10.0)
        log = train(problem, policy, options=_quick_options(), seed=21)
        assert log.s_tot == sum(r.shots for r in log.records)
        assert log.s_avg == log.s_tot / log.i_tot
        assert log.i_tot == len(log.records)
        # shots at i depend only on the entropy recorded at i-1
        prev = policy.initial_entropy
        for rec in log.records:
            assert rec.shots == next_shots(policy, rec.iteration, prev)
            prev = rec.entropy_bits
        # first evaluation uses the initial entropy of 10 bits
        assert log.records[0].shots == min(1024, round(8.0 * 2**10))

    def test_costs_bounded_by_optimum_on_unit_graph(self):
        graph = generate_graph("pl", 5, seed=6)
        best = brute_force_max_cut(graph).best_value
        log = train(
            QaoaProblem(graph, layers=2),
            ShotPolicy("fixed", s_fixed=512),
            options=_quick_options(),
            seed=3,
        )
        for rec in log.records:
            assert -best - 1e-12 <= rec.cost <= 0.0

    def test_entropy_declines_over_training(self):
        graph = generate_graph("pl", 6, seed=1)
        problem = QaoaProblem(graph, layers=3)
        firsts, lasts = [], []
        for seed in range(10):
            log = train(
                problem,
                ShotPolicy("fixed", s_fixed=512),
                options=OptimizerOptions(max_iterations=150),
                seed=seed,
            )
            cut = max(1, log.i_tot // 10)
            ents = [r.entropy_bits for r in log.records]
            firsts.append(sum(ents[:cut]) / cut)
            lasts.append(sum(ents[-cut:]) / cut)
        assert sum(lasts) / len(lasts) < sum(firsts) / len(firsts)

    def test_zero_noise_training_matches_noiseless(self):
        problem = QaoaProblem(generate_graph("sk", 4, seed=7), layers=2)
        policy = ShotPolicy("dds", k=32.0)
        quiet = train(
            problem, policy, noise=NoiseModel(0.0, 0.0, "off"),
            options=_quick_options(), seed=13,
        )
        clean = train(problem, policy, options=_quick_options(), seed=13)
        assert [r.cost for r in quiet.records] == [r.cost for r in clean.records]
        assert [r.shots for r in quiet.records] == [r.shots for r in clean.records]

    def test_metadata_contents(self):
        problem = QaoaProblem(SINGLE_EDGE, layers=1)
        log = train(problem, ShotPolicy("dds"), options=_quick_options(), seed=1)
        md = log.metadata
        assert md["seed"] == 1
        assert md["policy"]["kind"] == "dds"
        assert md["policy"]["k"] == 64.0  # default for narrow circuits, clamped
        assert md["policy"]["cap"] == 1024
        assert md["optimizer"]["method"] == "scipy-cobyla"
        assert md["noise"] is None
        assert md["e_ideal"] == -1.0

    def test_initial_parameters_override(self):
        problem = QaoaProblem(SINGLE_EDGE, layers=1)
        options = _quick_options(initial_parameters=(0.1, 0.2))
        log = train(problem, ShotPolicy("fixed", s_fixed=128), options=options, seed=2)
        assert log.records[0].parameters == (0.1, 0.2)
        with pytest.raises(TrainingError):
            train(
                problem,
                ShotPolicy("fixed"),
                options=_quick_options(initial_parameters=(0.1,)),
                seed=2,
            )


class TestTrainHamiltonian:
    OBS_TEXT = "1.0 ZZ\n0.3 XI\n-0.5 IZ\noffset 0.2"

    def test_runs_and_logs(self):
        problem = HamiltonianProblem(parse_hamiltonian(self.OBS_TEXT), layers=1,
                                     reference_energy=-1.3)
        log = train(problem, ShotPolicy("dds", k=16.0), options=_quick_options(), seed=4)
        log.validate()
        assert log.metadata["e_ideal"] == -1.3
        assert log.i_tot == len(log.records)

    def test_deterministic(self):
        problem = HamiltonianProblem(parse_hamiltonian(self.OBS_TEXT), layers=1)
        a = train(problem, ShotPolicy("fixed", s_fixed=256), options=_quick_options(), seed=8)
        b = train(problem, ShotPolicy("fixed", s_fixed=256), options=_quick_options(), seed=8)
        assert a.to_dict() == b.to_dict()

    def test_noisy_zero_matches_noiseless(self):
        problem = HamiltonianProblem(parse_hamiltonian(self.OBS_TEXT), layers=1)
        policy = ShotPolicy("fixed", s_fixed=128)
        quiet = train(problem, policy, noise=NoiseModel(0.0, 0.0),
                      options=_quick_options(max_iterations=25), seed=5)
        clean = train(problem, policy, options=_quick_options(max_iterations=25), seed=5)
        assert [r.cost for r in quiet.records] == [r.cost for r in clean.records]


class TestTrainLogSerialization:
    def test_round_trip(self):
        problem = QaoaProblem(SINGLE_EDGE, layers=1)
        log = train(problem, ShotPolicy("fixed", s_fixed=64), options=_quick_options(), seed=6)
        doc = log.to_dict()
        back = TrainLog.from_dict(doc)
        assert back.to_dict() == doc
        assert back.s_tot == log.s_tot
        assert back.final_evaluation.cost == log.final_evaluation.cost

    def test_timing_not_serialized(self):
        problem = QaoaProblem(SINGLE_EDGE, layers=1)
        log = train(problem, ShotPolicy("fixed", s_fixed=64), options=_quick_options(), seed=6)
        assert log.total_elapsed_s() > 0.0
        doc = log.to_dict()
        assert "elapsed" not in str(doc)
