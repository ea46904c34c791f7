"""Batch execution and artifact writing for the CLI.

Jobs (one training run per policy/seed or k/seed pair) are independent and
may run on a process pool; workers return log dictionaries and the parent
writes every file in a fixed order, so outputs are byte-identical regardless
of --jobs. Data files carry no timestamps — wall-clock information goes to
the run_info.json sidecar only.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .allocation import ShotPolicy
from .calibration import (
    default_calibration_family,
    entropy_shots_sweep,
    fit_log2_shots_vs_entropy,
    make_target_family,
)
from .config import CalibrateConfig, SweepKConfig, TrainConfig
from .report import compare_to_baseline, summarize
from .training import TrainLog, arg_metric, train


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    """Comma-separated, header row, '.' decimal, LF endings, bare numerics."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else str(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path: Path, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def safe_name(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "-" for c in label)


def _train_job(args) -> dict:
    (problem, policy, noise, optimizer, seed, spt, feedback, instance) = args
    log = train(
        problem,
        policy,
        noise=noise,
        options=optimizer,
        seed=seed,
        shots_per_trajectory=spt,
        entropy_feedback=feedback,
        extra_metadata={"instance": instance},
    )
    return log.to_dict()


def _run_jobs(job_args: list, jobs: int) -> list[dict]:
    if jobs <= 1 or len(job_args) <= 1:
        return [_train_job(a) for a in job_args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_train_job, job_args))


def _iteration_rows(log: TrainLog) -> list[list]:
    return [[r.iteration, r.shots, r.entropy_bits, r.cost] for r in log.records]


def cmd_train(cfg: TrainConfig, jobs: int = 1) -> Path:
    """One log pair (.json/.csv) per (policy, seed), plus summary.csv."""
    t0 = time.perf_counter()
    job_args = [
        (cfg.problem.problem, policy, cfg.noise, cfg.optimizer, seed,
         cfg.shots_per_trajectory, cfg.entropy_feedback, cfg.problem.instance)
        for policy in cfg.policies
        for seed in cfg.seeds
    ]
    results = _run_jobs(job_args, jobs)

    logs = [TrainLog.from_dict(doc) for doc in results]
    e_ideal = cfg.problem.problem.ideal_cost()
    summary_rows = []
    for (args, doc, log) in zip(job_args, results, logs):
        policy, seed = args[1], args[4]
        stem = f"{safe_name(policy.label)}__seed{seed}"
        write_json(cfg.out_dir / f"{stem}.json", doc)
        write_csv(
            cfg.out_dir / f"{stem}.csv",
            ["iteration", "shots", "entropy_bits", "cost"],
            _iteration_rows(log),
        )
        arg = None
        if e_ideal is not None and e_ideal != 0:
            arg = arg_metric(e_ideal, log.final_evaluation.cost)
        summary_rows.append(
            [policy.label, seed, log.s_avg, log.i_tot, log.s_tot,
             log.final_evaluation.cost, arg]
        )
    write_csv(
        cfg.out_dir / "summary.csv",
        ["policy", "seed", "s_avg", "i_tot", "s_tot", "final_cost", "arg_percent"],
        summary_rows,
    )
    _write_sidecar(cfg.out_dir, "train", t0, jobs, n_jobs=len(job_args))
    return cfg.out_dir


def cmd_calibrate(cfg: CalibrateConfig) -> Path:
    """Entropy-vs-required-shots sweep CSV plus the fitted line as JSON."""
    t0 = time.perf_counter()
    if cfg.family_kind == "default":
        family = default_calibration_family(cfg.n_qubits)
    else:
        family = make_target_family(
            cfg.family_kind, cfg.n_qubits, sizes=cfg.sizes, depth=cfg.depth, seed=cfg.seed
        )
    points = entropy_shots_sweep(
        family, cfg.hd_budget, cfg.confidence, cfg.trials, cfg.seed
    )
    rows = [
        [p.entropy_bits, p.required_shots, p.target_distance, p.confidence, p.trials, cfg.seed]
        for p in points
    ]
    write_csv(
        cfg.out_dir / "calibration.csv",
        ["entropy_bits", "required_shots", "hd_budget", "confidence", "trials", "seed"],
        rows,
    )
    slope, intercept, r2 = fit_log2_shots_vs_entropy(points)
    write_json(
        cfg.out_dir / "calibration_fit.json",
        {"slope": slope, "intercept": intercept, "r_squared": r2, "points": len(points)},
    )
    _write_sidecar(cfg.out_dir, "calibrate", t0, jobs=1, n_jobs=len(points))
    return cfg.out_dir


def cmd_sweep_k(cfg: SweepKConfig, jobs: int = 1) -> Path:
    """DDS_M-capped training per (k, seed); per-run rows and per-k aggregates."""
    t0 = time.perf_counter()
    job_args = []
    for k in cfg.k_values:
        policy = ShotPolicy(kind="dds_m", k=k, cap=cfg.cap, name=f"dds_m_k{k:g}")
        for seed in cfg.seeds:
            job_args.append(
                (cfg.problem.problem, policy, cfg.noise, cfg.optimizer, seed,
                 cfg.shots_per_trajectory, "z-group", cfg.problem.instance)
            )
    results = _run_jobs(job_args, jobs)
    logs = [TrainLog.from_dict(doc) for doc in results]

    run_rows = []
    per_k: dict[float, list[TrainLog]] = {}
    for args, log in zip(job_args, logs):
        k = args[1].k
        seed = args[4]
        per_k.setdefault(k, []).append(log)
        run_rows.append([k, seed, log.s_tot, log.i_tot, log.final_evaluation.cost])
    write_csv(
        cfg.out_dir / "k_sweep_runs.csv",
        ["k", "seed", "s_tot", "i_tot", "final_cost"],
        run_rows,
    )

    agg_rows = []
    for k in cfg.k_values:
        group = per_k[k]
        n = len(group)
        costs = [log.final_evaluation.cost for log in group]
        mean_cost = sum(costs) / n
        var = sum((c - mean_cost) ** 2 for c in costs) / (n - 1) if n > 1 else 0.0
        agg_rows.append(
            [k, n, sum(log.s_tot for log in group) / n, mean_cost, var ** 0.5]
        )
    write_csv(
        cfg.out_dir / "k_sweep.csv",
        ["k", "seeds", "mean_s_tot", "mean_final_cost", "sd_final_cost"],
        agg_rows,
    )
    _write_sidecar(cfg.out_dir, "sweep-k", t0, jobs, n_jobs=len(job_args))
    return cfg.out_dir


def cmd_compare(log_paths: list, out_dir: Path, baseline: str = "fixed") -> Path:
    """Seed-matched policy comparison CSV from saved TrainLog JSON files."""
    t0 = time.perf_counter()
    logs_by_policy: dict[str, list[TrainLog]] = {}
    for path in sorted(str(p) for p in log_paths):
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        log = TrainLog.from_dict(doc)
        logs_by_policy.setdefault(log.metadata["policy"]["name"], []).append(log)
    rows = compare_to_baseline(logs_by_policy, baseline_policy=baseline)
    write_csv(
        out_dir / "comparison.csv",
        ["policy", "mean_reduction_percent", "mean_arg_percent",
         "arg_delta_vs_baseline", "seed_count"],
        [
            [r.policy, r.mean_reduction_percent, r.mean_arg_percent,
             r.arg_delta_vs_baseline, r.seed_count]
            for r in rows
        ],
    )
    _write_sidecar(out_dir, "compare", t0, jobs=1, n_jobs=len(log_paths))
    return out_dir


def _write_sidecar(out_dir: Path, command: str, t0: float, jobs: int, n_jobs: int) -> None:
    # The one file allowed to differ between reruns.
    write_json(
        out_dir / "run_info.json",
        {
            "command": command,
            "finished_utc": datetime.now(timezone.utc).isoformat(),
            "elapsed_s": time.perf_counter() - t0,
            "jobs": jobs,
            "units_of_work": n_jobs,
            "shotlab_version": __version__,
        },
    )
