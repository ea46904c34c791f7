"""Aggregation of training logs into per-policy summaries and comparisons."""

from __future__ import annotations

from dataclasses import dataclass

from .training import TrainLog, arg_metric


class ReportError(ValueError):
    """Inconsistent or insufficient logs for a summary."""


@dataclass(frozen=True)
class PolicySummary:
    policy: str
    s_avg: float
    i_tot: float
    s_tot: float
    final_cost: float
    arg_percent: float | None
    seed_count: int


def summarize(logs: list[TrainLog], e_ideal: float | None) -> PolicySummary:
    """Mean totals over seeds for one policy.

    ``s_avg`` is mean(S_tot)/mean(I_tot) so the S_tot = S_avg * I_tot identity
    holds on the summary itself, not just per log. ARG comes from the common
    1024-shot final evaluations; it is None when no ideal value is known.
    """
    if not logs:
        raise ReportError("no logs to summarize")
    names = {log.metadata["policy"]["name"] for log in logs}
    if len(names) != 1:
        raise ReportError(f"mixed policies in summary: {sorted(names)}")
    n = len(logs)
    s_tot = sum(log.s_tot for log in logs) / n
    i_tot = sum(log.i_tot for log in logs) / n
    final_cost = sum(log.final_evaluation.cost for log in logs) / n
    arg = None
    if e_ideal is not None and e_ideal != 0:
        arg = sum(arg_metric(e_ideal, log.final_evaluation.cost) for log in logs) / n
    return PolicySummary(
        policy=names.pop(),
        s_avg=s_tot / i_tot,
        i_tot=i_tot,
        s_tot=s_tot,
        final_cost=final_cost,
        arg_percent=arg,
        seed_count=n,
    )


def reduction_vs_baseline(summary: PolicySummary, baseline: PolicySummary) -> float:
    """Percent fewer total shots than the baseline (negative = more shots)."""
    if baseline.s_tot <= 0:
        raise ReportError("baseline total shots must be > 0")
    return 100.0 * (1.0 - summary.s_tot / baseline.s_tot)


@dataclass(frozen=True)
class ComparisonRow:
    policy: str
    mean_reduction_percent: float
    mean_arg_percent: float | None
    arg_delta_vs_baseline: float | None
    seed_count: int


def compare_to_baseline(
    logs_by_policy: dict[str, list[TrainLog]],
    baseline_policy: str = "fixed",
) -> list[ComparisonRow]:
    """Seed-matched comparison of every policy against the baseline.

    Reductions are computed per seed as 100*(1 - S_tot/S_tot_baseline) and
    then averaged; policies must cover exactly the baseline's seed set.
    """
    if baseline_policy not in logs_by_policy:
        raise ReportError(f"no {baseline_policy!r} baseline among the logs")

    def by_seed(logs):
        out = {}
        for log in logs:
            s = log.metadata["seed"]
            if s in out:
                raise ReportError(f"duplicate seed {s} for policy {log.metadata['policy']['name']}")
            out[s] = log
        return out

    base = by_seed(logs_by_policy[baseline_policy])
    base_seeds = set(base)
    e_ideal = next(iter(base.values())).metadata.get("e_ideal")

    def mean_arg(logs):
        if e_ideal is None or e_ideal == 0:
            return None
        return sum(arg_metric(e_ideal, log.final_evaluation.cost) for log in logs) / len(logs)

    baseline_arg = mean_arg(list(base.values()))
    rows = []
    for policy in sorted(logs_by_policy):
        seeded = by_seed(logs_by_policy[policy])
        if set(seeded) != base_seeds:
            raise ReportError(
                f"policy {policy!r} seeds {sorted(seeded)} do not match "
                f"baseline seeds {sorted(base_seeds)}; comparisons must be seed-matched"
            )
        reductions = [
            100.0 * (1.0 - seeded[s].s_tot / base[s].s_tot) for s in sorted(base_seeds)
        ]
        arg = mean_arg([seeded[s] for s in sorted(base_seeds)])
        delta = None if (arg is None or baseline_arg is None) else arg - baseline_arg
        rows.append(
            ComparisonRow(
                policy=policy,
                mean_reduction_percent=sum(reductions) / len(reductions),
                mean_arg_percent=arg,
                arg_delta_vs_baseline=delta,
                seed_count=len(base_seeds),
            )
        )
    return rows
