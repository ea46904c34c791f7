"""Run configuration: one JSON document, with CLI flags taking precedence.

Precedence is flags > config fields > package defaults. Validation errors
carry the offending field path and map to exit code 1 in the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .allocation import PolicyError, ShotPolicy
from .ansatz import ObservableError, parse_hamiltonian
from .graphs import GraphError, generate_graph, load_instance, to_instance_dict
from .noise import NoiseModel, PRESETS
from .training import HamiltonianProblem, OptimizerOptions, QaoaProblem


class ConfigError(ValueError):
    """Invalid or missing configuration."""


def load_json_config(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {p} must be a JSON object")
    return doc


def parse_noise(spec) -> NoiseModel | None:
    if spec is None or spec == "none" or spec == "":
        return None
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise ConfigError(
                f"unknown noise preset {spec!r} (available: {sorted(PRESETS)} or 'none')"
            )
        return PRESETS[spec]
    if isinstance(spec, dict):
        try:
            return NoiseModel(
                p1=float(spec["p1"]),
                p2=float(spec["p2"]),
                label=str(spec.get("label", "custom")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"noise: expected p1/p2 in [0,1]: {exc}") from exc
    raise ConfigError(f"noise: expected preset name, 'none', or object, got {spec!r}")


def parse_policy(spec) -> ShotPolicy:
    if isinstance(spec, str):
        spec = {"kind": spec}
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError(f"policy: expected a kind or object with 'kind', got {spec!r}")
    allowed = {
        "kind", "name", "s_fixed", "s_begin", "slope_l", "floor",
        "k", "cap", "initial_entropy",
    }
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"policy: unknown fields {sorted(unknown)}")
    try:
        return ShotPolicy(**spec)
    except (PolicyError, TypeError) as exc:
        raise ConfigError(f"policy {spec.get('kind')!r}: {exc}") from exc


def parse_policies(specs) -> list[ShotPolicy]:
    if not specs:
        raise ConfigError("config needs at least one policy")
    policies = [parse_policy(s) for s in specs]
    labels = [p.label for p in policies]
    if len(set(labels)) != len(labels):
        raise ConfigError(f"policy labels must be unique, got {labels}")
    return policies


def parse_optimizer(spec) -> OptimizerOptions:
    spec = dict(spec or {})
    allowed = {"max_iterations", "initial_step", "convergence_tolerance", "initial_parameters"}
    unknown = set(spec) - allowed
    if unknown:
        raise ConfigError(f"optimizer: unknown fields {sorted(unknown)}")
    try:
        return OptimizerOptions(**spec)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"optimizer: {exc}") from exc


@dataclass
class ProblemSpec:
    """Resolved problem plus the instance descriptor recorded in logs."""

    problem: object
    instance: dict


def parse_problem(spec, base_dir: Path) -> ProblemSpec:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ConfigError("problem: expected an object with 'kind' (qaoa | hamiltonian)")
    kind = spec["kind"]
    if kind == "qaoa":
        layers = int(spec.get("layers", 1))
        gspec = spec.get("graph")
        if not isinstance(gspec, dict):
            raise ConfigError("problem.graph: expected an object")
        if "file" in gspec:
            path = base_dir / gspec["file"]
            try:
                graph, doc = load_instance(path)
            except GraphError as exc:
                raise ConfigError(f"problem.graph.file: {exc}") from exc
            instance = {"graph_file": str(gspec["file"]), **{
                k: doc[k] for k in ("model", "n_nodes", "seed", "params") if k in doc
            }}
        else:
            try:
                model = gspec["model"]
                n_nodes = int(gspec["n_nodes"])
                gseed = int(gspec.get("seed", 0))
                params = gspec.get("params") or {}
                graph = generate_graph(model, n_nodes, gseed, params)
            except (KeyError, GraphError, TypeError, ValueError) as exc:
                raise ConfigError(f"problem.graph: {exc}") from exc
            instance = to_instance_dict(graph, model, gseed, params)
            instance.pop("edges")
        if layers < 1:
            raise ConfigError("problem.layers must be >= 1")
        return ProblemSpec(QaoaProblem(graph, layers), {"kind": "qaoa", "layers": layers, **instance})
    if kind == "hamiltonian":
        if "file" not in spec:
            raise ConfigError("problem: hamiltonian kind needs a 'file'")
        path = base_dir / spec["file"]
        if not path.exists():
            raise ConfigError(f"problem.file: hamiltonian file not found: {path}")
        try:
            observable = parse_hamiltonian(path.read_text(encoding="utf-8"))
        except ObservableError as exc:
            raise ConfigError(f"problem.file {path}: {exc}") from exc
        layers = int(spec.get("layers", 1))
        if layers < 1:
            raise ConfigError("problem.layers must be >= 1")
        ref = spec.get("reference_energy")
        ref = None if ref is None else float(ref)
        problem = HamiltonianProblem(observable, layers, ref)
        return ProblemSpec(
            problem,
            {"kind": "hamiltonian", "file": str(spec["file"]), "layers": layers,
             "reference_energy": ref},
        )
    raise ConfigError(f"problem.kind: expected 'qaoa' or 'hamiltonian', got {kind!r}")


def parse_seeds(doc) -> list[int]:
    seeds = doc.get("seeds")
    if seeds is None and "seed" in doc:
        seeds = [doc["seed"]]
    if not seeds:
        raise ConfigError("config needs a nonempty 'seeds' list")
    out = [int(s) for s in seeds]
    if len(set(out)) != len(out):
        raise ConfigError(f"seeds must be distinct, got {out}")
    return out


@dataclass
class TrainConfig:
    problem: ProblemSpec
    policies: list[ShotPolicy]
    noise: NoiseModel | None
    optimizer: OptimizerOptions
    seeds: list[int]
    out_dir: Path
    shots_per_trajectory: int = 1
    entropy_feedback: str = "z-group"

    @classmethod
    def from_document(cls, doc: dict, base_dir: Path, overrides: dict) -> "TrainConfig":
        doc = dict(doc)
        if overrides.get("seed") is not None:
            doc["seeds"] = [overrides["seed"]]
        if overrides.get("noise") is not None:
            doc["noise"] = overrides["noise"]
        if overrides.get("out") is not None:
            doc["out"] = overrides["out"]
        if "problem" not in doc:
            raise ConfigError("config needs a 'problem'")
        problem = parse_problem(doc["problem"], base_dir)
        policies = parse_policies(doc.get("policies", []))
        if overrides.get("policy") is not None:
            wanted = overrides["policy"]
            filtered = [p for p in policies if p.label == wanted or p.kind == wanted]
            if not filtered:
                raise ConfigError(
                    f"--policy {wanted!r} matches none of {[p.label for p in policies]}"
                )
            policies = filtered
        out = doc.get("out")
        if not out:
            raise ConfigError("config needs an 'out' directory")
        spt = int(doc.get("shots_per_trajectory", 1))
        if spt < 1:
            raise ConfigError("shots_per_trajectory must be >= 1")
        feedback = doc.get("entropy_feedback", "z-group")
        if feedback not in ("z-group", "max-entropy"):
            raise ConfigError("entropy_feedback must be 'z-group' or 'max-entropy'")
        return cls(
            problem=problem,
            policies=policies,
            noise=parse_noise(doc.get("noise")),
            optimizer=parse_optimizer(doc.get("optimizer")),
            seeds=parse_seeds(doc),
            out_dir=Path(out if Path(out).is_absolute() else base_dir / out),
            shots_per_trajectory=spt,
            entropy_feedback=feedback,
        )


@dataclass
class CalibrateConfig:
    family_kind: str
    n_qubits: int
    sizes: list[int] | None
    depth: int
    hd_budget: float
    confidence: float
    trials: int
    seed: int
    out_dir: Path

    @classmethod
    def from_document(cls, doc: dict, base_dir: Path, overrides: dict) -> "CalibrateConfig":
        doc = dict(doc)
        if overrides.get("seed") is not None:
            doc["seed"] = overrides["seed"]
        if overrides.get("out") is not None:
            doc["out"] = overrides["out"]
        fam = doc.get("family") or {"kind": "default"}
        kind = fam.get("kind", "default")
        if kind not in ("default", "uniform", "ghz", "truncated-uniform", "random-circuit"):
            raise ConfigError(f"family.kind {kind!r} not recognized")
        budget = float(doc.get("hd_budget", 0.05))
        if not 0 < budget < 1:
            raise ConfigError("hd_budget must be in (0, 1)")
        confidence = float(doc.get("confidence", 0.9))
        if not 0 < confidence <= 1:
            raise ConfigError("confidence must be in (0, 1]")
        trials = int(doc.get("trials", 100))
        if trials < 30:
            raise ConfigError("trials must be >= 30")
        out = doc.get("out")
        if not out:
            raise ConfigError("config needs an 'out' directory")
        sizes = fam.get("sizes")
        return cls(
            family_kind=kind,
            n_qubits=int(fam.get("n_qubits", 8)),
            sizes=None if sizes is None else [int(s) for s in sizes],
            depth=int(fam.get("depth", 3)),
            hd_budget=budget,
            confidence=confidence,
            trials=trials,
            seed=int(doc.get("seed", 0)),
            out_dir=Path(out if Path(out).is_absolute() else base_dir / out),
        )


@dataclass
class SweepKConfig:
    problem: ProblemSpec
    k_values: list[float]
    seeds: list[int]
    cap: int
    noise: NoiseModel | None
    optimizer: OptimizerOptions
    out_dir: Path
    shots_per_trajectory: int = 1

    @classmethod
    def from_document(cls, doc: dict, base_dir: Path, overrides: dict) -> "SweepKConfig":
        doc = dict(doc)
        if overrides.get("seed") is not None:
            doc["seeds"] = [overrides["seed"]]
        if overrides.get("noise") is not None:
            doc["noise"] = overrides["noise"]
        if overrides.get("out") is not None:
            doc["out"] = overrides["out"]
        if "problem" not in doc:
            raise ConfigError("config needs a 'problem'")
        k_values = doc.get("k_values")
        if not k_values:
            raise ConfigError("config needs a nonempty 'k_values' list")
        k_values = [float(k) for k in k_values]
        if any(k <= 0 for k in k_values):
            raise ConfigError("k_values must be > 0")
        cap = int(doc.get("cap", 100_000))
        if cap < 1:
            raise ConfigError("cap must be >= 1")
        out = doc.get("out")
        if not out:
            raise ConfigError("config needs an 'out' directory")
        return cls(
            problem=parse_problem(doc["problem"], base_dir),
            k_values=k_values,
            seeds=parse_seeds(doc),
            cap=cap,
            noise=parse_noise(doc.get("noise")),
            optimizer=parse_optimizer(doc.get("optimizer")),
            out_dir=Path(out if Path(out).is_absolute() else base_dir / out),
            shots_per_trajectory=int(doc.get("shots_per_trajectory", 1)),
        )
