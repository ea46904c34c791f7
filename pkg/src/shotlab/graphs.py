"""Max-cut problem instances: the four benchmark graph families and the
exhaustive cut oracle.

Families: power-law cluster (PL), Barabasi-Albert (BA), Watts-Strogatz (WS),
and Sherrington-Kirkpatrick (SK, complete graph with random +/-1 couplings).
PL/BA/WS come from the standard networkx generators with unit weights; BA is
grown from a complete m-node core so the edge count is C(m,2) + m*(n-m).

Cut assignments are strings where character i is node i's side, matching the
little-endian outcome-index convention (node i <-> bit i).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import networkx as nx
import numpy as np

from .rng import rng_for

MODELS = ("pl", "ba", "ws", "sk")
BRUTE_FORCE_MAX_NODES = 20

DEFAULT_PARAMS = {
    "pl": {"m": 2, "p": 0.5},
    "ba": {"m": 2},
    "ws": {"k": 4, "p": 0.3},
    "sk": {},
}


class GraphError(ValueError):
    """Invalid graph, model parameters, or assignment."""


@dataclass(frozen=True)
class WeightedGraph:
    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        if self.n_nodes < 2:
            raise GraphError("graph needs at least 2 nodes")
        seen = set()
        normalized = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise GraphError(f"edge ({u},{v}) outside node range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            normalized.append((key[0], key[1], w))
        object.__setattr__(self, "edges", tuple(normalized))

    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))


@dataclass(frozen=True)
class CutResult:
    best_value: float
    maximizers: tuple[str, ...]


def generate_graph(model: str, n_nodes: int, seed: int, params: dict | None = None) -> WeightedGraph:
    """Deterministic instance of one graph family.

    ``params`` overrides the per-model defaults (BA/PL attachment ``m``,
    PL triangle probability ``p``, WS ring degree ``k`` and rewiring ``p``).
    """
    model = model.lower()
    if model not in MODELS:
        raise GraphError(f"unknown graph model {model!r} (expected one of {MODELS})")
    if n_nodes < 2:
        raise GraphError("n_nodes must be >= 2")
    opts = dict(DEFAULT_PARAMS[model])
    opts.update(params or {})

    if model == "sk":
        rng = rng_for(seed, "sk-weights")
        edges = []
        for u in range(n_nodes):
            for v in range(u + 1, n_nodes):
                w = 1.0 if rng.integers(2) == 1 else -1.0
                edges.append((u, v, w))
        return WeightedGraph(n_nodes, tuple(edges))

    if model == "ba":
        m = int(opts["m"])
        if not 1 <= m < n_nodes:
            raise GraphError(f"BA attachment m={m} must satisfy 1 <= m < n_nodes")
        # Complete core (never smaller than an edge) so |E| = C(m,2) + m*(n-m).
        core = nx.complete_graph(max(m, 2))
        g = nx.barabasi_albert_graph(n_nodes, m, seed=seed, initial_graph=core)
    elif model == "ws":
        k, p = int(opts["k"]), float(opts["p"])
        if k >= n_nodes:
            raise GraphError(f"WS ring degree k={k} must be < n_nodes={n_nodes}")
        if k < 2:
            raise GraphError("WS ring degree k must be >= 2")
        g = nx.watts_strogatz_graph(n_nodes, k, p, seed=seed)
    else:  # pl
        m, p = int(opts["m"]), float(opts["p"])
        if not 1 <= m < n_nodes:
            raise GraphError(f"PL attachment m={m} must satisfy 1 <= m < n_nodes")
        g = nx.powerlaw_cluster_graph(n_nodes, m, p, seed=seed)

    edges = tuple((min(u, v), max(u, v), 1.0) for u, v in sorted(g.edges()))
    return WeightedGraph(n_nodes, edges)


def _assignment_bits(graph: WeightedGraph, bitstring) -> int:
    """Pack an assignment (string or int sequence) into an outcome index."""
    if isinstance(bitstring, str):
        bits = [c for c in bitstring]
        if any(c not in "01" for c in bits):
            raise GraphError(f"assignment {bitstring!r} must be over 0/1")
        values = [int(c) for c in bits]
    else:
        values = [int(b) for b in bitstring]
        if any(b not in (0, 1) for b in values):
            raise GraphError("assignment entries must be 0 or 1")
    if len(values) != graph.n_nodes:
        raise GraphError(f"assignment length {len(values)} != n_nodes {graph.n_nodes}")
    return sum(b << i for i, b in enumerate(values))


def cut_value(graph: WeightedGraph, bitstring) -> float:
    """Total weight of edges whose endpoints land on different sides."""
    z = _assignment_bits(graph, bitstring)
    total = 0.0
    for u, v, w in graph.edges:
        if ((z >> u) ^ (z >> v)) & 1:
            total += w
    return total


@lru_cache(maxsize=64)
def cut_values_table(graph: WeightedGraph) -> np.ndarray:
    """Cut value for every assignment index z (node i at bit i). Read-only."""
    if graph.n_nodes > BRUTE_FORCE_MAX_NODES:
        raise GraphError(
            f"n_nodes={graph.n_nodes} exceeds the enumeration cap of {BRUTE_FORCE_MAX_NODES}"
        )
    idx = np.arange(1 << graph.n_nodes, dtype=np.int64)
    table = np.zeros(idx.size, dtype=np.float64)
    for u, v, w in graph.edges:
        table += w * (((idx >> u) ^ (idx >> v)) & 1)
    table.setflags(write=False)
    return table


def _index_to_assignment(z: int, n_nodes: int) -> str:
    return "".join("1" if (z >> i) & 1 else "0" for i in range(n_nodes))


def brute_force_max_cut(graph: WeightedGraph) -> CutResult:
    """Exhaustive max cut over all 2^n assignments; ties listed in index order."""
    table = cut_values_table(graph)
    best = float(table.max())
    winners = np.nonzero(table == best)[0]
    return CutResult(best, tuple(_index_to_assignment(int(z), graph.n_nodes) for z in winners))


def to_instance_dict(graph: WeightedGraph, model: str, seed: int, params: dict | None) -> dict:
    return {
        "model": model,
        "n_nodes": graph.n_nodes,
        "seed": seed,
        "params": dict(params or {}),
        "edges": [[u, v, w] for u, v, w in graph.edges],
    }


def from_instance_dict(doc: dict) -> WeightedGraph:
    try:
        n_nodes = int(doc["n_nodes"])
        edges = tuple((int(u), int(v), float(w)) for u, v, w in doc["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed graph instance document: {exc}") from exc
    return WeightedGraph(n_nodes, edges)


def save_instance(path, graph: WeightedGraph, model: str, seed: int, params: dict | None) -> None:
    doc = to_instance_dict(graph, model, seed, params)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def load_instance(path) -> tuple[WeightedGraph, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise GraphError(f"graph instance file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise GraphError(f"graph instance file {path} is not valid JSON: {exc}") from exc
    return from_instance_dict(doc), doc
