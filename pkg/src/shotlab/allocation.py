"""Per-iteration shot-allocation policies.

Five kinds:

* ``fixed``  -- constant ``s_fixed`` shots every iteration.
* ``linear`` -- max(floor, s_begin - l*i), the linearly decaying schedule.
* ``step``   -- max(floor, s_begin - 10*l*floor(i/10)), the staircase variant.
* ``dds``    -- min(cap, round(k * 2^H)) driven by the previous iteration's
                outcome entropy H, capped at 1024.
* ``dds_m``  -- same law with a 100,000-shot cap.

The tiered schedules (linear/step) carry the 20-shot floor; the entropy-driven
kinds have no floor beyond the 1-shot minimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

POLICY_KINDS = ("fixed", "linear", "step", "dds", "dds_m")
DEFAULT_CAPS = {"dds": 1024, "dds_m": 100_000}

# Published anchors for the entropy constant k by qubit count.
K_ANCHORS = {4: 64.0, 8: 8.0, 12: 2.0}


class PolicyError(ValueError):
    """Invalid policy configuration."""


@dataclass(frozen=True)
class ShotPolicy:
    kind: str
    s_fixed: int = 1024
    s_begin: int = 1000
    slope_l: int = 10
    floor: int = 20
    k: float | None = None
    cap: int | None = None
    initial_entropy: float = 10.0
    name: str | None = None

    def __post_init__(self):
        kind = self.kind.lower()
        object.__setattr__(self, "kind", kind)
        if kind not in POLICY_KINDS:
            raise PolicyError(f"unknown policy kind {kind!r} (expected one of {POLICY_KINDS})")
        if self.s_fixed < 1 or self.s_begin < 1:
            raise PolicyError("shot counts must be >= 1")
        if self.floor < 1:
            raise PolicyError("floor must be >= 1")
        if self.k is not None and self.k <= 0:
            raise PolicyError("k must be > 0")
        if self.cap is not None and self.cap < 1:
            raise PolicyError("cap must be >= 1")
        if self.initial_entropy < 0:
            raise PolicyError("initial_entropy must be >= 0")

    @property
    def label(self) -> str:
        return self.name or self.kind

    def is_entropy_driven(self) -> bool:
        return self.kind in ("dds", "dds_m")

    def resolved(self, n_qubits: int) -> "ShotPolicy":
        """Fill kind-dependent defaults (cap, and k from the qubit count)."""
        out = self
        if out.is_entropy_driven():
            if out.cap is None:
                out = replace(out, cap=DEFAULT_CAPS[out.kind])
            if out.k is None:
                out = replace(out, k=default_k(n_qubits))
        return out


def next_shots(policy: ShotPolicy, iteration: int, prev_entropy: float) -> int:
    """Shot count for objective evaluation ``iteration`` (0-based).

    ``prev_entropy`` is the previous iteration's outcome entropy in bits;
    non-entropy-driven kinds ignore it.
    """
    if iteration < 0:
        raise PolicyError("iteration must be >= 0")
    kind = policy.kind
    if kind == "fixed":
        return policy.s_fixed
    if kind == "linear":
        return max(policy.floor, policy.s_begin - policy.slope_l * iteration)
    if kind == "step":
        return max(policy.floor, policy.s_begin - 10 * policy.slope_l * (iteration // 10))
    # dds / dds_m: S = k * 2^H, round half up, clamp to [1, cap]
    if prev_entropy < 0:
        raise PolicyError("prev_entropy must be >= 0")
    if policy.k is None or policy.cap is None:
        raise PolicyError(f"{kind} policy is unresolved (k={policy.k}, cap={policy.cap})")
    raw = policy.k * (2.0 ** prev_entropy)
    shots = math.floor(raw + 0.5)
    return max(1, min(policy.cap, shots))


def default_k(n_qubits: int) -> float:
    """Entropy constant for a given circuit width.

    Exact at the anchors {4: 64, 8: 8, 12: 2}; elsewhere piecewise-linear in
    log2(k) over the qubit count (geometric interpolation), clamped to
    [1, 64]. Always overridable in the policy config.
    """
    if n_qubits < 1:
        raise PolicyError("n_qubits must be >= 1")
    if n_qubits in K_ANCHORS:
        return K_ANCHORS[n_qubits]
    # log2 k at the anchors: (4, 6), (8, 3), (12, 1)
    if n_qubits < 8:
        log2k = 6.0 + (n_qubits - 4) * (3.0 - 6.0) / 4.0
    else:
        log2k = 3.0 + (n_qubits - 8) * (1.0 - 3.0) / 4.0
    log2k = min(6.0, max(0.0, log2k))
    return float(2.0 ** log2k)
