"""Perception filtering: turn the defensive game mix into per-lane trust.

The defender's mixed strategy beta says how much confidence each lane's
reports deserve.  Scaled by the lane count and capped at 1, it becomes a
trust weight: a uniform beta (no information) maps to full trust everywhere,
and lanes with more spare capacity -- more room for phantoms -- get
proportionally discounted.  The filter multiplies perceived counts by these
weights before the controller sees them; mean speeds stay untouched because
dropping a uniform share of vehicles does not move the average.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .game import MixedStrategy, build_payoff_matrix, solve_minimax
from .sim import PerceivedObservation

__all__ = [
    "MITIGATION_KINDS",
    "WEIGHT_MAPPINGS",
    "MitigationPolicy",
    "compute_beta",
    "beta_to_weights",
    "filter_perception",
    "none_policy",
    "fair_policy",
    "optimal_policy",
]

MITIGATION_KINDS = ("none", "fair", "optimal")
WEIGHT_MAPPINGS = ("scaled_capped", "normalized_max")


@dataclass(frozen=True)
class MitigationPolicy:
    """An immutable trust-weight snapshot; swap whole policies atomically."""

    kind: str
    weights: dict[str, float] = field(default_factory=dict)
    fallback: bool = False  # True when a solver failure degraded us to none

    def __post_init__(self) -> None:
        if self.kind not in MITIGATION_KINDS:
            raise ValueError(f"unknown mitigation kind {self.kind!r}")
        for lid, w in self.weights.items():
            if not 0.0 <= w <= 1.0 + 1e-9:
                raise ValueError(f"trust weight for {lid} out of [0, 1]: {w}")

    def weight(self, lane_id: str) -> float:
        return self.weights.get(lane_id, 1.0)


def none_policy(lane_ids) -> MitigationPolicy:
    return MitigationPolicy(kind="none", weights={lid: 1.0 for lid in lane_ids})


def fair_policy(lane_ids) -> MitigationPolicy:
    """Count half the vehicles on every lane, regardless of exposure."""
    return MitigationPolicy(kind="fair", weights={lid: 0.5 for lid in lane_ids})


def compute_beta(theta, f, *, impact_floor_ratio: float | None = None) -> MixedStrategy:
    """Defensive mix from the min-max side of the lane game.

    Solver failures propagate to the caller, which should degrade to the
    no-op policy and flag the run rather than guess.
    """
    theta = list(theta)
    f = list(f)
    payoff = build_payoff_matrix(theta, f)
    if impact_floor_ratio is not None and impact_floor_ratio > 0.0:
        diag = payoff.diagonal()
        floor = impact_floor_ratio * float(diag.max())
        payoff = build_payoff_matrix(
            [max(u, floor) for u in diag], [0.0] * len(diag)
        )
    beta, _phi = solve_minimax(payoff)
    return beta


def beta_to_weights(
    beta: MixedStrategy, lane_ids, *, mapping: str = "scaled_capped"
) -> dict[str, float]:
    """Map a probability vector over D lanes to per-lane trust in [0, 1].

    scaled_capped (default): w_i = min(1, beta_i * D), so the uniform mix
    degrades nothing and relative trust follows beta exactly.
    normalized_max: w_i = beta_i / max(beta), an alternative reading kept
    for sensitivity runs.
    """
    lane_ids = list(lane_ids)
    d = len(lane_ids)
    if len(beta) != d:
        raise ValueError(f"beta has {len(beta)} entries for {d} lanes")
    if mapping == "scaled_capped":
        return {
            lid: min(1.0, p * d) for lid, p in zip(lane_ids, beta.probs)
        }
    if mapping == "normalized_max":
        top = max(beta.probs)
        if top <= 0.0:
            return {lid: 1.0 for lid in lane_ids}
        return {lid: p / top for lid, p in zip(lane_ids, beta.probs)}
    raise ValueError(f"unknown weight mapping {mapping!r}")


def optimal_policy(
    lane_ids,
    theta: dict[str, float],
    f: dict[str, float],
    *,
    mapping: str = "scaled_capped",
    impact_floor_ratio: float | None = None,
) -> MitigationPolicy:
    """Build the game-derived policy for the given capacities and flows."""
    lane_ids = list(lane_ids)
    beta = compute_beta(
        [theta[lid] for lid in lane_ids],
        [f[lid] for lid in lane_ids],
        impact_floor_ratio=impact_floor_ratio,
    )
    return MitigationPolicy(
        kind="optimal", weights=beta_to_weights(beta, lane_ids, mapping=mapping)
    )


def filter_perception(
    obs: PerceivedObservation, policy: MitigationPolicy
) -> PerceivedObservation:
    """Scale perceived counts by per-lane trust; the no-op policy is exact.

    Mean speeds pass through unchanged: trusting only a fraction of the
    vehicles thins the mass but leaves the average speed where it was.
    """
    if policy.kind == "none" and not policy.fallback:
        return obs
    counts = {lid: policy.weight(lid) * c for lid, c in obs.counts.items()}
    return PerceivedObservation(
        counts=counts, mean_speeds=dict(obs.mean_speeds), signals=obs.signals
    )
