"""Falsified detection data from malicious cluster nodes.

A malicious node inflates its packet count by ``kappa`` and claims a fixed
loss rate: ``q_prime`` when the head is normal (to frame it) and
``q_dprime`` when the head is abnormal (to cover for it).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

from csd.traffic import HeadGroundTruth, NodeProfile


@dataclass(frozen=True)
class FalsificationStrategy:
    kappa: float
    q_prime: float
    q_dprime: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be positive, got {self.kappa!r}")
        for name in ("q_prime", "q_dprime"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    def claimed_plr(self, head_abnormal: bool) -> float:
        return self.q_dprime if head_abnormal else self.q_prime


@dataclass(frozen=True)
class GroupStrategy:
    """Traffic-weighted aggregate of the malicious nodes' strategies.

    ``mu1`` is the total traffic mean of malicious nodes, ``mu0`` that of
    benign ones.
    """

    kappa: float
    q_prime: float
    q_dprime: float
    mu1: float
    mu0: float

    @property
    def packet_ratio(self) -> float:
        return self.mu0 / self.mu1


def falsified_counts(
    profile: NodeProfile, true_sent: float, truth: HeadGroundTruth
) -> tuple[float, float]:
    """Reported ``(sent, dropped)`` of a malicious node for one period.

    The results are real-valued; no rounding is applied.
    """
    if profile.strategy is None:
        raise ValueError(f"node {profile.node_id!r} is benign and reports true counts")
    s = profile.strategy
    sent = s.kappa * true_sent
    return sent, s.claimed_plr(truth.is_abnormal) * sent


def group_strategy(profiles: Sequence[NodeProfile]) -> GroupStrategy:
    malicious = [p for p in profiles if p.strategy is not None]
    if not malicious:
        raise ValueError("no malicious nodes in the cluster")
    mu1 = math.fsum(p.mu for p in malicious)
    mu0 = math.fsum(p.mu for p in profiles if p.strategy is None)

    def weighted(attr: str) -> float:
        return math.fsum(getattr(p.strategy, attr) * p.mu for p in malicious) / mu1

    return GroupStrategy(weighted("kappa"), weighted("q_prime"), weighted("q_dprime"), mu1, mu0)


def falsification_margin(gs: GroupStrategy, beta: float, q_n: float, q: float) -> float:
    """Largest packet ratio ``mu0 / mu1`` the group strategy can still defeat."""
    if not q_n < beta < q:
        raise ValueError(f"need q_n < beta < q, got {q_n}, {beta}, {q}")
    return gs.kappa * max((gs.q_prime - beta) / (beta - q_n), (beta - gs.q_dprime) / (q - beta))


def breaks_unfiltered_detection(gs: GroupStrategy, beta: float, q_n: float, q: float) -> bool:
    """Whether the plain LRT (no filtering) loses perfect detection to this group."""
    return gs.packet_ratio <= falsification_margin(gs, beta, q_n, q)
