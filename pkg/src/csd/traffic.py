"""Per-period traffic and forwarding observations for one cluster.

Each cluster node sends a Poisson number of packets through the head per
period; the head drops each packet independently with its loss rate.

Random streams are counter-based (Philox) and keyed by
``(seed, hypothesis, trial, substream)``, so a trial's draws do not depend on
which worker produced them or on how many trials ran before it.
"""

from __future__ import annotations

import enum
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from csd.detection import ForwardingCounts, compose_plr

if TYPE_CHECKING:
    from csd.falsification import FalsificationStrategy

_TRIAL_BITS = 48
_SENT_STREAM = 0
_DROP_STREAM = 1


class Role(enum.Enum):
    BENIGN = "benign"
    MALICIOUS = "malicious"


@dataclass(frozen=True)
class NodeProfile:
    node_id: Hashable
    mu: float
    role: Role = Role.BENIGN
    strategy: FalsificationStrategy | None = None

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"node {self.node_id!r}: mu must be positive, got {self.mu!r}")
        if (self.role is Role.MALICIOUS) != (self.strategy is not None):
            raise ValueError(
                f"node {self.node_id!r}: a strategy is required for malicious nodes "
                "and forbidden for benign ones"
            )

    @property
    def malicious(self) -> bool:
        return self.role is Role.MALICIOUS


@dataclass(frozen=True)
class PeriodObservation:
    node_id: Hashable
    sent: int
    dropped: int

    def __post_init__(self) -> None:
        if not 0 <= self.dropped <= self.sent:
            raise ValueError(f"need 0 <= dropped <= sent, got {self.dropped}/{self.sent}")


@dataclass(frozen=True)
class HeadGroundTruth:
    is_abnormal: bool
    plr: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.plr <= 1.0:
            raise ValueError(f"plr must lie in [0, 1], got {self.plr!r}")

    @classmethod
    def normal(cls, q_n: float) -> HeadGroundTruth:
        return cls(False, q_n)

    @classmethod
    def abnormal(cls, q_n: float, q_a: float) -> HeadGroundTruth:
        q = compose_plr(q_n, q_a)
        if not q > q_n:
            raise ValueError("an abnormal head must drop more than a normal one (q_a > 0)")
        return cls(True, q)


def sample_period(
    profiles: Sequence[NodeProfile],
    truth: HeadGroundTruth,
    rng: np.random.Generator,
) -> list[PeriodObservation]:
    mu = np.array([p.mu for p in profiles], dtype=float)
    sent = rng.poisson(mu)
    dropped = rng.binomial(sent, truth.plr)
    return [
        PeriodObservation(p.node_id, int(s), int(d))
        for p, s, d in zip(profiles, sent, dropped)
    ]


def accumulate(
    observations: Iterable[Sequence[PeriodObservation]],
) -> dict[Hashable, ForwardingCounts]:
    """Sum per-period observations into cumulative counts per node."""
    totals: dict[Hashable, list[int]] | None = None
    for period in observations:
        ids = [o.node_id for o in period]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node id within one period")
        if totals is None:
            totals = {i: [0, 0] for i in ids}
        elif set(ids) != totals.keys():
            raise ValueError("node sets differ between periods")
        for o in period:
            acc = totals[o.node_id]
            acc[0] += o.sent
            acc[1] += o.dropped
    if totals is None:
        return {}
    return {i: ForwardingCounts(float(s), float(d)) for i, (s, d) in totals.items()}


def stream(seed: int, hypothesis: int, trial: int, substream: int) -> np.random.Generator:
    """Independent Philox stream for one (hypothesis, trial, substream) cell."""
    if not 0 <= trial < 2**_TRIAL_BITS:
        raise ValueError(f"trial index out of range: {trial}")
    word = trial | (hypothesis & 0xFF) << _TRIAL_BITS | (substream & 0xFF) << 56
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, word], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_trial(
    mu: np.ndarray,
    plr: float,
    periods: int,
    seed: int,
    hypothesis: int,
    trial: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``(sent, dropped)`` arrays of shape ``(periods, n_nodes)`` for one trial.

    Sent and dropped counts come from separate streams, so a longer horizon
    extends a trajectory without changing its earlier periods.
    """
    sent = stream(seed, hypothesis, trial, _SENT_STREAM).poisson(mu, size=(periods, len(mu)))
    dropped = stream(seed, hypothesis, trial, _DROP_STREAM).binomial(sent, plr)
    return sent, dropped

