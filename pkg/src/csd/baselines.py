"""Comparison detectors: a trust-value scheme and a generalised LRT.

The trust scheme keeps one integer trust value per head in ``[0, 200]``,
starting at 100, and nudges it after every period from the observed loss
rate. The generalised LRT replaces the detecting rate by its maximum
likelihood estimate; the source description of that scheme is thin, so
this is a reconstruction.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numpy as np

from csd.detection import Decision, ForwardingCounts, Verdict

TRUST_MIN = 0
TRUST_MAX = 200
TRUST_INITIAL = 100
TRUST_REWARD = 1
TRUST_MILD_PENALTY = 1
TRUST_SEVERE_PENALTY = 10

# Upper clamp keeps log(1 - q_hat) finite when every packet was dropped.
_MLE_CEILING = 1.0 - 1e-12


@dataclass(frozen=True)
class TrustState:
    trust: int = TRUST_INITIAL
    threshold: int = TRUST_INITIAL

    def __post_init__(self) -> None:
        if not TRUST_MIN <= self.trust <= TRUST_MAX:
            raise ValueError(f"trust must lie in [{TRUST_MIN}, {TRUST_MAX}], got {self.trust}")


def _trust_step(observed_plr: float, q_n: float, q_d: float) -> int:
    if observed_plr < q_n:
        return TRUST_REWARD
    if observed_plr > q_d:
        return -TRUST_SEVERE_PENALTY
    return -TRUST_MILD_PENALTY


def tbs_update(state: TrustState, observed_plr: float, q_n: float, q_d: float) -> TrustState:
    trust = state.trust + _trust_step(observed_plr, q_n, q_d)
    return replace(state, trust=min(TRUST_MAX, max(TRUST_MIN, trust)))


def tbs_decision(state: TrustState) -> Verdict:
    """Abnormal iff the trust value has fallen strictly below the threshold."""
    decision = Decision.ABNORMAL if state.trust < state.threshold else Decision.NORMAL
    return Verdict(decision, float(state.trust))


def trust_trajectories(observed_plr: np.ndarray, q_n: float, q_d: float) -> np.ndarray:
    """Trust value after each period for a batch of trials.

    ``observed_plr`` has shape ``(trials, periods)``; NaN entries (a period
    with no traffic) leave the trust unchanged.
    """
    observed_plr = np.asarray(observed_plr, dtype=float)
    step = np.where(
        observed_plr < q_n,
        TRUST_REWARD,
        np.where(observed_plr > q_d, -TRUST_SEVERE_PENALTY, -TRUST_MILD_PENALTY),
    )
    step[np.isnan(observed_plr)] = 0
    out = np.empty(observed_plr.shape, dtype=np.int64)
    trust = np.full(observed_plr.shape[0], TRUST_INITIAL, dtype=np.int64)
    # clamping makes the fold path-dependent, so it cannot be a cumsum
    for t in range(observed_plr.shape[1]):
        trust = np.clip(trust + step[:, t], TRUST_MIN, TRUST_MAX)
        out[:, t] = trust
    return out


def glrt_statistic(total, dropped, q_n: float):
    """Generalised LLR with the detecting rate replaced by its clamped MLE.

    Works elementwise on scalars or arrays of aggregate counts.
    """
    total = np.asarray(total, dtype=float)
    dropped = np.asarray(dropped, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q_hat = np.clip(dropped / total, q_n, _MLE_CEILING)
        coeff_total = np.log((1.0 - q_hat) / (1.0 - q_n))
        coeff_dropped = np.log(q_hat * (1.0 - q_n) / (q_n * (1.0 - q_hat)))
        stat = coeff_total * total + coeff_dropped * dropped
    return np.where(total > 0, stat, np.nan)


def sbs_glrt_decision(counts: Sequence[ForwardingCounts], q_n: float, gamma: float) -> Verdict:
    total = math.fsum(c.total for c in counts)
    dropped = math.fsum(c.dropped for c in counts)
    if not total > 0:
        raise ValueError("no traffic observed; the loss rate cannot be estimated")
    stat = float(glrt_statistic(total, dropped, q_n))
    return Verdict(Decision.ABNORMAL if stat >= gamma else Decision.NORMAL, stat)
