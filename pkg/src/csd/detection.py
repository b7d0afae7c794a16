"""Likelihood ratio test on packet-loss observations of a cluster head.

The trusted node tests H0 (head drops with the normal rate ``q_n``) against
H1 (head drops with the detecting rate ``q_d``). Each cluster node turns its
cumulative forwarding counts into a log-likelihood ratio; the trusted node
sums them and compares against ``gamma``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Hashable, Sequence


class Decision(enum.Enum):
    NORMAL = "normal"
    ABNORMAL = "abnormal"


def _check_probability(name: str, value: float, *, open_interval: bool = False) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    if open_interval:
        if not 0.0 < value < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {value!r}")
    elif not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class DetectionParams:
    """Rates and thresholds shared by every detector in a cluster.

    Attributes:
        q_n: packet loss rate of a normal head.
        q_d: detecting packet loss rate (alternative hypothesis).
        gamma: threshold on the fused LLR; H0 is rejected iff the sum >= gamma.
        z_thr: removal threshold of the weighted Z-score filter.
    """

    q_n: float = 0.15
    q_d: float = 0.2
    gamma: float = 1.4
    z_thr: float = 1.0

    def __post_init__(self) -> None:
        _check_probability("q_n", self.q_n, open_interval=True)
        _check_probability("q_d", self.q_d, open_interval=True)
        if not self.q_n < self.q_d:
            raise ValueError(f"need q_n < q_d, got q_n={self.q_n}, q_d={self.q_d}")
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        if not (math.isfinite(self.z_thr) and self.z_thr > 0):
            raise ValueError(f"z_thr must be positive, got {self.z_thr!r}")


@dataclass(frozen=True)
class LlrCoefficients:
    """Per-packet multipliers of the LLR and the critical detection point."""

    coeff_total: float
    coeff_dropped: float
    beta: float


@dataclass(frozen=True)
class ForwardingCounts:
    """Cumulative packets sent through the head and packets it dropped.

    Counts are real-valued so that falsified reports (scaled by a traffic
    inflation factor) go through the same LLR arithmetic as true ones.
    """

    total: float = 0.0
    dropped: float = 0.0

    def __post_init__(self) -> None:
        if not (self.total >= 0 and self.dropped >= 0):
            raise ValueError("counts must be nonnegative")
        if self.dropped > self.total:
            raise ValueError(f"dropped ({self.dropped}) exceeds total ({self.total})")

    def __add__(self, other: ForwardingCounts) -> ForwardingCounts:
        return ForwardingCounts(self.total + other.total, self.dropped + other.dropped)


@dataclass(frozen=True)
class LlrReport:
    """A node's cumulative LLR as received by the trusted node."""

    node_id: Hashable
    llr: float
    mu: float

    def __post_init__(self) -> None:
        if not self.mu > 0:
            raise ValueError(f"traffic mean must be positive, got {self.mu!r}")


@dataclass(frozen=True)
class Verdict:
    decision: Decision
    statistic: float

    @property
    def abnormal(self) -> bool:
        return self.decision is Decision.ABNORMAL


def compose_plr(q_n: float, q_a: float) -> float:
    """Loss rate of a head that drops independently for two reasons."""
    _check_probability("q_n", q_n)
    _check_probability("q_a", q_a)
    return q_n + q_a * (1.0 - q_n)


def deliberate_plr(q_n: float, q: float) -> float:
    """Inverse of :func:`compose_plr`: the deliberate rate giving total rate ``q``."""
    _check_probability("q_n", q_n)
    _check_probability("q", q)
    if q < q_n or q_n == 1.0:
        raise ValueError(f"total rate {q} cannot be below q_n={q_n}")
    return (q - q_n) / (1.0 - q_n)


def llr_coefficients(params: DetectionParams) -> LlrCoefficients:
    q_n, q_d = params.q_n, params.q_d
    coeff_total = math.log((1.0 - q_d) / (1.0 - q_n))
    coeff_dropped = math.log(q_d * (1.0 - q_n) / (q_n * (1.0 - q_d)))
    return LlrCoefficients(coeff_total, coeff_dropped, -coeff_total / coeff_dropped)


def node_llr(counts: ForwardingCounts, coeffs: LlrCoefficients) -> float:
    return coeffs.coeff_total * counts.total + coeffs.coeff_dropped * counts.dropped


def fused_decision(reports: Sequence[LlrReport], gamma: float) -> Verdict:
    """Sum the reported LLRs and compare with ``gamma`` (ties reject H0)."""
    if not reports:
        raise ValueError("no reports to fuse")
    statistic = math.fsum(r.llr for r in reports)
    decision = Decision.ABNORMAL if statistic >= gamma else Decision.NORMAL
    return Verdict(decision, statistic)


def critical_point_empirical(coeffs: LlrCoefficients, ell: int, gamma: float = 0.0) -> float:
    """Drop fraction ``k0 / ell`` at which the LLR of ``ell`` packets reaches ``gamma``.

    Solves ``coeff_total * ell + coeff_dropped * k0 = gamma`` by bisection on
    ``k0`` rather than by the closed form, so it can serve as an independent
    check of ``coeffs.beta``. The ``gamma / ell`` offset vanishes as ``ell``
    grows; with the default ``gamma=0`` the ratio is ``beta`` for every ``ell``.
    """
    if ell < 1:
        raise ValueError("ell must be a positive integer")

    def f(k: float) -> float:
        return coeffs.coeff_total * ell + coeffs.coeff_dropped * k - gamma

    lo, hi = 0.0, float(ell)
    if f(lo) > 0:
        raise ValueError("LLR already exceeds gamma with no drops")
    while f(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return 0.5 * (lo + hi) / ell
