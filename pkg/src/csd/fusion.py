"""Falsification-resistant fusion at the trusted node.

Reports are normalised to a per-packet LLR, scored with a traffic-weighted
Z-score, and reports whose ``|z|`` exceeds ``z_thr`` are dropped before the
remaining LLRs are summed and compared with ``gamma``.

Also provides the asymptotic description of the filter: which group of
reports survives as the number of periods grows, and the largest packet
ratio a threshold can guarantee.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field

from csd.detection import DetectionParams, LlrReport, Verdict, fused_decision

# Spread below this fraction of the largest |x| is treated as exact unanimity.
DEGENERATE_SPREAD = 1e-12


class NoTrustedEvidence(RuntimeError):
    """Every report was classified as an outlier, leaving nothing to fuse."""

    def __init__(self, table: ZscoreTable) -> None:
        super().__init__("all reports were removed by the Z-score filter")
        self.table = table


class RemovalRegime(enum.Enum):
    KEEP_BOTH = "keep_both"
    KEEP_BENIGN_ONLY = "keep_benign_only"
    KEEP_MALICIOUS_ONLY = "keep_malicious_only"
    REMOVE_ALL = "remove_all"


@dataclass(frozen=True)
class NormalizedLlr:
    node_id: Hashable
    x: float
    mu: float


@dataclass(frozen=True)
class ZscoreTable:
    mean: float
    std: float
    scores: dict[Hashable, float]
    removed: frozenset[Hashable] = field(default_factory=frozenset)

    @property
    def kept(self) -> list[Hashable]:
        return [i for i in self.scores if i not in self.removed]


def normalize(reports: Sequence[LlrReport], t: int) -> list[NormalizedLlr]:
    """Per-packet LLR of each report after ``t`` periods."""
    if t < 1:
        raise ValueError(f"period index must be >= 1, got {t}")
    return [NormalizedLlr(r.node_id, r.llr / (r.mu * t), r.mu) for r in reports]


def weighted_moments(xs: Sequence[float], mus: Sequence[float]) -> tuple[float, float]:
    """Traffic-weighted mean and standard deviation.

    Sums run left to right in node order; the compiled kernel uses the same
    order so both paths round identically.
    """
    total = 0.0
    acc = 0.0
    for x, mu in zip(xs, mus):
        total += mu
        acc += mu * x
    mean = acc / total
    acc = 0.0
    for x, mu in zip(xs, mus):
        d = x - mean
        acc += mu * d * d
    return mean, math.sqrt(acc / total)


def weighted_zscores(xs: Sequence[NormalizedLlr], z_thr: float) -> ZscoreTable:
    if not xs:
        raise ValueError("no normalized LLRs to score")
    mean, std = weighted_moments([v.x for v in xs], [v.mu for v in xs])
    scale = max(abs(v.x) for v in xs)
    if std <= DEGENERATE_SPREAD * scale:
        return ZscoreTable(mean, 0.0, {v.node_id: 0.0 for v in xs}, frozenset())
    scores = {v.node_id: (v.x - mean) / std for v in xs}
    removed = frozenset(i for i, z in scores.items() if abs(z) > z_thr)
    return ZscoreTable(mean, std, scores, removed)


def csd_decision(
    reports: Sequence[LlrReport], t: int, params: DetectionParams
) -> tuple[Verdict, ZscoreTable]:
    """Filter outlying reports, then run the LRT on what remains.

    Raises:
        NoTrustedEvidence: when the filter removes every report.
    """
    if not reports:
        raise ValueError("no reports to fuse")
    table = weighted_zscores(normalize(reports, t), params.z_thr)
    kept = [r for r in reports if r.node_id not in table.removed]
    if not kept:
        raise NoTrustedEvidence(table)
    return fused_decision(kept, params.gamma), table


def asymptotic_regime(mu0: float, mu1: float, z_thr: float) -> RemovalRegime:
    """Which group of reports the filter keeps once the Z-scores have converged.

    With two groups of common normalised LLR the benign scores tend to
    ``sqrt(mu1/mu0)`` and the malicious ones to ``sqrt(mu0/mu1)``, so the
    outcome depends only on the packet ratio ``mu0/mu1`` against ``z_thr**2``
    and ``z_thr**-2``.
    """
    if mu0 < 0 or mu1 < 0 or mu0 + mu1 <= 0:
        raise ValueError("traffic sums must be nonnegative with a positive total")
    if not z_thr > 0:
        raise ValueError("z_thr must be positive")
    if mu1 == 0:
        return RemovalRegime.KEEP_BENIGN_ONLY
    ratio = mu0 / mu1
    lower, upper = z_thr**-2, z_thr**2
    if lower <= ratio <= upper:
        return RemovalRegime.KEEP_BOTH
    if ratio >= lower and ratio > upper:
        return RemovalRegime.KEEP_BENIGN_ONLY
    if ratio < lower and ratio <= upper:
        return RemovalRegime.KEEP_MALICIOUS_ONLY
    return RemovalRegime.REMOVE_ALL


def supremum_packet_ratio(z_thr: float) -> float:
    """Packet ratio above which the filter guarantees perfect detection."""
    if not z_thr > 0:
        raise ValueError("z_thr must be positive")
    return min(z_thr**-2, z_thr**2)
