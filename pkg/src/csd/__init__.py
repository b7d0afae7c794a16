"""Cooperative statistical detection of abnormal cluster heads.

A likelihood ratio test on packet-loss counts, hardened against falsified
reports by a traffic-weighted Z-score filter, plus a Monte Carlo harness for
false-alarm and missed-detection curves.
"""

from csd.detection import (
    Decision,
    DetectionParams,
    ForwardingCounts,
    LlrCoefficients,
    LlrReport,
    Verdict,
    compose_plr,
    critical_point_empirical,
    fused_decision,
    llr_coefficients,
    node_llr,
)
from csd.falsification import (
    FalsificationStrategy,
    GroupStrategy,
    breaks_unfiltered_detection,
    falsified_counts,
    group_strategy,
)
from csd.fusion import (
    NoTrustedEvidence,
    NormalizedLlr,
    RemovalRegime,
    ZscoreTable,
    asymptotic_regime,
    csd_decision,
    normalize,
    supremum_packet_ratio,
    weighted_zscores,
)
from csd.harness import (
    ConfigError,
    RateCurve,
    ScenarioSpec,
    bundled_scenario,
    estimate_rates,
    load_scenario,
    periods_to_reach,
    run_trial,
    sweep,
)
from csd.traffic import HeadGroundTruth, NodeProfile, PeriodObservation, Role, accumulate, sample_period

__version__ = "0.1.0"
