"""Monte Carlo estimation of false-alarm and missed-detection probabilities.

A scenario fixes the cluster (traffic means, roles, falsification
strategies), the detector and the trial budget. Every trial simulates a full
trajectory of ``max_periods`` detection periods and records the detector's
verdict after each one; FAP and MDP at period ``t`` are the fractions of
trials that erred at ``t`` under a normal and an abnormal head.

Trials are independent work units with their own random streams, so results
do not depend on block size or the number of worker processes.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import os
from collections.abc import Hashable, Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np
import yaml

from csd import kernels
from csd.baselines import TRUST_INITIAL, glrt_statistic, trust_trajectories
from csd.detection import DetectionParams, LlrCoefficients, LlrReport, compose_plr, llr_coefficients
from csd.falsification import (
    FalsificationStrategy,
    GroupStrategy,
    breaks_unfiltered_detection,
    group_strategy,
)
from csd.fusion import asymptotic_regime, normalize, weighted_zscores
from csd.traffic import HeadGroundTruth, NodeProfile, Role, sample_trial

SCHEMES = ("csd", "lrt_unfiltered", "tbs", "sbs")
SWEEP_AXES = ("z_thr", "kappa", "q_prime", "q_dprime", "gamma", "q_a")
CURVE_HEADER = ("period", "fap", "fap_stderr", "mdp", "mdp_stderr", "trials")
ZSCORE_HEADER = ("hypothesis", "trial", "period", "node_id", "x", "z", "removed")

H0 = 0
H1 = 1
DEFAULT_BLOCK = 1024

DATA_DIR = Path(__file__).with_name("data")


class ConfigError(ValueError):
    """A scenario file or override is malformed or inconsistent."""


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    nodes: tuple[NodeProfile, ...]
    q_n: float = 0.15
    q_a: float = 0.0588
    q_d: float | None = None
    gamma: float = 1.4
    z_thr: float = 1.0
    scheme: str = "csd"
    trials: int = 10_000
    max_periods: int = 200
    seed: int = 0
    tbs_threshold: int = TRUST_INITIAL

    def __post_init__(self) -> None:
        if not self.nodes:
            raise ConfigError("a scenario needs at least one cluster node")
        ids = [n.node_id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ConfigError("node ids must be unique")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.trials < 1 or self.max_periods < 1:
            raise ConfigError("trials and max_periods must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not 0.0 < self.q_a < 1.0:
            raise ConfigError(f"q_a must lie in (0, 1), got {self.q_a!r}")
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def detecting_plr(self) -> float:
        return self.q_d if self.q_d is not None else compose_plr(self.q_n, self.q_a)

    @property
    def abnormal_plr(self) -> float:
        return compose_plr(self.q_n, self.q_a)

    @property
    def params(self) -> DetectionParams:
        return DetectionParams(self.q_n, self.detecting_plr, self.gamma, self.z_thr)

    @property
    def coefficients(self) -> LlrCoefficients:
        return llr_coefficients(self.params)

    @property
    def mu(self) -> np.ndarray:
        return np.array([n.mu for n in self.nodes], dtype=float)

    @property
    def group(self) -> GroupStrategy | None:
        if not any(n.malicious for n in self.nodes):
            return None
        return group_strategy(self.nodes)

    def truth(self, hypothesis: int) -> HeadGroundTruth:
        if hypothesis == H0:
            return HeadGroundTruth.normal(self.q_n)
        return HeadGroundTruth.abnormal(self.q_n, self.q_a)

    def replace(self, **changes: Any) -> ScenarioSpec:
        return dataclasses.replace(self, **changes)

    def with_strategy(
        self,
        kappa: float | None = None,
        q_prime: float | None = None,
        q_dprime: float | None = None,
    ) -> ScenarioSpec:
        """Copy with the given strategy fields set on every malicious node."""
        nodes = []
        for n in self.nodes:
            if n.strategy is not None:
                s = n.strategy
                n = dataclasses.replace(
                    n,
                    strategy=FalsificationStrategy(
                        s.kappa if kappa is None else kappa,
                        s.q_prime if q_prime is None else q_prime,
                        s.q_dprime if q_dprime is None else q_dprime,
                    ),
                )
            nodes.append(n)
        return self.replace(nodes=tuple(nodes))


# -- scenario files ---------------------------------------------------------

_SCALAR_FIELDS = {
    "q_n": float,
    "q_a": float,
    "q_d": float,
    "gamma": float,
    "z_thr": float,
    "scheme": str,
    "trials": int,
    "max_periods": int,
    "seed": int,
    "tbs_threshold": int,
}


def scenario_from_dict(raw: Mapping[str, Any]) -> ScenarioSpec:
    if not isinstance(raw, Mapping):
        raise ConfigError("scenario must be a mapping")
    unknown = set(raw) - set(_SCALAR_FIELDS) - {"name", "nodes", "strategy"}
    if unknown:
        raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
    default_strategy = raw.get("strategy") or {}
    nodes_raw = raw.get("nodes")
    if not isinstance(nodes_raw, list) or not nodes_raw:
        raise ConfigError("'nodes' must be a non-empty list")

    nodes = []
    for entry in nodes_raw:
        if not isinstance(entry, Mapping) or "id" not in entry or "mu" not in entry:
            raise ConfigError(f"node entries need 'id' and 'mu': {entry!r}")
        try:
            role = Role(entry.get("role", "benign"))
        except ValueError:
            raise ConfigError(f"node {entry['id']!r}: unknown role {entry.get('role')!r}") from None
        strategy = None
        if role is Role.MALICIOUS:
            merged = {**default_strategy, **{k: entry[k] for k in ("kappa", "q_prime", "q_dprime") if k in entry}}
            missing = {"kappa", "q_prime", "q_dprime"} - merged.keys()
            if missing:
                raise ConfigError(f"node {entry['id']!r}: missing strategy fields {sorted(missing)}")
            try:
                strategy = FalsificationStrategy(
                    float(merged["kappa"]), float(merged["q_prime"]), float(merged["q_dprime"])
                )
            except ValueError as exc:
                raise ConfigError(f"node {entry['id']!r}: {exc}") from exc
        try:
            nodes.append(NodeProfile(entry["id"], float(entry["mu"]), role, strategy))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    kwargs: dict[str, Any] = {"name": str(raw.get("name", "scenario")), "nodes": tuple(nodes)}
    for key, cast in _SCALAR_FIELDS.items():
        if raw.get(key) is not None:
            try:
                kwargs[key] = cast(raw[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key}: cannot interpret {raw[key]!r}") from None
    return ScenarioSpec(**kwargs)


def scenario_to_dict(spec: ScenarioSpec) -> dict[str, Any]:
    nodes = []
    for n in spec.nodes:
        entry: dict[str, Any] = {"id": n.node_id, "mu": n.mu, "role": n.role.value}
        if n.strategy is not None:
            entry.update(kappa=n.strategy.kappa, q_prime=n.strategy.q_prime, q_dprime=n.strategy.q_dprime)
        nodes.append(entry)
    out: dict[str, Any] = {"name": spec.name}
    for key in _SCALAR_FIELDS:
        value = getattr(spec, key)
        if value is not None:
            out[key] = value
    out["nodes"] = nodes
    return out


def load_scenario(path: str | os.PathLike[str]) -> ScenarioSpec:
    p = Path(path)
    if not p.exists() and (DATA_DIR / f"{p.name}.yaml").exists():
        p = DATA_DIR / f"{p.name}.yaml"
    try:
        raw = yaml.safe_load(p.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return scenario_from_dict(raw)


def bundled_scenario(name: str) -> ScenarioSpec:
    """One of the shipped scenarios: ``scenario1`` .. ``scenario4``."""
    return load_scenario(DATA_DIR / f"{name}.yaml")


# -- simulation -------------------------------------------------------------


def _reported_counts(
    spec: ScenarioSpec, truth: HeadGroundTruth, sent: np.ndarray, dropped: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-period counts as reported to the trusted node, shape ``(B, T, n)``."""
    sent_r = sent.astype(float)
    dropped_r = dropped.astype(float)
    for j, node in enumerate(spec.nodes):
        if node.strategy is not None:
            sent_r[..., j] *= node.strategy.kappa
            dropped_r[..., j] = node.strategy.claimed_plr(truth.is_abnormal) * sent_r[..., j]
    return sent_r, dropped_r


def simulate_statistics(
    spec: ScenarioSpec,
    truth: HeadGroundTruth,
    trials: Iterable[int],
    *,
    backend: str | None = None,
) -> np.ndarray:
    """Detector statistic after every period for the given trial indices.

    Returns shape ``(len(trials), max_periods)``. For the LLR schemes the
    statistic is the (filtered) fused LLR and NaN marks "every report
    removed"; for ``tbs`` it is the trust value.
    """
    hypothesis = int(truth.is_abnormal)
    mu = spec.mu
    draws = [sample_trial(mu, truth.plr, spec.max_periods, spec.seed, hypothesis, i) for i in trials]
    if not draws:
        return np.empty((0, spec.max_periods))
    sent = np.stack([d[0] for d in draws])
    dropped = np.stack([d[1] for d in draws])
    sent_r, dropped_r = _reported_counts(spec, truth, sent, dropped)

    if spec.scheme == "tbs":
        per_sent = sent_r.sum(axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            observed = np.where(per_sent > 0, dropped_r.sum(axis=-1) / per_sent, np.nan)
        return trust_trajectories(observed, spec.q_n, spec.detecting_plr).astype(float)

    total = np.cumsum(sent_r, axis=1)
    lost = np.cumsum(dropped_r, axis=1)
    if spec.scheme == "sbs":
        return glrt_statistic(total.sum(axis=-1), lost.sum(axis=-1), spec.q_n)

    c = spec.coefficients
    llr = np.ascontiguousarray(c.coeff_total * total + c.coeff_dropped * lost)
    kernel = kernels.filtered_statistics if backend is None else kernels.load_backend(backend).filtered_statistics
    return kernel(llr, mu, spec.z_thr, spec.scheme == "csd")


def decisions(spec: ScenarioSpec, stats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(abnormal, no_evidence)`` boolean arrays for detector statistics."""
    no_evidence = np.isnan(stats)
    if spec.scheme == "tbs":
        abnormal = stats < spec.tbs_threshold
    else:
        abnormal = np.where(no_evidence, False, stats >= spec.gamma)
    return abnormal, no_evidence


def errors(spec: ScenarioSpec, hypothesis: int, stats: np.ndarray) -> np.ndarray:
    """Per-(trial, period) error indicator; a period without evidence is an error."""
    abnormal, no_evidence = decisions(spec, stats)
    wrong = abnormal if hypothesis == H0 else ~abnormal
    return wrong | no_evidence


@dataclass(frozen=True)
class TrialResult:
    statistics: np.ndarray
    abnormal: np.ndarray
    no_evidence: np.ndarray


def run_trial(spec: ScenarioSpec, truth: HeadGroundTruth, trial_index: int) -> TrialResult:
    stats = simulate_statistics(spec, truth, [trial_index])[0]
    abnormal, no_evidence = decisions(spec, stats)
    return TrialResult(stats, abnormal, no_evidence)


@dataclass
class _Tally:
    errors: np.ndarray
    no_evidence_final: int = 0


def _tally_block(spec: ScenarioSpec, hypothesis: int, start: int, stop: int) -> _Tally:
    truth = spec.truth(hypothesis)
    stats = simulate_statistics(spec, truth, range(start, stop))
    err = errors(spec, hypothesis, stats)
    return _Tally(err.sum(axis=0), int(np.isnan(stats[:, -1]).sum()))


def _blocks(trials: int, block: int) -> list[tuple[int, int]]:
    return [(s, min(s + block, trials)) for s in range(0, trials, block)]


def error_counts(
    spec: ScenarioSpec, hypothesis: int, *, workers: int = 1, block: int = DEFAULT_BLOCK
) -> tuple[np.ndarray, int]:
    """Number of erring trials per period, and trials without evidence at the end."""
    blocks = _blocks(spec.trials, block)
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            tallies = list(
                pool.map(
                    _tally_block,
                    [spec] * len(blocks),
                    [hypothesis] * len(blocks),
                    *zip(*blocks),
                )
            )
    else:
        tallies = [_tally_block(spec, hypothesis, s, e) for s, e in blocks]
    counts = np.zeros(spec.max_periods, dtype=np.int64)
    no_evidence = 0
    # merged in block order; integer sums make the order immaterial anyway
    for t in tallies:
        counts += t.errors
        no_evidence += t.no_evidence_final
    return counts, no_evidence


@dataclass(frozen=True)
class RateCurve:
    fap: np.ndarray
    mdp: np.ndarray
    trials: int
    no_evidence_final: tuple[int, int] = (0, 0)
    label: str = ""

    @property
    def periods(self) -> np.ndarray:
        return np.arange(1, len(self.fap) + 1)

    @property
    def fap_stderr(self) -> np.ndarray:
        return _stderr(self.fap, self.trials)

    @property
    def mdp_stderr(self) -> np.ndarray:
        return _stderr(self.mdp, self.trials)

    def at(self, period: int, which: Literal["fap", "mdp"]) -> float:
        return float(getattr(self, which)[period - 1])

    def rows(self) -> list[tuple[Any, ...]]:
        fs, ms = self.fap_stderr, self.mdp_stderr
        return [
            (int(t), float(f), float(fe), float(m), float(me), self.trials)
            for t, f, fe, m, me in zip(self.periods, self.fap, fs, self.mdp, ms)
        ]

    def to_csv(self, dest: str | os.PathLike[str] | io.TextIOBase | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CURVE_HEADER)
        writer.writerows(self.rows())
        text = buf.getvalue()
        if isinstance(dest, (str, os.PathLike)):
            Path(dest).write_text(text)
        elif dest is not None:
            dest.write(text)
        return text


def _stderr(p: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(p * (1.0 - p) / n)


def estimate_rates(spec: ScenarioSpec, *, workers: int = 1, block: int = DEFAULT_BLOCK) -> RateCurve:
    fa, ne0 = error_counts(spec, H0, workers=workers, block=block)
    md, ne1 = error_counts(spec, H1, workers=workers, block=block)
    return RateCurve(fa / spec.trials, md / spec.trials, spec.trials, (ne0, ne1), spec.name)


def estimate_rate(
    spec: ScenarioSpec, which: Literal["fap", "mdp"], *, workers: int = 1
) -> np.ndarray:
    """Only one of the two curves, for when the other hypothesis is not needed."""
    hypothesis = {"fap": H0, "mdp": H1}[which]
    counts, _ = error_counts(spec, hypothesis, workers=workers)
    return counts / spec.trials


def first_period_staying_below(rates: np.ndarray, target: float) -> int | None:
    """Smallest ``t`` with ``rates[s] <= target`` for every ``s >= t`` in the horizon."""
    above = np.nonzero(np.asarray(rates) > target)[0]
    if above.size == 0:
        return 1
    t = int(above[-1]) + 2
    return t if t <= len(rates) else None


def periods_to_reach(
    source: ScenarioSpec | RateCurve,
    target: float,
    which: Literal["fap", "mdp"],
    *,
    workers: int = 1,
) -> int | None:
    """Detection periods needed until the rate settles at or below ``target``.

    Rates can rise before they decay (falsified reports dominate early
    periods), so the answer is the period from which the estimate stays at
    or below the target for the rest of the horizon. ``None`` means the
    target was not reached within ``max_periods``.
    """
    if not 0.0 < target < 1.0:
        raise ValueError("target must lie in (0, 1)")
    if which not in ("fap", "mdp"):
        raise ValueError(f"which must be 'fap' or 'mdp', got {which!r}")
    if isinstance(source, RateCurve):
        rates = getattr(source, which)
    else:
        rates = estimate_rate(source, which, workers=workers)
    return first_period_staying_below(rates, target)


def cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(index,)).generate_state(1, np.uint64)[0])


def apply_axis(spec: ScenarioSpec, axis: str, value: float) -> ScenarioSpec:
    if axis not in SWEEP_AXES:
        raise ConfigError(f"cannot sweep {axis!r}; choose from {SWEEP_AXES}")
    if axis in ("kappa", "q_prime", "q_dprime"):
        if spec.group is None:
            raise ConfigError(f"{axis} sweep needs malicious nodes in the scenario")
        try:
            return spec.with_strategy(**{axis: float(value)})
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    return spec.replace(**{axis: float(value)})


def sweep(
    spec: ScenarioSpec, axis: str, values: Sequence[float], *, workers: int = 1
) -> list[tuple[float, RateCurve]]:
    """One rate curve per axis value; each cell runs with its own derived seed."""
    cells = [apply_axis(spec, axis, v) for v in values]
    return [
        (v, estimate_rates(c.replace(seed=cell_seed(spec.seed, i)), workers=workers))
        for i, (v, c) in enumerate(zip(values, cells))
    ]


def sweep_to_csv(axis: str, results: Sequence[tuple[float, RateCurve]], dest: str | os.PathLike[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow((axis, *CURVE_HEADER))
    for value, curve in results:
        writer.writerows((value, *row) for row in curve.rows())
    text = buf.getvalue()
    if dest is not None:
        Path(dest).write_text(text)
    return text


# -- curve diagnostics ------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    first_period: int
    last_period: int


def decay_fit(rates: np.ndarray, trials: int, min_count: int = 20) -> DecayFit | None:
    """Least-squares line through ``log(rate)`` over the decaying range.

    The range runs from the curve's peak to the last period whose estimate
    still rests on at least ``min_count`` erring trials; below that the
    logarithm is dominated by sampling noise.
    """
    rates = np.asarray(rates, dtype=float)
    start = int(np.argmax(rates))
    enough = np.nonzero(rates * trials >= min_count)[0]
    enough = enough[enough >= start]
    if enough.size == 0:
        return None
    stop = int(enough[-1])
    t = np.arange(start, stop + 1) + 1.0
    y = rates[start : stop + 1]
    mask = y > 0
    if mask.sum() < 3:
        return None
    t, logy = t[mask], np.log(y[mask])
    slope, intercept = np.polyfit(t, logy, 1)
    resid = logy - (slope * t + intercept)
    ss_tot = float(((logy - logy.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss_tot if ss_tot > 0 else 0.0
    return DecayFit(float(slope), float(intercept), r2, start + 1, stop + 1)


def is_decaying(curve: RateCurve, final_max: float = 0.05, min_r_squared: float = 0.9) -> bool:
    """Both error curves end low and fall log-linearly from their peaks."""
    for which in ("fap", "mdp"):
        rates = getattr(curve, which)
        if rates[-1] > final_max:
            return False
        fit = decay_fit(rates, curve.trials)
        if fit is not None and not (fit.slope < 0 and fit.r_squared >= min_r_squared):
            return False
    return True


# -- ROC --------------------------------------------------------------------


def detection_scores(spec: ScenarioSpec, hypothesis: int, period: int) -> np.ndarray:
    """Score at ``period`` per trial, oriented so that larger means "abnormal".

    Periods without evidence are mapped to the erring extreme for their
    hypothesis, so no threshold can turn them into correct verdicts.
    """
    stats = simulate_statistics(spec.replace(max_periods=period), spec.truth(hypothesis), range(spec.trials))[:, -1]
    scores = -stats if spec.scheme == "tbs" else stats.copy()
    scores[np.isnan(scores)] = np.inf if hypothesis == H0 else -np.inf
    return scores


@dataclass(frozen=True)
class RocCurve:
    cutoffs: np.ndarray
    fap: np.ndarray
    mdp: np.ndarray

    def mdp_at_fap(self, target: float) -> float:
        """Lowest MDP over operating points whose FAP does not exceed ``target``."""
        ok = self.fap <= target
        return float(self.mdp[ok].min()) if ok.any() else 1.0


def roc_curve(scores0: np.ndarray, scores1: np.ndarray) -> RocCurve:
    """All operating points of the rule "abnormal iff score >= cutoff"."""
    finite = np.concatenate([scores0, scores1])
    cutoffs = np.unique(np.concatenate([finite[np.isfinite(finite)], [np.inf]]))
    s0 = np.sort(scores0)
    s1 = np.sort(scores1)
    fap = 1.0 - np.searchsorted(s0, cutoffs, side="left") / len(s0)
    mdp = np.searchsorted(s1, cutoffs, side="left") / len(s1)
    return RocCurve(cutoffs, fap, mdp)


def roc_for(spec: ScenarioSpec, period: int) -> RocCurve:
    return roc_curve(detection_scores(spec, H0, period), detection_scores(spec, H1, period))


# -- period tables ----------------------------------------------------------

TABLE_TARGETS = (0.10, 0.05, 0.01)


@dataclass(frozen=True)
class TableRow:
    which: str
    kappa: float
    falsified_plr: float
    periods: tuple[int | None, ...]
    targets: tuple[float, ...]


def period_table(
    spec: ScenarioSpec,
    which: Literal["fap", "mdp"],
    kappas: Sequence[float],
    plrs: Sequence[float],
    targets: Sequence[float],
    *,
    workers: int = 1,
) -> list[TableRow]:
    """Periods needed to reach each target across a grid of strategies.

    For FAP the grid varies the claimed rate under a normal head; for MDP
    the claimed rate under an abnormal head.
    """
    axis = "q_prime" if which == "fap" else "q_dprime"
    rows = []
    for kappa in kappas:
        for plr in plrs:
            cell = spec.with_strategy(kappa=kappa, **{axis: plr})
            rates = estimate_rate(cell, which, workers=workers)
            periods = tuple(first_period_staying_below(rates, x) for x in targets)
            rows.append(TableRow(which, kappa, plr, periods, tuple(targets)))
    return rows


def table_to_csv(rows: Sequence[TableRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("which", "kappa", "falsified_plr", "target", "periods"))
    for r in rows:
        for target, p in zip(r.targets, r.periods):
            writer.writerow((r.which, r.kappa, r.falsified_plr, target, "" if p is None else p))
    return buf.getvalue()


# -- debug dump -------------------------------------------------------------


def zscore_rows(spec: ScenarioSpec, trials: int) -> list[tuple[Any, ...]]:
    """Per-period Z-score tables of the first ``trials`` trials of each hypothesis."""
    c = spec.coefficients
    rows: list[tuple[Any, ...]] = []
    ids: list[Hashable] = [n.node_id for n in spec.nodes]
    mu = spec.mu
    for hypothesis in (H0, H1):
        truth = spec.truth(hypothesis)
        for trial in range(min(trials, spec.trials)):
            sent, dropped = sample_trial(mu, truth.plr, spec.max_periods, spec.seed, hypothesis, trial)
            sent_r, dropped_r = _reported_counts(spec, truth, sent[None], dropped[None])
            llr = c.coeff_total * np.cumsum(sent_r[0], axis=0) + c.coeff_dropped * np.cumsum(dropped_r[0], axis=0)
            for t in range(spec.max_periods):
                reports = [LlrReport(i, float(v), m) for i, v, m in zip(ids, llr[t], mu)]
                xs = normalize(reports, t + 1)
                table = weighted_zscores(xs, spec.z_thr)
                for v in xs:
                    rows.append(
                        (hypothesis, trial, t + 1, v.node_id, v.x, table.scores[v.node_id], int(v.node_id in table.removed))
                    )
    return rows


def write_zscores(spec: ScenarioSpec, dest: str | os.PathLike[str], trials: int = 10) -> None:
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ZSCORE_HEADER)
        writer.writerows(zscore_rows(spec, trials))


def describe(spec: ScenarioSpec) -> dict[str, Any]:
    """Closed-form summary used by the CLI: critical point, group strategy, regime."""
    c = spec.coefficients
    info: dict[str, Any] = {
        "beta": c.beta,
        "abnormal_plr": spec.abnormal_plr,
        "detecting_plr": spec.detecting_plr,
    }
    g = spec.group
    if g is not None:
        info.update(
            mu0=g.mu0,
            mu1=g.mu1,
            regime=asymptotic_regime(g.mu0, g.mu1, spec.z_thr).value,
        )
        if spec.q_n < c.beta < spec.abnormal_plr:
            info["breaks_unfiltered"] = breaks_unfiltered_detection(g, c.beta, spec.q_n, spec.abnormal_plr)
    return info

