"""Rician channel draws, Monte-Carlo evaluation and parameter sweeps.

Each realization ``i`` of a scenario gets its own generator seeded from
``(scenario.seed, i)``, so a realization never depends on which others were
drawn before it or on how the work is split across processes.  Sweeps reuse
the same realizations at every grid point and for every method, which makes
method-to-method and point-to-point comparisons paired.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .model import ChannelSet, RicianParams, Scenario
from .multiplexing import correlation_matrix
from .optimizer import (
    Infeasible,
    RecoveryFailure,
    bado,
    equal_power_baseline,
    recover_powers,
)
from .sinr import DECISION_RTOL, decoy_dominates, sinr_report

__all__ = [
    "METHODS",
    "CSV_HEADER",
    "RealizationBatch",
    "Outcome",
    "MetricsRecord",
    "realization_rng",
    "draw_channels",
    "draw_batch",
    "evaluate",
    "evaluate_batch",
    "aggregate",
    "run_point",
    "sweep_power",
    "sweep_threshold",
    "records_to_csv",
]

METHODS = ("bado", "equal_power", "ofdm", "bado_unconstrained")

CSV_HEADER = (
    "sweep_value,method,mean_sum_secrecy,mean_intercept_sinr,mean_decoy_sinr,"
    "interception_prob,deception_prob,feasible_fraction,trials,stderr_secrecy"
)


def realization_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),)))


def draw_channels(params: RicianParams, K: int, rng: np.random.Generator) -> np.ndarray:
    """``K`` independent Rician power gains with mean ``params.mean_gain``."""
    kappa = params.k_factor
    mu = params.mean_gain
    theta = rng.uniform(0.0, 2.0 * np.pi, K)
    scatter = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) * math.sqrt(mu / 2.0)
    los = math.sqrt(kappa / (kappa + 1.0) * mu) * np.exp(1j * theta)
    h = los + math.sqrt(1.0 / (kappa + 1.0)) * scatter
    return np.abs(h) ** 2


@dataclass(frozen=True)
class RealizationBatch:
    realizations: tuple[ChannelSet, ...]
    seed: int
    params: tuple[RicianParams, RicianParams]


def _draw_one(scenario: Scenario, index: int) -> ChannelSet:
    rng = realization_rng(scenario.seed, index)
    K = scenario.band_plan.num_bands
    bob = draw_channels(scenario.rician_bob, K, rng)
    eve = draw_channels(scenario.rician_eve, K, rng)
    return ChannelSet(bob, eve, scenario.bob_noise, scenario.eve_noise)


def draw_batch(scenario: Scenario, count: int | None = None) -> RealizationBatch:
    n = scenario.trials if count is None else count
    return RealizationBatch(
        tuple(_draw_one(scenario, i) for i in range(n)),
        scenario.seed,
        (scenario.rician_bob, scenario.rician_eve),
    )


@dataclass(frozen=True)
class Outcome:
    """What one method achieved on one channel realization."""

    feasible: bool
    sum_secrecy: float
    intercept_sinr: float
    decoy_sinr: float
    intercepted: float
    deceived: float
    dominates: bool
    min_decoy_sinr: float = math.nan
    powers: np.ndarray | None = None
    alpha: float = math.nan


def _measure(p, ch, C, plan, threshold, alpha) -> Outcome:
    rep = sinr_report(p, ch, C, plan)
    rates = np.log2(1 + rep.bob_sinr) - np.log2(1 + rep.eve_intercept_sinr)
    dom = decoy_dominates(p, ch, plan)
    decoy = rep.eve_decoy_sinr
    return Outcome(
        feasible=True,
        sum_secrecy=float(rates.sum()),
        intercept_sinr=float(rep.eve_intercept_sinr.mean()),
        decoy_sinr=float(decoy.mean()) if decoy.size else math.nan,
        intercepted=float(np.mean(rep.eve_intercept_sinr >= threshold)),
        deceived=float(np.mean((decoy >= threshold * (1 - DECISION_RTOL)) & dom)) if decoy.size else 0.0,
        dominates=dom,
        min_decoy_sinr=float(decoy.min()) if decoy.size else math.nan,
        powers=np.asarray(p.powers if hasattr(p, "powers") else p),
        alpha=alpha,
    )


def _optimized(plan, norm, threshold, budget, orthogonal, deception):
    res = bado(norm, plan, threshold, budget, orthogonal=orthogonal, deception=deception)
    rec = recover_powers(res, norm, plan, threshold)
    alpha = rec.alpha_fit.alpha_star
    C = np.eye(plan.num_bands) if orthogonal else correlation_matrix(alpha, plan.num_bands)
    return rec.powers, C, alpha


def _fallback_intercepted(scenario, norm, orthogonal, cache, key) -> float:
    """Interception rate of the deception-free optimum, sent when decoys cannot be placed."""
    if cache is not None and key in cache:
        p, C = cache[key]
    else:
        plan = scenario.band_plan
        try:
            p, C, _ = _optimized(plan, norm, 0.0, scenario.total_power, orthogonal, False)
        except (Infeasible, RecoveryFailure):
            return 0.0
        if cache is not None:
            cache[key] = (p, C)
    rep = sinr_report(p, norm, C, scenario.band_plan)
    return float(np.mean(rep.eve_intercept_sinr >= scenario.deception_threshold))


def evaluate(scenario: Scenario, method: str, ch: ChannelSet, cache: dict | None = None,
             index: int | None = None) -> Outcome:
    """Allocate power with ``method`` on one realization and score it at Eve and Bob.

    When the decoy constraints cannot be met the source still transmits, using
    the same method without deception constraints.  Such a realization is
    marked infeasible, is never deceived, and counts towards interception
    according to that fallback allocation.  ``cache`` (keyed by ``index``)
    lets sweeps reuse the fallback across threshold values.
    """
    plan = scenario.band_plan
    th = scenario.deception_threshold
    budget = scenario.total_power
    norm = ch.normalized()
    if method == "equal_power":
        p = equal_power_baseline(plan, norm, budget)
        return _measure(p, norm, correlation_matrix(plan.alpha, plan.num_bands), plan, th, plan.alpha)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    orthogonal = method == "ofdm"
    deception = method != "bado_unconstrained"
    try:
        p, C, alpha = _optimized(plan, norm, th, budget, orthogonal, deception)
    except (Infeasible, RecoveryFailure):
        key = (index, budget, orthogonal) if index is not None else None
        intercepted = _fallback_intercepted(scenario, norm, orthogonal, cache if key else None, key)
        return Outcome(False, math.nan, math.nan, math.nan, intercepted, 0.0, False)
    return _measure(p, norm, C, plan, th, alpha)


def _evaluate_chunk(args):
    scenario, method, start, channels = args
    cache: dict = {}
    return [evaluate(scenario, method, ch, cache, start + i) for i, ch in enumerate(channels)]


def evaluate_batch(scenario: Scenario, method: str, batch: RealizationBatch | None = None,
                   workers: int = 1, cache: dict | None = None) -> list[Outcome]:
    """Outcomes in realization order; identical for any ``workers`` count."""
    if batch is None:
        batch = draw_batch(scenario)
    chans = list(batch.realizations)
    if workers <= 1 or len(chans) < 2:
        cache = {} if cache is None else cache
        return [evaluate(scenario, method, ch, cache, i) for i, ch in enumerate(chans)]
    size = math.ceil(len(chans) / workers)
    chunks = [(scenario, method, i, chans[i:i + size]) for i in range(0, len(chans), size)]
    with ProcessPoolExecutor(workers) as pool:
        parts = list(pool.map(_evaluate_chunk, chunks))
    return [o for part in parts for o in part]


@dataclass(frozen=True)
class MetricsRecord:
    sweep_value: float
    method: str
    mean_sum_secrecy: float
    mean_intercept_sinr: float
    mean_decoy_sinr: float
    interception_prob: float
    deception_prob: float
    feasible_fraction: float
    trials: int
    stderr_secrecy: float

    def csv_row(self) -> list[str]:
        def num(x):
            return f"{x:.9g}"

        return [
            num(self.sweep_value), self.method, num(self.mean_sum_secrecy),
            num(self.mean_intercept_sinr), num(self.mean_decoy_sinr),
            num(self.interception_prob), num(self.deception_prob),
            num(self.feasible_fraction), str(self.trials), num(self.stderr_secrecy),
        ]


def _mean(values) -> float:
    # fixed-order compensated summation keeps aggregates reproducible
    values = [v for v in values if not math.isnan(v)]
    return math.fsum(values) / len(values) if values else math.nan


def aggregate(outcomes: list[Outcome], method: str, sweep_value: float) -> MetricsRecord:
    n = len(outcomes)
    ok = [o for o in outcomes if o.feasible]
    rates = [o.sum_secrecy for o in ok]
    mean_rate = _mean(rates)
    if len(rates) > 1:
        var = math.fsum((r - mean_rate) ** 2 for r in rates) / (len(rates) - 1)
        stderr = math.sqrt(var / len(rates))
    else:
        stderr = math.nan
    return MetricsRecord(
        sweep_value=float(sweep_value),
        method=method,
        mean_sum_secrecy=mean_rate,
        mean_intercept_sinr=_mean([o.intercept_sinr for o in ok]),
        mean_decoy_sinr=_mean([o.decoy_sinr for o in ok]),
        interception_prob=math.fsum(o.intercepted for o in outcomes) / n,
        deception_prob=math.fsum(o.deceived for o in outcomes) / n,
        feasible_fraction=len(ok) / n,
        trials=n,
        stderr_secrecy=stderr,
    )


def run_point(scenario: Scenario, method: str, batch: RealizationBatch | None = None,
              sweep_value: float | None = None, workers: int = 1,
              cache: dict | None = None) -> MetricsRecord:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    outs = evaluate_batch(scenario, method, batch, workers, cache)
    value = scenario.total_power if sweep_value is None else sweep_value
    return aggregate(outs, method, value)


def _sweep(scenario, grid, methods, field, workers):
    grid = [float(g) for g in grid]
    if not grid:
        raise ValueError("sweep grid is empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be ascending")
    batch = draw_batch(scenario)
    out: dict[str, list[MetricsRecord]] = {m: [] for m in methods}
    cache: dict = {}
    for value in grid:
        point = replace(scenario, **{field: value})
        for m in methods:
            out[m].append(run_point(point, m, batch, value, workers, cache))
    return out


def sweep_power(scenario: Scenario, ps_grid, methods=("bado", "equal_power"), workers: int = 1):
    """One record per (total power, method); linear power values."""
    return _sweep(scenario, ps_grid, methods, "total_power", workers)


def sweep_threshold(scenario: Scenario, th_grid, methods=("bado", "equal_power"), workers: int = 1):
    """One record per (deception threshold, method)."""
    return _sweep(scenario, th_grid, methods, "deception_threshold", workers)


def records_to_csv(records) -> str:
    """CSV text, header first, rows ordered by sweep value then method order."""
    if isinstance(records, dict):
        methods = list(records)
        n = len(next(iter(records.values()))) if records else 0
        rows = [records[m][i] for i in range(n) for m in methods]
    else:
        rows = list(records)
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()
