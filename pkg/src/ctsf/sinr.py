"""SINRs at Bob and Eve, secrecy rates, decoy dominance and per-realization indicators.

Interference seen on receive band ``k`` from band ``i`` is weighted by the
coupling ``C[i, k]``.  Bob knows the decoys and removes them, so only other
true bands interfere at Bob unless ``residual_decoy`` is set.  Eve sees every
band.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BandPlan, ChannelSet, PowerAllocation

__all__ = [
    "DECISION_RTOL",
    "SinrReport",
    "RateReport",
    "bob_sinr",
    "eve_intercept_sinr",
    "eve_decoy_sinr",
    "sinr_report",
    "decoy_dominates",
    "sum_secrecy_rate",
    "indicators",
]


# ties in the decoy tests (binding dominance or SINR floor) are decided in the
# decoy's favour when they agree to this relative precision
DECISION_RTOL = 1e-9


@dataclass(frozen=True)
class SinrReport:
    bob_sinr: np.ndarray
    eve_intercept_sinr: np.ndarray
    eve_decoy_sinr: np.ndarray


@dataclass(frozen=True)
class RateReport:
    per_band_secrecy: np.ndarray
    sum_secrecy: float

    def clamped(self) -> "RateReport":
        """Presentation helper: negative per-band rates floored at zero."""
        per = np.maximum(self.per_band_secrecy, 0.0)
        return RateReport(per, float(per.sum()))


def _powers(p) -> np.ndarray:
    return np.asarray(p.powers if isinstance(p, PowerAllocation) else p, dtype=float)


def _interference(received: np.ndarray, C: np.ndarray, senders: np.ndarray) -> np.ndarray:
    """Coupled power from ``senders`` arriving on each band, own band excluded."""
    src = np.where(senders, received, 0.0)
    return src @ C - src * np.diag(C)


def _bob_all(p, ch, C, plan, residual_decoy):
    rx = p * ch.bob_gain
    senders = np.ones(plan.num_bands, bool) if residual_decoy else plan.true_mask
    return rx / (_interference(rx, C, senders) + ch.bob_noise)


def _eve_all(p, ch, C):
    rx = p * ch.eve_gain
    return rx / (_interference(rx, C, np.ones(rx.size, bool)) + ch.eve_noise)


def bob_sinr(k, p, ch: ChannelSet, C, plan: BandPlan, residual_decoy: bool = False) -> float:
    if k not in plan.true_bands:
        raise ValueError(f"band {k} is not a true band")
    return float(_bob_all(_powers(p), ch, np.asarray(C), plan, residual_decoy)[k])


def eve_intercept_sinr(k, p, ch: ChannelSet, C, plan: BandPlan) -> float:
    if k not in plan.true_bands:
        raise ValueError(f"band {k} is not a true band")
    return float(_eve_all(_powers(p), ch, np.asarray(C))[k])


def eve_decoy_sinr(n, p, ch: ChannelSet, C, plan: BandPlan) -> float:
    if n not in plan.fake_bands:
        raise ValueError(f"band {n} is not a fake band")
    return float(_eve_all(_powers(p), ch, np.asarray(C))[n])


def sinr_report(p, ch: ChannelSet, C, plan: BandPlan, residual_decoy: bool = False) -> SinrReport:
    p = _powers(p)
    C = np.asarray(C)
    eve = _eve_all(p, ch, C)
    t, f = list(plan.true_bands), list(plan.fake_bands)
    return SinrReport(
        bob_sinr=_bob_all(p, ch, C, plan, residual_decoy)[t],
        eve_intercept_sinr=eve[t],
        eve_decoy_sinr=eve[f],
    )


def decoy_dominates(p, ch: ChannelSet, plan: BandPlan, rtol: float = DECISION_RTOL) -> bool:
    """True when the weakest decoy reaches Eve at least as strongly as the strongest true signal."""
    rx = _powers(p) * ch.eve_gain
    if not plan.fake_bands:
        return False
    return bool(rx[list(plan.fake_bands)].min() >= rx[list(plan.true_bands)].max() * (1 - rtol))


def sum_secrecy_rate(p, ch: ChannelSet, C, plan: BandPlan, residual_decoy: bool = False) -> RateReport:
    """Raw per-band secrecy rates in bits/s/Hz; negative values are kept."""
    rep = sinr_report(p, ch, C, plan, residual_decoy)
    per = np.log2(1.0 + rep.bob_sinr) - np.log2(1.0 + rep.eve_intercept_sinr)
    return RateReport(per, float(per.sum()))


def indicators(p, ch: ChannelSet, C, plan: BandPlan, threshold: float):
    """Interception flags per true band and deception flags per fake band."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    rep = sinr_report(p, ch, C, plan)
    intercepted = rep.eve_intercept_sinr >= threshold
    deceived = (rep.eve_decoy_sinr >= threshold * (1 - DECISION_RTOL)) & decoy_dominates(p, ch, plan)
    return intercepted, deceived
