"""Domain types, scenario validation and the JSON config boundary.

Everything stored here is linear.  dB values are only accepted when a
config file is parsed (keys ending in ``_db``) and are converted right away.
Band indices are 0-based.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

__all__ = [
    "BandPlan",
    "ChannelSet",
    "PowerAllocation",
    "RicianParams",
    "Scenario",
    "ConfigError",
    "validate_scenario",
    "db_to_linear",
    "linear_to_db",
    "scenario_from_dict",
    "scenario_to_dict",
    "load_scenario",
    "dump_scenario",
    "demo_scenario",
    "FEASIBILITY_TOL",
]

FEASIBILITY_TOL = 1e-9


class ConfigError(ValueError):
    """Raised when a config file cannot be turned into a Scenario."""


def db_to_linear(value_db: float) -> float:
    return float(10.0 ** (value_db / 10.0))


def linear_to_db(value: float) -> float:
    if value <= 0:
        return -math.inf
    return float(10.0 * math.log10(value))


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BandPlan:
    """Split of ``num_bands`` bands into true and fake sets plus the multiplexing factor."""

    num_bands: int
    true_bands: tuple[int, ...]
    fake_bands: tuple[int, ...]
    alpha: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "true_bands", tuple(int(b) for b in self.true_bands))
        object.__setattr__(self, "fake_bands", tuple(int(b) for b in self.fake_bands))

    def violations(self, allow_pure_true: bool = False) -> list[str]:
        out = []
        K = self.num_bands
        if not isinstance(K, (int, np.integer)) or K < 1:
            out.append("num_bands must be a positive integer")
            return out
        t, f = set(self.true_bands), set(self.fake_bands)
        if len(t) != len(self.true_bands) or len(f) != len(self.fake_bands):
            out.append("duplicate band index")
        if any(b < 0 or b >= K for b in t | f):
            out.append("band index out of range")
        if t & f:
            out.append("band sets overlap")
        if (t | f) != set(range(K)):
            out.append("band sets do not cover all bands")
        if not t:
            out.append("no true bands")
        if not f and not allow_pure_true:
            out.append("no fake bands")
        a = self.alpha
        if not (isinstance(a, (int, float, np.floating)) and math.isfinite(a) and 0.0 < a <= 1.0):
            out.append("alpha out of range")
        return out

    @property
    def true_mask(self) -> np.ndarray:
        m = np.zeros(self.num_bands, dtype=bool)
        m[list(self.true_bands)] = True
        return m

    @property
    def fake_mask(self) -> np.ndarray:
        m = np.zeros(self.num_bands, dtype=bool)
        m[list(self.fake_bands)] = True
        return m

    @property
    def reference_band(self) -> int:
        """Band that the per-band coupling coefficients are measured against."""
        return min(self.true_bands)

    @classmethod
    def interleaved(cls, num_bands: int, alpha: float = 1.0) -> "BandPlan":
        """Even indices carry true signals, odd indices carry decoys."""
        return cls(num_bands, tuple(range(0, num_bands, 2)), tuple(range(1, num_bands, 2)), alpha)


@dataclass(frozen=True)
class ChannelSet:
    """Per-band power gains towards Bob and Eve and the matching noise powers."""

    bob_gain: np.ndarray
    eve_gain: np.ndarray
    bob_noise: np.ndarray = None
    eve_noise: np.ndarray = None

    def __post_init__(self):
        bob = _frozen_array(self.bob_gain)
        eve = _frozen_array(self.eve_gain)
        if bob.ndim != 1 or bob.shape != eve.shape:
            raise ValueError("bob_gain and eve_gain must be 1-D arrays of equal length")
        K = bob.size
        bn = np.ones(K) if self.bob_noise is None else np.broadcast_to(self.bob_noise, (K,))
        en = np.ones(K) if self.eve_noise is None else np.broadcast_to(self.eve_noise, (K,))
        object.__setattr__(self, "bob_gain", bob)
        object.__setattr__(self, "eve_gain", eve)
        object.__setattr__(self, "bob_noise", _frozen_array(bn))
        object.__setattr__(self, "eve_noise", _frozen_array(en))

    @property
    def num_bands(self) -> int:
        return self.bob_gain.size

    def violations(self) -> list[str]:
        out = []
        for name in ("bob_gain", "eve_gain"):
            g = getattr(self, name)
            if not np.all(np.isfinite(g)) or np.any(g < 0):
                out.append(f"{name} must be finite and nonnegative")
        for name in ("bob_noise", "eve_noise"):
            n = getattr(self, name)
            if not np.all(np.isfinite(n)) or np.any(n <= 0):
                out.append(f"{name} must be finite and positive")
        return out

    @property
    def is_normalized(self) -> bool:
        return bool(np.all(self.bob_noise == 1.0) and np.all(self.eve_noise == 1.0))

    def normalized(self) -> "ChannelSet":
        """Return the equivalent channel set with unit noise.

        Gains are divided by the local noise power, which leaves every SINR
        unchanged.
        """
        return ChannelSet(self.bob_gain / self.bob_noise, self.eve_gain / self.eve_noise)

    def to_dict(self) -> dict:
        return {
            "bob_gain": self.bob_gain.tolist(),
            "eve_gain": self.eve_gain.tolist(),
            "bob_noise": self.bob_noise.tolist(),
            "eve_noise": self.eve_noise.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChannelSet":
        return cls(d["bob_gain"], d["eve_gain"], d.get("bob_noise"), d.get("eve_noise"))


@dataclass(frozen=True)
class PowerAllocation:
    powers: np.ndarray
    budget: float

    def __post_init__(self):
        object.__setattr__(self, "powers", _frozen_array(self.powers))
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def total(self) -> float:
        return float(np.sum(self.powers))

    def violations(self) -> list[str]:
        out = []
        if np.any(self.powers < 0):
            out.append("negative power")
        if self.total > self.budget + FEASIBILITY_TOL:
            out.append("power budget exceeded")
        return out


@dataclass(frozen=True)
class RicianParams:
    k_factor_db: float = 10.0
    mean_gain: float = 1.0

    @property
    def k_factor(self) -> float:
        return db_to_linear(self.k_factor_db)

    def violations(self) -> list[str]:
        out = []
        if not math.isfinite(self.k_factor_db):
            out.append("rician k-factor must be finite")
        if not (math.isfinite(self.mean_gain) and self.mean_gain > 0):
            out.append("rician mean gain must be positive")
        return out


@dataclass(frozen=True)
class Scenario:
    band_plan: BandPlan
    rician_bob: RicianParams = field(default_factory=RicianParams)
    rician_eve: RicianParams = field(default_factory=RicianParams)
    total_power: float = 10.0
    deception_threshold: float = 0.5
    trials: int = 500
    seed: int = 0
    bob_noise: float = 1.0
    eve_noise: float = 1.0

    def with_overrides(self, **kw) -> "Scenario":
        return replace(self, **kw)


def _is_number(x) -> bool:
    return isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)


def validate_scenario(s: Scenario) -> list[str]:
    """Every invariant violation found in ``s``; empty when the scenario is usable."""
    out = list(s.band_plan.violations())
    for p in (s.rician_bob, s.rician_eve):
        for v in p.violations():
            if v not in out:
                out.append(v)
    if not (_is_number(s.total_power) and math.isfinite(s.total_power) and s.total_power >= 0):
        out.append("total power must be finite and nonnegative")
    th = s.deception_threshold
    if not (_is_number(th) and math.isfinite(th) and th >= 0):
        out.append("deception threshold must be finite and nonnegative")
    if not (isinstance(s.trials, (int, np.integer)) and s.trials >= 1):
        out.append("trials must be a positive integer")
    if not (isinstance(s.seed, (int, np.integer)) and 0 <= s.seed < 2**64):
        out.append("seed must be an unsigned 64-bit integer")
    for name in ("bob_noise", "eve_noise"):
        v = getattr(s, name)
        if not (_is_number(v) and math.isfinite(v) and v > 0):
            out.append(f"{name} must be finite and positive")
    return out


# ---------------------------------------------------------------- config I/O
#
# The on-disk format is a flat JSON object.  Required keys mirror the public
# contract; optional keys fall back to the defaults below.

REQUIRED_KEYS = (
    "num_bands",
    "true_bands",
    "fake_bands",
    "alpha",
    "deception_threshold",
    "rician_k_db",
    "trials",
    "seed",
)
OPTIONAL_KEYS = {
    "bob_mean_gain": 1.0,
    "eve_mean_gain": 1.0,
    "bob_noise": 1.0,
    "eve_noise": 1.0,
}


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    missing = [k for k in REQUIRED_KEYS if k not in d]
    if "total_power_db" not in d and "total_power" not in d:
        missing.append("total_power_db")
    if missing:
        raise ConfigError("missing config keys: " + ", ".join(missing))
    known = set(REQUIRED_KEYS) | set(OPTIONAL_KEYS) | {"total_power_db", "total_power"}
    unknown = sorted(set(d) - known)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    try:
        if "total_power" in d:
            power = float(d["total_power"])
        else:
            power = db_to_linear(float(d["total_power_db"]))
        opt = {k: float(d.get(k, v)) for k, v in OPTIONAL_KEYS.items()}
        plan = BandPlan(int(d["num_bands"]), tuple(d["true_bands"]), tuple(d["fake_bands"]), float(d["alpha"]))
        k_db = float(d["rician_k_db"])
        return Scenario(
            band_plan=plan,
            rician_bob=RicianParams(k_db, opt["bob_mean_gain"]),
            rician_eve=RicianParams(k_db, opt["eve_mean_gain"]),
            total_power=power,
            deception_threshold=float(d["deception_threshold"]),
            trials=int(d["trials"]),
            seed=int(d["seed"]),
            bob_noise=opt["bob_noise"],
            eve_noise=opt["eve_noise"],
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc


def _power_db_roundtrip(power: float) -> float | None:
    # smallest-distance dB value whose conversion reproduces ``power`` bit-exactly
    if power <= 0:
        return None
    db = linear_to_db(power)
    lo = hi = db
    for _ in range(8):
        for cand in (lo, hi):
            if db_to_linear(cand) == power:
                return cand
        lo = math.nextafter(lo, -math.inf)
        hi = math.nextafter(hi, math.inf)
    return None


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    plan = s.band_plan
    if s.rician_bob.k_factor_db != s.rician_eve.k_factor_db:
        raise ConfigError("config format stores a single rician_k_db for both links")
    d: dict[str, Any] = {
        "num_bands": plan.num_bands,
        "true_bands": list(plan.true_bands),
        "fake_bands": list(plan.fake_bands),
        "alpha": plan.alpha,
    }
    db = _power_db_roundtrip(s.total_power)
    if db is None:
        d["total_power"] = s.total_power
    else:
        d["total_power_db"] = db
    d.update(
        deception_threshold=s.deception_threshold,
        rician_k_db=s.rician_bob.k_factor_db,
        trials=s.trials,
        seed=s.seed,
        bob_mean_gain=s.rician_bob.mean_gain,
        eve_mean_gain=s.rician_eve.mean_gain,
        bob_noise=s.bob_noise,
        eve_noise=s.eve_noise,
    )
    return d


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return scenario_from_dict(data)


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def demo_scenario() -> Scenario:
    """Four sources, true signals on bands 0 and 2, decoys on 1 and 3, 10 dB Rician fading."""
    return Scenario(
        band_plan=BandPlan(4, (0, 2), (1, 3), 0.8),
        rician_bob=RicianParams(10.0, 1.0),
        rician_eve=RicianParams(10.0, 1.0),
        total_power=10.0,
        deception_threshold=0.2,
        trials=500,
        seed=20240601,
    )
