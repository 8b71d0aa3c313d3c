"""``ctsf`` command line: optimize one realization, run sweeps, fit alpha, self-check.

Exit codes: 0 success, 1 failed self-check, 2 bad config or refused overwrite,
3 infeasible optimization.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import (
    ChannelSet,
    ConfigError,
    db_to_linear,
    demo_scenario,
    dump_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .multiplexing import correlation_matrix, fit_alpha
from .optimizer import Infeasible, RecoveryFailure, bado, equal_power_baseline, recover_powers
from .simulation import _draw_one, records_to_csv, sweep_power, sweep_threshold
from .sinr import sum_secrecy_rate

METHOD_NAMES = {
    "bado": "bado",
    "equal": "equal_power",
    "ofdm": "ofdm",
    "bado-unconstrained": "bado_unconstrained",
}
DEFAULT_POWER_GRID_DB = "0:20:2"
DEFAULT_THRESHOLD_GRID = "0:1.2:0.1"


class _UsageError(Exception):
    """Problem the user can fix; reported with exit code 2."""


def parse_grid(text: str) -> list[float]:
    """``"a,b,c"`` or inclusive ``"start:stop:step"``."""
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(t) for t in text.split(":"))
            if step <= 0:
                raise ValueError("step must be positive")
            n = int(np.floor((stop - start) / step + 1e-9)) + 1
            # rounding keeps 0.1-style steps free of accumulated error
            return [round(start + i * step, 12) for i in range(n)]
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise _UsageError(f"bad grid {text!r}: {exc}") from exc


def _config_dict(args) -> dict:
    if args.config == "demo":
        d = scenario_to_dict(demo_scenario())
    else:
        path = Path(args.config)
        try:
            d = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
    return d


def _overrides(args) -> dict:
    out = {}
    for item in getattr(args, "set", None) or []:
        key, sep, raw = item.partition("=")
        if not sep:
            raise _UsageError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key] = json.loads(raw)
        except json.JSONDecodeError:
            out[key] = raw
    if getattr(args, "seed", None) is not None:
        out["seed"] = args.seed
    if getattr(args, "trials", None) is not None:
        out["trials"] = args.trials
    if "total_power_db" in out:
        out["_drop"] = "total_power"
    elif "total_power" in out:
        out["_drop"] = "total_power_db"
    return out


def _scenario(args):
    d = _config_dict(args)
    ov = _overrides(args)
    drop = ov.pop("_drop", None)
    d = {k: v for k, v in d.items() if k != drop}
    d.update(ov)
    scenario = scenario_from_dict(d)
    problems = validate_scenario(scenario)
    if problems:
        raise ConfigError("\n".join(problems))
    return scenario, ov


def _prepare_out(out: Path, names, force: bool) -> None:
    existing = [out / n for n in names if (out / n).exists()]
    if existing and not force:
        raise _UsageError(
            "refusing to overwrite " + ", ".join(str(p) for p in existing) + " (use --force)"
        )
    out.mkdir(parents=True, exist_ok=True)


def _manifest(command: str, scenario, overrides: dict, extra: dict) -> str:
    config = dump_scenario(scenario)
    body = {
        "command": command,
        "version": __version__,
        "config_sha256": hashlib.sha256(config.encode()).hexdigest(),
        "seed": scenario.seed,
        "overrides": overrides,
        "config": json.loads(config),
    }
    body.update(extra)
    return json.dumps(body, indent=2, sort_keys=True) + "\n"


def _methods(args, default):
    chosen = args.method or default
    return [METHOD_NAMES[m] for m in chosen]


# ------------------------------------------------------------------ commands

def cmd_optimize(args) -> int:
    scenario, ov = _scenario(args)
    if args.dump_config:
        sys.stdout.write(dump_scenario(scenario))
        return 0
    plan = scenario.band_plan
    if args.channels:
        try:
            ch = ChannelSet.from_dict(json.loads(Path(args.channels).read_text()))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"cannot load channels from {args.channels}: {exc}") from exc
        if ch.num_bands != plan.num_bands or ch.violations():
            raise ConfigError("\n".join(ch.violations() or ["channel file has the wrong number of bands"]))
    else:
        ch = _draw_one(scenario, args.realization)
    norm = ch.normalized()
    method = METHOD_NAMES[(args.method or ["bado"])[0]]
    th, budget = scenario.deception_threshold, scenario.total_power
    out = Path(args.out)
    _prepare_out(out, ["result.json", "manifest.json"], args.force)

    if method == "equal_power":
        alloc = equal_power_baseline(plan, norm, budget)
        C = correlation_matrix(plan.alpha, plan.num_bands)
        result = {
            "objective_bits": sum_secrecy_rate(alloc, norm, C, plan).sum_secrecy,
            "iterations": 0,
            "converged": True,
            "xi": (alloc.powers * 1.0).tolist(),
            "powers": alloc.powers.tolist(),
            "coefficients": [1.0] * plan.num_bands,
            "alpha_star": plan.alpha,
        }
    else:
        try:
            res = bado(norm, plan, th, budget, orthogonal=method == "ofdm",
                       deception=method != "bado_unconstrained")
            rec = recover_powers(res, norm, plan, th)
        except Infeasible as exc:
            print(f"infeasible: {exc.constraint} violated by {exc.violation:.6g}", file=sys.stderr)
            return 3
        except RecoveryFailure as exc:
            print(f"power recovery failed: {exc}", file=sys.stderr)
            return 3
        result = {
            "objective_bits": res.objective,
            "iterations": res.iterations,
            "converged": res.converged,
            "xi": res.xi_star.xi.tolist(),
            "powers": rec.powers.powers.tolist(),
            "coefficients": rec.coefficients.tolist(),
            "alpha_star": rec.alpha_fit.alpha_star,
        }
    (out / "result.json").write_text(json.dumps(result, indent=2) + "\n")
    extra = {"method": method, "channels": ch.to_dict()}
    (out / "manifest.json").write_text(_manifest("optimize", scenario, ov, extra))
    print(json.dumps(result))
    return 0


def _cmd_sweep(args, kind: str) -> int:
    scenario, ov = _scenario(args)
    if args.dump_config:
        sys.stdout.write(dump_scenario(scenario))
        return 0
    if kind == "power":
        grid_db = parse_grid(args.grid or DEFAULT_POWER_GRID_DB)
        grid = [db_to_linear(g) for g in grid_db]
    else:
        grid = parse_grid(args.grid or DEFAULT_THRESHOLD_GRID)
    if not grid or any(b < a for a, b in zip(grid, grid[1:])):
        raise _UsageError("grid must be non-empty and ascending")
    if kind == "threshold" and grid[0] < 0:
        raise _UsageError("thresholds must be nonnegative")
    methods = _methods(args, ["bado", "equal"])
    out = Path(args.out)
    _prepare_out(out, ["metrics.csv", "manifest.json"], args.force)
    run = sweep_power if kind == "power" else sweep_threshold
    records = run(scenario, grid, methods, workers=args.workers)
    (out / "metrics.csv").write_text(records_to_csv(records))
    extra = {"methods": methods, "grid": grid}
    if kind == "power":
        extra["grid_db"] = grid_db
    (out / "manifest.json").write_text(_manifest(f"sweep-{kind}", scenario, ov, extra))
    print(f"wrote {out / 'metrics.csv'}")
    return 0


def cmd_sweep_power(args) -> int:
    return _cmd_sweep(args, "power")


def cmd_sweep_threshold(args) -> int:
    return _cmd_sweep(args, "threshold")


def _read_targets(spec: str) -> list[float]:
    path = Path(spec)
    try:
        if path.exists():
            text = path.read_text().strip()
            if text.startswith("["):
                return [float(v) for v in json.loads(text)]
            return [float(line) for line in text.splitlines() if line.strip()]
        return [float(v) for v in spec.split(",") if v.strip()]
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise _UsageError(f"cannot read targets {spec!r}: {exc}") from exc


def cmd_fit_alpha(args) -> int:
    targets = _read_targets(args.targets)
    K = args.num_bands or len(targets)
    try:
        res = fit_alpha(targets, K, args.k_ref, alpha0=args.alpha0)
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc
    print(json.dumps(res.to_dict()))
    return 0


def cmd_validate(args) -> int:
    from .selfcheck import run_all

    failures = 0
    for name, ok, detail in run_all(quick=not args.full):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failures += not ok
    return 1 if failures else 0


# ------------------------------------------------------------------ parser

def _common(p, needs_out=True):
    p.add_argument("--config", required=True, help="JSON config path, or 'demo' for the built-in scenario")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--trials", type=int, help="override the number of realizations")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key (JSON value)")
    p.add_argument("--dump-config", action="store_true", help="print the effective config and exit")
    if needs_out:
        p.add_argument("--out", default="results", help="output directory (default: results)")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ctsf", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="optimize one channel realization")
    _common(p)
    p.add_argument("--channels", help="JSON file with bob_gain/eve_gain (optional noise) arrays")
    p.add_argument("--realization", type=int, default=0, help="realization index drawn from the seed")
    p.add_argument("--method", action="append", choices=sorted(METHOD_NAMES))
    p.set_defaults(func=cmd_optimize)

    for name, func, unit in (("sweep-power", cmd_sweep_power, "total power in dB"),
                             ("sweep-threshold", cmd_sweep_threshold, "decoy SINR threshold, linear")):
        p = sub.add_parser(name, help=f"Monte-Carlo sweep over {unit}")
        _common(p)
        p.add_argument("--grid", help=f"{unit}: 'a,b,c' or 'start:stop:step'")
        p.add_argument("--method", action="append", choices=sorted(METHOD_NAMES),
                       help="repeatable; default bado and equal")
        p.add_argument("--workers", type=int, default=1, help="worker processes (results do not depend on it)")
        p.set_defaults(func=func)

    p = sub.add_parser("fit-alpha", help="fit the multiplexing factor to coupling coefficients")
    p.add_argument("--targets", required=True, help="file (one value per line or JSON array) or comma list")
    p.add_argument("--num-bands", type=int, help="number of bands (default: number of targets)")
    p.add_argument("--k-ref", type=int, default=0, help="reference band for the coupling profile")
    p.add_argument("--alpha0", type=float, default=0.5, help="starting value in (0, 1]")
    p.set_defaults(func=cmd_fit_alpha)

    p = sub.add_parser("validate", help="run the built-in oracle checks")
    p.add_argument("--full", action="store_true", help="run the larger instance sets")
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        for line in str(exc).splitlines():
            print(line, file=sys.stderr)
        return 2
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
