"""Acceptance criteria, each at its stated tolerance.

Run ``pytest tests/test_acceptance.py -s`` to see one PASS/FAIL line per
criterion as it finishes; the same lines are collected in the terminal
summary of every run.
"""
import math
import subprocess
import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from ctsf.model import BandPlan, ChannelSet, db_to_linear, demo_scenario
from ctsf.multiplexing import correlation_matrix
from ctsf.optimizer import Infeasible, RecoveryFailure, bado, constraint_violations, recover_powers, xi_objective
from ctsf.oracles import direct_secrecy, feasible_mask, random_instance
from ctsf.selfcheck import GRID_ATOL, GRID_RTOL, check_alpha_roundtrip, grid_instances
from ctsf.simulation import aggregate, draw_batch, evaluate_batch
from ctsf.sinr import sum_secrecy_rate

pytestmark = pytest.mark.slow

POWER_GRID_DB = list(range(0, 21, 2))
THRESHOLD_GRID = [round(0.1 * i, 1) for i in range(13)]
LOW_THRESHOLDS = [t for t in THRESHOLD_GRID if t <= 0.3]


def _report(record_property, name, ok, detail):
    record_property("criterion", name)
    record_property("detail", detail)
    print(f"\n{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


# ------------------------------------------------------------ shared Monte-Carlo

@pytest.fixture(scope="module")
def power_sweep():
    """Paired power sweep at the demo threshold with per-realization outcomes."""
    sc = demo_scenario()
    t0 = time.perf_counter()
    batch = draw_batch(sc)
    cache = {}
    records, outcomes = {"bado": [], "equal_power": []}, []
    for db in POWER_GRID_DB:
        point = replace(sc, total_power=db_to_linear(db))
        for m in records:
            outs = evaluate_batch(point, m, batch, cache=cache)
            records[m].append(aggregate(outs, m, point.total_power))
            if m == "bado":
                outcomes.append((point.deception_threshold, outs))
    return records, outcomes, time.perf_counter() - t0


@pytest.fixture(scope="module")
def threshold_sweep():
    sc = demo_scenario()
    batch = draw_batch(sc)
    cache = {}
    records, outcomes = [], []
    for th in THRESHOLD_GRID:
        point = replace(sc, deception_threshold=th)
        outs = evaluate_batch(point, "bado", batch, cache=cache)
        records.append(aggregate(outs, "bado", th))
        outcomes.append((th, outs))
    return records, outcomes


# ------------------------------------------------------------ criteria

def test_c01_oracle_optimality(record_property):
    t0 = time.perf_counter()
    instances = grid_instances(30, seed=0, sizes=(2, 3))
    worst, failures = 0.0, []
    for i, (plan, ch, th, budget, best) in enumerate(instances):
        try:
            got = bado(ch, plan, th, budget).objective
        except Infeasible:
            failures.append(i)
            continue
        if best - got > GRID_RTOL * abs(best) + GRID_ATOL:
            failures.append(i)
        worst = max(worst, (best - got) / max(abs(best), GRID_ATOL))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 300
    _report(record_property, "1 oracle optimality", ok,
            f"30 instances (K=2,3), worst relative shortfall {worst:.2e}, failures {failures}, {elapsed:.0f}s")


def test_c02_substitution_identity(record_property):
    rng = np.random.default_rng(202)
    worst = 0.0
    infeasible = 0
    for i in range(1000):
        K = (2, 4, 8)[i % 3]
        fakes = K // 2
        perm = rng.permutation(K)
        plan = BandPlan(K, tuple(sorted(perm[fakes:])), tuple(sorted(perm[:fakes])), 0.5)
        ch = ChannelSet(rng.exponential(1.0, K) + 0.05, rng.exponential(1.0, K) + 0.05)
        e = ch.eve_gain
        xi = np.zeros(K)
        T, F = list(plan.true_bands), list(plan.fake_bands)
        xi[T] = rng.uniform(0.0, 3.0, len(T))
        # decoys above every true band in both power and received power
        need = max(xi[T].max(), 0.0)
        for n in F:
            xi[n] = max(need, (xi[T] * e[T]).max() / e[n]) * rng.uniform(1.0, 2.0)
        threshold = float(rng.uniform(0.0, 0.2))
        if not feasible_mask(xi, ch, plan, threshold, xi.sum() * 1.01)[0]:
            threshold = 0.0
        infeasible += not feasible_mask(xi, ch, plan, threshold, xi.sum() * 1.01)[0]
        worst = max(worst, abs(xi_objective(xi, ch, plan) - float(direct_secrecy(xi, ch, plan)[0])))
    ok = worst <= 1e-9 and infeasible == 0
    _report(record_property, "2 substitution identity", ok,
            f"1000 feasible points (K=2,4,8), worst gap {worst:.2e}, tol 1e-9")


def test_c03_ascent_and_feasibility(record_property):
    worst_drop, worst_viol, done, draw, nonconv = 0.0, 0.0, 0, 0, 0
    while done < 100:
        rng = np.random.default_rng([3, draw])
        draw += 1
        plan, ch = random_instance(rng, 4)
        th = float(rng.uniform(0.0, 0.6))
        budget = float(10 ** rng.uniform(0.0, 1.5))
        try:
            res = bado(ch, plan, th, budget)
        except Infeasible:
            continue
        done += 1
        nonconv += not res.converged
        tr = np.array(res.trace)
        if tr.size > 1:
            worst_drop = max(worst_drop, float(-(np.diff(tr)).min()))
        viol = max(constraint_violations(res.xi_star, ch, plan, th, budget).values())
        worst_viol = max(worst_viol, viol)
    ok = worst_drop <= 1e-7 and worst_viol <= 1e-7
    _report(record_property, "3 ascent and feasibility", ok,
            f"100 K=4 instances, largest trace drop {max(worst_drop, 0):.1e}, "
            f"largest violation {worst_viol:.1e}, not converged {nonconv}")


def test_c04_alpha_roundtrip(record_property):
    _, ok1, d1 = check_alpha_roundtrip(100, seed=41)
    _, ok2, d2 = check_alpha_roundtrip(100, seed=42, noise=0.005, tol=0.05)
    _report(record_property, "4 alpha round-trip", ok1 and ok2, f"noiseless: {d1}; noisy: {d2}")


def test_c05_rate_concave_increasing(record_property):
    rng = np.random.default_rng(505)
    counter, done = 0, 0
    while done < 50:
        K = int(rng.integers(2, 7))
        plan, ch = random_instance(rng, K)
        C = correlation_matrix(plan.alpha, K)
        p = rng.uniform(0.1, 3.0, K)
        k = plan.true_bands[int(rng.integers(len(plan.true_bands)))]
        j = plan.true_bands.index(k)
        h, e = ch.bob_gain, ch.eve_gain
        tmask = plan.true_mask
        Ck = 1.0 + sum(C[i, k] * p[i] * h[i] for i in range(K) if i != k and tmask[i])
        Ce = 1.0 + sum(C[i, k] * p[i] * e[i] for i in range(K) if i != k)
        if not h[k] / Ck > e[k] / Ce:
            continue
        done += 1

        def rate(x):
            q = p.copy()
            q[k] = x
            return sum_secrecy_rate(q, ch, C, plan).per_band_secrecy[j]

        d = 1e-5
        pts = np.linspace(0.05, 5.0, 20)
        slopes = np.array([(rate(x + d) - rate(x - d)) / (2 * d) for x in pts])
        if not (np.all(slopes > 0) and np.all(np.diff(slopes) < 0)):
            counter += 1
    _report(record_property, "5 rate slope positive and decreasing", counter == 0,
            f"50 instances x 20 points, counterexamples {counter}")


def test_c06_decoy_power_grows_with_threshold(record_property):
    grid = np.linspace(0.0, 1.2, 25)
    bad, steps = [], 0
    for s in range(20):
        rng = np.random.default_rng([6, s])
        plan, ch = random_instance(rng, 4)
        budget = float(10 ** rng.uniform(0.5, 1.5))
        prev = -math.inf
        for th in grid:
            try:
                rec = recover_powers(bado(ch, plan, th, budget), ch, plan, th)
            except (Infeasible, RecoveryFailure):
                break
            total = float(rec.decoy_floor[list(plan.fake_bands)].sum())
            if total < prev - 1e-9 * budget:
                bad.append((s, round(float(th), 2)))
            prev = total
            steps += 1
    _report(record_property, "6 decoy power non-decreasing in threshold", not bad,
            f"20 instances, {steps} feasible grid points, decreases at {bad}")


def test_c07_power_sweep_trend(record_property, power_sweep):
    records, _, elapsed = power_sweep
    bado_r, eq_r = records["bado"], records["equal_power"]
    issues = []
    for a, b in zip(bado_r, bado_r[1:]):
        se = math.hypot(a.stderr_secrecy, b.stderr_secrecy)
        if b.mean_sum_secrecy < a.mean_sum_secrecy - 2 * se:
            issues.append(f"drop at {b.sweep_value:.3g}")
    for a, b in zip(bado_r, eq_r):
        se = math.hypot(a.stderr_secrecy, b.stderr_secrecy)
        if a.mean_sum_secrecy < b.mean_sum_secrecy - 2 * se:
            issues.append(f"below equal power at {a.sweep_value:.3g}")
    ok = not issues and elapsed < 900
    curve = ", ".join(f"{r.mean_sum_secrecy:.3f}" for r in bado_r)
    _report(record_property, "7 secrecy rate vs total power", ok,
            f"500 paired realizations, BADO [{curve}], issues {issues}, {elapsed:.0f}s")


def test_c08_decoys_outshine_true_signals(record_property, power_sweep, threshold_sweep):
    checked, bad = 0, []
    for th, outs in power_sweep[1] + threshold_sweep[1]:
        if th <= 0:
            continue
        for i, o in enumerate(outs):
            if not o.feasible:
                continue
            checked += 1
            if not (o.decoy_sinr >= o.intercept_sinr and o.min_decoy_sinr >= th * (1 - 1e-6)):
                bad.append((th, i))
    _report(record_property, "8 decoy SINR dominance", not bad,
            f"{checked} feasible realizations with positive threshold, violations {bad[:5]}")


def test_c09_deception_interception_trend(record_property, threshold_sweep):
    records = threshold_sweep[0]
    pd = [r.deception_prob for r in records]
    pi = [r.interception_prob for r in records]
    low_ok = all(r.deception_prob == 1.0 for r in records if r.sweep_value in LOW_THRESHOLDS)
    strict = all(b < a for a, b in zip(pi, pi[1:]))
    diff = np.subtract(pd, pi)
    crossing = bool(np.any(diff[:-1] * diff[1:] <= 0) and np.any(diff > 0) and np.any(diff < 0))
    ok = low_ok and strict and crossing
    _report(record_property, "9 deception and interception vs threshold", ok,
            f"deception=1 for Th<=0.3: {low_ok}; interception strictly decreasing: {strict}; "
            f"crossing: {crossing}; Pd={[round(v, 3) for v in pd]}; Pi={[round(v, 3) for v in pi]}")


def test_c10_determinism(record_property, tmp_path):
    def run(kind, out, *extra):
        cmd = [sys.executable, "-m", "ctsf.cli", kind, "--config", "demo", "--trials", "12",
               "--out", str(out), *extra]
        subprocess.run(cmd, check=True, capture_output=True)
        return (out / "metrics.csv").read_bytes(), (out / "manifest.json").read_bytes()

    same = True
    for kind, grid in (("sweep-power", "0:20:4"), ("sweep-threshold", "0:1.2:0.3")):
        a = run(kind, tmp_path / f"{kind}-a", "--grid", grid)
        b = run(kind, tmp_path / f"{kind}-b", "--grid", grid)
        c = run(kind, tmp_path / f"{kind}-c", "--grid", grid, "--workers", "2")
        same &= a == b == c
    _report(record_property, "10 determinism", same,
            "repeated power and threshold sweeps (serial and 2 workers) byte-identical" if same
            else "outputs differ between identical runs")
