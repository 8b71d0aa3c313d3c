"""Oracle suites behind ``ctsf validate`` and the acceptance tests.

Each suite returns ``(name, ok, detail)``.  The suites draw their own random
instances from fixed seeds so a run is reproducible.
"""
from __future__ import annotations

import math

import numpy as np

from .model import BandPlan, ChannelSet
from .multiplexing import correlation, fit_alpha
from .optimizer import Infeasible, bado, xi_objective
from .oracles import direct_secrecy, grid_fit_alpha, grid_optimum, random_instance

__all__ = [
    "GRID_RTOL",
    "GRID_ATOL",
    "grid_instances",
    "check_grid_equivalence",
    "check_alpha_roundtrip",
    "check_substitution_identity",
    "run_all",
]

GRID_RTOL = 0.02
# a zero optimum has no relative scale; the barrier stays this close to it
GRID_ATOL = 1e-8


def grid_instances(count: int, seed: int = 0, sizes=(2, 3)):
    """Random instances (plan, channels, threshold, budget) with a feasible grid point.

    Sizes alternate through ``sizes``; infeasible draws are skipped.  The grid
    optimum is returned alongside so callers need not recompute it.
    """
    out = []
    draw = 0
    while len(out) < count:
        rng = np.random.default_rng([seed, draw])
        K = sizes[len(out) % len(sizes)]
        draw += 1
        plan, ch = random_instance(rng, K)
        th = float(rng.uniform(0.0, 0.6))
        budget = float(10 ** rng.uniform(0.0, 1.5))
        best, _ = grid_optimum(ch, plan, th, budget)
        if math.isfinite(best):
            out.append((plan, ch, th, budget, best))
    return out


def check_grid_equivalence(count: int = 6, seed: int = 0):
    worst = 0.0
    failures = []
    for i, (plan, ch, th, budget, best) in enumerate(grid_instances(count, seed)):
        try:
            got = bado(ch, plan, th, budget).objective
        except Infeasible:
            failures.append(f"#{i} optimizer reports infeasible")
            continue
        short = best - got
        if short > GRID_RTOL * abs(best) + GRID_ATOL:
            failures.append(f"#{i} K={plan.num_bands} grid={best:.6g} got={got:.6g}")
        worst = max(worst, short / max(abs(best), GRID_ATOL))
    detail = f"{count} instances, worst relative shortfall {worst:.2e}"
    if failures:
        detail += "; " + "; ".join(failures)
    return "grid-search equivalence", not failures, detail


def check_alpha_roundtrip(count: int = 20, seed: int = 1, noise: float = 0.0, tol: float = 1e-6):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        alpha = float(rng.uniform(0.05, 1.0))
        K = int(rng.choice((2, 4, 8)))
        targets = np.array([correlation(alpha, i, 0, K) for i in range(K)])
        if noise:
            targets = targets + rng.normal(0.0, noise, K)
        ref = alpha if not noise else grid_fit_alpha(targets, K)
        got = fit_alpha(targets, K).alpha_star
        worst = max(worst, abs(got - ref))
    label = "alpha round-trip" + (f" (noise {noise:g})" if noise else "")
    return label, worst <= tol, f"{count} fits, worst error {worst:.2e} (tol {tol:g})"


def check_substitution_identity(count: int = 200, seed: int = 2, tol: float = 1e-9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(count):
        K = (2, 4, 8)[i % 3]
        fakes = K // 2
        perm = rng.permutation(K)
        plan = BandPlan(K, tuple(sorted(perm[fakes:])), tuple(sorted(perm[:fakes])), 0.5)
        ch = ChannelSet(rng.exponential(1.0, K) + 0.05, rng.exponential(1.0, K) + 0.05)
        xi = rng.dirichlet(np.ones(K)) * float(10 ** rng.uniform(-1, 1.5))
        a = xi_objective(xi, ch, plan)
        b = float(direct_secrecy(xi, ch, plan)[0])
        worst = max(worst, abs(a - b))
    return "substitution identity", worst <= tol, f"{count} points, worst gap {worst:.2e} (tol {tol:g})"


def run_all(quick: bool = True):
    n = 1 if quick else 5
    return [
        check_grid_equivalence(6 * n),
        check_alpha_roundtrip(20 * n),
        check_alpha_roundtrip(20 * n, seed=3, noise=0.005, tol=0.05),
        check_substitution_identity(200 * n),
    ]
