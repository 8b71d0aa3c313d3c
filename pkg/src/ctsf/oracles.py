"""Brute-force reference computations used by ``ctsf validate`` and the test suite.

Everything here is deliberately naive: SINRs are written out band by band,
and optima come from exhaustive grids, so they share no code path with the
optimizer they check.
"""
from __future__ import annotations

import math

import numpy as np

from .model import BandPlan, ChannelSet

__all__ = [
    "direct_secrecy",
    "feasible_mask",
    "grid_optimum",
    "grid_fit_alpha",
    "random_instance",
]


def _direct_terms(X, ch: ChannelSet, plan: BandPlan, orthogonal: bool = False):
    """Per-true-band SINRs at Bob and Eve for coupled powers ``X`` (rows are candidates)."""
    X = np.atleast_2d(X)
    h, e = ch.bob_gain, ch.eve_gain
    bob, eve = [], []
    for k in plan.true_bands:
        if orthogonal:
            bob_i = np.zeros(len(X))
            eve_i = np.zeros(len(X))
        else:
            bob_i = sum(X[:, i] * h[i] for i in plan.true_bands if i != k)
            eve_i = sum(X[:, i] * e[i] for i in range(plan.num_bands) if i != k)
        bob.append(X[:, k] * h[k] / (bob_i + 1.0))
        eve.append(X[:, k] * e[k] / (eve_i + 1.0))
    return np.array(bob).T, np.array(eve).T


def direct_secrecy(X, ch: ChannelSet, plan: BandPlan, orthogonal: bool = False) -> np.ndarray:
    """Sum over true bands of ``log2(1 + SINR_bob) - log2(1 + SINR_eve)``."""
    bob, eve = _direct_terms(X, ch, plan, orthogonal)
    return (np.log2(1 + bob) - np.log2(1 + eve)).sum(axis=1)


def feasible_mask(X, ch: ChannelSet, plan: BandPlan, threshold: float, budget: float,
                  orthogonal: bool = False, tol: float = 1e-12) -> np.ndarray:
    """Rows of ``X`` meeting the decoy SINR floor, both dominance orders and the budget."""
    X = np.atleast_2d(X)
    e = ch.eve_gain
    ok = (X >= -tol).all(axis=1) & (X.sum(axis=1) <= budget * (1 + tol) + tol)
    for n in plan.fake_bands:
        interf = 0.0 if orthogonal else sum(X[:, i] * e[i] for i in range(plan.num_bands) if i != n)
        ok &= X[:, n] * e[n] >= threshold * (interf + 1.0) - tol
        for k in plan.true_bands:
            ok &= X[:, n] >= X[:, k] - tol
            ok &= X[:, n] * e[n] >= X[:, k] * e[k] - tol
    return ok


def grid_optimum(ch: ChannelSet, plan: BandPlan, threshold: float, budget: float,
                 step: float = 1e-3, orthogonal: bool = False, full: bool = False):
    """Best feasible objective over the grid ``{0, step, 2 step, ...} * budget`` in every band.

    Returns ``(value, point)`` with value ``-inf`` when no grid point is feasible.

    A decoy only ever adds interference at Eve, so the objective never
    decreases in a decoy's power, and along that coordinate the feasible grid
    points form a contiguous run.  Unless ``full`` is set, the last decoy is
    therefore not enumerated: each grid point of the other bands is paired
    with the largest grid level that its upper bounds (budget and the other
    decoys' SINR floors) allow.  Both modes return the same optimum.
    """
    K = plan.num_bands
    if budget == 0:
        Y = np.zeros((1, K))
        ok = feasible_mask(Y, ch, plan, threshold, budget, orthogonal)[0]
        return (float(direct_secrecy(Y, ch, plan, orthogonal)[0]), Y[0]) if ok else (-math.inf, None)
    n = int(round(1.0 / step))
    unit = budget / n
    last = plan.fake_bands[-1] if plan.fake_bands and not full else None
    free = [i for i in range(K) if i != last]
    e = ch.eve_gain
    best, arg = -math.inf, None
    for X in _simplex_blocks(len(free), n, unit):
        Y = np.zeros((len(X), K))
        Y[:, free] = X
        if last is not None:
            ub = budget - X.sum(axis=1)
            if threshold > 0 and not orthogonal:
                for m in plan.fake_bands:
                    if m == last:
                        continue
                    rest = sum(Y[:, i] * e[i] for i in range(K) if i not in (m, last))
                    ub = np.minimum(ub, (Y[:, m] * e[m] / threshold - rest - 1.0) / e[last])
            idx = np.floor(ub / unit * (1 + 1e-12) + 1e-9)
            idx = np.clip(idx, -1, n)
            Y[:, last] = idx * unit
            ok = (idx >= 0) & feasible_mask(Y, ch, plan, threshold, budget, orthogonal)
        else:
            ok = feasible_mask(Y, ch, plan, threshold, budget, orthogonal)
        if not ok.any():
            continue
        vals = np.where(ok, direct_secrecy(Y, ch, plan, orthogonal), -np.inf)
        j = int(np.argmax(vals))
        if vals[j] > best:
            best, arg = float(vals[j]), Y[j].copy()
    return best, arg


def _simplex_blocks(dims: int, n: int, unit: float, block: int = 400_000):
    """Grid points ``unit * (i_1..i_dims)`` with ``sum i <= n``, yielded in bounded chunks."""
    if dims == 0:
        yield np.zeros((1, 0))
        return
    if dims == 1:
        yield (np.arange(n + 1) * unit)[:, None]
        return
    # fix the leading coordinates, enumerate the trailing pair as a triangle
    ii, jj = np.triu_indices(n + 1)
    pair_a, pair_b = ii, jj - ii  # all (a, b) with a + b <= n
    lead_dims = dims - 2
    for lead in _lead_indices(lead_dims, n):
        room = n - sum(lead)
        keep = pair_a + pair_b <= room
        a, b = pair_a[keep], pair_b[keep]
        for s in range(0, a.size, block):
            X = np.empty((min(block, a.size - s), dims))
            X[:, :lead_dims] = np.array(lead, dtype=float) * unit
            X[:, -2] = a[s:s + block] * unit
            X[:, -1] = b[s:s + block] * unit
            yield X


def _lead_indices(dims: int, n: int, prefix=()):
    if dims == 0:
        yield prefix
        return
    for i in range(n - sum(prefix) + 1):
        yield from _lead_indices(dims - 1, n, prefix + (i,))


def grid_fit_alpha(targets, K: int, k_ref: int = 0, points: int = 200001) -> float:
    """Minimizer of the coupling-profile misfit over a dense uniform grid on (0, 1]."""
    targets = np.asarray(targets, dtype=float)
    alphas = np.linspace(1.0 / points, 1.0, points)
    d = np.arange(K) - k_ref
    x = alphas[:, None] * d[None, :]
    prof = (np.sinc(x) / np.sinc(x / K)) ** 2
    res = ((targets[None, :] - prof) ** 2).sum(axis=1)
    return float(alphas[int(np.argmin(res))])


def random_instance(rng: np.random.Generator, K: int, fakes: int | None = None):
    """Random band plan and channel draw with unit noise."""
    if fakes is None:
        fakes = int(rng.integers(1, K)) if K > 1 else 0
    perm = rng.permutation(K)
    plan = BandPlan(K, tuple(sorted(perm[fakes:])), tuple(sorted(perm[:fakes])), float(rng.uniform(0.2, 1.0)))
    ch = ChannelSet(rng.exponential(1.0, K) + 0.05, rng.exponential(1.0, K) + 0.05)
    return plan, ch
