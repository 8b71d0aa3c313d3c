"""Secrecy-rate maximization in coupled-power space and recovery of physical powers.

The optimizer works on ``xi[i] = p[i] * c[i]``, the power of band ``i``
scaled by its coupling.  In that space the sum secrecy rate splits into
log-affine pieces, and the two troublesome denominators (Eve's total
received power and Bob's true-band interference) are replaced by auxiliary
variables ``tau`` and ``mu``.  The alternating scheme then cycles between

* a closed-form update of ``(tau, mu)`` for fixed ``xi`` and
* a concave maximization over ``xi`` for fixed ``(tau, mu)``, solved with a
  log-barrier interior-point method.

Channels must be noise-normalized (see :meth:`ChannelSet.normalized`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _barrier
from .model import FEASIBILITY_TOL, BandPlan, ChannelSet, PowerAllocation
from .multiplexing import AlphaFitResult, fit_alpha

__all__ = [
    "XiVector",
    "Substitutions",
    "OptResult",
    "RecoveredAllocation",
    "Infeasible",
    "RecoveryFailure",
    "substitutions_of",
    "solve_substitution_step",
    "solve_allocation_step",
    "xi_objective",
    "surrogate_objective",
    "constraint_violations",
    "initial_xi",
    "bado",
    "recover_powers",
    "equal_power_baseline",
    "ofdm_baseline",
]

LN2 = math.log(2.0)


class Infeasible(Exception):
    """No allocation meets the deception and budget constraints.

    ``constraint`` names the most violated constraint at the Phase-I point
    and ``violation`` is its normalized violation (positive means violated).
    """

    def __init__(self, constraint: str, violation: float):
        super().__init__(f"infeasible: {constraint} violated by {violation:.3g}")
        self.constraint = constraint
        self.violation = violation


class RecoveryFailure(Exception):
    pass


@dataclass(frozen=True)
class XiVector:
    xi: np.ndarray

    def __post_init__(self):
        arr = np.array(self.xi, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "xi", arr)


@dataclass(frozen=True)
class Substitutions:
    """Auxiliary variables, one ``tau`` and one ``mu`` per true band.

    Under non-orthogonal coupling every true band sees the same total
    received power at Eve, so all ``tau`` entries coincide.
    """

    tau: np.ndarray
    mu: np.ndarray


@dataclass
class OptResult:
    xi_star: XiVector
    subs_star: Substitutions
    objective: float
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)
    orthogonal: bool = False
    stationarity: float = 0.0
    budget: float = math.nan


@dataclass(frozen=True)
class RecoveredAllocation:
    powers: PowerAllocation
    coefficients: np.ndarray
    alpha_fit: AlphaFitResult
    decoy_floor: np.ndarray
    xi_total: float

    @property
    def physical_total(self) -> float:
        return self.powers.total


def _coupling(K: int, orthogonal: bool) -> np.ndarray:
    return np.zeros((K, K)) if orthogonal else np.ones((K, K)) - np.eye(K)


class _Problem:
    """Affine pieces and constraint rows for one channel realization."""

    def __init__(self, ch: ChannelSet, plan: BandPlan, threshold: float, budget: float,
                 orthogonal: bool = False, deception: bool = True):
        if not ch.is_normalized:
            raise ValueError("optimizer requires noise-normalized channels")
        if ch.num_bands != plan.num_bands:
            raise ValueError("channel set and band plan disagree on the number of bands")
        if threshold < 0 or budget < 0:
            raise ValueError("threshold and budget must be nonnegative")
        K = plan.num_bands
        self.K = K
        self.plan = plan
        self.threshold = float(threshold)
        self.budget = float(budget)
        self.orthogonal = orthogonal
        self.deception = deception
        h, e = ch.bob_gain, ch.eve_gain
        self.eve_gain = e
        W = _coupling(K, orthogonal)
        T = list(plan.true_bands)
        F = list(plan.fake_bands)
        self.T, self.F = T, F
        tmask = plan.true_mask.astype(float)
        own = np.eye(K)[T]
        # rows indexed by true band; columns by contributing band
        self.bob_int = W[:, T].T * (h * tmask)
        self.bob_tot = self.bob_int + own * h
        self.eve_int = W[:, T].T * e
        self.eve_tot = self.eve_int + own * e

        rows, rhs, names = [], [], []
        if deception:
            for n in F:
                r = threshold * W[:, n] * e
                r[n] = -e[n]
                rows.append(r), rhs.append(-threshold), names.append(f"decoy_sinr[{n}]")
                for k in T:
                    r = np.zeros(K)
                    r[k], r[n] = 1.0, -1.0
                    rows.append(r), rhs.append(0.0), names.append(f"xi_order[{n},{k}]")
                    r = np.zeros(K)
                    r[k], r[n] = e[k], -e[n]
                    rows.append(r), rhs.append(0.0), names.append(f"eve_dominance[{n},{k}]")
        rows.append(np.ones(K)), rhs.append(budget), names.append("budget")
        for i in range(K):
            r = np.zeros(K)
            r[i] = -1.0
            rows.append(r), rhs.append(0.0), names.append(f"nonneg[{i}]")
        G, b = np.array(rows), np.array(rhs)
        zero = ~np.any(G != 0, axis=1)
        if np.any(zero & (b < 0)):
            bad = int(np.flatnonzero(zero & (b < 0))[0])
            raise Infeasible(names[bad], float(-b[bad]))
        keep = ~zero
        self.G, self.b = G[keep], b[keep]
        self.names = [nm for nm, k in zip(names, keep) if k]
        self._center = None

    # -- objective pieces
    def objective(self, xi) -> float:
        return float(np.sum(
            np.log2(self.bob_tot @ xi + 1) - np.log2(self.bob_int @ xi + 1)
            - np.log2(self.eve_tot @ xi + 1) + np.log2(self.eve_int @ xi + 1)
        ))

    def per_band_rates(self, xi) -> np.ndarray:
        return (np.log2(self.bob_tot @ xi + 1) - np.log2(self.bob_int @ xi + 1)
                - np.log2(self.eve_tot @ xi + 1) + np.log2(self.eve_int @ xi + 1))

    def substitutions(self, xi) -> Substitutions:
        return Substitutions(1.0 / (self.eve_tot @ xi + 1), 1.0 / (self.bob_int @ xi + 1))

    def surrogate(self, subs: Substitutions, dualized: bool):
        tau, mu = subs.tau, subs.mu
        S = np.vstack([self.bob_tot, self.eve_int])
        w = np.concatenate([tau, mu])
        if dualized:
            # the relaxed tau/mu caps contribute an affine penalty
            lin = (self.eve_tot.T @ tau + self.bob_int.T @ mu) / LN2
            const = (tau.sum() + mu.sum() - tau.size - mu.size) / LN2
        else:
            lin, const = np.zeros(self.K), 0.0

        def value(x):
            return float(np.log(w * (S @ x + 1)).sum() / LN2 - lin @ x - const)

        def f(x):
            u = S @ x + 1
            g = S.T @ (1 / u) / LN2 - lin
            H = -(S.T * (1 / u**2)) @ S / LN2
            return float(np.log(w * u).sum() / LN2 - lin @ x - const), g, H

        f.value = value
        return f

    def violations(self, xi) -> dict[str, float]:
        return dict(zip(self.names, (self.G @ xi - self.b).tolist()))

    def center(self):
        if self._center is None:
            x, margin, slacks = _barrier.interior_point(self.G, self.b, cap=max(self.budget, 1.0))
            if not margin > 0:
                worst = int(np.argmin(slacks))
                raise Infeasible(self.names[worst], float(-slacks[worst]))
            self._center = x
        return self._center


def _problem(ch, plan, threshold=0.0, budget=math.inf, orthogonal=False, deception=True):
    return _Problem(ch, plan, threshold, budget if math.isfinite(budget) else 0.0, orthogonal, deception)


def _xi(x) -> np.ndarray:
    return np.asarray(x.xi if isinstance(x, XiVector) else x, dtype=float)


def xi_objective(xi, ch: ChannelSet, plan: BandPlan, orthogonal: bool = False) -> float:
    """Sum secrecy rate in coupled-power space, written as log ratios of affine terms."""
    return _problem(ch, plan, orthogonal=orthogonal, deception=False).objective(_xi(xi))


def surrogate_objective(xi, subs: Substitutions, ch: ChannelSet, plan: BandPlan,
                        orthogonal: bool = False, dualized: bool = False) -> float:
    """Objective of the allocation step at fixed ``(tau, mu)``."""
    prob = _problem(ch, plan, orthogonal=orthogonal, deception=False)
    return prob.surrogate(subs, dualized)(_xi(xi))[0]


def substitutions_of(xi, ch: ChannelSet, plan: BandPlan, orthogonal: bool = False) -> Substitutions:
    return _problem(ch, plan, orthogonal=orthogonal, deception=False).substitutions(_xi(xi))


def solve_substitution_step(xi_current, ch: ChannelSet, plan: BandPlan, orthogonal: bool = False) -> Substitutions:
    """Optimal ``(tau, mu)`` for fixed ``xi``.

    The objective grows with every ``tau`` and ``mu`` while the constraints
    cap each of them from above, so all constraints bind and the optimum is
    available in closed form.
    """
    return substitutions_of(xi_current, ch, plan, orthogonal)


def constraint_violations(xi, ch: ChannelSet, plan: BandPlan, threshold: float, budget: float,
                          orthogonal: bool = False) -> dict[str, float]:
    """Signed violation of every deception/budget constraint (positive means violated)."""
    return _problem(ch, plan, threshold, budget, orthogonal).violations(_xi(xi))


def _allocation_step(prob: _Problem, subs: Substitutions, x_warm, dualized: bool):
    f = prob.surrogate(subs, dualized)
    G, b = prob.G, prob.b
    if dualized:
        center = prob.center()
    else:
        extra_G = np.vstack([subs.tau[:, None] * prob.eve_tot, subs.mu[:, None] * prob.bob_int])
        extra_b = np.concatenate([1 - subs.tau, 1 - subs.mu])
        G, b = np.vstack([G, extra_G]), np.concatenate([b, extra_b])
        center, margin, _ = _barrier.interior_point(G, b, cap=max(prob.budget, 1.0))
        if not margin > 1e-12:
            # the fixed auxiliaries leave no room to move
            return np.array(x_warm, dtype=float), 0.0
    start = 0.5 * np.asarray(x_warm, dtype=float) + 0.5 * center
    if np.any(G @ start >= b):
        start = center
    res = _barrier.maximize(f, G, b, start, fval=f.value)
    return res.x, res.stationarity


def solve_allocation_step(subs: Substitutions, ch: ChannelSet, plan: BandPlan, threshold: float,
                          budget: float, xi_warm=None, orthogonal: bool = False,
                          deception: bool = True, dualized: bool = True) -> XiVector:
    """Maximize the allocation-step objective over ``xi`` for fixed ``(tau, mu)``.

    With ``dualized=True`` (default) the caps that tie ``tau`` and ``mu`` to
    ``xi`` enter the objective through their Lagrangian terms; with
    ``dualized=False`` they are kept as hard linear constraints.
    """
    prob = _Problem(ch, plan, threshold, budget, orthogonal, deception)
    if prob.budget == 0:
        if prob.deception and prob.threshold > 0 and prob.F:
            raise Infeasible(f"decoy_sinr[{prob.F[0]}]", prob.threshold)
        return XiVector(np.zeros(prob.K))
    warm = prob.center() if xi_warm is None else _xi(xi_warm)
    x, _ = _allocation_step(prob, subs, warm, dualized)
    return XiVector(x)


def initial_xi(ch: ChannelSet, plan: BandPlan, threshold: float, budget: float,
               orthogonal: bool = False, true_weights=None) -> np.ndarray | None:
    """Deterministic feasibility-first start, or ``None`` if the heuristic cannot place it.

    Every band starts at ``budget / (2K)``; decoys are raised to the smallest
    level meeting their SINR floor and dominance, and true bands are scaled
    back until the budget holds.  ``true_weights`` (one per true band)
    redistributes the initial true-band share.
    """
    K = plan.num_bands
    e = ch.eve_gain
    W = _coupling(K, orthogonal)
    T, F = list(plan.true_bands), list(plan.fake_bands)
    base = np.full(K, budget / (2 * K))
    if true_weights is not None:
        base[T] *= np.asarray(true_weights, dtype=float)
    if not F or np.any(e[F] <= 0):
        return None
    eF = e[F]
    # decoy SINR floor: x_F >= a + B x_F, with a from the true bands
    B = threshold * W[np.ix_(F, F)] * e[F][None, :] / eF[:, None]
    to_true = threshold * W[np.ix_(F, T)] * e[T][None, :] / eF[:, None]

    def lift(scale):
        x = base.copy()
        x[T] *= scale
        dom = np.maximum(x[T].max(), (x[T] * e[T]).max() / eF) if T else np.zeros(len(F))
        lower = np.maximum(base[F], dom)
        a = to_true @ x[T] + threshold / eF
        # least fixed point of x_F = max(lower, a + B x_F) with B >= 0: the set of
        # bands whose SINR floor binds only grows, so this ends within len(F) rounds
        z = lower.copy()
        active = np.zeros(len(F), bool)
        for _ in range(len(F) + 1):
            grow = (a + B @ z > z * (1 + 1e-12)) & ~active
            if not grow.any():
                x[F] = z
                return x
            active |= grow
            Bs = B[np.ix_(active, active)]
            if np.max(np.abs(np.linalg.eigvals(Bs))) >= 1:
                return None  # decoys feed each other faster than they can rise
            rest = ~active
            rhs = a[active] + B[np.ix_(active, rest)] @ z[rest]
            z[active] = np.maximum(np.linalg.solve(np.eye(active.sum()) - Bs, rhs), z[active])
        return None

    x = lift(1.0)
    if x is not None and x.sum() <= budget:
        return x
    lo, hi = 0.0, 1.0
    x0 = lift(0.0)
    if x0 is None or x0.sum() > budget:
        return None
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        xm = lift(mid)
        if xm is not None and xm.sum() <= budget:
            lo = mid
        else:
            hi = mid
    return lift(lo)


def _extrapolate(prob: _Problem, xi, cand, value):
    """Push further along the step ``cand - xi`` while the true objective keeps rising.

    Where the auxiliary bound is loose (e.g. a true band whose Bob and Eve
    gains nearly match) each allocation step only moves a little; doubling
    the step along its own direction recovers most of the lost ground.
    Trial points stay strictly inside the constraints.
    """
    d = cand - xi
    Gd = prob.G @ d
    slack = prob.b - prob.G @ xi
    grow = Gd > 0
    limit = np.min(slack[grow] / Gd[grow]) if grow.any() else np.inf
    t = 1.0
    for _ in range(30):
        nt = min(2.0 * t, 0.999 * limit) if math.isfinite(limit) else 2.0 * t
        if nt <= t:
            break
        trial = xi + nt * d
        val = prob.objective(trial)
        if not val > value:
            break
        t, cand, value = nt, trial, val
    return cand, value


def _ascend(prob: _Problem, xi, tol, max_iter, dualized):
    value = prob.objective(xi)
    trace = [value]
    converged = False
    stationarity = 0.0
    it = 0
    while it < max_iter:
        it += 1
        subs = prob.substitutions(xi)
        cand, stationarity = _allocation_step(prob, subs, xi, dualized)
        new = prob.objective(cand)
        if new < value:
            # allocation step could not improve beyond solver accuracy
            converged = True
            break
        cand, new = _extrapolate(prob, xi, cand, new)
        xi, prev, value = cand, value, new
        trace.append(value)
        if abs(value - prev) <= tol * max(1.0, abs(value)):
            converged = True
            break
    return xi, value, it, converged, trace, stationarity


def _saturate_decoys(prob: _Problem, xi):
    """``xi`` with the slack budget added to the decoys, or None if nothing changes.

    Each decoy gets the same increase in power received at Eve; the share is
    halved until the other decoys' SINR floors still hold.
    """
    slack = prob.budget - xi.sum()
    if not prob.F or slack <= 1e-6 * prob.budget:
        return None
    e = np.maximum(prob.eve_gain[prob.F], 1e-300)
    weights = (1.0 / e) / np.sum(1.0 / e)
    for _ in range(30):
        cand = xi.copy()
        cand[prob.F] += slack * weights
        if max(prob.violations(cand).values(), default=0.0) <= FEASIBILITY_TOL:
            return cand
        slack *= 0.5
    return None


def _jamming_start(prob: _Problem):
    """Feasible point with true bands barely on and decoys jamming Eve as hard as allowed.

    A true band that Eve hears better than Bob only earns a positive rate
    under heavy decoy interference at Eve, and from a lightly jammed start the
    ascent switches it off for good.  Returns None if no such point exists.
    """
    if prob.orthogonal or not prob.F:
        return None
    level = 1e-3 * prob.budget / len(prob.T)
    c = np.zeros(prob.K)
    c[prob.F] = prob.eve_gain[prob.F]
    bounds = [(level, level) if i in prob.T else (0, None) for i in range(prob.K)]
    x = _barrier.maximize_linear(c, prob.G, prob.b, bounds)
    if x is None or max(prob.violations(x).values(), default=0.0) > FEASIBILITY_TOL:
        return None
    return x


def _inert_bands(prob: _Problem) -> list[int]:
    """Bands that touch neither the objective nor any deception constraint."""
    A = np.vstack([prob.bob_tot, prob.bob_int, prob.eve_tot, prob.eve_int])
    rows = [i for i, nm in enumerate(prob.names) if nm != "budget" and not nm.startswith("nonneg")]
    used = np.any(A != 0, axis=0)
    if rows:
        used |= np.any(prob.G[rows] != 0, axis=0)
    return [i for i in range(prob.K) if not used[i]]


def _without_inert(prob: _Problem, xi):
    """Hand the power parked on inert bands to the others, keeping a thin margin."""
    inert = _inert_bands(prob)
    if not inert or not math.isfinite(prob.budget):
        return None
    live = [i for i in range(prob.K) if i not in inert]
    if not live or xi[live].sum() <= 0:
        return None
    out = xi.copy()
    out[inert] = 1e-9 * prob.budget
    out[live] *= (0.999 * prob.budget - out[inert].sum()) / xi[live].sum()
    if max(prob.violations(out).values(), default=0.0) > FEASIBILITY_TOL:
        return None
    return out


def _feasible_start(prob, ch, plan, weights=None):
    th = prob.threshold if prob.deception else 0.0
    xi = initial_xi(ch, plan, th, prob.budget, prob.orthogonal, weights)
    if xi is None or max(prob.violations(xi).values(), default=0.0) > FEASIBILITY_TOL:
        return None
    return xi


def bado(ch: ChannelSet, plan: BandPlan, threshold: float, budget: float, xi_init=None,
         tol: float = 1e-6, max_iter: int = 100, orthogonal: bool = False,
         deception: bool = True, dualized: bool = True, restarts: bool = True) -> OptResult:
    """Alternate the closed-form auxiliary update with the concave allocation step.

    The problem is not concave, and the ascent can settle on an allocation
    that leaves some true band silent while a better one feeds that band.
    With ``restarts`` (and no ``xi_init``) each true band left idle by the
    first run gets one more run started from an allocation concentrated on
    it, and the best result is returned.  If a true band is still idle, one
    more run starts from the allocation that jams Eve hardest.

    Raises :class:`Infeasible` when no allocation satisfies the constraints.
    ``converged`` is False when ``max_iter`` is hit; the result is still
    returned.
    """
    prob = _Problem(ch, plan, threshold, budget, orthogonal, deception)
    K = prob.K
    if prob.budget == 0:
        if deception and threshold > 0 and prob.F:
            raise Infeasible(f"decoy_sinr[{prob.F[0]}]", float(threshold))
        xi = np.zeros(K)
        return OptResult(XiVector(xi), prob.substitutions(xi), 0.0, 0, True, [0.0], orthogonal,
                         budget=prob.budget)

    center = prob.center()
    if xi_init is None:
        xi = _feasible_start(prob, ch, plan) if deception else None
        if xi is None:
            xi = center.copy()
    else:
        xi = _xi(xi_init).copy()
        worst = max(prob.violations(xi).values(), default=0.0)
        if worst > FEASIBILITY_TOL:
            raise ValueError(f"xi_init violates the constraints by {worst:.3g}")

    best = _ascend(prob, xi, tol, max_iter, dualized)
    if restarts and xi_init is None and len(prob.T) > 1:
        idle = [j for j, k in enumerate(prob.T) if best[0][k] <= 1e-6 * prob.budget]
        for j in idle:
            w = np.zeros(len(prob.T))
            w[j] = len(prob.T)
            start = _feasible_start(prob, ch, plan, w)
            if start is None:
                continue
            run = _ascend(prob, start, tol, max_iter, dualized)
            if run[1] > best[1]:
                best = run
    if xi_init is None and any(best[0][k] <= 1e-6 * prob.budget for k in prob.T):
        start = _jamming_start(prob)
        if start is not None:
            run = _ascend(prob, start, tol, max_iter, dualized)
            if run[1] > best[1]:
                best = run
    if xi_init is None:
        # power on inert bands is wasted; restart with it moved to live bands
        start = _without_inert(prob, best[0])
        if start is not None:
            run = _ascend(prob, start, tol, max_iter, dualized)
            if run[1] > best[1]:
                best = run
        # decoys only ever hurt Eve, so unused budget belongs to them; from a
        # stalled point (true bands idle, budget slack) this reopens the ascent
        lifted = _saturate_decoys(prob, best[0])
        if lifted is not None:
            run = _ascend(prob, lifted, tol, max_iter, dualized)
            if run[1] > best[1]:
                best = run
    xi, value, it, converged, trace, stationarity = best
    # barrier iterates never touch the boundary; idle true bands are snapped to
    # zero, which only loosens every constraint
    idle = [k for k in prob.T if 0 < xi[k] <= 1e-6 * prob.budget]
    if idle:
        snapped = xi.copy()
        snapped[idle] = 0.0
        val = prob.objective(snapped)
        if val >= value:
            xi, value = snapped, val
            trace = trace + [val]
    return OptResult(XiVector(xi), prob.substitutions(xi), value, it, converged, trace, orthogonal,
                     stationarity, prob.budget)


def _true_power_from_rate(rate, C, Ce, a, ae):
    """Root in ``p`` of ``rate = log2(Ce (C + p a) / (C (Ce + p ae)))``."""
    rm1 = math.expm1(rate * LN2)
    den = a * Ce - C * ae - rm1 * C * ae
    if den == 0:
        return math.nan
    return rm1 * C * Ce / den


def recover_powers(result: OptResult, ch: ChannelSet, plan: BandPlan, threshold: float,
                   k_ref: int | None = None, alpha0: float | None = None) -> RecoveredAllocation:
    """Turn an optimizer result back into per-band powers, coefficients and a fitted factor.

    True-band powers solve the per-band secrecy-rate equation with the
    interference denominators frozen at the optimum.  A decoy's power may not
    fall below the coupled power it carries (coefficients cannot exceed 1),
    nor below the floor that keeps its SINR at the threshold.
    """
    prob = _problem(ch, plan, threshold, 0.0, result.orthogonal, deception=False)
    xi = result.xi_star.xi
    h, e = ch.bob_gain, ch.eve_gain
    K = plan.num_bands
    W = _coupling(K, result.orthogonal)
    bob_den = prob.bob_int @ xi + 1
    eve_den = W.T @ (xi * e) + 1
    # per-band rates at the optimum, in a form that stays accurate for tiny powers
    tx = xi[prob.T]
    rates = (np.log1p(tx * h[prob.T] / bob_den) - np.log1p(tx * e[prob.T] / eve_den[prob.T])) / LN2

    p = np.zeros(K)
    for j, k in enumerate(prob.T):
        if xi[k] == 0:
            continue
        pk = _true_power_from_rate(rates[j], bob_den[j], eve_den[k], h[k], e[k])
        if not (math.isfinite(pk) and pk >= 0):
            # degenerate rate equation: any power gives the same rate
            if abs(h[k] / bob_den[j] - e[k] / eve_den[k]) <= 1e-12 * max(h[k], e[k], 1e-300):
                pk = xi[k]
            else:
                raise RecoveryFailure(f"no nonnegative power reproduces the rate on band {k}")
        p[k] = pk

    floor = np.zeros(K)
    for n in prob.F:
        if threshold > 0:
            floor[n] = threshold * eve_den[n] / e[n] if e[n] > 0 else math.inf
        p[n] = max(xi[n], floor[n])
    if not np.all(np.isfinite(p)):
        raise RecoveryFailure("decoy floor is unbounded")

    coeffs = np.ones(K)
    pos = p > 0
    coeffs[pos] = xi[pos] / p[pos]
    if np.any(coeffs < 0) or np.any(coeffs > 1 + 1e-6):
        raise RecoveryFailure("recovered coupling coefficient outside [0, 1]")
    coeffs = np.clip(coeffs, 0.0, 1.0)

    if result.orthogonal:
        fit = AlphaFitResult(1.0, 0.0, 0, True)
    else:
        ref = plan.reference_band if k_ref is None else k_ref
        a0 = plan.alpha if alpha0 is None else alpha0
        fit = fit_alpha(coeffs, K, ref, alpha0=a0)
    return RecoveredAllocation(
        powers=PowerAllocation(p, result.budget if math.isfinite(result.budget) else xi.sum()),
        coefficients=coeffs,
        alpha_fit=fit,
        decoy_floor=floor,
        xi_total=float(xi.sum()),
    )


def equal_power_baseline(plan: BandPlan, ch: ChannelSet, budget: float) -> PowerAllocation:
    K = plan.num_bands
    return PowerAllocation(np.full(K, budget / K), budget)


def ofdm_baseline(ch: ChannelSet, plan: BandPlan, threshold: float, budget: float, **kw) -> OptResult:
    """Alternating optimization with orthogonal bands (no cross-band coupling)."""
    return bado(ch, plan, threshold, budget, orthogonal=True, **kw)
