"""Log-barrier interior-point method for smooth concave maximization over a polyhedron.

Solves ``max f(x)  s.t.  G x <= b`` from a strictly feasible start.  ``f``
returns ``(value, gradient, hessian)``.  A Phase-I linear program supplies
interior points and infeasibility certificates.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog


@dataclass
class BarrierResult:
    x: np.ndarray
    value: float
    multipliers: np.ndarray
    duality_gap: float
    stationarity: float
    newton_steps: int


def interior_point(G: np.ndarray, b: np.ndarray, cap: float = 1.0):
    """Point maximizing the smallest normalized slack ``(b - G x)_i / ||G_i||``.

    Returns ``(x, margin, slacks)``; ``margin <= 0`` means there is no strictly
    feasible point and ``slacks`` then identifies the most violated row.
    """
    m, n = G.shape
    norms = np.linalg.norm(G, axis=1)
    norms[norms == 0] = 1.0
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([G, norms[:, None]])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n + [(None, cap)], method="highs")
    if res.status != 0:
        # unbounded below in margin means wildly infeasible; report the origin
        x = np.zeros(n)
        return x, -np.inf, (b - G @ x) / norms
    x = res.x[:n]
    return x, float(res.x[-1]), (b - G @ x) / norms


def maximize_linear(c, G, b, bounds):
    """Vertex maximizing ``c @ x`` over ``G x <= b`` within ``bounds``, or None."""
    res = linprog(-np.asarray(c, dtype=float), A_ub=G, b_ub=b, bounds=bounds, method="highs")
    return res.x if res.status == 0 else None


def maximize(f, G, b, x0, fval=None, gap_tol=1e-8, newton_tol=1e-9, mu=50.0, t0=1.0, max_newton=100):
    """Barrier method; ``x0`` must satisfy ``G x0 < b`` strictly.

    ``fval`` is an optional value-only version of ``f`` used in line searches.
    """
    fval = fval or (lambda y: f(y)[0])
    x = np.array(x0, dtype=float)
    s = b - G @ x
    if np.any(s <= 0):
        raise ValueError("barrier start is not strictly feasible")
    m = len(b)
    t = t0
    steps = 0
    while True:
        for _ in range(max_newton):
            val, g, H = f(x)
            s = b - G @ x
            inv = 1.0 / s
            grad = -t * g + G.T @ inv
            hess = -t * H + (G.T * inv**2) @ G
            try:
                dx = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                dx = -np.linalg.lstsq(hess, grad, rcond=None)[0]
            dec = -grad @ dx
            if dec / 2 <= newton_tol:
                break
            steps += 1
            Gd = G @ dx
            pos = Gd > 0
            step = min(1.0, 0.99 * np.min(s[pos] / Gd[pos])) if pos.any() else 1.0
            p0 = -t * val - np.sum(np.log(s))
            while step > 1e-12:
                y = x + step * dx
                sy = b - G @ y
                if np.all(sy > 0) and -t * fval(y) - np.sum(np.log(sy)) <= p0 - 0.25 * step * dec:
                    break
                step *= 0.5
            else:
                # decrease no longer measurable in floating point
                break
            x = y
        if m / t <= gap_tol:
            break
        t = min(t * mu, m / gap_tol)
    val, g, _ = f(x)
    s = b - G @ x
    lam = 1.0 / (t * s)
    return BarrierResult(
        x=x,
        value=float(val),
        multipliers=lam,
        duality_gap=m / t,
        stationarity=float(np.max(np.abs(g - G.T @ lam))) if len(b) else float(np.max(np.abs(g))),
        newton_steps=steps,
    )
