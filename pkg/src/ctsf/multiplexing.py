"""Inter-band coupling induced by the multiplexing factor, and fitting it back.

The coupling between bands ``i`` and ``k`` is the squared normalized
Dirichlet kernel ``|sinc(a d) / sinc(a d / K)|**2`` with ``d = i - k``.  At
``a = 1`` the bands are orthogonal; as ``a`` shrinks towards 0 every pair
becomes fully coupled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AlphaFitResult",
    "correlation",
    "correlation_matrix",
    "fit_objective",
    "fit_alpha",
    "ALPHA_MIN",
]

# lower clamp for the fitted factor; the domain is (0, 1]
ALPHA_MIN = 1e-6


def _check_alpha(alpha: float) -> None:
    if not (math.isfinite(alpha) and 0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")


def _coupling(alpha, offset, K):
    # np.sinc is the normalized sinc and returns 1 at 0
    x = np.multiply(alpha, offset, dtype=float)
    return (np.sinc(x) / np.sinc(x / K)) ** 2


def correlation(alpha: float, i: int, k: int, K: int) -> float:
    """Coupling coefficient between bands ``i`` and ``k`` out of ``K``."""
    _check_alpha(alpha)
    if not (0 <= i < K and 0 <= k < K):
        raise ValueError("band index out of range")
    if i == k:
        return 1.0
    return float(min(1.0, _coupling(alpha, i - k, K)))


def correlation_matrix(alpha: float, K: int) -> np.ndarray:
    """Symmetric ``K x K`` coupling matrix with unit diagonal."""
    _check_alpha(alpha)
    idx = np.arange(K)
    C = np.minimum(_coupling(alpha, idx[:, None] - idx[None, :], K), 1.0)
    np.fill_diagonal(C, 1.0)
    C.setflags(write=False)
    return C


def _residual(alpha, targets, K, k_ref):
    offsets = np.arange(len(targets)) - k_ref
    r = np.asarray(targets, dtype=float) - _coupling(alpha, offsets, K)
    return float(r @ r)


def fit_objective(alpha: float, targets, K: int, k_ref: int = 0) -> float:
    """Sum of squared differences between ``targets`` and the coupling profile seen from ``k_ref``."""
    _check_alpha(alpha)
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (K,):
        raise ValueError(f"expected {K} target coefficients, got shape {targets.shape}")
    return _residual(alpha, targets, K, k_ref)


@dataclass(frozen=True)
class AlphaFitResult:
    alpha_star: float
    final_residual: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "residual": self.final_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _derivatives(f, alpha):
    h = 1e-7 * max(1.0, abs(alpha))
    fp, f0, fm = f(alpha + h), f(alpha), f(alpha - h)
    return f0, (fp - fm) / (2 * h), (fp - 2 * f0 + fm) / (h * h)


def _newton(f, alpha, eps1, eps2, max_iter):
    fa = f(alpha)
    converged = False
    it = 0
    fallback_step = 0.1
    while it < max_iter:
        it += 1
        fa, g, H = _derivatives(f, alpha)
        if abs(g) < eps1:
            # on a flat residual a tiny gradient can still mean a long way to go
            if H > 0 and abs(g) <= eps1 * H:
                converged = True
                break
            if H == 0 and g == 0:
                converged = True
                break
        if abs(g) < eps1 and H <= 0:
            # stationary but not a minimum (e.g. a hump at alpha = 1): go downhill
            if alpha >= 1.0:
                g = 1.0
            elif alpha <= ALPHA_MIN:
                g = -1.0
            else:
                left = f(max(ALPHA_MIN, alpha - fallback_step))
                right = f(min(1.0, alpha + fallback_step))
                g = 1.0 if left < right else -1.0
        if H > 1e-12:
            step = -g / H
        else:
            step = -math.copysign(fallback_step, g)
        cand = min(1.0, max(ALPHA_MIN, alpha + step))
        step = cand - alpha
        fc = f(cand)
        while fc > fa and abs(step) >= eps2:
            step *= 0.5
            cand = alpha + step
            fc = f(cand)
        if fc > fa:
            # no descent left at resolution eps2
            converged = True
            break
        if H <= 1e-12:
            fallback_step = max(2 * abs(step), 1e-6)
        alpha, fa = cand, fc
        if abs(step) < eps2:
            converged = True
            break
    return alpha, fa, it, converged


# coarse scan used to check that Newton ended in the deepest basin
_SCAN = np.linspace(0.01, 1.0, 100)


def fit_alpha(
    targets,
    K: int,
    k_ref: int = 0,
    alpha0: float = 0.5,
    eps1: float = 1e-8,
    eps2: float = 1e-10,
    max_iter: int = 100,
) -> AlphaFitResult:
    """Newton fit of the multiplexing factor to a coupling profile.

    Derivatives come from central differences.  Each step is safeguarded:
    non-positive curvature switches to a fixed-size move against the
    gradient, steps are clamped to ``[ALPHA_MIN, 1]`` and then halved until
    the residual stops increasing, so accepted iterates never go uphill.
    A small gradient (``eps1``) only ends the run when the Newton step it
    implies is small as well, which matters where the residual is quartic
    near ``alpha = 1``.

    The residual has several local minima once ``alpha * (i - k_ref)``
    passes 1.  If a coarse scan finds a point lower than where Newton
    stopped, Newton is rerun from there and the better end point is kept.
    ``iterations`` counts the steps of both runs.
    """
    _check_alpha(alpha0)
    if eps1 <= 0 or eps2 <= 0:
        raise ValueError("tolerances must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (K,):
        raise ValueError(f"expected {K} target coefficients, got shape {targets.shape}")

    def f(a):
        return _residual(a, targets, K, k_ref)

    alpha, fa, it, converged = _newton(f, min(1.0, max(ALPHA_MIN, alpha0)), eps1, eps2, max_iter)
    scan = np.array([f(a) for a in _SCAN])
    j = int(np.argmin(scan))
    if scan[j] < fa:
        a2, f2, it2, c2 = _newton(f, float(_SCAN[j]), eps1, eps2, max_iter)
        it += it2
        if f2 < fa:
            alpha, fa, converged = a2, f2, c2
    return AlphaFitResult(float(alpha), float(fa), it, converged)
