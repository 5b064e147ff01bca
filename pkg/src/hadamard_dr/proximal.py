"""Closed-form proximal maps of distance-like functions and their reflections.

All functions act on whole batches of points at once (leading axes), which
is how the image solvers use them: one call handles every pixel of a term.

The reflection of a function at x is the point on the geodesic through x and
prox(x), past prox(x), at the same distance. Because prox(x) = gamma_{x,a}(s)
lies on the geodesic towards the anchor, the reflection is gamma_{x,a}(2 s)
with the geodesic extended beyond its endpoint when 2 s > 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .manifolds.base import DEGENERATE, Manifold

NU_VALUES = (1, 2)


@dataclass(frozen=True)
class ProxDistToPoint:
    """Parameters of prox_{eta g}, g = d(a, .)^nu / nu."""

    nu: int = 2
    eta: float = 1.0

    def __post_init__(self):
        _check(self.nu, self.eta)


@dataclass(frozen=True)
class ProxPairDist:
    """Parameters of prox_{eta G}, G(x0, x1) = d(x0, x1)^nu / nu (same scaling as g)."""

    nu: int = 1
    eta: float = 1.0

    def __post_init__(self):
        _check(self.nu, self.eta)


@dataclass(frozen=True)
class KarcherConfig:
    max_iter: int = 100
    tol: float = 1e-10
    step: float = 1.0

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not 0 < self.step <= 1:
            raise ValueError("step must lie in (0, 1]")


def _check(nu, eta):
    if nu not in NU_VALUES:
        raise ValueError(f"nu must be 1 or 2, got {nu}")
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")


def dist_to_point_param(d, nu, eta):
    """Geodesic parameter of prox_{eta g} for distances ``d`` to the anchor."""
    d = np.asarray(d, dtype=float)
    if nu == 2:
        return np.full(d.shape, eta / (1.0 + eta))
    return np.minimum(eta / np.maximum(d, DEGENERATE), 1.0)


def pair_dist_param(d, nu, eta):
    """Geodesic parameter of prox_{eta G} for pair distances ``d``."""
    d = np.asarray(d, dtype=float)
    if nu == 2:
        return np.full(d.shape, eta / (1.0 + 2.0 * eta))
    return np.minimum(eta / np.maximum(d, DEGENERATE), 0.5)


def prox_dist_to_point(M: Manifold, x, a, nu=2, eta=1.0):
    _check(nu, eta)
    x = np.asarray(x, dtype=float)
    a = np.broadcast_to(np.asarray(a, dtype=float), x.shape)
    s = dist_to_point_param(M.dist(x, a), nu, eta)
    out = M.geodesic(x, a, s)
    # saturated case lands exactly on the anchor
    return np.where(M.expand(s >= 1.0), a, out)


def reflect_dist_to_point(M: Manifold, x, a, nu=2, eta=1.0):
    _check(nu, eta)
    x = np.asarray(x, dtype=float)
    a = np.broadcast_to(np.asarray(a, dtype=float), x.shape)
    s = dist_to_point_param(M.dist(x, a), nu, eta)
    return M.geodesic(x, a, 2.0 * s)


def prox_pair_dist(M: Manifold, x0, x1, nu=1, eta=1.0):
    _check(nu, eta)
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    s = pair_dist_param(M.dist(x0, x1), nu, eta)
    p0 = M.geodesic(x0, x1, s)
    p1 = M.geodesic(x1, x0, s)
    # collapsed pairs share one midpoint exactly
    collapsed = M.expand(s >= 0.5)
    p1 = np.where(collapsed, p0, p1)
    return p0, p1


def reflect_pair_dist(M: Manifold, x0, x1, nu=1, eta=1.0):
    _check(nu, eta)
    x0 = np.asarray(x0, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    s = pair_dist_param(M.dist(x0, x1), nu, eta)
    return M.geodesic(x0, x1, 2.0 * s), M.geodesic(x1, x0, 2.0 * s)


def reflect_at(M: Manifold, p, x):
    """Reflection of ``x`` at the point ``p`` = exp_p(-log_p x)."""
    return M.reflect(p, x)


def reflect_prox(M: Manifold, prox, *points):
    """Reflection of a function given its proximal map.

    ``prox`` takes and returns the same number of arrays as ``points``;
    each point is reflected at its own prox value. This is the generic
    exp/log route, used to cross-check the closed forms above.
    """
    p = prox(*points)
    if len(points) == 1:
        p = (p,) if not isinstance(p, tuple) else p
    out = tuple(M.reflect(pk, xk) for pk, xk in zip(p, points))
    return out[0] if len(out) == 1 else out


# ---------------------------------------------------------------------------
# Karcher mean and the diagonal set


@dataclass
class KarcherResult:
    mean: np.ndarray
    iterations: int
    grad_norm: float
    converged: bool


def karcher_mean(M: Manifold, points, cfg: KarcherConfig | None = None, init=None, weights=None):
    """Minimizer of sum_k w_k d(t_k, x)^2 by Riemannian gradient descent.

    ``points`` has the K samples along axis 0; remaining batch axes are
    averaged independently (one mean per pixel). The iteration is
    x <- exp_x(step * sum_k w_k log_x t_k) with weights summing to one.
    """
    cfg = cfg or KarcherConfig()
    points = np.asarray(points, dtype=float)
    if points.shape[0] == 0:
        raise ValueError("karcher_mean needs at least one point")
    K = points.shape[0]
    w = np.full(K, 1.0 / K) if weights is None else np.asarray(weights, dtype=float) / np.sum(weights)
    wshape = (K,) + (1,) * (points.ndim - 1)
    x = points[0].copy() if init is None else np.array(init, dtype=float)
    gnorm = np.inf
    it = 0
    for it in range(1, cfg.max_iter + 1):
        grad = np.sum(w.reshape(wshape) * M.log(x[None], points), axis=0)
        gnorm = float(np.max(M.norm(x, grad))) if grad.size else 0.0
        if gnorm <= cfg.tol:
            return KarcherResult(x, it - 1, gnorm, True)
        x = M.exp(x, cfg.step * grad)
    grad = np.sum(w.reshape(wshape) * M.log(x[None], points), axis=0)
    gnorm = float(np.max(M.norm(x, grad))) if grad.size else 0.0
    return KarcherResult(x, it, gnorm, gnorm <= cfg.tol)


def _mean(M, x, cfg, init):
    res = karcher_mean(M, x, cfg, init=init)
    if not res.converged:
        warnings.warn(
            f"Karcher mean did not reach tol {cfg.tol:g} "
            f"(gradient norm {res.grad_norm:.3g} after {res.iterations} steps)",
            RuntimeWarning,
            stacklevel=3,
        )
    return res.mean


def project_diagonal(M: Manifold, x, cfg: KarcherConfig | None = None, init=None):
    """Projection onto {(y, ..., y)}: every component becomes the Karcher mean."""
    x = np.asarray(x, dtype=float)
    m = _mean(M, x, cfg or KarcherConfig(), init)
    return np.broadcast_to(m, x.shape).copy()


def reflect_diagonal(M: Manifold, x, cfg: KarcherConfig | None = None, init=None, mean=None):
    """Reflect every component at the shared Karcher mean."""
    x = np.asarray(x, dtype=float)
    m = _mean(M, x, cfg or KarcherConfig(), init) if mean is None else mean
    return M.reflect(np.broadcast_to(m, x.shape), x)
