"""Hyperboloid (Minkowski) model of hyperbolic space and its other models.

Points of H^d live in R^{d+1} with <x, x>_M = -1 and x_{d+1} > 0. The
conversions below go to the Poincare ball, the Poincare half-space, the
univariate Gaussians with the Fisher metric and the 2x2 SPD matrices of
determinant one.
"""

from __future__ import annotations

import math

import numpy as np

from .base import DEGENERATE, Manifold, ManifoldDescriptor, ManifoldError

SQRT2 = math.sqrt(2.0)


def minkowski(x, y):
    """Minkowski inner product -x_{d+1} y_{d+1} + sum_i x_i y_i."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sum(x[..., :-1] * y[..., :-1], axis=-1) - x[..., -1] * y[..., -1]


class Hyperbolic(Manifold):
    """H^d in the hyperboloid model.

    ``scale`` multiplies the metric length, so ``scale = sqrt(2)`` gives the
    curvature -1/2 space that the Fisher and det-1 SPD models are isometric
    to. Geodesics and exp/log coordinates are unaffected by the scale.
    """

    def __init__(self, d: int = 2, scale: float = 1.0, kind: str = "hyperbolic"):
        if d < 1:
            raise ValueError("dimension must be positive")
        self.d = d
        self.scale = float(scale)
        self.point_shape = (d + 1,)
        kappa = -1.0 / self.scale**2
        self.descriptor = ManifoldDescriptor(kind, d + 1, d, f"{kappa:g}")

    def __repr__(self):
        if self.scale == 1.0:
            return f"Hyperbolic({self.d})"
        return f"Hyperbolic({self.d}, scale={self.scale:g})"

    def _dist(self, x, y):
        # 2 asinh(|x - y|_M / 2) equals arcosh(-<x, y>_M) on the hyperboloid
        # and keeps full precision for nearby points.
        diff = y - x
        sq = np.maximum(minkowski(diff, diff), 0.0)
        return self.scale * 2.0 * np.arcsinh(0.5 * np.sqrt(sq))

    def _norm(self, x, v):
        return self.scale * np.sqrt(np.maximum(minkowski(v, v), 0.0))

    def _normalize(self, x):
        return x / np.sqrt(np.maximum(-minkowski(x, x), DEGENERATE))[..., None]

    def _exp(self, x, v):
        n = np.sqrt(np.maximum(minkowski(v, v), 0.0))
        safe = np.where(n > DEGENERATE, n, 1.0)
        sinhc = np.where(n > DEGENERATE, np.sinh(n) / safe, 1.0)
        out = np.cosh(n)[..., None] * x + sinhc[..., None] * v
        return self._normalize(out)

    def _log(self, x, y):
        inner = minkowski(x, y)
        u = y + inner[..., None] * x
        n = np.sqrt(np.maximum(minkowski(u, u), 0.0))
        diff = y - x
        dist = 2.0 * np.arcsinh(0.5 * np.sqrt(np.maximum(minkowski(diff, diff), 0.0)))
        factor = np.where(n > DEGENERATE, dist / np.where(n > DEGENERATE, n, 1.0), 1.0)
        v = factor[..., None] * u
        # project onto T_x to remove rounding drift
        return v + minkowski(x, v)[..., None] * x

    def check_point(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ManifoldError("non-finite coordinates")
        q = minkowski(x, x)
        # relative tolerance: coordinates grow like cosh of the distance
        scale = np.maximum(1.0, x[..., -1] ** 2)
        if np.any(np.abs(q + 1.0) > tol * scale) or np.any(x[..., -1] <= 0):
            raise ManifoldError("point is not on the hyperboloid")

    def check_tangent(self, x, v, tol=1e-9):
        x = np.asarray(x, dtype=float)
        v = np.asarray(v, dtype=float)
        scale = np.maximum(1.0, np.abs(x[..., -1]) * (1.0 + np.abs(v).max(axis=-1)))
        if np.any(np.abs(minkowski(x, v)) > tol * scale):
            raise ManifoldError("vector is not tangent: <x, v>_M != 0")

    def origin(self, size=()):
        size = (size,) if np.isscalar(size) else tuple(size)
        o = np.zeros(size + self.point_shape)
        o[..., -1] = 1.0
        return o

    def lift(self, z):
        """Point of the hyperboloid with spatial part ``z``."""
        z = np.asarray(z, dtype=float)
        last = np.sqrt(1.0 + np.sum(z**2, axis=-1))
        return np.concatenate([z, last[..., None]], axis=-1)

    def random_point(self, rng, size=(), scale=1.0):
        size = (size,) if np.isscalar(size) else tuple(size)
        return self.lift(scale * rng.standard_normal(size + (self.d,)))

    def boost(self, x, w):
        """Map a vector ``w`` of R^d, seen as a tangent at the origin, to T_x.

        Uses the Lorentz boost taking the origin to ``x``, so an orthonormal
        frame at the origin goes to an orthonormal frame at ``x``.
        """
        x = np.asarray(x, dtype=float)
        xs, xl = x[..., :-1], x[..., -1]
        proj = np.sum(xs * w, axis=-1)
        spatial = w + (proj / (1.0 + xl))[..., None] * xs
        return np.concatenate([spatial, proj[..., None]], axis=-1)

    def random_tangent(self, rng, x, std=1.0):
        x = np.asarray(x, dtype=float)
        w = (std / self.scale) * rng.standard_normal(x.shape[:-1] + (self.d,))
        return self.boost(x, w)


# ---------------------------------------------------------------------------
# model conversions


def to_poincare_ball(x):
    x = np.asarray(x, dtype=float)
    return x[..., :-1] / (1.0 + x[..., -1])[..., None]


def from_poincare_ball(b):
    b = np.asarray(b, dtype=float)
    sq = np.sum(b**2, axis=-1)
    if np.any(sq >= 1.0):
        raise ManifoldError("point outside the unit ball")
    denom = (1.0 - sq)[..., None]
    return np.concatenate([2.0 * b, (1.0 + sq)[..., None]], axis=-1) / denom


def ball_to_half_space(b):
    """Cayley transform from the unit ball to the upper half-space."""
    b = np.asarray(b, dtype=float)
    bt, bd = b[..., :-1], b[..., -1]
    denom = np.sum(bt**2, axis=-1) + (bd - 1.0) ** 2
    last = 1.0 - np.sum(b**2, axis=-1)
    return np.concatenate([2.0 * bt, last[..., None]], axis=-1) / denom[..., None]


def half_space_to_ball(h):
    h = np.asarray(h, dtype=float)
    ht, hd = h[..., :-1], h[..., -1]
    if np.any(hd <= 0):
        raise ManifoldError("point not in the upper half-space")
    sq_t = np.sum(ht**2, axis=-1)
    denom = sq_t + (hd + 1.0) ** 2
    last = sq_t + hd**2 - 1.0
    return np.concatenate([2.0 * ht, last[..., None]], axis=-1) / denom[..., None]


def ball_distance(a, b):
    """Distance in the Poincare ball, from its closed form."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    num = 2.0 * np.sum((a - b) ** 2, axis=-1)
    den = (1.0 - np.sum(a**2, axis=-1)) * (1.0 - np.sum(b**2, axis=-1))
    return np.arccosh(1.0 + num / den)


def half_space_distance(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    num = np.sum((a - b) ** 2, axis=-1)
    return np.arccosh(1.0 + num / (2.0 * a[..., -1] * b[..., -1]))


def gaussian_to_hyperbolic(mu, sigma):
    """(mu, sigma) of a univariate Gaussian to H^2 (hyperboloid coordinates).

    The Fisher distance of two Gaussians is sqrt(2) times the hyperbolic
    distance of the images.
    """
    mu = np.asarray(mu, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ManifoldError("sigma must be positive")
    half = np.stack(np.broadcast_arrays(mu / SQRT2, sigma), axis=-1)
    return from_poincare_ball(half_space_to_ball(half))


def hyperbolic_to_gaussian(x):
    """Inverse of :func:`gaussian_to_hyperbolic`; returns ``(mu, sigma)``."""
    h = ball_to_half_space(to_poincare_ball(x))
    return SQRT2 * h[..., 0], h[..., 1]


def fisher_distance(mu0, sigma0, mu1, sigma1):
    """Closed-form Fisher-Rao distance between univariate Gaussians."""
    a = np.stack(np.broadcast_arrays(np.asarray(mu0) / SQRT2, sigma0), axis=-1)
    b = np.stack(np.broadcast_arrays(np.asarray(mu1) / SQRT2, sigma1), axis=-1)
    return SQRT2 * half_space_distance(a, b)


def spd1_to_hyperbolic(a, tol=1e-9):
    """2x2 SPD matrix with unit determinant to H^2."""
    a = np.asarray(a, dtype=float)
    if a.shape[-2:] != (2, 2):
        raise ManifoldError("expected 2x2 matrices")
    det = a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] ** 2
    if np.any(np.abs(det - 1.0) > tol * np.maximum(1.0, a[..., 0, 0] * a[..., 1, 1])):
        raise ManifoldError("determinant differs from 1")
    if np.any(a[..., 0, 0] <= 0):
        raise ManifoldError("matrix is not positive definite")
    return np.stack(
        [
            0.5 * (a[..., 0, 0] - a[..., 1, 1]),
            0.5 * (a[..., 0, 1] + a[..., 1, 0]),
            0.5 * (a[..., 0, 0] + a[..., 1, 1]),
        ],
        axis=-1,
    )


def hyperbolic_to_spd1(x):
    x = np.asarray(x, dtype=float)
    x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
    row0 = np.stack([x1 + x3, x2], axis=-1)
    row1 = np.stack([x2, x3 - x1], axis=-1)
    return np.stack([row0, row1], axis=-2)
