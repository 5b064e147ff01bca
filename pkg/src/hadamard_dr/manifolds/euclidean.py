"""Flat space R^n, used as a reference backend."""

from __future__ import annotations

import numpy as np

from .base import Manifold, ManifoldDescriptor, ManifoldError


class Euclidean(Manifold):
    def __init__(self, n: int = 1):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n
        self.point_shape = (n,)
        self.descriptor = ManifoldDescriptor("euclidean", n, n, "0")

    def __repr__(self):
        return f"Euclidean({self.n})"

    def _dist(self, x, y):
        return np.linalg.norm(y - x, axis=-1)

    def _exp(self, x, v):
        return x + v

    def _log(self, x, y):
        return y - x

    def _norm(self, x, v):
        return np.linalg.norm(v, axis=-1)

    def geodesic(self, x, y, t):
        x, y = self._points(x, y)
        t = self.expand(t)
        return (1.0 - t) * x + t * y

    def reflect(self, p, x):
        p, x = self._points(p, x)
        return 2.0 * p - x

    def check_point(self, x, tol=1e-9):
        if not np.all(np.isfinite(x)):
            raise ManifoldError("non-finite coordinates")

    def check_tangent(self, x, v, tol=1e-9):
        if not np.all(np.isfinite(v)):
            raise ManifoldError("non-finite tangent")

    def random_point(self, rng, size=(), scale=1.0):
        size = (size,) if np.isscalar(size) else tuple(size)
        return scale * rng.standard_normal(size + self.point_shape)

    def random_tangent(self, rng, x, std=1.0):
        x = np.asarray(x, dtype=float)
        return std * rng.standard_normal(x.shape)
