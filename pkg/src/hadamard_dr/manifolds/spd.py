"""Symmetric positive definite matrices with the affine-invariant metric.

Points are full n x n arrays. Every matrix function goes through a
batched symmetric eigendecomposition, and results are symmetrized.
"""

from __future__ import annotations

import numpy as np

from .base import Manifold, ManifoldDescriptor, ManifoldError

MIN_EIGENVALUE = 1e-12


def sym(a):
    return 0.5 * (a + np.swapaxes(a, -1, -2))


def _eig_apply(w, v, f):
    return sym((v * f(w)[..., None, :]) @ np.swapaxes(v, -1, -2))


def sym_fn(a, f):
    """Apply a scalar function to the eigenvalues of a symmetric matrix."""
    w, v = np.linalg.eigh(sym(np.asarray(a, dtype=float)))
    return _eig_apply(w, v, f)


def sym_expm(s):
    return sym_fn(s, np.exp)


def sym_logm(x):
    w, v = np.linalg.eigh(sym(np.asarray(x, dtype=float)))
    if np.any(w <= MIN_EIGENVALUE):
        raise ManifoldError("matrix logarithm needs a positive definite matrix")
    return _eig_apply(w, v, np.log)


def sqrt_and_invsqrt(x):
    """x^{1/2} and x^{-1/2} from one eigendecomposition."""
    w, v = np.linalg.eigh(sym(x))
    if np.any(w <= 0):
        raise ManifoldError("matrix is not positive definite")
    r = np.sqrt(w)
    return _eig_apply(r, v, lambda z: z), _eig_apply(r, v, lambda z: 1.0 / z)


class SPD(Manifold):
    def __init__(self, n: int = 3):
        if n < 1:
            raise ValueError("matrix size must be positive")
        self.n = n
        self.point_shape = (n, n)
        self.descriptor = ManifoldDescriptor(
            "spd", n * n, n * (n + 1) // 2, "variable <= 0"
        )

    def __repr__(self):
        return f"SPD({self.n})"

    def _whiten(self, x, y):
        s, si = sqrt_and_invsqrt(x)
        return s, si, sym(si @ y @ si)

    def _dist(self, x, y):
        _, _, z = self._whiten(x, y)
        w = np.linalg.eigvalsh(z)
        return np.sqrt(np.sum(np.log(w) ** 2, axis=-1))

    def _exp(self, x, v):
        s, si = sqrt_and_invsqrt(x)
        return sym(s @ sym_expm(si @ v @ si) @ s)

    def _log(self, x, y):
        s, si, z = self._whiten(x, y)
        return sym(s @ sym_fn(z, np.log) @ s)

    def _norm(self, x, v):
        _, si = sqrt_and_invsqrt(x)
        return np.linalg.norm(si @ v @ si, axis=(-2, -1))

    def geodesic(self, x, y, t):
        x, y = self._points(x, y)
        s, _, z = self._whiten(x, y)
        w, v = np.linalg.eigh(z)
        t = np.asarray(t, dtype=float)[..., None]
        inner = sym((v * np.exp(t * np.log(w))[..., None, :]) @ np.swapaxes(v, -1, -2))
        return sym(s @ inner @ s)

    def reflect(self, p, x):
        # exp_p(-log_p x) = p x^{-1} p
        p, x = self._points(p, x)
        s, si, z = self._whiten(p, x)
        return sym(s @ sym_fn(z, lambda w: 1.0 / w) @ s)

    def check_point(self, x, tol=1e-10):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ManifoldError("non-finite entries")
        asym = np.abs(x - np.swapaxes(x, -1, -2)).max(axis=(-2, -1))
        scale = np.maximum(1.0, np.abs(x).max(axis=(-2, -1)))
        if np.any(asym > tol * scale):
            raise ManifoldError("matrix is not symmetric")
        if np.any(np.linalg.eigvalsh(sym(x))[..., 0] <= MIN_EIGENVALUE):
            raise ManifoldError("matrix is not positive definite")

    def check_tangent(self, x, v, tol=1e-10):
        v = np.asarray(v, dtype=float)
        asym = np.abs(v - np.swapaxes(v, -1, -2)).max(axis=(-2, -1))
        scale = np.maximum(1.0, np.abs(v).max(axis=(-2, -1)))
        if np.any(asym > tol * scale):
            raise ManifoldError("tangent matrix is not symmetric")

    def random_point(self, rng, size=(), scale=1.0):
        return sym_expm(self._frobenius_gaussian(rng, size, scale))

    def _frobenius_gaussian(self, rng, size, std):
        size = (size,) if np.isscalar(size) else tuple(size)
        g = std * rng.standard_normal(size + self.point_shape)
        # off-diagonal entries get variance std^2 / 2, diagonal std^2
        off = np.triu(g, 1) / np.sqrt(2.0)
        return off + np.swapaxes(off, -1, -2) + g * np.eye(self.n)

    def random_tangent(self, rng, x, std=1.0):
        x = np.asarray(x, dtype=float)
        s, _ = sqrt_and_invsqrt(x)
        return sym(s @ self._frobenius_gaussian(rng, x.shape[:-2], std) @ s)
