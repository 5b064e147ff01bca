"""Manifold backends.

Each backend pairs the coordinates stored in an image ("native"
coordinates) with the manifold the solvers actually run on. For most kinds
the two coincide; Gaussians (mu, sigma) and det-1 SPD matrices are carried
over to the hyperboloid H^2 with metric scale sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .base import (
    DEGENERATE,
    TOL,
    Manifold,
    ManifoldDescriptor,
    ManifoldError,
    product_distance,
    set_validation,
    validation,
    validation_enabled,
)
from .euclidean import Euclidean
from .hyperbolic import (
    SQRT2,
    Hyperbolic,
    gaussian_to_hyperbolic,
    hyperbolic_to_gaussian,
    hyperbolic_to_spd1,
    minkowski,
    spd1_to_hyperbolic,
)
from .spd import SPD

KINDS = ("euclidean", "hyperbolic", "spd", "spd-det1", "gaussian-fisher")


def _identity(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Backend:
    descriptor: ManifoldDescriptor
    manifold: Manifold
    native_shape: tuple[int, ...]
    to_working: Callable = _identity
    from_working: Callable = _identity

    @property
    def kind(self) -> str:
        return self.descriptor.kind

    def check_native(self, x, tol: float = TOL) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape[x.ndim - len(self.native_shape):] != self.native_shape:
            raise ManifoldError(f"expected trailing shape {self.native_shape}, got {x.shape}")
        if self.kind == "gaussian-fisher":
            if np.any(~np.isfinite(x)) or np.any(x[..., 1] <= 0):
                raise ManifoldError("sigma must be positive")
        elif self.kind == "spd-det1":
            SPD(2).check_point(x)
            det = np.linalg.det(x)
            if np.any(np.abs(det - 1.0) > tol * np.maximum(1.0, np.abs(x).max(axis=(-2, -1)) ** 2)):
                raise ManifoldError("determinant differs from 1")
        else:
            self.manifold.check_point(x, tol)


def _gauss_to_h(x):
    x = np.asarray(x, dtype=float)
    return gaussian_to_hyperbolic(x[..., 0], x[..., 1])


def _h_to_gauss(x):
    mu, sigma = hyperbolic_to_gaussian(x)
    return np.stack([mu, sigma], axis=-1)


def get_backend(kind: str, dim: int | None = None) -> Backend:
    """Backend for ``kind``.

    ``dim`` is the vector length for euclidean, d for hyperbolic H^d and n
    for spd P(n); the constant-curvature kinds ignore it.
    """
    if kind == "euclidean":
        m = Euclidean(dim or 1)
        return Backend(m.descriptor, m, m.point_shape)
    if kind == "hyperbolic":
        m = Hyperbolic(dim or 2)
        return Backend(m.descriptor, m, m.point_shape)
    if kind == "spd":
        m = SPD(dim or 3)
        return Backend(m.descriptor, m, m.point_shape)
    if kind == "spd-det1":
        m = Hyperbolic(2, scale=SQRT2, kind="spd-det1")
        desc = ManifoldDescriptor("spd-det1", 4, 2, "-0.5")
        return Backend(desc, m, (2, 2), spd1_to_hyperbolic, hyperbolic_to_spd1)
    if kind == "gaussian-fisher":
        m = Hyperbolic(2, scale=SQRT2, kind="gaussian-fisher")
        desc = ManifoldDescriptor("gaussian-fisher", 2, 2, "-0.5")
        return Backend(desc, m, (2,), _gauss_to_h, _h_to_gauss)
    raise ManifoldError(f"unknown manifold kind {kind!r}; expected one of {KINDS}")


def backend_from_ambient(kind: str, ambient_dim: int) -> Backend:
    """Backend matching a stored ``ambient_dim`` (as found in file headers)."""
    if kind == "euclidean":
        return get_backend(kind, ambient_dim)
    if kind == "hyperbolic":
        return get_backend(kind, ambient_dim - 1)
    if kind == "spd":
        n = math.isqrt(ambient_dim)
        if n * n != ambient_dim:
            raise ManifoldError(f"spd ambient_dim {ambient_dim} is not a square")
        return get_backend(kind, n)
    b = get_backend(kind)
    if b.descriptor.ambient_dim != ambient_dim:
        raise ManifoldError(f"{kind} expects ambient_dim {b.descriptor.ambient_dim}")
    return b


__all__ = [
    "DEGENERATE",
    "KINDS",
    "SQRT2",
    "TOL",
    "SPD",
    "Backend",
    "Euclidean",
    "Hyperbolic",
    "Manifold",
    "ManifoldDescriptor",
    "ManifoldError",
    "backend_from_ambient",
    "get_backend",
    "minkowski",
    "product_distance",
    "set_validation",
    "validation",
    "validation_enabled",
]
