"""Common manifold interface.

Points are plain numpy arrays whose trailing axes have the backend's
``point_shape``; any leading axes are batch axes and every operation
broadcasts over them. A product point (an image, or the K copies used by
the parallel solver) is just an array with extra leading axes.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass

import numpy as np

TOL = 1e-9
DEGENERATE = 1e-12

_validate = False


class ManifoldError(ValueError):
    """Raised for off-manifold input or mismatched point shapes."""


def set_validation(enabled: bool) -> None:
    global _validate
    _validate = bool(enabled)


def validation_enabled() -> bool:
    return _validate


@contextlib.contextmanager
def validation(enabled: bool = True):
    """Temporarily switch on-manifold checks on or off."""
    previous = _validate
    set_validation(enabled)
    try:
        yield
    finally:
        set_validation(previous)


@dataclass(frozen=True)
class ManifoldDescriptor:
    kind: str
    ambient_dim: int
    intrinsic_dim: int
    curvature_note: str


class Manifold:
    """Base class for the Hadamard backends.

    Subclasses implement the raw ``_dist``, ``_exp``, ``_log`` kernels and
    ``check_point``/``check_tangent``; the public methods add shape checks
    and, when validation is on, membership checks.
    """

    point_shape: tuple[int, ...] = ()
    descriptor: ManifoldDescriptor

    # -- kernels ---------------------------------------------------------
    def _dist(self, x, y):
        raise NotImplementedError

    def _exp(self, x, v):
        raise NotImplementedError

    def _log(self, x, y):
        raise NotImplementedError

    def _norm(self, x, v):
        raise NotImplementedError

    def check_point(self, x, tol: float = TOL) -> None:
        raise NotImplementedError

    def check_tangent(self, x, v, tol: float = TOL) -> None:
        raise NotImplementedError

    def random_point(self, rng, size=(), scale: float = 1.0):
        raise NotImplementedError

    def random_tangent(self, rng, x, std: float = 1.0):
        """Isotropic Gaussian tangent vector at ``x`` (orthonormal basis)."""
        raise NotImplementedError

    # -- helpers ---------------------------------------------------------
    @property
    def point_ndim(self) -> int:
        return len(self.point_shape)

    def batch_shape(self, x) -> tuple[int, ...]:
        x = np.asarray(x)
        return x.shape[: x.ndim - self.point_ndim]

    def expand(self, t):
        """Append singleton axes so a batch scalar broadcasts over a point."""
        t = np.asarray(t, dtype=float)
        return t.reshape(t.shape + (1,) * self.point_ndim)

    def _shape_check(self, *arrays) -> None:
        k = self.point_ndim
        for a in arrays:
            if np.ndim(a) < k or tuple(np.shape(a)[np.ndim(a) - k:]) != self.point_shape:
                raise ManifoldError(
                    f"expected trailing shape {self.point_shape} for "
                    f"{self.descriptor.kind}, got {np.shape(a)}"
                )

    def _points(self, *arrays):
        out = [np.asarray(a, dtype=float) for a in arrays]
        self._shape_check(*out)
        if _validate:
            for a in out:
                self.check_point(a)
        return out

    def is_point(self, x, tol: float = TOL) -> bool:
        try:
            self._shape_check(np.asarray(x))
            self.check_point(np.asarray(x, dtype=float), tol)
        except ManifoldError:
            return False
        return True

    # -- public API ------------------------------------------------------
    def dist(self, x, y):
        x, y = self._points(x, y)
        return self._dist(x, y)

    def exp(self, x, v):
        (x,) = self._points(x)
        v = np.asarray(v, dtype=float)
        self._shape_check(v)
        if _validate:
            self.check_tangent(x, v)
        return self._exp(x, v)

    def log(self, x, y):
        x, y = self._points(x, y)
        return self._log(x, y)

    def norm(self, x, v):
        return self._norm(np.asarray(x, dtype=float), np.asarray(v, dtype=float))

    def zero_tangent(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def geodesic(self, x, y, t):
        """Point at parameter ``t`` on the geodesic from ``x`` (t=0) to ``y`` (t=1).

        ``t`` may be a scalar or an array over the batch axes, and is not
        restricted to [0, 1]: values outside extend the geodesic, which is
        what reflections need.
        """
        x, y = self._points(x, y)
        return self._exp(x, self.expand(t) * self._log(x, y))

    def reflect(self, p, x):
        """Geodesic reflection of ``x`` at ``p``, i.e. exp_p(-log_p x)."""
        p, x = self._points(p, x)
        return self._exp(p, -self._log(p, x))


def product_distance(manifold: Manifold, x, y, axes=None):
    """Root-sum-square of componentwise distances.

    ``axes`` selects the batch axes that form the product; by default all
    batch axes are summed and a scalar is returned.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ManifoldError(f"product length mismatch: {x.shape} vs {y.shape}")
    d = manifold.dist(x, y)
    if axes is None:
        return float(np.sqrt(np.sum(d**2)))
    return np.sqrt(np.sum(d**2, axis=axes))
