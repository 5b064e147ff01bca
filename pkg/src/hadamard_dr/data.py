"""Synthetic data, structure tensors, Gaussian parameter images and exports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .image import ManifoldImage, write_pgm
from .manifolds import get_backend

SINGULAR_TOL = 1e-12


def gaussian_kernel(std: float) -> np.ndarray:
    """Sampled Gaussian on integer offsets |k| <= 3 std, renormalized to sum 1."""
    if std < 0:
        raise ValueError("standard deviation must be nonnegative")
    radius = int(np.floor(3.0 * std))
    if std == 0 or radius == 0:
        return np.ones(1)
    k = np.arange(-radius, radius + 1, dtype=float)
    w = np.exp(-0.5 * (k / std) ** 2)
    return w / w.sum()


def gaussian_smooth(img, std: float) -> np.ndarray:
    """Separable truncated Gaussian with mirrored (edge-repeating) boundary."""
    out = np.asarray(img, dtype=float)
    kern = gaussian_kernel(std)
    if kern.size == 1:
        return out.copy()
    out = correlate1d(out, kern, axis=0, mode="reflect")
    return correlate1d(out, kern, axis=1, mode="reflect")


def forward_differences(img):
    """Vertical and horizontal forward differences, zero past the last row/column."""
    img = np.asarray(img, dtype=float)
    dv = np.zeros_like(img)
    dh = np.zeros_like(img)
    dv[:-1, :] = img[1:, :] - img[:-1, :]
    dh[:, :-1] = img[:, 1:] - img[:, :-1]
    return dv, dh


@dataclass(frozen=True)
class StructureTensorConfig:
    sigma: float = 0.8
    rho: float = 0.35
    normalize_det1: bool = True

    def __post_init__(self):
        if self.sigma < 0 or self.rho < 0:
            raise ValueError("sigma and rho must be nonnegative")


def structure_tensor_field(img, cfg: StructureTensorConfig = StructureTensorConfig()):
    """Raw smoothed gradient outer products, shape (N, M, 2, 2).

    Gradient components are ordered (vertical, horizontal).
    """
    img = np.asarray(img, dtype=float)
    if img.ndim != 2 or img.size == 0:
        raise ValueError("expected a nonempty 2-D image")
    dv, dh = forward_differences(gaussian_smooth(img, cfg.sigma))
    j11 = gaussian_smooth(dv * dv, cfg.rho)
    j12 = gaussian_smooth(dv * dh, cfg.rho)
    j22 = gaussian_smooth(dh * dh, cfg.rho)
    row0 = np.stack([j11, j12], axis=-1)
    row1 = np.stack([j12, j22], axis=-1)
    return np.stack([row0, row1], axis=-2)


def structure_tensor(img, cfg: StructureTensorConfig = StructureTensorConfig()) -> ManifoldImage:
    """Structure tensor image, optionally scaled to determinant one.

    Pixels whose tensor is singular (relative to its trace) are marked
    unknown in the mask and hold the identity.
    """
    J = structure_tensor_field(img, cfg)
    tr = J[..., 0, 0] + J[..., 1, 1]
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] ** 2
    ok = (tr > 0) & (det > SINGULAR_TOL * np.maximum(tr, 1e-300) ** 2)
    out = np.broadcast_to(np.eye(2), J.shape).copy()
    if cfg.normalize_det1:
        out[ok] = J[ok] / np.sqrt(det[ok])[:, None, None]
        # symmetrize and correct the last rounding bits of the determinant
        out[ok] /= np.sqrt(np.linalg.det(out[ok]))[:, None, None]
        kind, dim = "spd-det1", None
    else:
        out[ok] = J[ok]
        kind, dim = "spd", 2
    return ManifoldImage(kind, out, ok, dim)


def gaussian_ml_image(stack) -> ManifoldImage:
    """Per-pixel maximum likelihood (mu, sigma) from m >= 2 samples.

    sigma uses the biased 1/m estimator. Pixels with zero spread are
    marked unknown and hold (mu, 1).
    """
    g = np.asarray(stack, dtype=float)
    if g.ndim != 3:
        raise ValueError("expected a stack of shape (m, N, M)")
    if g.shape[0] < 2:
        raise ValueError("need at least two samples per pixel")
    mu = g.mean(axis=0)
    sigma = np.sqrt(np.mean((g - mu) ** 2, axis=0))
    ok = sigma > 0
    data = np.stack([mu, np.where(ok, sigma, 1.0)], axis=-1)
    return ManifoldImage("gaussian-fisher", data, ok)


def add_tangent_noise(image: ManifoldImage, sigma_n: float, seed=None) -> ManifoldImage:
    """Perturb every pixel by exp_x(v), v isotropic Gaussian in T_x.

    ``sigma_n`` is the standard deviation per coordinate of an orthonormal
    tangent frame, in the metric of the image's manifold (Fisher units for
    Gaussians, affine-invariant units for SPD matrices).
    """
    if sigma_n < 0:
        raise ValueError("noise level must be nonnegative")
    if sigma_n == 0:
        return image.copy()
    rng = np.random.default_rng(seed)
    M = image.manifold
    x = image.working()
    noisy = M.exp(x, M.random_tangent(rng, x, sigma_n))
    return ManifoldImage.from_working(image.kind, noisy, image.mask, image.dim)


# ---------------------------------------------------------------------------
# phantoms


def region_labels(rows: int, cols: int) -> np.ndarray:
    """Piecewise-constant label map: background, a rectangle and a disc."""
    i, j = np.mgrid[0:rows, 0:cols]
    labels = np.zeros((rows, cols), int)
    labels[(i >= rows // 4) & (i < (3 * rows) // 4) & (j < cols // 2)] = 1
    ci, cj, r = rows / 2.0, 3.0 * cols / 4.0, max(rows, cols) / 5.0
    labels[(i + 0.5 - ci) ** 2 + (j + 0.5 - cj) ** 2 <= r**2] = 2
    return labels


def _region_values(kind: str, dim: int | None):
    b = get_backend(kind, dim)
    if kind == "euclidean":
        n = b.manifold.n
        return [np.zeros(n), np.full(n, 1.0), np.full(n, -0.5)]
    if kind == "hyperbolic":
        M = b.manifold
        z = np.zeros((3, M.d))
        z[1, 0] = 0.8
        z[2, 0] = -0.4
        if M.d > 1:
            z[2, 1] = 0.9
        return list(M.lift(z))
    if kind == "spd":
        n = b.manifold.n
        vals = [np.eye(n)]
        a = np.diag(np.linspace(2.0, 0.5, n))
        vals.append(a)
        rot = np.eye(n)
        c, s = np.cos(0.6), np.sin(0.6)
        rot[:2, :2] = [[c, -s], [s, c]]
        vals.append(rot @ np.diag(np.linspace(0.4, 1.5, n)) @ rot.T)
        return vals
    if kind == "spd-det1":
        c, s = np.cos(0.7), np.sin(0.7)
        rot = np.array([[c, -s], [s, c]])
        return [np.eye(2), np.diag([2.0, 0.5]), rot @ np.diag([0.4, 2.5]) @ rot.T]
    if kind == "gaussian-fisher":
        return [np.array([0.0, 1.0]), np.array([1.5, 0.7]), np.array([-1.0, 1.8])]
    raise ValueError(kind)


def phantom(kind: str, rows: int, cols: int, dim: int | None = None) -> ManifoldImage:
    """Noise-free piecewise-constant test image for ``kind``."""
    labels = region_labels(rows, cols)
    vals = np.asarray(_region_values(kind, dim))
    return ManifoldImage(kind, vals[labels], None, dim)


def synthetic_scalar_image(size: int = 64) -> np.ndarray:
    """Gray-value test image in [0, 1] with straight and curved edges."""
    i, j = np.mgrid[0:size, 0:size].astype(float)
    img = np.zeros((size, size))
    img[(i > size * 0.15) & (i < size * 0.55) & (j > size * 0.1) & (j < size * 0.45)] = 1.0
    img[(i - size * 0.68) ** 2 + (j - size * 0.68) ** 2 < (size * 0.2) ** 2] = 0.6
    img[(j - i > size * 0.35)] = np.maximum(img[(j - i > size * 0.35)], 0.3)
    return img


def noisy_stack(mean, std, m: int, seed=None) -> np.ndarray:
    """m samples of independent pixelwise Gaussians."""
    rng = np.random.default_rng(seed)
    mean = np.asarray(mean, dtype=float)
    return mean + np.asarray(std, dtype=float) * rng.standard_normal((m,) + mean.shape)


# ---------------------------------------------------------------------------
# scalar channels


CHANNELS = {
    "gaussian-fisher": ("mean", "std"),
    "spd": ("anisotropy", "trace"),
    "spd-det1": ("anisotropy", "trace"),
}


def fractional_anisotropy(mats) -> np.ndarray:
    """sqrt(n / (n - 1)) * |lambda - mean(lambda)| / |lambda|, in [0, 1]."""
    w = np.linalg.eigvalsh(np.asarray(mats, dtype=float))
    n = w.shape[-1]
    dev = w - w.mean(axis=-1, keepdims=True)
    num = np.linalg.norm(dev, axis=-1)
    den = np.linalg.norm(w, axis=-1)
    return np.sqrt(n / (n - 1.0)) * num / np.where(den > 0, den, 1.0)


def scalar_channel(image: ManifoldImage, channel: str) -> np.ndarray:
    allowed = CHANNELS.get(image.kind, ())
    if channel not in allowed:
        raise ValueError(
            f"channel {channel!r} not available for {image.kind}; choose from {allowed or 'none'}"
        )
    if channel == "mean":
        return image.data[..., 0].copy()
    if channel == "std":
        return image.data[..., 1].copy()
    if channel == "trace":
        return np.trace(image.data, axis1=-2, axis2=-1)
    return fractional_anisotropy(image.data)


def export_field(image: ManifoldImage, channel: str, path) -> dict:
    """Write one scalar channel as 8-bit PGM with a JSON scaling sidecar."""
    return write_pgm(scalar_channel(image, channel), path, channel)


__all__ = [
    "CHANNELS",
    "StructureTensorConfig",
    "add_tangent_noise",
    "export_field",
    "fractional_anisotropy",
    "gaussian_kernel",
    "gaussian_ml_image",
    "gaussian_smooth",
    "noisy_stack",
    "phantom",
    "region_labels",
    "scalar_channel",
    "structure_tensor",
    "structure_tensor_field",
    "synthetic_scalar_image",
]
