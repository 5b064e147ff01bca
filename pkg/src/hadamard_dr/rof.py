"""ROF-type restoration of manifold-valued images.

The functional is

    E(u) = 1/2 sum_{(i,j) in V} d(f_ij, u_ij)^2
           + alpha * sum d(u_ij, u_i+1,j) + alpha * sum d(u_ij, u_i,j+1)

with differences that leave the grid dropped. It is split into five
terms: the data term and four groups of first differences (vertical pairs
starting on even / odd rows, horizontal pairs starting on even / odd
columns, 0-based) so that no pixel occurs twice in a group.
"""

from __future__ import annotations

import numpy as np

from .image import ManifoldImage
from .manifolds import ManifoldError
from .solvers import (
    SolverConfig,
    SplitFunctional,
    Term,
    cppa_solve,
    dr_solve,
    evaluate_functional,
    pdra_solve,
)

SOLVERS = ("pdra", "cppa", "dr")


def difference_pairs(shape, axis: int, parity: int):
    """Flat index pairs (p, p + step) of first differences along ``axis``.

    Pairs start at coordinates congruent to ``parity`` mod 2 (0-based).
    """
    n, m = shape
    idx = np.arange(n * m).reshape(n, m)
    if axis == 0:
        first = idx[parity : n - 1 : 2, :]
        second = idx[parity + 1 : n : 2, :]
    else:
        first = idx[:, parity : m - 1 : 2]
        second = idx[:, parity + 1 : m : 2]
    return first.reshape(-1), second.reshape(-1)


def split_rof(image: ManifoldImage, alpha: float, tv_nu: int = 1) -> SplitFunctional:
    """Data term plus the four disjoint difference groups (K = 5)."""
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    shape = image.shape
    f = image.working().reshape((shape[0] * shape[1],) + image.manifold.point_shape)
    known = np.flatnonzero(image.known.reshape(-1))
    terms = [Term("point", 2, 1.0, known, anchors=f[known], name="data")]
    for axis, name in ((0, "vertical"), (1, "horizontal")):
        for parity in (0, 1):
            a, b = difference_pairs(shape, axis, parity)
            terms.append(Term("pair", tv_nu, alpha, a, b, name=f"{name}-{parity}"))
    return SplitFunctional(image.manifold, shape, terms)


def data_only_functional(image: ManifoldImage) -> SplitFunctional:
    F = split_rof(image, 0.0)
    return SplitFunctional(F.manifold, F.shape, F.terms[:1])


def tv_term(F: SplitFunctional) -> Term:
    """All first differences merged into one term (for two-term DR).

    The merged term is not pixel-disjoint in general, so only grids where
    every pixel has at most one neighbour (N x 2, 2 x M lines with one
    pair per pixel) are accepted.
    """
    pairs = [t for t in F.terms if t.kind == "pair" and t.size]
    if not pairs:
        return Term("pair", 1, 0.0, [], [], name="tv")
    first = np.concatenate([t.first for t in pairs])
    second = np.concatenate([t.second for t in pairs])
    return Term("pair", pairs[0].nu, pairs[0].weight, first, second, name="tv")


def inpainting_mask(rows: int = 16, cols: int | None = None, border: int = 2) -> np.ndarray:
    """Known pixels {(i, j): min(i, N - i, j, M - j) <= border}, 1-based i, j."""
    cols = rows if cols is None else cols
    i = np.arange(1, rows + 1)[:, None]
    j = np.arange(1, cols + 1)[None, :]
    dist = np.minimum(np.minimum(i, rows - i), np.minimum(j, cols - j))
    return dist <= border


def nearest_known(mask) -> np.ndarray:
    """Flat index of the nearest known pixel for every pixel.

    Distance is the 4-neighbourhood graph distance (BFS from all known
    pixels at once); ties go to the smallest flat index.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ManifoldError("mask has no known pixels")
    n, m = mask.shape
    big = np.iinfo(np.intp).max
    src = np.where(mask, np.arange(n * m).reshape(n, m), big)
    done = mask.copy()
    while not done.all():
        cand = np.full((n, m), big)
        # only pixels settled in earlier layers propagate
        settled = np.where(done, src, big)
        cand[1:, :] = np.minimum(cand[1:, :], settled[:-1, :])
        cand[:-1, :] = np.minimum(cand[:-1, :], settled[1:, :])
        cand[:, 1:] = np.minimum(cand[:, 1:], settled[:, :-1])
        cand[:, :-1] = np.minimum(cand[:, :-1], settled[:, 1:])
        new = ~done & (cand < big)
        src[new] = cand[new]
        done |= new
    return src.reshape(-1)


def initial_image(image: ManifoldImage) -> np.ndarray:
    """Working-manifold start: f on known pixels, nearest neighbour elsewhere."""
    w = image.working()
    if image.mask is None or image.mask.all():
        return w
    flat = w.reshape((image.rows * image.cols,) + image.manifold.point_shape)
    return flat[nearest_known(image.mask)].reshape(w.shape)


def filled(image: ManifoldImage) -> ManifoldImage:
    """Copy of ``image`` whose unknown pixels hold valid nearest-neighbour values."""
    return ManifoldImage.from_working(image.kind, initial_image(image), image.mask, image.dim)


def solve(F: SplitFunctional, u0, solver: str, cfg: SolverConfig, **kw):
    if solver == "pdra":
        return pdra_solve(F, cfg, u0=u0, **kw)
    if solver == "cppa":
        return cppa_solve(F, u0, cfg, **kw)
    if solver == "dr":
        data = F.terms[0]
        x, trace = dr_solve(F.manifold, tv_term(F), data, F.flat(u0), cfg, **kw)
        return F.image(x), trace
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


def denoise(image: ManifoldImage, alpha: float, solver: str = "pdra", cfg: SolverConfig | None = None, **kw):
    """Minimize the ROF functional for ``image``.

    Returns ``(restored image, trace, functional)``. Unknown pixels (mask
    False) carry no data term and start from their nearest known pixel.
    The "dr" solver is the two-term variant and only applies when the
    difference graph is a matching (see :func:`tv_term`).
    """
    cfg = cfg or SolverConfig()
    F = split_rof(image, alpha)
    u0 = initial_image(image)
    if solver == "dr":
        first = np.concatenate([t.first for t in F.terms[1:]] + [t.second for t in F.terms[1:]])
        if len(np.unique(first)) != len(first):
            raise ValueError("two-term DR needs a grid where each pixel has at most one neighbour")
    u, trace = solve(F, u0, solver, cfg, **kw)
    return ManifoldImage.from_working(image.kind, u, image.mask, image.dim), trace, F


def functional_value(image: ManifoldImage, u: ManifoldImage | np.ndarray, alpha: float) -> float:
    """E(u) for data ``image``; ``u`` may be an image or working-manifold array."""
    F = split_rof(image, alpha)
    values = u.working() if isinstance(u, ManifoldImage) else u
    return evaluate_functional(F, values)


__all__ = [
    "SOLVERS",
    "data_only_functional",
    "denoise",
    "difference_pairs",
    "filled",
    "functional_value",
    "initial_image",
    "inpainting_mask",
    "nearest_known",
    "solve",
    "split_rof",
    "tv_term",
]
