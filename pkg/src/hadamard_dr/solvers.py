"""Douglas-Rachford and cyclic proximal point solvers on Hadamard manifolds.

Images are handled as flat pixel arrays of shape ``(P,) + point_shape``.
A functional is a sum of :class:`Term` objects, each a sum over disjoint
pixel singletons or disjoint pixel pairs, so the proximal map of a term is
evaluated pixelwise in one vectorized call.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import proximal as px
from .manifolds.base import Manifold, ManifoldError, validation
from .proximal import KarcherConfig


@dataclass
class Term:
    """One summand phi_k of the split functional.

    ``kind == "point"``: weight/nu * sum_i d(anchor_i, u[first_i])^nu.
    ``kind == "pair"``: weight/nu * sum_i d(u[first_i], u[second_i])^nu.
    No pixel index may appear twice in a term.
    """

    kind: str
    nu: int
    weight: float
    first: np.ndarray
    second: np.ndarray | None = None
    anchors: np.ndarray | None = None
    name: str = ""

    def __post_init__(self):
        self.first = np.asarray(self.first, dtype=np.intp).reshape(-1)
        if self.kind == "pair":
            self.second = np.asarray(self.second, dtype=np.intp).reshape(-1)
            if self.second.shape != self.first.shape:
                raise ValueError("pair term needs matching index arrays")
            used = np.concatenate([self.first, self.second])
        elif self.kind == "point":
            if self.anchors is None or len(self.anchors) != len(self.first):
                raise ValueError("point term needs one anchor per pixel")
            self.anchors = np.asarray(self.anchors, dtype=float)
            used = self.first
        else:
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.nu not in px.NU_VALUES:
            raise ValueError("nu must be 1 or 2")
        if self.weight < 0:
            raise ValueError("weight must be nonnegative")
        if len(np.unique(used)) != len(used):
            raise ValueError(f"term {self.name or self.kind}: a pixel appears twice")

    @property
    def size(self) -> int:
        return len(self.first)

    def is_trivial(self) -> bool:
        return self.size == 0 or self.weight == 0

    def value(self, M: Manifold, u) -> float:
        if self.is_trivial():
            return 0.0
        if self.kind == "point":
            d = M.dist(self.anchors, u[self.first])
            return float(self.weight / self.nu * np.sum(d**self.nu))
        d = M.dist(u[self.first], u[self.second])
        return float(self.weight / self.nu * np.sum(d**self.nu))

    def _apply(self, M, u, eta, reflect):
        out = np.array(u, dtype=float, copy=True)
        if self.is_trivial():
            return out
        e = eta * self.weight
        if self.kind == "point":
            f = px.reflect_dist_to_point if reflect else px.prox_dist_to_point
            out[self.first] = f(M, u[self.first], self.anchors, self.nu, e)
        else:
            f = px.reflect_pair_dist if reflect else px.prox_pair_dist
            out[self.first], out[self.second] = f(M, u[self.first], u[self.second], self.nu, e)
        return out

    def prox(self, M: Manifold, u, eta: float):
        return self._apply(M, u, eta, reflect=False)

    def reflect(self, M: Manifold, u, eta: float):
        return self._apply(M, u, eta, reflect=True)


@dataclass
class SplitFunctional:
    manifold: Manifold
    shape: tuple[int, int]
    terms: list[Term]

    @property
    def n_pixels(self) -> int:
        return self.shape[0] * self.shape[1]

    def flat(self, u):
        u = np.asarray(u, dtype=float)
        return u.reshape((self.n_pixels,) + self.manifold.point_shape)

    def image(self, u):
        return np.asarray(u).reshape(tuple(self.shape) + self.manifold.point_shape)


def evaluate_functional(F: SplitFunctional, u) -> float:
    """Sum of all term values at the image ``u``."""
    u = np.asarray(u, dtype=float)
    expected = F.n_pixels * math.prod(F.manifold.point_shape)
    if u.size != expected:
        raise ManifoldError(f"image has {u.size} entries, functional expects {expected}")
    uf = F.flat(u)
    with validation(False):
        return float(sum(t.value(F.manifold, uf) for t in F.terms))


# ---------------------------------------------------------------------------


@dataclass
class SolverConfig:
    """Parameters shared by the solvers.

    ``lam`` is either a constant in (0, 1) or a sequence / callable giving
    lambda_r. Any constant in (0, 1) satisfies sum lambda_r (1 - lambda_r)
    = inf; general schedules are not checked.
    """

    eta: float = 0.5
    lam: float | Sequence[float] | Callable[[int], float] = 0.9
    eps: float = 1e-6
    max_iter: int = 1000
    karcher: KarcherConfig = field(default_factory=KarcherConfig)
    record_functional: bool = True
    rng_seed: int | None = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ValueError("eta must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if isinstance(self.lam, (int, float)) and not 0 < self.lam <= 1:
            raise ValueError("constant lambda must lie in (0, 1]")

    def lam_at(self, r: int) -> float:
        if callable(self.lam):
            return float(self.lam(r))
        if isinstance(self.lam, (int, float)):
            return float(self.lam)
        seq = list(self.lam)
        return float(seq[min(r, len(seq) - 1)])


@dataclass
class SolverTrace:
    functional: list[float] = field(default_factory=list)
    eps: list[float] = field(default_factory=list)
    iterations: int = 0
    reason: str = ""
    warnings: list[str] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.reason == "converged"

    def record(self, value, step):
        self.functional.append(float(value))
        self.eps.append(float(step))
        self.iterations = len(self.eps)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iter", "functional", "eps"])
            for i, (e, s) in enumerate(zip(self.functional, self.eps), start=1):
                w.writerow([i, f"{e:.12g}", f"{s:.12g}"])


def read_trace_csv(path) -> SolverTrace:
    tr = SolverTrace()
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            tr.record(float(row["functional"]), float(row["eps"]))
    return tr


def _step_distance(M, a, b):
    return float(np.sqrt(np.sum(M.dist(a, b) ** 2)))


class _KarcherWatch:
    """Collects Karcher non-convergence warnings into the trace."""

    def __init__(self, trace):
        self.trace = trace

    def __enter__(self):
        self._cm = warnings.catch_warnings(record=True)
        self._log = self._cm.__enter__()
        warnings.simplefilter("always", RuntimeWarning)
        return self

    def __exit__(self, *exc):
        self._cm.__exit__(*exc)
        for w in self._log:
            self.trace.warnings.append(str(w.message))
        return False


def dr_solve(
    M: Manifold,
    phi: Term,
    psi: Term,
    t0,
    cfg: SolverConfig,
    callback: Callable | None = None,
):
    """Two-term Douglas-Rachford iteration.

    t <- gamma_{t, s}(lambda_r) with s = R_{eta phi} R_{eta psi} t; the
    solution candidate is x = prox_{eta psi}(t) and iteration stops when
    the product distance between consecutive candidates drops below eps.
    """
    t = np.array(t0, dtype=float, copy=True)
    trace = SolverTrace()
    terms = [phi, psi]
    with validation(False):
        x_prev = psi.prox(M, t, cfg.eta)
        for r in range(cfg.max_iter):
            s = phi.reflect(M, psi.reflect(M, t, cfg.eta), cfg.eta)
            t = M.geodesic(t, s, cfg.lam_at(r))
            x = psi.prox(M, t, cfg.eta)
            step = _step_distance(M, x, x_prev)
            value = sum(term.value(M, x) for term in terms) if cfg.record_functional else math.nan
            trace.record(value, step)
            if callback is not None:
                callback(r, t, x)
            x_prev = x
            if step < cfg.eps:
                trace.reason = "converged"
                break
        else:
            trace.reason = "max_iter"
    return x_prev, trace


def pdra_solve(
    F: SplitFunctional,
    cfg: SolverConfig,
    t0=None,
    u0=None,
    callback: Callable | None = None,
):
    """Parallel Douglas-Rachford over the K terms of ``F``.

    Works on K copies t_1..t_K of the image. Each iteration reflects the
    copies at their pixelwise Karcher mean (the diagonal reflection), then
    reflects copy k with term k, and moves t a fraction lambda_r towards
    the result. The solution candidate is the Karcher mean of the copies.

    ``t0`` (shape (K, P, ...)) overrides the default start, which is K
    copies of ``u0`` (or of the first term's anchors filled to the grid by
    the caller; ``u0`` is required when ``t0`` is not given).
    """
    M = F.manifold
    K = len(F.terms)
    if t0 is None:
        if u0 is None:
            raise ValueError("pdra_solve needs u0 or t0")
        u0 = F.flat(u0)
        t = np.broadcast_to(u0, (K,) + u0.shape).copy()
    else:
        t = np.array(t0, dtype=float, copy=True).reshape((K, F.n_pixels) + M.point_shape)
    trace = SolverTrace()
    kcfg = cfg.karcher
    with validation(False), _KarcherWatch(trace):
        x = px.karcher_mean(M, t, kcfg).mean
        for r in range(cfg.max_iter):
            # R_{iota_D}: reflect every copy at the common mean x of t
            rd = M.reflect(x[None], t)
            s = np.empty_like(t)
            for k, term in enumerate(F.terms):
                s[k] = term.reflect(M, rd[k], cfg.eta)
            t = M.geodesic(t, s, cfg.lam_at(r))
            res = px.karcher_mean(M, t, kcfg, init=x)
            if not res.converged:
                warnings.warn(
                    f"iteration {r + 1}: Karcher mean gradient {res.grad_norm:.3g}",
                    RuntimeWarning,
                )
            x_new = res.mean
            step = _step_distance(M, x_new, x)
            value = evaluate_functional(F, x_new) if cfg.record_functional else math.nan
            trace.record(value, step)
            x = x_new
            if callback is not None:
                callback(r, t, x)
            if step < cfg.eps:
                trace.reason = "converged"
                break
        else:
            trace.reason = "max_iter"
    return F.image(x), trace


def pdra_operator(F: SplitFunctional, t, eta: float, kcfg: KarcherConfig | None = None):
    """One application of R_{eta Phi} R_{iota_D} to the K-fold point ``t``."""
    M = F.manifold
    with validation(False):
        x = px.karcher_mean(M, t, kcfg or KarcherConfig()).mean
        rd = M.reflect(x[None], t)
        s = np.empty_like(rd)
        for k, term in enumerate(F.terms):
            s[k] = term.reflect(M, rd[k], eta)
    return s


def cppa_solve(F: SplitFunctional, u0, cfg: SolverConfig, callback: Callable | None = None):
    """Cyclic proximal point algorithm with steps eta_r = eta / (r + 1)."""
    M = F.manifold
    u = np.array(F.flat(u0), dtype=float, copy=True)
    trace = SolverTrace()
    with validation(False):
        for r in range(cfg.max_iter):
            eta_r = cfg.eta / (r + 1)
            prev = u
            for term in F.terms:
                u = term.prox(M, u, eta_r)
            step = _step_distance(M, u, prev)
            value = evaluate_functional(F, u) if cfg.record_functional else math.nan
            trace.record(value, step)
            if callback is not None:
                callback(r, u)
            if step < cfg.eps:
                trace.reason = "converged"
                break
        else:
            trace.reason = "max_iter"
    return F.image(u), trace
