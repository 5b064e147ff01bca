"""Independent reference computations used by the tests.

Nothing here calls the closed-form proximal maps or the solvers of the
package; only distances and geodesics of the backends are reused.
"""

import numpy as np

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, iters=120):
    """Vectorized golden-section minimization of unimodal ``f`` on [lo, hi].

    ``f`` maps an array of parameters (one per problem) to objective values.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - GOLDEN * (b - a)
        d_new = a + GOLDEN * (b - a)
        # reuse one interior evaluation per step
        c, d = np.where(left, c_new, d), np.where(left, c, d_new)
        fc, fd = np.where(left, f(c), fd), np.where(left, fc, f(d))
    t = 0.5 * (a + b)
    # the closed forms may sit on the interval boundary (saturation)
    cand = np.stack([t, np.asarray(lo, float) + 0 * t, np.asarray(hi, float) + 0 * t])
    vals = np.stack([f(x) for x in cand])
    best = np.argmin(vals, axis=0)
    return np.take_along_axis(cand, best[None], 0)[0]


def point_objective(M, x, a, nu, eta, p):
    return 0.5 * M.dist(x, p) ** 2 + eta / nu * M.dist(a, p) ** nu


def pair_objective(M, x0, x1, nu, eta, p0, p1):
    return 0.5 * (M.dist(x0, p0) ** 2 + M.dist(x1, p1) ** 2) + eta / nu * M.dist(p0, p1) ** nu


def brute_prox_point(M, x, a, nu, eta):
    """Minimize along the geodesic from x to a (where the minimizer lies)."""
    t = golden_section(lambda t: point_objective(M, x, a, nu, eta, M.geodesic(x, a, t)), 0.0 * M.dist(x, a), 1.0 + 0 * M.dist(x, a))
    return M.geodesic(x, a, t)


def brute_prox_pair(M, x0, x1, nu, eta):
    """Minimize over symmetric pairs (gamma(s), gamma(1 - s)), s in [0, 1/2]."""
    z = 0.0 * M.dist(x0, x1)

    def f(s):
        return pair_objective(M, x0, x1, nu, eta, M.geodesic(x0, x1, s), M.geodesic(x0, x1, 1.0 - s))

    s = golden_section(f, z, z + 0.5)
    return M.geodesic(x0, x1, s), M.geodesic(x0, x1, 1.0 - s)


# ---------------------------------------------------------------------------
# flat ROF reference


def rof_pairs(n, m):
    """Groups of (p, q) flat index pairs: vertical/horizontal x even/odd start."""
    groups = []
    for axis in (0, 1):
        for parity in (0, 1):
            g = []
            for i in range(n):
                for j in range(m):
                    if axis == 0 and i % 2 == parity and i + 1 < n:
                        g.append((i * m + j, (i + 1) * m + j))
                    if axis == 1 and j % 2 == parity and j + 1 < m:
                        g.append((i * m + j, i * m + j + 1))
            groups.append(g)
    return groups


def flat_pdra(f, alpha, eta, lam, iters, known=None):
    """Plain-loop parallel DR for the scalar ROF model in R.

    Returns the list of iterates x^(1), ..., x^(iters) (mean of the copies).
    """
    f = np.asarray(f, dtype=float)
    n, m = f.shape
    fv = f.reshape(-1)
    P = n * m
    known = np.ones(P, bool) if known is None else np.asarray(known, bool).reshape(-1)
    groups = rof_pairs(n, m)
    K = 5
    t = [list(fv) for _ in range(K)]
    out = []
    for _ in range(iters):
        mean = [sum(t[k][p] for k in range(K)) / K for p in range(P)]
        rd = [[2 * mean[p] - t[k][p] for p in range(P)] for k in range(K)]
        s = [row[:] for row in rd]
        for p in range(P):
            if known[p]:
                prox = (rd[0][p] + eta * fv[p]) / (1 + eta)
                s[0][p] = 2 * prox - rd[0][p]
        for k, g in enumerate(groups, start=1):
            for p, q in g:
                a, b = rd[k][p], rd[k][q]
                diff = b - a
                shift = min(eta * alpha, abs(diff) / 2) * np.sign(diff)
                s[k][p] = 2 * (a + shift) - a
                s[k][q] = 2 * (b - shift) - b
        t = [[(1 - lam) * t[k][p] + lam * s[k][p] for p in range(P)] for k in range(K)]
        out.append(np.array([sum(t[k][p] for k in range(K)) / K for p in range(P)]).reshape(n, m))
    return out


def direct_functional(M, f, u, alpha, known=None):
    """E(u) by explicit loops over pixels and neighbours."""
    n, m = f.shape[:2]
    known = np.ones((n, m), bool) if known is None else known
    e = 0.0
    for i in range(n):
        for j in range(m):
            if known[i, j]:
                e += 0.5 * float(M.dist(f[i, j], u[i, j])) ** 2
            if i + 1 < n:
                e += alpha * float(M.dist(u[i, j], u[i + 1, j]))
            if j + 1 < m:
                e += alpha * float(M.dist(u[i, j], u[i, j + 1]))
    return e
