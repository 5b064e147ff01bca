import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import BACKENDS
from hadamard_dr.manifolds import (
    KINDS,
    SPD,
    Euclidean,
    Hyperbolic,
    ManifoldError,
    backend_from_ambient,
    get_backend,
    product_distance,
    validation,
)

seeds = st.integers(0, 2**32 - 1)
# beyond this, extended geodesics leave the float64-representable range of P(3)
scales = st.floats(0.05, 1.5)
ALL = {"E2": lambda: Euclidean(2), **BACKENDS}


def rel(M, x):
    return 1.0 + float(np.abs(x).max())


def conditioning(M, *pts):
    """Rough amplification of float64 rounding for distances among ``pts``.

    Hyperboloid coordinates grow like exp(d) from the origin; SPD distances
    lose relative accuracy proportional to the condition number.
    """
    if isinstance(M, SPD):
        return max(float(np.linalg.cond(p).max()) for p in pts)
    return max(rel(M, p) for p in pts) ** 2


# -- fixed examples -------------------------------------------------------


def test_euclidean_examples():
    E = Euclidean(2)
    x, y = np.zeros(2), np.array([3.0, 4.0])
    assert E.dist(x, y) == pytest.approx(5.0)
    assert E.dist(y, y) == 0.0
    assert np.allclose(E.exp(x, y), y)
    assert np.allclose(E.log(x, y), y - x)
    assert np.allclose(E.geodesic(x, y, 0.25), [0.75, 1.0])
    assert np.allclose(E.reflect(y, x), 2 * y - x)


def test_hyperbolic_exp_example():
    H = Hyperbolic(2)
    x = np.array([0.0, 0.0, 1.0])
    y = H.exp(x, np.array([1.0, 0.0, 0.0]))
    assert np.allclose(y, [np.sinh(1.0), 0.0, np.cosh(1.0)], atol=1e-14)
    assert H.dist(x, y) == pytest.approx(1.0, abs=1e-14)


def test_product_distance_examples():
    E = Euclidean(1)
    x = np.zeros((2, 1))
    y = np.array([[3.0], [4.0]])
    assert product_distance(E, x, y) == pytest.approx(5.0)
    assert product_distance(E, y, y) == 0.0
    with pytest.raises(ManifoldError):
        product_distance(E, x, np.zeros((3, 1)))


def test_zero_tangent_and_identity_cases(any_manifold):
    _, M = any_manifold
    rng = np.random.default_rng(0)
    x = M.random_point(rng, (5,))
    assert np.allclose(M.exp(x, M.zero_tangent(x)), x)
    assert np.abs(M.log(x, x)).max() < 1e-12
    assert np.abs(M.dist(x, x)).max() < 1e-7
    assert np.allclose(M.reflect(x, x), x)
    y = M.random_point(rng, (5,))
    assert np.allclose(M.geodesic(x, y, 0.0), x)
    assert np.allclose(M.geodesic(x, y, 1.0), y, atol=1e-10 * rel(M, y))


def test_shape_errors():
    H = Hyperbolic(2)
    with pytest.raises(ManifoldError):
        H.dist(np.zeros(2), np.zeros(2))
    with pytest.raises(ManifoldError):
        SPD(2).dist(np.eye(3), np.eye(3))


def test_validation_rejects_off_manifold_points():
    with pytest.raises(ManifoldError):
        Hyperbolic(2).dist(np.array([0.0, 0.0, 2.0]), np.array([0.0, 0.0, 1.0]))
    with pytest.raises(ManifoldError):
        SPD(2).dist(np.diag([1.0, -1.0]), np.eye(2))
    with validation(False):
        SPD(2).dist(np.diag([1.0, 2.0]), np.eye(2))


def test_backend_registry():
    for kind in KINDS:
        b = get_backend(kind)
        assert b.kind == kind
        assert backend_from_ambient(kind, b.descriptor.ambient_dim).kind == kind
    assert get_backend("spd", 3).descriptor.intrinsic_dim == 6
    assert get_backend("hyperbolic", 3).descriptor.ambient_dim == 4
    with pytest.raises(ManifoldError):
        get_backend("sphere")
    with pytest.raises(ManifoldError):
        backend_from_ambient("spd", 5)


# -- properties -----------------------------------------------------------


@pytest.mark.parametrize("name", list(ALL))
@given(seed=seeds, scale=scales)
def test_exp_log_round_trip(name, seed, scale):
    M = ALL[name]()
    rng = np.random.default_rng(seed)
    x, y = M.random_point(rng, (8,), scale), M.random_point(rng, (8,), scale)
    v = M.log(x, y)
    assert np.abs(M.exp(x, v) - y).max() <= 1e-9 * rel(M, y)
    assert np.allclose(M.norm(x, v), M.dist(x, y), rtol=1e-9, atol=1e-9)


@pytest.mark.parametrize("name", list(ALL))
@given(seed=seeds, scale=scales, t=st.floats(-1.0, 2.0))
def test_geodesic_distance_scaling(name, seed, scale, t):
    M = ALL[name]()
    rng = np.random.default_rng(seed)
    x, y = M.random_point(rng, (8,), scale), M.random_point(rng, (8,), scale)
    g = M.geodesic(x, y, t)
    d = M.dist(x, y)
    # far along an extended geodesic the coordinates grow like exp(d) and
    # carry proportionally larger absolute rounding error
    tol = 1e-12 * conditioning(M, x, y, g)
    assert np.all(np.abs(M.dist(x, g) - abs(t) * d) <= tol)
    assert np.all(np.abs(M.dist(y, g) - abs(1 - t) * d) <= tol)


@pytest.mark.parametrize("name", list(ALL))
@given(seed=seeds, scale=scales)
def test_distance_symmetric_and_triangle(name, seed, scale):
    M = ALL[name]()
    rng = np.random.default_rng(seed)
    x, y, z = (M.random_point(rng, (8,), scale) for _ in range(3))
    assert np.allclose(M.dist(x, y), M.dist(y, x), rtol=1e-10, atol=1e-10)
    assert np.all(M.dist(x, z) <= M.dist(x, y) + M.dist(y, z) + 1e-9)


@pytest.mark.parametrize("name", list(ALL))
@given(seed=seeds, scale=scales)
def test_reflection_involutive_isometry(name, seed, scale):
    M = ALL[name]()
    rng = np.random.default_rng(seed)
    p, x, y = (M.random_point(rng, (8,), scale) for _ in range(3))
    rx, ry = M.reflect(p, x), M.reflect(p, y)
    tol = 1e-12 * conditioning(M, p, x, y, rx, ry)
    assert np.abs(M.reflect(p, rx) - x).max() <= tol * rel(M, x)
    assert np.all(np.abs(M.dist(p, rx) - M.dist(p, x)) <= tol)
    assert np.all(np.abs(M.dist(rx, ry) - M.dist(x, y)) <= tol)


@pytest.mark.parametrize("name", list(ALL))
@given(seed=seeds)
def test_cat0_four_point(name, seed):
    M = ALL[name]()
    rng = np.random.default_rng(seed)
    x, y, v, w = (M.random_point(rng, (8,)) for _ in range(4))
    d = M.dist
    lhs = d(x, v) ** 2 + d(y, w) ** 2
    rhs = d(x, w) ** 2 + d(y, v) ** 2 + 2 * d(x, y) * d(v, w)
    assert np.all(lhs <= rhs + 1e-9 * (1 + rhs))


def test_tangent_noise_statistics(backend):
    """E d(x, exp_x v)^2 = std^2 * intrinsic dimension for isotropic v."""
    _, M = backend
    rng = np.random.default_rng(31)
    x = M.random_point(rng, (4000,))
    v = M.random_tangent(rng, x, 0.3)
    est = np.mean(M.dist(x, M.exp(x, v)) ** 2)
    want = 0.09 * M.descriptor.intrinsic_dim
    assert abs(est - want) <= 0.05 * want
