import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigmakflow import BallField2D, ConvexityError, GridField2D, RadialField, SpacelikeError, SpeedParams
from sigmakflow.errors import DomainError
from sigmakflow.geometry import (
    condition_a_check, dual_curvature_matrix, jacobi_eigvalsh, klein_scalars, primal_curvature,
    radial_curvature_closed_form, require_convex_dual,
)
from sigmakflow.legendre import legendre_transform

P21 = SpeedParams(2, 1, 1)


def test_radial_hyperboloid_curvature():
    u = RadialField.from_function(lambda r: np.sqrt(2 + r * r), 5.0, 1000)
    cd = primal_curvature(u, P21)
    inner = slice(0, -1)
    assert np.max(np.abs(cd.kappa[inner] - 1 / np.sqrt(2))) < 1e-4
    assert np.max(np.abs(cd.support[inner] - np.sqrt(2))) < 1e-4


def test_grid_hyperboloid_curvature():
    u = GridField2D.from_function(lambda x, y: np.sqrt(2 + x * x + y * y), 2.0, 1 / 32)
    cd = primal_curvature(u, P21)
    k = cd.kappa[2:-2, 2:-2]
    assert np.max(np.abs(k - 1 / np.sqrt(2))) < 2e-3


def test_flat_graph():
    u = RadialField(3.0, np.full(31, 2.5))
    cd = primal_curvature(u, P21)
    assert np.allclose(cd.kappa, 0) and np.allclose(cd.w, 1) and np.allclose(cd.support, 2.5)


def test_shifted_hyperboloid_pole():
    kr, ka, w, s = radial_curvature_closed_form(3.0, 0.0, 0.5, 0.0, 2)
    assert (kr, ka, w, s) == (0.5, 0.5, 1.0, 3.0)


@pytest.mark.parametrize("a", [0.5, 1.0, np.sqrt(2), 3.0])
def test_closed_form_hyperboloid(a):
    r = np.linspace(0, 7, 50)
    U = np.sqrt(a * a + r * r)
    kr, ka, w, s = radial_curvature_closed_form(U, r / U, a * a / U**3, r, 3)
    assert np.allclose(kr, 1 / a, rtol=1e-13) and np.allclose(ka, 1 / a, rtol=1e-13)
    assert np.allclose(s, a, rtol=1e-13)


def test_closed_form_cone_and_pole():
    kr, ka, w, s = radial_curvature_closed_form(1.6, 0.6, 0.0, 1.0, 2)
    assert w == pytest.approx(0.8) and kr == 0 and ka == pytest.approx(0.75) and s == pytest.approx(1.25)
    assert radial_curvature_closed_form(1.0, 0.0, 0.3, 0.0, 2)[:2] == (0.3, 0.3)
    with pytest.raises(SpacelikeError):
        radial_curvature_closed_form(1.0, 1.0, 0.0, 1.0, 2)


def test_spacelike_guard_reports_point():
    u = RadialField.from_function(lambda r: 0.9999999 * r, 1.0, 10)
    with pytest.raises(SpacelikeError) as err:
        primal_curvature(u, P21)
    assert err.value.point is not None


def test_dual_curvature_hyperboloid_ball():
    a = 1.3
    f = BallField2D.from_function(lambda x, y: -a * np.sqrt(1 - x * x - y * y) - 0.7, 0.8, 1 / 64)
    dc = dual_curvature_matrix(f, P21)
    lam = dc.lam[f.interior]
    assert np.max(np.abs(lam - a)) < 5e-3
    # brute force eigen-decomposition of the assembled matrix
    m = dc.matrix[f.interior]
    assert np.allclose(np.sort(np.linalg.eigvalsh(m), axis=1), np.sort(lam, axis=1), atol=1e-12)


def test_dual_curvature_center_is_hessian():
    f = BallField2D.from_function(lambda x, y: x * x + 2 * y * y + x * y, 0.5, 1 / 16)
    dc = dual_curvature_matrix(f, P21)
    c = np.argwhere(f.interior & (f.rho == 0))[0]
    assert np.allclose(dc.matrix[tuple(c)], [[2, 1], [1, 4]], atol=1e-10)


def test_dual_curvature_radial():
    a = 0.9
    f = RadialField.from_function(lambda s: -a * np.sqrt(1 - s * s), 0.9, 400)
    dc = dual_curvature_matrix(f, SpeedParams(3, 2))
    assert np.max(np.abs(dc.lam[:-1] - a)) < 2e-4
    assert dc.lam.shape == (401, 3)


def test_require_convex_dual():
    f = BallField2D.from_function(lambda x, y: -(x * x) + y * y, 0.5, 1 / 16)
    with pytest.raises(ConvexityError) as err:
        require_convex_dual(dual_curvature_matrix(f, P21), f.interior)
    assert err.value.point is not None


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(200, 4, 4))
    m = m + np.swapaxes(m, 1, 2)
    assert np.allclose(jacobi_eigvalsh(m), np.sort(np.linalg.eigvalsh(m), axis=1)[:, ::-1], atol=1e-10)


def test_klein_scalars():
    f = RadialField.from_function(lambda s: -1.7 * np.sqrt(1 - s * s), 0.9, 90)
    v, x = klein_scalars(f)
    assert np.allclose(v, -1.7) and x[0] == 1.0
    with pytest.raises(DomainError):
        klein_scalars(1.0)


def test_condition_a_examples():
    p = P21
    rep = condition_a_check(RadialField.from_function(lambda r: 1 + np.sqrt(4 + r * r), 20.0, 2000), p, 1.0)
    assert rep.holds and rep.c0 == pytest.approx(1, abs=1e-3) and rep.big_c == pytest.approx(1 / 3, abs=1e-3)
    rep = condition_a_check(RadialField.from_function(lambda r: np.sqrt(1 + r * r), 20.0, 2000), p, 1.0)
    assert not rep.holds and rep.big_c > 1
    rep = condition_a_check(RadialField.from_function(lambda r: 0.99 * r, 20.0, 2000), p, 1.0)
    assert not rep.strictly_convex and not rep.holds


@settings(max_examples=25, deadline=None)
@given(st.floats(0.6, 2.5), st.floats(-0.3, 0.3))
def test_eigenvalue_reciprocity(a, eps):
    # convex radial perturbation of a hyperboloid; dual radii at xi = Du(x) are 1/kappa(x)
    fn = lambda r: np.sqrt(a * a + r * r) + eps * a * np.exp(-r * r) * 0.2
    R, N = 8.0, 1600
    u = RadialField.from_function(fn, R, N)
    cd = primal_curvature(u, P21)
    if np.any(cd.kappa[:-1] <= 0.05):
        return
    d = legendre_transform(u, r=0.7, N=140)
    dc = dual_curvature_matrix(d, P21)
    slope = np.gradient(u.values, u.h)
    for j in (10, 60, 120):
        xi = d.r[j]
        x = np.interp(xi, slope[:-1], u.r[:-1])
        kap = np.sort([np.interp(x, u.r[:-1], cd.kappa[:-1, i]) for i in range(2)])
        lam = np.sort(dc.lam[j])[::-1]
        assert np.allclose(lam * kap, 1, atol=5e-3)
