import numpy as np
import pytest
import sympy as sp

from vortexlab.surface import (DomainError, GridMismatchError, SurfaceChart, baptista_factor,
                               chart_field, conformal_factor, flat_laplacian, gauss_curvature,
                               grid_field, laplace_beltrami, polar_points, sample_field,
                               square_points)

x, y = sp.symbols("x y", real=True)


def sympy_field(expr):
    """Callable for expr(x, y) and its symbolic flat Laplacian (the oracle)."""
    f = sp.lambdify((x, y), expr, "numpy")
    lap = sp.lambdify((x, y), sp.diff(expr, x, 2) + sp.diff(expr, y, 2), "numpy")
    return (lambda z: f(z.real, z.imag) + 0 * z.real), (lambda z: lap(z.real, z.imag) + 0 * z.real)


def test_chart_basics():
    assert SurfaceChart(-1.0).kind == "disc"
    assert SurfaceChart(0.0).kind == "plane"
    assert SurfaceChart(1.0).kind == "sphere-chart"
    assert SurfaceChart(-4.0).valid_radius == pytest.approx(0.5)
    assert np.isinf(SurfaceChart(2.0).valid_radius)
    assert conformal_factor(SurfaceChart(1.0), 1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        conformal_factor(SurfaceChart(-1.0), 1.2)
    with pytest.raises(ValueError):
        SurfaceChart(0.0, "torus")


@pytest.mark.parametrize("K0", [-1.0, 0.0, 0.5])
def test_log_omega_jet_matches_sympy(K0):
    expr = sp.log(4) - 2 * sp.log(1 + K0 * (x**2 + y**2))
    z = np.array([0.1 + 0.2j, -0.3 + 0.05j, 0.4j])
    val, gx, gy, lap = SurfaceChart(K0).log_omega_jet(z)
    for got, sym in [(val, expr), (gx, sp.diff(expr, x)), (gy, sp.diff(expr, y)),
                     (lap, sp.diff(expr, x, 2) + sp.diff(expr, y, 2))]:
        want = sp.lambdify((x, y), sym, "numpy")(z.real, z.imag)
        np.testing.assert_allclose(got, want, rtol=1e-12, atol=1e-12)


def test_stencil_laplacian_against_sympy():
    f, lap = sympy_field(sp.sin(2 * x) * sp.exp(y) + x**3 * y)
    pts = square_points(0.1, 0.5, 0.1)
    errs = []
    for h in (2e-3, 1e-3):
        u = sample_field(f, pts, SurfaceChart(0.0), spacing=h)
        errs.append(np.max(np.abs(flat_laplacian(u, "stencil") - lap(pts))))
    assert errs[1] < 1e-5
    assert errs[0] / errs[1] > 3.5


def test_laplace_beltrami_sign_and_weight():
    # u = |z|^2 has flat Laplacian 4, so Delta_g u = -4 / Omega0
    chart = SurfaceChart(-1.0)
    pts = polar_points(0.0, [0.2, 0.5], 16)
    u = sample_field(lambda z: np.abs(z) ** 2, pts, chart)
    got = laplace_beltrami(chart, u, mode="stencil").values
    np.testing.assert_allclose(got, -4.0 / chart.omega(pts), rtol=1e-6)


@pytest.mark.parametrize("K0", [-1.0, 0.0, 2.0])
def test_chart_curvature_constant(K0):
    chart = SurfaceChart(K0)
    pts = square_points(0.0, 0.5, 0.1)
    u = sample_field(lambda z: 0 * z.real, pts, chart)
    om = chart_field(chart, u)
    for mode in ("exact", "stencil"):
        K = gauss_curvature(om, mode=mode)
        np.testing.assert_allclose(K.values[K.mask], K0, atol=1e-5)


def test_baptista_factor_zero_order_is_chart():
    chart = SurfaceChart(-1.0)
    pts = square_points(0.0, 0.5, 0.1)
    u = sample_field(lambda z: np.real(z), pts, chart)
    np.testing.assert_allclose(baptista_factor(chart, u, 0).values, chart.omega(pts))
    om = baptista_factor(chart, u, 2)
    np.testing.assert_allclose(om.values, chart.omega(pts) * np.exp(4 * pts.real))


def test_baptista_factor_rejects_bad_order():
    chart = SurfaceChart(0.0)
    u = sample_field(lambda z: 0 * z.real, square_points(0, 0.2, 0.1), chart)
    with pytest.raises(ValueError):
        baptista_factor(chart, u, -1)
    with pytest.raises(ValueError):
        baptista_factor(chart, u, 1.5)


def test_out_of_chart_sampling_rejected():
    with pytest.raises(DomainError):
        sample_field(lambda z: 0 * z.real, np.array([0.5, 1.5]), SurfaceChart(-1.0))


def test_grid_mismatch_and_spacing():
    chart = SurfaceChart(0.0)
    a = sample_field(lambda z: z.real, square_points(0, 0.2, 0.1), chart, spacing=1e-3)
    b = sample_field(lambda z: z.real, square_points(0, 0.2, 0.1), chart, spacing=2e-3)
    with pytest.raises(GridMismatchError):
        a + b
    with pytest.raises(GridMismatchError):
        laplace_beltrami(chart, a, stencil_spacing=2e-3)


def test_exclusion_flags():
    pts = square_points(0.0, 0.3, 0.01)
    u = sample_field(lambda z: np.log(np.abs(z) + 1e-300), pts, SurfaceChart(0.0),
                     exclusion=[0.0], exclusion_radius=0.05)
    assert np.all(u.flags[np.abs(pts) < 0.05])
    assert not np.any(u.flags[np.abs(pts) > 0.06])


def test_log_singularity_subtraction():
    # log|z| + x^2: stencil sees only the smooth part once the log is declared
    pts = polar_points(0.0, [0.01, 0.1], 8)
    u = sample_field(lambda z: np.log(np.abs(z)) + z.real**2, pts, SurfaceChart(0.0),
                     log_singularities=[(0.0, 1.0)])
    np.testing.assert_allclose(flat_laplacian(u, "stencil"), 2.0, atol=1e-5)


def test_grid_field_edges_flagged():
    xs = np.linspace(-1, 1, 21)
    X, Y = np.meshgrid(xs, xs)
    f = grid_field(X**2 + Y**2, xs, xs, SurfaceChart(0.0))
    assert f.flags[0].all() and f.flags[:, -1].all()
    np.testing.assert_allclose(flat_laplacian(f, "stencil")[f.mask], 4.0, atol=1e-9)
