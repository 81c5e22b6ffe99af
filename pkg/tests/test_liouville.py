from fractions import Fraction

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from vortexlab.catalog import EquationSpec
from vortexlab.liouville import (DivergenceError, Divisor, IntegrabilityError, PoleError,
                                 RationalMap, closed_form, laplace_solution,
                                 ramification_divisor, set_c2_zero_bradlow, singular_background)
from vortexlab.surface import SurfaceChart

x, y = sp.symbols("x y", real=True)
Z = x + sp.I * y


def sympy_residual(coeffs, n, f_expr, pts):
    """Symbolic -lap u - Omega0 P(e^{2u}) for the order-n closed form (oracle)."""
    C0, C = coeffs[0], coeffs[n]
    fz = f_expr(Z)
    df = sp.diff(f_expr(sp.Symbol("w")), sp.Symbol("w")).subs(sp.Symbol("w"), Z)
    abs2 = lambda e: sp.expand(e * sp.conjugate(e))
    A = 1 + n * C0 * (x**2 + y**2)
    B = 1 + n * C * abs2(fz)
    # A, B > 0 at the sample points, so the logs split without branch issues
    u = (2 * sp.log(A) + sp.log(abs2(df)) - 2 * sp.log(B)) / (2 * n)
    phisq = sp.exp(2 * u)
    lap = sp.diff(u, x, 2) + sp.diff(u, y, 2)
    om0 = 4 / (1 + n * C0 * (x**2 + y**2)) ** 2
    P = -C0 + sum(c * phisq**k for k, c in enumerate(coeffs) if k > 0 and c)
    res = sp.lambdify((x, y), -lap - om0 * P, "numpy")
    return np.array([complex(res(p.real, p.imag)) for p in pts])


CASES = [
    ((-1, -1, 0), 1, "z^2", lambda w: w**2),
    ((1, 1, 0), 1, "z^3", lambda w: w**3),
    ((0, 1, 0), 1, "z^3-3z", lambda w: w**3 - 3 * w),
    ((1, 0, 1), 2, "z^3", lambda w: w**3),
    ((-1, 0, 1), 2, "z^2", lambda w: w**2),
    ((0, 0, 1), 2, "z^3-3z", lambda w: w**3 - 3 * w),
]


@pytest.mark.parametrize("coeffs,n,text,fexpr", CASES)
def test_closed_form_solves_pde_symbolically(coeffs, n, text, fexpr):
    sol = closed_form(EquationSpec.of(*coeffs), text)
    assert sol.order == n
    pts = np.array([0.3 + 0.1j, -0.2 + 0.4j, 0.15 - 0.35j])
    res = sympy_residual(coeffs, n, fexpr, pts)
    assert np.max(np.abs(res)) < 1e-8


@pytest.mark.parametrize("coeffs,n,text,fexpr", CASES)
def test_jet_matches_sympy(coeffs, n, text, fexpr):
    sol = closed_form(EquationSpec.of(*coeffs), text)
    C0, C = coeffs[0], coeffs[n]
    abs2 = lambda e: sp.expand(e * sp.conjugate(e))
    w = sp.Symbol("w")
    df = sp.diff(fexpr(w), w).subs(w, Z)
    u = sp.log((1 + n * C0 * (x**2 + y**2)) ** 2 * abs2(df) / (1 + n * C * abs2(fexpr(Z))) ** 2) / (2 * n)
    funcs = [sp.lambdify((x, y), e, "numpy") for e in
             (u, sp.diff(u, x), sp.diff(u, y), sp.diff(u, x, 2) + sp.diff(u, y, 2))]
    z = 0.25 + 0.2j
    got = sol.u_jet(np.array([z]))
    for g, fn in zip(got, funcs):
        assert abs(g[0] - complex(fn(z.real, z.imag)).real) < 1e-10


def test_curvature_pairing_enforced():
    with pytest.raises(IntegrabilityError, match="K0"):
        closed_form(EquationSpec.of(-1, -1), "z^2", SurfaceChart(0.0))
    with pytest.raises(IntegrabilityError):
        closed_form(EquationSpec.of(0, 1, -1), "z^2")
    sol = closed_form(EquationSpec.of(1, 0, 1), "z^2")
    assert sol.chart.curvature == 2.0


def test_divisor_polynomial_matches_derivative_roots():
    div = ramification_divisor(RationalMap.parse("z^3 - 3z"))
    pts = sorted((z.real, n) for z, n in div.points)
    assert [n for _, n in pts] == [1, 1]
    np.testing.assert_allclose([x for x, _ in pts], [-1.0, 1.0], atol=1e-12)
    div = ramification_divisor(RationalMap.parse("z^4"))
    assert div.points == ((0j, 3),)


def test_divisor_with_infinity():
    div = ramification_divisor(RationalMap.parse("z^2"), include_infinity=True)
    assert div.infinity == 1 and div.degree == 2
    div = ramification_divisor(RationalMap.parse("(z^2+1)/(z-2)"), include_infinity=True)
    assert div.degree == 2


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=4))
@settings(max_examples=60, deadline=None)
def test_riemann_hurwitz_random_polynomials(roots):
    # p(z) = prod (z - r_i) * z, degree >= 2; total ramification must be 2d - 2
    coeffs = np.polynomial.polynomial.polyfromroots(list(roots) + [0.5])
    f = RationalMap(coeffs)
    div = ramification_divisor(f, include_infinity=True)
    assert div.degree == 2 * f.degree - 2


@given(st.floats(0, 2 * np.pi))
@settings(max_examples=30, deadline=None)
def test_phase_rotation_invariance(theta):
    eq = EquationSpec.of(-1, -1)
    a = closed_form(eq, RationalMap.parse("z^2 - 0.1"))
    b = closed_form(eq, RationalMap.parse("z^2 - 0.1").rotated(theta))
    z = np.array([0.3 + 0.2j, -0.5j, 0.7])
    np.testing.assert_allclose(a.higgs_squared(z), b.higgs_squared(z), rtol=1e-12)


def test_vortex_divisor_fractional():
    sol = closed_form(EquationSpec.of(1, 0, 1), "z^2")
    assert sol.vortex_divisor.points[0][1] == Fraction(1, 2)


def test_zero_set_simple_vortex():
    sol = closed_form(EquationSpec.of(-1, -1), "z^2")
    z = np.array([1e-7, 1e-7j, -1e-7])
    assert np.all(sol.higgs_squared(z) < 1e-10)
    assert sol.higgs_squared(0.0) == 0.0


def test_known_values():
    assert closed_form(EquationSpec.of(0, 1, 0), "z^2").higgs_squared(1.0) == pytest.approx(1.0)
    assert set_c2_zero_bradlow("z^2").higgs_squared(0.5) == pytest.approx(0.5625)


def test_pole_error():
    sol = closed_form(EquationSpec.of(-1, -1), "2*z")
    with pytest.raises(PoleError):
        sol.higgs_squared(0.5)


def test_laplace_solution():
    u = laplace_solution([0.0, 1.0], [1.0, 2.0])
    assert u(np.array([2.0]))[0] == pytest.approx(np.log(2.0))
    with pytest.raises(ValueError):
        laplace_solution([0.0], [-1.0])


def test_divisor_validation():
    with pytest.raises(ValueError):
        Divisor(((0j, 0),))
    with pytest.raises(ValueError):
        Divisor(((0j, 1), (0j, 1)))


def test_map_serialisation_roundtrip():
    f = RationalMap.parse("(z^2+1)/(z-(0.5+1i))")
    g = RationalMap.from_dict(f.to_dict())
    z = np.array([0.1, 2j])
    np.testing.assert_allclose(f(z), g(z))


def test_constant_map_rejected():
    with pytest.raises(ValueError):
        RationalMap.parse("3")


def test_singular_background_diverges_and_solves():
    bg = singular_background("z^2", 1.0, -1.0)
    with pytest.raises(DivergenceError):
        bg.omega0(0.0)
    assert bg.omega0(1e-3, strict=False) > 1e5
    # symbolic oracle for -lap u = Omega0 (C2 e^{2u} + C4 e^{4u})
    abs2 = lambda e: sp.expand(e * sp.conjugate(e))
    A = 1 - (x**2 + y**2)
    B = 1 - abs2(Z**2)
    phisq = A**2 * abs2(2 * Z) / B**2
    om0 = 4 * B**2 / (A**4 * abs2(2 * Z))
    u = sp.log(phisq) / 2
    res = sp.lambdify((x, y), -(sp.diff(u, x, 2) + sp.diff(u, y, 2)) - om0 * (phisq - phisq**2))
    for z in (0.3 + 0.2j, -0.4 + 0.1j):
        assert abs(res(z.real, z.imag)) < 1e-8
    with pytest.raises(IntegrabilityError):
        singular_background("z^2", -1.0, -1.0)


@pytest.mark.parametrize("coeffs,text,zk,N", [
    ((-1, -1), "z^3-0.3*z", np.sqrt(0.1), 1.0),
    ((0, 1), "z^3", 0.0, 2.0),
    ((1, 0, 1), "z^2", 0.0, 0.5),
])
def test_local_model_slope(coeffs, text, zk, N):
    sol = closed_form(EquationSpec.of(*coeffs), text)
    r = np.geomspace(1e-5, 1e-3, 6)
    vals = [np.mean(sol.higgs_squared(zk + ri * np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False))))
            for ri in r]
    slope = np.polyfit(np.log(r), np.log(vals), 1)[0]
    assert abs(slope - 2 * N) < 0.01
