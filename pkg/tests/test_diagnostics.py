import math

import numpy as np
import pytest

from vortexlab.catalog import EquationSpec, enumerate_equations, is_integrable
from vortexlab.diagnostics import (Disc, DiscSequence, Sphere, bradlow_check, closed_form_balance,
                                   cone_angle, curvature_identity_check, default_map,
                                   expected_cone_angle, flux_integral, integrate_density,
                                   radial_baptista_balance, solution_points, verify_solution,
                                   volumes)
from vortexlab.liouville import closed_form
from vortexlab.solver import RadialBackground, RadialProblem, solve_radial
from vortexlab.surface import DomainError, SurfaceChart, sample_field, square_points

POPOV = EquationSpec.of(1, 1)
TAUBES = EquationSpec.of(-1, -1)


@pytest.mark.parametrize("K0", [0.5, 1.0, 2.0])
def test_sphere_area(K0):
    # round sphere of curvature K0 has area 4 pi / K0
    chart = SurfaceChart(K0)
    assert integrate_density(chart.omega, chart, Sphere()) == pytest.approx(4 * np.pi / K0, rel=1e-9)


def test_disc_area_flat():
    chart = SurfaceChart(0.0)
    one = lambda z: np.ones(np.shape(z))
    assert integrate_density(one, chart, Disc(1.0)) == pytest.approx(np.pi, rel=1e-10)
    assert integrate_density(one, chart, Disc(0.5, 0.3 + 0.1j)) == pytest.approx(np.pi / 4, rel=1e-10)


def test_hyperbolic_disc_area():
    # area inside coordinate radius R on K0 = -1: 4 pi R^2 / (1 - R^2)
    chart = SurfaceChart(-1.0)
    R = 0.8
    assert integrate_density(chart.omega, chart, Disc(R)) == pytest.approx(4 * np.pi * R**2 / (1 - R**2), rel=1e-9)


def test_popov_volumes():
    sol = closed_form(POPOV, "z^2")
    vols = volumes(sol, domain=Sphere())
    assert vols[0] == pytest.approx(4 * np.pi, rel=1e-6)
    assert vols[1] == pytest.approx(8 * np.pi, rel=1e-6)
    rep = bradlow_check(sol, Sphere())
    assert rep.vortex_number == 2
    assert abs(rep.relation_residual) < 1e-3 * 4 * np.pi
    assert rep.flux == pytest.approx(2.0, rel=1e-6)


def test_taubes_limit_relation():
    sol = closed_form(TAUBES, "z^2")
    rep = bradlow_check(sol, DiscSequence((0.99, 0.995, 0.999)))
    assert abs(rep.relation_residual.estimate) < 1e-2 * 2 * np.pi
    assert rep.relation_residual.converged
    assert "upper bound" in rep.bound


def test_flux_on_disc():
    sol = closed_form(TAUBES, "z^2")
    assert flux_integral(TAUBES, sol, sol.chart, Disc(0.999)) == pytest.approx(1.0, rel=2e-3)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_cone_angle_synthetic(a):
    # Omega = |z|^{2a} is an exact cone of angle 2 pi (a + 1)
    rep = cone_angle(lambda z: np.abs(z) ** (2 * a))
    assert rep.angle == pytest.approx(2 * np.pi * (a + 1), rel=1e-6)
    assert not rep.low_confidence


def test_cone_angle_closed_forms():
    assert cone_angle(closed_form(TAUBES, "z^2"), 0.0).angle == pytest.approx(4 * np.pi, rel=1e-2)
    sol = closed_form(EquationSpec.of(-1, 0, 1), "z^3")
    assert cone_angle(sol, 0.0).angle == pytest.approx(6 * np.pi, rel=1e-2)
    assert expected_cone_angle(2, 1) == pytest.approx(6 * np.pi)


def test_cone_centre_outside_chart():
    sol = closed_form(TAUBES, "z^3 - 3*z")
    with pytest.raises(DomainError):
        cone_angle(sol, 1.0)


def test_curvature_identity():
    pts = square_points(0.0, 0.5, 0.1)
    u = sample_field(lambda z: 0.2 * np.cos(z.real) + 0.1 * z.imag, pts, SurfaceChart(0.0))
    assert curvature_identity_check(u, mode="stencil")["relative"] < 1e-6


def test_closed_form_balance():
    sol = closed_form(EquationSpec.of(-1, 0, 1), "z^3")
    bal = closed_form_balance(sol, solution_points(sol, 0.1))
    assert bal.balance_sup < 1e-8 and bal.lhs_sup < 1e-8


def test_radial_balance_non_integrable():
    prob = RadialProblem(EquationSpec.of(0, 1, -1), 1, RadialBackground.from_chart(SurfaceChart(0.0)), 5.0)
    rep = solve_radial(prob)
    bal = radial_baptista_balance(rep, 1)
    assert bal.balance_relative < 1e-6
    assert bal.difference_sup > 1e-3  # the extra C4 term is needed


def test_default_maps():
    assert default_map(TAUBES) == "z^2"
    assert default_map(EquationSpec.of(1, 0, 1)) == "z^3"
    assert default_map(EquationSpec.of(-1, 0, -1)) == "2*z^3"
    with pytest.raises(ValueError):
        default_map(EquationSpec.of(0, 1, -1))


def test_verify_all_table2_rows():
    for spec, _ in enumerate_equations(2):
        if not is_integrable(spec):
            continue
        checks = verify_solution(closed_form(spec, default_map(spec)))
        assert all(c.passed is not False for c in checks), (spec.coefficients, [c.to_dict() for c in checks])
