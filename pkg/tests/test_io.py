import filecmp
import json

import numpy as np
import pytest

from vortexlab.catalog import EquationSpec
from vortexlab.diagnostics import solution_points
from vortexlab.io import (ExportError, export_field, export_profile, read_field, read_profile,
                          read_sidecar, sidecar_path)
from vortexlab.liouville import closed_form
from vortexlab.schemas import validate
from vortexlab.solver import RadialBackground, RadialProblem, solve_radial
from vortexlab.surface import SurfaceChart


@pytest.fixture
def taubes_field():
    sol = closed_form(EquationSpec.of(-1, -1), "z^2")
    return sol, sol.u_field(solution_points(sol, 0.1))


def test_field_roundtrip(tmp_path, taubes_field):
    sol, u = taubes_field
    path = tmp_path / "u.csv"
    export_field(u, path, {"equation": sol.equation.to_dict()})
    back = read_field(path)
    assert np.array_equal(back.points, u.points)
    assert np.array_equal(back.values[~u.flags], u.values[~u.flags])
    assert np.array_equal(back.flags, u.flags)
    side = read_sidecar(path)
    assert side["chart"]["K0"] == -1.0
    validate(side["equation"], "EquationSpec")
    assert path.read_text().splitlines()[0] == "x,y,value,flag"


def test_export_is_byte_identical(tmp_path, taubes_field):
    _, u = taubes_field
    export_field(u, tmp_path / "a.csv")
    export_field(u, tmp_path / "b.csv")
    assert filecmp.cmp(tmp_path / "a.csv", tmp_path / "b.csv", shallow=False)
    assert filecmp.cmp(sidecar_path(tmp_path / "a.csv"), sidecar_path(tmp_path / "b.csv"), shallow=False)
    assert b"\r\n" not in (tmp_path / "a.csv").read_bytes()


def test_profile_roundtrip(tmp_path):
    prob = RadialProblem(EquationSpec.of(-1, -1), 1, RadialBackground.from_chart(SurfaceChart(-1.0)), 0.9)
    rep = solve_radial(prob, n_points=200)
    path = tmp_path / "p.csv"
    export_profile(rep, path)
    cols = read_profile(path)
    assert np.array_equal(cols["r"], rep.r)
    assert np.array_equal(cols["u"], rep.u)
    side = read_sidecar(path)
    validate(side, "SolveReport")
    assert "wall_time" not in side


def test_export_errors(tmp_path, taubes_field):
    _, u = taubes_field
    with pytest.raises(ExportError):
        export_field(u, tmp_path / "missing" / "u.csv")


def test_schema_rejects_bad_report():
    import jsonschema
    with pytest.raises(jsonschema.ValidationError):
        validate({"converged": "yes"}, "SolveReport")
