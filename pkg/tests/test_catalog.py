import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortexlab.catalog import (ClassificationError, EquationSpec, catalog_rows, classify,
                               enumerate_equations, format_table, geometry_columns,
                               hilbert_function, integrable_order, normalize, type_count)


def brute_force_count(L):
    # independent oracle: count sign vectors with some positive flux sign, plus Laplace
    n = 1
    if L < 0:
        return n
    for p in itertools.product((-1, 0, 1), repeat=L + 1):
        flux = (-p[0],) + p[1:]
        if any(s > 0 for s in flux):
            n += 1
    return n


@pytest.mark.parametrize("L", range(-1, 6))
def test_counts_match_brute_force(L):
    assert len(enumerate_equations(L)) == hilbert_function(L) == brute_force_count(L)


def test_known_counts():
    assert [hilbert_function(L) for L in range(-1, 6)] == [1, 2, 6, 20, 66, 212, 666]
    assert [type_count(2, m) for m in range(4)] == [1, 3, 9, 7]


@pytest.mark.parametrize("L", range(0, 5))
def test_type_counts_sum(L):
    labels = [lab for _, lab in enumerate_equations(L)]
    for m in range(L + 2):
        assert sum(lab.type_class == m for lab in labels) == type_count(L, m)


def test_classify_names():
    assert classify(EquationSpec.from_name("taubes")).name == "Taubes"
    assert str(classify(EquationSpec.of(0, 1, -1, canonical=True))) == "II_24^+-"
    assert classify(EquationSpec.of(0, 1, -1)).name == "Chern-Simons"


def test_inadmissible_rejected():
    spec = EquationSpec.of(1, 0, -1)
    assert not spec.admissible
    with pytest.raises(ClassificationError, match="positive flux"):
        classify(spec)


def test_from_name_near_match():
    with pytest.raises(KeyError, match="taubes"):
        EquationSpec.from_name("taubs")
    with pytest.raises(ValueError):
        EquationSpec.from_name("chern-simons", L=1)


def test_integrable_subset_L2():
    integ = [s.coefficients for s, _ in enumerate_equations(2) if integrable_order(s)]
    assert len(integ) == 10
    assert all(c[1] == 0 or c[2] == 0 for c in integ)
    assert integrable_order(EquationSpec.of(0, 0, -1)) is None
    assert integrable_order(EquationSpec.of(-1, 0, -1)) == 2


def test_geometry_columns():
    assert geometry_columns(EquationSpec.of(1, 0, 1)) == {"M_0": "S^2", "M_2": "--", "M_4": "S^2"}
    assert geometry_columns(EquationSpec.of(-1, 0, 0)) == {"M_0": "H^2", "M_2": "R^2", "M_4": "R^2"}
    assert geometry_columns(EquationSpec.of(0, 1, -1)) is None


def test_vacuum_and_linearization():
    cs = EquationSpec.of(0, 1, -1)
    assert cs.vacuum_values() == [0.0]
    assert float(cs.dP_du(0.0)) == -2.0
    assert EquationSpec.of(0, 1, 0).vacuum_values() == []
    taubes = EquationSpec.of(-1, -1)
    assert taubes.P(1.0) == 0.0


@given(st.lists(st.floats(0.1, 10) | st.floats(-10, -0.1), min_size=2, max_size=4))
@settings(max_examples=50, deadline=None)
def test_normalize_roundtrip(raw):
    spec = EquationSpec(tuple(raw))
    canon, resc = normalize(spec)
    back = resc.apply(canon)
    np.testing.assert_allclose(back.coefficients, spec.coefficients, rtol=1e-10)
    assert all(abs(canon.coefficients[k]) == 1.0 for k in canon.nonzero[:2])


def test_catalog_rows_json_serialisable():
    rows = catalog_rows(2)
    assert len(rows) == 20
    json.dumps(rows)


def test_format_table_header():
    lines = format_table(3).splitlines()
    assert lines[0].split() == ["type", "name", "C_0", "C_2", "C_4", "C_6"]
    assert len(lines) == 1 + 66
