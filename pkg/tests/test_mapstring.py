import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vortexlab.mapstring import MapSyntaxError, parse_map


def test_basic_forms():
    num, den = parse_map("z^3 - 3z")
    np.testing.assert_allclose(num, [0, -3, 0, 1])
    np.testing.assert_allclose(den, [1])
    num, den = parse_map("(z^2+1)/(z-(0.5+1i))")
    np.testing.assert_allclose(num, [1, 0, 1])
    np.testing.assert_allclose(den, [-(0.5 + 1j), 1])
    num, _ = parse_map("2*z^3")
    np.testing.assert_allclose(num, [0, 0, 0, 2])


@pytest.mark.parametrize("bad", ["", "z^^2", "z^-1", "z^1.5", "(z+1", "z+", "w", "z/"])
def test_syntax_errors(bad):
    with pytest.raises(MapSyntaxError):
        parse_map(bad)


coeff = st.integers(-5, 5)


@given(st.lists(coeff, min_size=1, max_size=5))
@settings(max_examples=100)
def test_polynomial_roundtrip(cs):
    text = " + ".join(f"({c})*z^{k}" for k, c in enumerate(cs))
    num, den = parse_map(text)
    want = np.array(cs, float)
    got = np.zeros(len(cs), complex)
    got[:min(len(num), len(cs))] = num[:len(cs)]
    np.testing.assert_allclose(got, want)
    assert np.allclose(num[len(cs):], 0)
    np.testing.assert_allclose(den, [1])


@given(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False))
@settings(max_examples=50)
def test_evaluation_matches_python(z):
    num, den = parse_map("(z^2 + 2z - 1)/(3z + 4)")
    f = np.polyval(num[::-1], z) / np.polyval(den[::-1], z)
    if abs(3 * z + 4) > 1e-6:
        assert abs(f - (z**2 + 2 * z - 1) / (3 * z + 4)) < 1e-9 * (1 + abs(f))
