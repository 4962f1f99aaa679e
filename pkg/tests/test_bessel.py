import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jv

from wblab.bessel import bessel_jn, bessel_jn_sequence


@pytest.mark.parametrize("x", [1e-8, 0.3, 1.0, 2.404825557695773, 7.5, 33.0, 150.0, 812.4])
def test_sequence_matches_reference(x):
    n = np.arange(0, int(x) + 60)
    got = bessel_jn_sequence(n[-1], x)
    np.testing.assert_allclose(got, jv(n, x), rtol=0, atol=5e-14)


def test_zero_argument():
    out = bessel_jn_sequence(5, 0.0)
    assert out[0] == 1.0 and not out[1:].any()


def test_first_zero_of_j0():
    assert abs(bessel_jn(0, 2.404825557695773)) < 1e-14


def test_negative_order_and_argument():
    for n in range(-6, 7):
        assert bessel_jn(n, 3.7) == pytest.approx(jv(n, 3.7), abs=1e-14)
        assert bessel_jn(n, -3.7) == pytest.approx(jv(n, -3.7), abs=1e-14)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        bessel_jn_sequence(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_jn_sequence(3, float("nan"))


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=0.01, max_value=400.0))
def test_normalization_identity(x):
    j = bessel_jn_sequence(int(x) + 80, x)
    assert j[0] + 2 * j[2::2].sum() == pytest.approx(1.0, abs=1e-12)
    # sum of squares identity J0^2 + 2 sum Jn^2 = 1
    assert j[0] ** 2 + 2 * np.sum(j[1:] ** 2) == pytest.approx(1.0, abs=1e-12)
