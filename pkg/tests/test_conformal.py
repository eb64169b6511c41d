import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from bethe_sumrules.conformal import (BAND_EDGE, SQRT2, CosCoeffs, F_A_eval, band_poly_weight, chebyshev_eval,
                                      chebyshev_monomial, eigen_term_G, map_zeta_z, sin_power_weight,
                                      weight_coeffs, z_to_zeta, zeta_to_z)

disk = st.complex_numbers(max_magnitude=0.99, allow_nan=False, allow_infinity=False).filter(lambda z: abs(z) > 1e-3)


def test_zeta_one_is_band_edge():
    assert map_zeta_z(1.0) == pytest.approx(BAND_EDGE)


def test_zeta_i_maps_to_zero():
    assert abs(zeta_to_z(1j)) < 1e-15


def test_z3_inverse():
    assert z_to_zeta(3.0) == pytest.approx(1 / SQRT2, abs=1e-15)


@given(disk)
def test_round_trip(zeta):
    assert abs(map_zeta_z(map_zeta_z(zeta), "z_to_zeta") - zeta) < 1e-9


@pytest.mark.parametrize("z", [0.0, 2.0, -BAND_EDGE, BAND_EDGE])
def test_band_rejected(z):
    with pytest.raises(ValueError):
        z_to_zeta(z)


def test_chebyshev_t4_at_one():
    assert chebyshev_eval(4, 1.0) == -1.0


@given(st.integers(0, 12), st.floats(0, 2 * np.pi))
def test_chebyshev_cosine(k, t):
    assert chebyshev_eval(k, 2 * np.cos(t)) == pytest.approx(2 * np.cos(k * t), abs=1e-9)
    assert np.polynomial.polynomial.polyval(2 * np.cos(t), chebyshev_monomial(k)) == pytest.approx(
        2 * np.cos(k * t), abs=1e-8)


def _dft_coeffs(f, deg, M=64):
    t = 2 * np.pi * np.arange(M) / M
    c = np.fft.rfft(f(t)).real / M
    c[1:] *= 2
    return c[:deg + 1]


@pytest.mark.parametrize("p,expect", [(0, [1]), (1, [2, 0, -2]), (2, [6, 0, -8, 0, 2])])
def test_sin_weights(p, expect):
    w = sin_power_weight(p)
    assert np.array_equal(w.c, expect)
    oracle = _dft_coeffs(lambda t: (2 * np.sin(t)) ** (2 * p), 2 * p)
    assert np.allclose(w.c, oracle, atol=1e-12)


def test_weight_spec_forms():
    assert weight_coeffs({"sin_power": 4}) == CosCoeffs([6, 0, -8, 0, 2])
    assert weight_coeffs({"poly": [1]}) == CosCoeffs([2, 0, -2])
    with pytest.raises(ValueError):
        weight_coeffs({"sin_power": 3})


def test_poly_weight_matches_samples():
    A = [1.0, 0.0, -0.5, 0.0, 0.25]
    w = band_poly_weight(A)
    oracle = _dft_coeffs(lambda t: np.polyval(A[::-1], 2 * np.cos(t)) * 4 * np.sin(t) ** 2, 6)
    assert np.allclose(w.c, oracle, atol=1e-12)


def test_odd_poly_rejected():
    with pytest.raises(ValueError):
        band_poly_weight([0, 1])


def test_G_vanishes_on_circle():
    assert eigen_term_G(1.0, [6, 0, -8, 0, 2]) == 0.0


def test_G_constant_weight():
    assert eigen_term_G(0.5, [1]) == pytest.approx(2 * np.log(2), abs=1e-15)


@given(st.floats(0.05, 0.999), st.booleans())
def test_G_matches_high_precision(r, neg):
    c = [6, -1, -8, 0.5, 2]
    zeta = -r if neg else r
    mp.mp.dps = 40
    z = mp.mpf(zeta)
    ref = 2 * c[0] * mp.log(1 / abs(z)) + sum(mp.mpf(c[n]) / n * (z ** -n - z ** n) for n in range(1, 5))
    assert eigen_term_G(zeta, c) == pytest.approx(float(ref), rel=1e-10, abs=1e-13)


def test_G_sin4_edge_limit():
    # 12t - 8 sinh 2t + sinh 4t = 6.4 t^5 + O(t^7)
    t = 1e-2
    assert eigen_term_G(np.exp(-t), sin_power_weight(2)) / t ** 5 == pytest.approx(6.4, rel=1e-3)


def test_F_A_edge_is_zero():
    assert F_A_eval(BAND_EDGE) == 0.0


def _antiderivative(s):
    return 0.5 * (s * np.sqrt(s * s - 8) - 8 * np.log(s + np.sqrt(s * s - 8)))


@given(st.floats(2.9, 12.0))
def test_F_A_closed_form(x):
    ref = _antiderivative(x) - _antiderivative(BAND_EDGE)
    assert F_A_eval(x) == pytest.approx(ref, rel=1e-10, abs=1e-13)
    assert F_A_eval(-x) == pytest.approx(F_A_eval(x), rel=1e-12)


def test_F_A_at_three():
    assert F_A_eval(3.0) == pytest.approx(1.5 - 2 * np.log(2), abs=1e-12)


def test_F_A_inside_band_rejected():
    with pytest.raises(ValueError):
        F_A_eval(1.0)


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6))
def test_nonnegativity_check(c):
    w = CosCoeffs(c)
    assert w.is_nonnegative() == (w.min_on_circle() >= -1e-12)


@pytest.mark.parametrize("p", [1, 2, 3])
@pytest.mark.parametrize("t", [1e-6, 1e-3, 0.05, 0.3])
@pytest.mark.parametrize("sign", [1, -1])
def test_G_near_band_edge(p, t, sign):
    c = sin_power_weight(p).c
    mp.mp.dps = 60
    z = sign * mp.e ** (-mp.mpf(t))
    ref = 2 * c[0] * mp.mpf(t) + sum(mp.mpf(c[n]) / n * (z ** -n - z ** n) for n in range(1, len(c)))
    assert eigen_term_G(float(z), c) == pytest.approx(float(ref), rel=1e-11)
