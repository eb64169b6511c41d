import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import i0

from bethe_sumrules.conformal import CosCoeffs, band_poly_weight, sin_power_weight
from bethe_sumrules.sum_rules import (agm_pointwise, agm_profile, calibrate_kappa_M, combined_identity,
                                      entropy_integral, fourier_identity, ledger_inequality, log_det_quadrature,
                                      periodic_trapezoid)
from bethe_sumrules.tree import ROOT, Potential, VertexId, random_potential
from conftest import ensemble

SIN4 = sin_power_weight(2)


def test_trapezoid_spectral_accuracy():
    q = periodic_trapezoid(lambda t: np.exp(np.cos(t)))
    assert q.converged and q.value == pytest.approx(i0(1.0), abs=1e-14)


def test_trapezoid_flags_nonconvergence():
    q = periodic_trapezoid(lambda t: (t < 2.0).astype(float), max_nodes=256)
    assert not q.converged


def test_log_det_free_is_zero():
    assert log_det_quadrature(Potential(), ROOT, SIN4).value == 0.0


def test_log_det_zero_free_mean_value():
    assert abs(log_det_quadrature(Potential({ROOT: 1.0}), ROOT, CosCoeffs([1])).value) < 1e-12


@pytest.mark.parametrize("n", range(5))
def test_fourier_free(n):
    r = fourier_identity(Potential(), ROOT, n)
    assert r.lhs == r.rhs == 0.0


def test_fourier_rank_one_zero_mode():
    r = fourier_identity(Potential({ROOT: 2.0}), ROOT, 0)
    assert r.lhs == pytest.approx(np.log(np.sqrt(2)), abs=1e-10)
    assert r.rhs == pytest.approx(np.log(np.sqrt(2)), abs=1e-12)


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.floats(0.2, 3.0), st.integers(0, 6))
def test_fourier_identity_random(seed, amp, n):
    V = random_potential(seed, 2, amp)
    assert fourier_identity(V, ROOT, n).residual < 1e-7


def test_fourier_identity_on_subtree():
    V = random_potential(9, 3, 2.0)
    for n in range(4):
        assert fourier_identity(V, VertexId(1, 2), n).residual < 1e-7


def test_combined_free():
    r = combined_identity(Potential(), ROOT, SIN4)
    assert r.lhs == r.rhs == 0.0


def test_combined_rank_one():
    assert combined_identity(Potential({ROOT: 3.0}), ROOT, SIN4).residual < 1e-8


@pytest.mark.parametrize("p", [1, 2, 3])
def test_combined_random(p):
    for seed in range(3):
        r = combined_identity(random_potential(seed, 3, 2.0), ROOT, sin_power_weight(p))
        assert r.residual < 1e-7
        assert r.extra["trace"] == pytest.approx(r.extra["trace_direct"], rel=1e-10, abs=1e-10)


def test_combined_signed_weight():
    # a weight with odd modes exercises the signed-zeta form of G
    r = combined_identity(random_potential(4, 2, 3.0), ROOT, CosCoeffs([3, 1, -1, 0.5]))
    assert r.residual < 1e-7


def test_kappa_M():
    assert calibrate_kappa_M() == pytest.approx(1 / np.sqrt(2), rel=1e-15)


def test_entropy_free():
    e = entropy_integral(Potential(), SIN4)
    assert abs(e.value) < 1e-14 and abs(e.x_value) < 1e-12


def test_entropy_rank_one_stable():
    V = Potential({ROOT: 2.0})
    a = entropy_integral(V, SIN4, x_form=False)
    b = entropy_integral(V, SIN4, tol=1e-14, x_form=False)
    assert a.converged and abs(a.value - b.value) < 1e-8


def test_entropy_x_form():
    for seed in range(3):
        e = entropy_integral(random_potential(seed, 2, 2.0), SIN4)
        assert e.value == pytest.approx(e.x_value, abs=1e-8)


def test_entropy_poly_weight():
    e = entropy_integral(random_potential(1, 2, 1.0), band_poly_weight([1.0]))
    assert e.value == pytest.approx(e.x_value, abs=1e-8)


def test_agm_free_equality():
    p = agm_pointwise(Potential(), 3, 0.7)
    assert abs(p.slack) < 1e-14


@pytest.mark.parametrize("prof", [[1.0], [2.0, -1.0], [0.5, 1.5, -2.0]])
def test_agm_radial_equality(prof):
    prof_ = agm_profile(Potential.radial(prof), 3, np.linspace(0.1, 3.0, 9))
    assert np.max(np.abs(prof_.slack)) < 1e-10


def test_agm_strict_for_random():
    assert agm_pointwise(random_potential(3, 2, 2.0), 3, np.pi / 3).slack > 0


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_agm_properties(seed, N):
    V = random_potential(seed, 3, 3.0)
    prof = agm_profile(V, N, (np.arange(32) + 0.5) * 2 * np.pi / 32)
    assert np.max(prof.formula_residual) < 1e-8
    assert np.min(prof.slack) >= -1e-10
    assert np.allclose(prof.rhs, prof.rhs_shells, atol=1e-10)


def test_agm_band_edge_rejected():
    with pytest.raises(ValueError):
        agm_pointwise(Potential(), 2, 0.0)


def test_ledger_free():
    r = ledger_inequality(Potential(), 3, SIN4)
    assert abs(r.slack) < 1e-14


def test_ledger_rank_one():
    # a root-only potential is radial, so AGM is an equality and the slack is zero
    assert abs(ledger_inequality(Potential({ROOT: 2.0}), 4, SIN4).slack) < 1e-12


def test_ledger_ensemble_sample():
    for V in ensemble(4):
        for p in (1, 2):
            assert ledger_inequality(V, 3, sin_power_weight(p)).slack >= -1e-8


def test_ledger_needs_nonnegative_weight():
    with pytest.raises(ValueError):
        ledger_inequality(Potential({ROOT: 1.0}), 2, band_poly_weight([-4.0, 0.0, 1.0]))
