import numpy as np
import pytest
from hypothesis import given, strategies as st

from bethe_sumrules.conformal import SQRT2
from bethe_sumrules.radial import (RadialProfile, conjecture_form, dH_vector, isometry_W, jacobi_reduce, m_jacobi,
                                   radial_ax2m4_closed_form, shift_structures)
from bethe_sumrules.resolvent import PoleError
from bethe_sumrules.tree import Potential, random_potential, shell_weighted_sum

POINTS = [3.5, -4.0, 1 + 1j, 2j, -2 + 0.3j, 6.0, 10j, -3 - 1j, 0.5j, 4 + 0.2j]


def test_free_profile():
    assert jacobi_reduce(RadialProfile((0.0,)), POINTS).max_m_residual < 1e-12


def test_rank_one_profile_near_three():
    # z = 3 is the eigenvalue itself for v = 2, so compare next to it
    r = jacobi_reduce(RadialProfile((2.0,)), [3.0 + 0.1j, 3.5, 2.9])
    assert r.max_m_residual < 1e-10


def test_rank_one_profile_pole():
    with pytest.raises(PoleError):
        jacobi_reduce(RadialProfile((2.0,)), [3.0])


def test_free_half_line_m():
    for w in (2.5, 3j, -5 + 1j):
        zeta = (w - np.sqrt(w * w - 4 + 0j)) / 2
        zeta = zeta if abs(zeta) < 1 else 1 / zeta
        assert m_jacobi([0.0], w) == pytest.approx(-zeta, abs=1e-14)


@given(st.lists(st.floats(-2.5, 2.5), min_size=1, max_size=6))
def test_random_profiles(v):
    assert jacobi_reduce(RadialProfile(tuple(v)), [1 + 1j, 2j, -0.5 + 0.7j, 5j, -1 - 2j]).max_m_residual < 1e-10


def test_band_point_rejected():
    with pytest.raises(ValueError):
        jacobi_reduce(RadialProfile((1.0,)), [1.0])


def test_isometry_exact():
    W = isometry_W(3)
    g = W.gram()
    assert np.array_equal(g.a, np.eye(4)) and not g.b.any()


@pytest.mark.parametrize("D", range(2, 9))
def test_shift_relations_exact(D):
    s = shift_structures(D)
    assert s.isometry_residual == 0.0 and s.h0_residual == 0.0
    assert all(v == 0.0 for v in s.intertwining_residuals.values())


def test_shift_structures_depth_guard():
    with pytest.raises(ValueError):
        shift_structures(1)


def test_dH_norm_pins_tiling():
    for seed in range(5):
        V = random_potential(seed, 3, 2.0)
        dH = dH_vector(V)
        assert dH @ dH == pytest.approx(shell_weighted_sum(V, lambda x: x * x, 0, 3), rel=1e-13)


def test_form_A1_is_norm():
    V = random_potential(1, 3, 1.0)
    c = conjecture_form([1.0], V)
    assert c.check_A1 < 1e-12 and c.qform == pytest.approx(c.norm_target, rel=1e-13)


def test_form_free_is_zero():
    assert conjecture_form([-4.0, 0.0, 1.0], Potential()).qform == 0.0


def test_form_odd_A_rejected():
    with pytest.raises(ValueError):
        conjecture_form([1.0, 1.0], Potential.radial([1.0]))


def test_form_radial_closed_form():
    for prof in ([1.0], [1.0, 1.0, 1.0], [0.5, -1.0, 2.0], [0.3, 0.2, 0.1, -0.4]):
        c = conjecture_form([-4.0, 0.0, 1.0], Potential.radial(prof))
        assert c.qform == pytest.approx(radial_ax2m4_closed_form(prof), abs=1e-12)


def test_form_constant_profile_shells_cancel():
    # for a constant profile only the boundary terms of the closed form survive
    for L in (2, 3, 5):
        c = conjecture_form([-4.0, 0.0, 1.0], Potential.radial([1.0] * L))
        assert c.qform == pytest.approx(-3.0, abs=1e-12)


def test_form_depends_on_shell_sums_only():
    # B(H_0) for A = x^2 - 4 sees dH only through W*, so moving mass inside a
    # shell changes the form only through the norm term
    a = Potential.from_array([0.0, 1.0, -1.0])
    b = Potential.from_array([0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    ca = conjecture_form([-4.0, 0.0, 1.0], a)
    cb = conjecture_form([0.0, 0.0, 1.0], a)
    assert cb.qform == pytest.approx(0.0, abs=1e-14)
    assert ca.qform == pytest.approx(-4 * ca.norm_sq, rel=1e-14)
    assert conjecture_form([-4.0, 0.0, 1.0], b).qform == 0.0


def test_higher_degree_form_runs():
    c = conjecture_form([1.0, 0.0, -0.5, 0.0, 0.25], random_potential(2, 2, 1.0))
    assert np.isfinite(c.qform) and c.depth_used >= 2 * 2 + 4
