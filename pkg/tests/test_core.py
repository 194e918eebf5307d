import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ncdipole.core import (
    CONSTANTS,
    Atom,
    InvalidInputError,
    PerturbativeRegimeWarning,
    TwoAtomSystem,
    decompose_dipole,
    detuned,
    dimensionless,
    hydrogen_dipole,
    hydrogen_preset,
    max_asymmetry,
    with_separation,
)

MU = 1.0


def test_constants_are_codata_and_positive():
    assert CONSTANTS.c == 299792458.0
    for name in ("c", "hbar", "eps0", "e_charge", "a0", "m_p", "m_e"):
        assert getattr(CONSTANTS, name) > 0
    with pytest.raises(Exception):
        CONSTANTS.c = 1.0


class TestDecomposeDipole:
    def test_longitudinal(self):
        par, perp = decompose_dipole([0, 0, MU], [0, 0, 1])
        assert par == MU
        assert np.all(perp == 0)

    def test_transverse(self):
        par, perp = decompose_dipole([MU, 0, 0], [0, 0, 1])
        assert par == 0
        np.testing.assert_array_equal(perp, [MU, 0, 0])

    def test_hydrogen_excited_state(self):
        s = MU / math.sqrt(2)
        par, perp = decompose_dipole([s, 0, s], [0, 0, 1])
        assert par == pytest.approx(s, rel=1e-15)
        np.testing.assert_allclose(perp, [s, 0, 0], rtol=1e-15, atol=0)

    def test_non_unit_axis_rejected(self):
        with pytest.raises(InvalidInputError):
            decompose_dipole([1, 0, 0], [0, 0, 1.001])

    def test_nan_rejected(self):
        with pytest.raises(InvalidInputError):
            decompose_dipole([np.nan, 0, 0], [0, 0, 1])

    def test_orthogonal_on_random_sample(self, rng):
        for _ in range(1000):
            mu = rng.normal(size=3) * 10 ** rng.uniform(-31, -28)
            axis = rng.normal(size=3)
            axis /= np.linalg.norm(axis)
            par, perp = decompose_dipole(mu, axis)
            norm2 = mu @ mu
            assert abs(par * (axis @ perp)) <= 1e-14 * norm2
            assert abs(par**2 + perp @ perp - norm2) <= 1e-14 * norm2
            np.testing.assert_allclose(par * axis + perp, mu, rtol=0, atol=1e-15 * np.linalg.norm(mu))


@given(
    st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3),
    st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda x: np.linalg.norm(x) > 1e-3),
)
def test_decomposition_reconstructs(mu, axis):
    axis = np.array(axis) / np.linalg.norm(axis)
    par, perp = decompose_dipole(mu, axis)
    np.testing.assert_allclose(par * axis + perp, mu, atol=1e-12 * (1 + np.linalg.norm(mu)))


class TestHydrogenPreset:
    def test_transition_frequency(self):
        s = hydrogen_preset(50e-9)
        assert s.atomA.omega0 == pytest.approx(1.549e16, rel=1e-3)
        assert s.atomA.omega0 == 2 * math.pi * CONSTANTS.c / 121.6e-9

    def test_linewidth(self):
        assert hydrogen_preset(50e-9).atomA.gamma == pytest.approx(6.25e8, rel=1e-15)

    def test_dipole_magnitude(self):
        mu = hydrogen_dipole()
        assert mu == pytest.approx(6.3e-30, rel=0.01)
        assert mu == pytest.approx(128 * math.sqrt(2) / 243 * CONSTANTS.e_charge * CONSTANTS.a0, rel=1e-15)

    def test_weisskopf_wigner_consistency(self):
        a = hydrogen_preset(50e-9).atomA
        mu = hydrogen_dipole()
        c = CONSTANTS
        gamma_ww = a.omega0**3 * mu**2 / (3 * math.pi * c.eps0 * c.hbar * c.c**3)
        assert abs(gamma_ww / a.gamma - 1) < 0.05

    def test_geometry(self):
        s = hydrogen_preset(80e-9)
        mu = hydrogen_dipole()
        np.testing.assert_allclose(s.atomA.dipoles[0], mu * np.array([1, 0, 1]) / math.sqrt(2))
        np.testing.assert_allclose(np.array(s.atomB.dipoles), mu * np.eye(3))
        assert s.R == pytest.approx(80e-9, rel=1e-15)
        assert abs(s.rhat[2]) == 1.0
        assert s.atomA.mass == CONSTANTS.m_p + CONSTANTS.m_e
        assert s.is_identical

    @pytest.mark.parametrize("R", [0.0, -1e-9, math.inf, math.nan])
    def test_bad_separation(self, R):
        with pytest.raises(InvalidInputError):
            hydrogen_preset(R)


class TestDimensionless:
    def test_v_is_one_at_reduced_wavelength(self):
        s = hydrogen_preset(121.6e-9 / (2 * math.pi))
        assert dimensionless(s).v == pytest.approx(1.0, rel=1e-14)

    def test_tau(self):
        assert dimensionless(hydrogen_preset(1e-7), 1.6e-9).tau == pytest.approx(1.0, rel=1e-14)

    def test_force_scale_against_arbitrary_precision(self):
        mpmath.mp.dps = 40
        c = CONSTANTS
        k0 = 2 * mpmath.pi / mpmath.mpf("121.6e-9")
        mu = 128 * mpmath.sqrt(2) / 243 * mpmath.mpf(c.e_charge) * mpmath.mpf(c.a0)
        ref = k0**6 * mu**4 / (8 * mpmath.pi**2 * mpmath.mpf(c.eps0) ** 2 * mpmath.mpf(c.hbar) * mpmath.mpf(c.c))
        fs = dimensionless(hydrogen_preset(1e-7)).force_scale
        assert fs == pytest.approx(1.5e-25, rel=0.05)
        assert fs == pytest.approx(float(ref), rel=1e-13)

    def test_round_trip(self, rng):
        base = hydrogen_preset(1e-7)
        for _ in range(200):
            R = 10 ** rng.uniform(-9, -5)
            T = 10 ** rng.uniform(-12, -7)
            F = rng.normal(size=3) * 1e-25
            g = dimensionless(with_separation(base, R), T)
            assert abs(g.separation_si() / R - 1) < 1e-14
            assert abs(g.time_si() / T - 1) < 1e-14
            np.testing.assert_allclose(g.force_si(F / g.force_scale), F, rtol=1e-14)

    def test_negative_time(self):
        with pytest.raises(InvalidInputError):
            dimensionless(hydrogen_preset(1e-7), -1.0)


class TestAtomValidation:
    @pytest.mark.parametrize("kw", [
        dict(omega0=0.0), dict(gamma=0.0), dict(gamma=2e16), dict(mass=-1.0), dict(dipoles=()),
    ])
    def test_invalid(self, kw):
        args = dict(omega0=1e16, gamma=1e8, mass=1e-27, dipoles=([1e-30, 0, 0],))
        args.update(kw)
        with pytest.raises(InvalidInputError):
            Atom(**args)

    def test_immutable(self):
        a = Atom(1e16, 1e8, 1e-27, ([1e-30, 0, 0],))
        with pytest.raises(Exception):
            a.omega0 = 2.0
        with pytest.raises(ValueError):
            a.dipoles[0][0] = 3.0


def test_zero_separation_rejected():
    a = Atom(1e16, 1e8, 1e-27, ([1e-30, 0, 0],))
    with pytest.raises(InvalidInputError):
        TwoAtomSystem(a, a, [0, 0, 0])


def test_perturbative_flag_warns():
    s = hydrogen_preset(5e-9)
    assert not s.perturbative
    with pytest.warns(PerturbativeRegimeWarning):
        assert not s.check_regime()
    assert hydrogen_preset(50e-9).check_regime()


def test_detuned_splits_symmetrically():
    s = detuned(hydrogen_preset(1e-7), 1e6)
    assert s.detuning == pytest.approx(1e6, rel=1e-6)
    assert not s.is_identical


def test_max_asymmetry():
    m = np.array([[1, 2, 0], [2, 1, 0], [0, 0, 1]], dtype=complex)
    assert max_asymmetry(m) == 0
    m[0, 2] = 1e-3
    assert max_asymmetry(m) > 0
