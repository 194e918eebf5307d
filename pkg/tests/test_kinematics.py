import math

import numpy as np
import pytest

from ncdipole.core import Atom, InvalidInputError, TwoAtomSystem, hydrogen_preset, with_separation
from ncdipole.forces import envelope, force_closed_A, force_closed_B
from ncdipole.kinematics import (
    Convention,
    RootNotFoundError,
    displacement,
    displacement_coefficients,
    hydrogen_displacement_curve,
    longitudinal_momentum,
    same_direction_threshold,
    shape_A,
    shape_B,
)

BASE = hydrogen_preset(1e-7)
K0 = BASE.atomA.k0
GAMMA = BASE.atomA.gamma
MASS = BASE.atomA.mass


def at_v(v):
    return with_separation(BASE, v / K0)


class TestShapes:
    def test_values(self):
        assert shape_B(1.0) == -2.0
        assert shape_B(2.0) == -0.15625
        assert shape_A(1.0) == pytest.approx(math.cos(2) - math.sin(2), rel=1e-15)
        assert shape_A(1.0) == pytest.approx(-1.3254, abs=1e-4)

    def test_bracket_signs(self):
        assert shape_A(2.58) < 0 < shape_A(3.0)
        assert np.all(shape_B(np.linspace(1, 100, 500)) < 0)


class TestMomentum:
    def test_zero_at_start(self):
        assert np.all(longitudinal_momentum(at_v(2), 0.0) == 0)

    def test_vanishes_after_full_decay(self):
        s = at_v(2)
        peak = np.abs(longitudinal_momentum(s, 1 / GAMMA, "A")).max()
        assert np.abs(longitudinal_momentum(s, math.inf, "A")).max() <= 1e-9 * peak

    def test_antiderivative_oracle(self):
        s = at_v(2)
        for T in (0.2 / GAMMA, 1 / GAMMA, 3 / GAMMA):
            expected = -force_closed_A(s, 0) * T * math.exp(-GAMMA * T)
            np.testing.assert_allclose(longitudinal_momentum(s, T, "A"), expected, rtol=1e-10, atol=0)

    @pytest.mark.parametrize("which,force", [("A", force_closed_A), ("B", force_closed_B)])
    def test_derivative_is_force(self, which, force):
        s = at_v(2)
        T = 0.3 / GAMMA
        h = 1e-4 * T
        deriv = (longitudinal_momentum(s, T + h, which) - longitudinal_momentum(s, T - h, which)) / (2 * h)
        F = force(s, T)
        i = np.argmax(np.abs(F))
        assert -deriv[i] == pytest.approx(F[i], rel=1e-6)

    def test_negative_time(self):
        with pytest.raises(InvalidInputError):
            longitudinal_momentum(at_v(2), -1.0)


class TestDisplacement:
    def test_zero_force(self):
        atom = Atom(BASE.atomA.omega0, GAMMA, MASS, ([0, 0, 1e-30],))
        s = TwoAtomSystem(atom, atom, [0, 0, 2 / K0])
        assert np.all(displacement(s, None, "A") == 0)

    def test_constant_force_hook(self):
        F0 = np.array([1e-25, -2e-25, 0.5e-25])
        T = 1.6e-9
        S = displacement(BASE, T, "A", force_profile=lambda t: F0)
        np.testing.assert_allclose(S, F0 * T**2 / (2 * MASS), rtol=1e-10)

    def test_lifetime_oracle(self):
        s = at_v(2)
        F0 = force_closed_A(s, 0)
        expected = F0 * (1 - 2 / math.e) / (MASS * GAMMA**2)
        np.testing.assert_allclose(displacement(s, None, "A", "truncate"), expected, rtol=1e-10)

    def test_general_time_oracle(self):
        s = at_v(3)
        F0 = force_closed_B(s, 0)
        for T in (0.1 / GAMMA, 2 / GAMMA):
            x = GAMMA * T
            kernel = (1 - (1 + x) * math.exp(-x)) / GAMMA**2
            # the closed kernel agrees with a dense trapezoid of int_0^T (T - t) env(t) dt
            ts = np.linspace(0, T, 200001)
            assert np.trapezoid((T - ts) * envelope(GAMMA, ts), ts) == pytest.approx(kernel, rel=1e-8)
            np.testing.assert_allclose(displacement(s, T, "B"), F0 * kernel / MASS, rtol=1e-10)

    def test_full_decay_limit(self):
        s = at_v(2)
        F0 = force_closed_A(s, 0)
        np.testing.assert_allclose(displacement(s, None, "A", Convention.FULL_DECAY),
                                   F0 / (MASS * GAMMA**2), rtol=1e-10)

    def test_second_derivative_is_force(self, rng):
        s = at_v(2)
        for T in rng.uniform(0.05, 3, size=10) / GAMMA:
            h = 1e-3 * T
            S = [displacement(s, t, "A") for t in (T - h, T, T + h)]
            acc = (S[0] - 2 * S[1] + S[2]) / h**2
            F = force_closed_A(s, T)
            i = np.argmax(np.abs(F))
            assert acc[i] * MASS == pytest.approx(F[i], rel=1e-5)

    def test_momentum_matches_velocity(self):
        s = at_v(2)
        for T in (0.2 / GAMMA, 0.7 / GAMMA, 2.5 / GAMMA):
            h = 1e-4 * T
            vel = (displacement(s, T + h, "A") - displacement(s, T - h, "A")) / (2 * h)
            p = longitudinal_momentum(s, T, "A")
            i = np.argmax(np.abs(p))
            assert p[i] == pytest.approx(-MASS * vel[i], rel=1e-8)

    def test_convention_monotonic(self):
        for v in (1.0, 2.0, 4.0, 7.0):
            s = at_v(v)
            tr = displacement(s, None, "A", "truncate")
            fd = displacement(s, None, "A", "full-decay")
            assert np.all(np.abs(fd) >= np.abs(tr))

    def test_rejects_bad_time(self):
        with pytest.raises(InvalidInputError):
            displacement(at_v(2), 0.0)


class TestCurve:
    def test_shapes_match(self):
        v = np.linspace(1, 10, 200)
        for conv in Convention:
            curve = hydrogen_displacement_curve(v, conv)
            np.testing.assert_allclose(curve.S_A[:, 0] / curve.coefficient_A, shape_A(v), rtol=0, atol=1e-9)
            np.testing.assert_allclose(curve.S_B[:, 0] / curve.coefficient_B, shape_B(v), rtol=0, atol=1e-9)

    def test_shape_ratio(self):
        curve = hydrogen_displacement_curve([1.0, 3.0])
        r = curve.S_B[0, 0] / curve.S_B[1, 0]
        assert r == pytest.approx(shape_B(1.0) / shape_B(3.0), rel=1e-9)

    def test_prefactors_within_factor_five(self):
        for conv in Convention:
            cA, cB = displacement_coefficients(conv)
            assert 0.15e-15 / 5 <= cA <= 0.15e-15 * 5
            assert 0.3e-15 / 5 <= cB <= 0.3e-15 * 5

    def test_workers_do_not_change_output(self):
        v = np.linspace(1, 20, 64)
        a = hydrogen_displacement_curve(v, workers=1)
        b = hydrogen_displacement_curve(v, workers=4)
        np.testing.assert_array_equal(a.S_A, b.S_A)
        np.testing.assert_array_equal(a.S_B, b.S_B)

    def test_R_grid(self):
        curve = hydrogen_displacement_curve([1.0, 2.0])
        np.testing.assert_allclose(curve.R_grid * K0, [1.0, 2.0], rtol=1e-15)
        assert curve.perturbative.all()

    @pytest.mark.parametrize("grid", [[0.5, 2.0], [2.0, 200.0], [3.0, 2.0], []])
    def test_bad_grid(self, grid):
        with pytest.raises(InvalidInputError):
            hydrogen_displacement_curve(grid)


class TestThreshold:
    def test_location(self):
        R_star = same_direction_threshold()
        assert 48e-9 <= R_star <= 58e-9
        assert 2.5 <= R_star * K0 <= 3.0
        assert abs(shape_A(R_star * K0)) < 1e-9

    def test_same_sign_below(self):
        R_star = same_direction_threshold()
        for v in np.linspace(1.0, R_star * K0 - 0.05, 20):
            s = at_v(v)
            assert force_closed_A(s, 0)[0] < 0 and force_closed_B(s, 0)[0] < 0

    def test_no_root(self):
        with pytest.raises(RootNotFoundError):
            same_direction_threshold(v_lo=1.0, v_hi=2.0)
