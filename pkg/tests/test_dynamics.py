"""Propagation: conserved quantities, convergence order, kinematic coupling."""

import math

import numpy as np
import pytest

from craternav import (
    MOON,
    EpochState,
    gravity_orbit_frame,
    nadir_attitude,
    orbit_frame_dcm,
    propagate,
    quat_multiply,
    quat_rotate,
    state_derivative,
    surface_impact,
)


def circular_state(radius_km):
    """Equatorial circular orbit in the xy-plane, counterclockwise."""
    v = math.sqrt(MOON.mu_km3_s2 / radius_km)
    r0 = np.array([radius_km, 0.0, 0.0])
    v0 = np.array([0.0, v, 0.0])
    return EpochState(0.0, r0, v0, nadir_attitude(r0, v0))


def specific_energy(state):
    return 0.5 * float(state.v @ state.v) - MOON.mu_km3_s2 / state.radius_km


class TestEpochState:
    def test_normalizes_quaternion(self):
        st = EpochState(0.0, [2000.0, 0.0, 0.0], [0.0, 1.5, 0.0], [2.0, 0.0, 0.0, 0.0])
        assert np.linalg.norm(st.q) == pytest.approx(1.0)

    def test_radius_and_altitude(self):
        st = EpochState(0.0, [0.0, 1837.4, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0])
        assert st.radius_km == pytest.approx(1837.4)
        assert st.altitude_km() == pytest.approx(100.0)


class TestGravity:
    def test_surface_magnitude(self):
        g = gravity_orbit_frame(MOON.radius_km)
        assert g[:2] == pytest.approx([0.0, 0.0])
        assert g[2] == pytest.approx(MOON.mu_km3_s2 / MOON.radius_km**2)

    def test_inverse_square(self):
        assert gravity_orbit_frame(2000.0)[2] == pytest.approx(4.0 * gravity_orbit_frame(4000.0)[2])

    def test_positive_radius_required(self):
        with pytest.raises(ValueError):
            gravity_orbit_frame(0.0)


class TestStateDerivative:
    def test_position_rate_is_velocity(self):
        st = circular_state(2000.0)
        deriv = state_derivative(st)
        assert deriv.r_dot == pytest.approx(st.v)

    def test_acceleration_points_at_moon_center(self):
        st = circular_state(2000.0)
        a = state_derivative(st).v_dot
        assert np.linalg.norm(a) == pytest.approx(MOON.mu_km3_s2 / 2000.0**2)
        assert a / np.linalg.norm(a) == pytest.approx(-st.r / 2000.0, abs=1e-12)

    def test_body_force_is_rotated_into_mci(self):
        st = circular_state(2000.0)
        f_b = np.array([0.3, -0.1, 0.2])
        extra = state_derivative(st, specific_force_b=f_b).v_dot - state_derivative(st).v_dot
        assert extra == pytest.approx(quat_rotate(st.q, f_b), abs=1e-12)

    def test_quaternion_rate_zero_without_spin(self):
        assert state_derivative(circular_state(2000.0)).q_dot == pytest.approx(np.zeros(4))

    def test_quaternion_rate_orthogonal_to_quaternion(self):
        rng = np.random.default_rng(4)
        st = circular_state(2000.0)
        for _ in range(50):
            q_dot = state_derivative(st, omega_b=rng.normal(size=3)).q_dot
            assert float(st.q @ q_dot) == pytest.approx(0.0, abs=1e-15)


class TestPropagate:
    def test_rejects_non_positive_step(self):
        with pytest.raises(ValueError):
            propagate(circular_state(2000.0), 0.0)

    def test_circular_orbit_closes_after_one_period(self):
        radius = MOON.radius_km + 200.0
        period = 2.0 * math.pi * math.sqrt(radius**3 / MOON.mu_km3_s2)
        st = circular_state(radius)
        n = 10_000
        for _ in range(n):
            st = propagate(st, period / n)
        assert np.linalg.norm(st.r - [radius, 0.0, 0.0]) < 1e-6
        assert st.radius_km == pytest.approx(radius, abs=1e-9)

    def test_energy_and_momentum_conserved_on_descent_arc(self):
        # Elliptical fall from a 300 km apoapsis; periapsis inside the Moon.
        r_apo, r_per = MOON.radius_km + 300.0, 1710.3
        sma = 0.5 * (r_apo + r_per)
        v_apo = math.sqrt(MOON.mu_km3_s2 * (2.0 / r_apo - 1.0 / sma))
        st = EpochState(0.0, [-r_apo, 0.0, 0.0], [0.0, -v_apo, 0.0], [1.0, 0.0, 0.0, 0.0])
        e0 = specific_energy(st)
        h0 = np.cross(st.r, st.v)
        for _ in range(3000):
            st = propagate(st, 1.0)
            assert st.radius_km > MOON.radius_km
        assert abs(specific_energy(st) - e0) / abs(e0) < 1e-9
        assert np.linalg.norm(np.cross(st.r, st.v) - h0) / np.linalg.norm(h0) < 1e-9

    def test_fourth_order_convergence(self):
        radius = MOON.radius_km + 200.0
        rate = math.sqrt(MOON.mu_km3_s2 / radius**3)
        horizon = 2400.0

        def end_error(dt):
            st = circular_state(radius)
            for _ in range(int(round(horizon / dt))):
                st = propagate(st, dt)
            analytic = radius * np.array(
                [math.cos(rate * horizon), math.sin(rate * horizon), 0.0]
            )
            return np.linalg.norm(st.r - analytic)

        # Step sizes chosen so the smallest error (~2e-11 km) stays well
        # above the accumulated-roundoff floor.
        errors = [end_error(dt) for dt in (8.0, 4.0, 2.0, 1.0)]
        orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
        assert min(orders) > 3.8

    def test_attitude_does_not_disturb_the_trajectory(self):
        st_a = circular_state(2000.0)
        st_b = EpochState(0.0, st_a.r, st_a.v, [0.5, 0.5, 0.5, 0.5])
        for _ in range(100):
            st_a = propagate(st_a, 1.0)
            st_b = propagate(st_b, 1.0)
        assert np.array_equal(st_a.r, st_b.r)
        assert np.array_equal(st_a.v, st_b.v)

    def test_body_rate_integrates_to_axis_rotation(self):
        rate = 0.01
        st = circular_state(2000.0)
        q0 = st.q
        for _ in range(1000):
            st = propagate(st, 0.1, omega_b=[0.0, 0.0, rate])
        half = 0.5 * rate * 100.0
        expected = quat_multiply(q0, [math.cos(half), 0.0, 0.0, math.sin(half)])
        expected = expected if expected[0] >= 0 else -expected
        got = st.q if st.q[0] >= 0 else -st.q
        assert got == pytest.approx(expected, abs=1e-9)

    def test_quaternion_stays_unit_under_spin(self):
        st = circular_state(2000.0)
        for _ in range(500):
            st = propagate(st, 1.0, omega_b=[0.01, -0.02, 0.005])
            assert abs(np.linalg.norm(st.q) - 1.0) < 1e-12


class TestSurfaceAndNadir:
    def test_surface_impact_threshold(self):
        above = EpochState(0.0, [MOON.radius_km + 0.1, 0.0, 0.0], [0.0, 1.0, 0.0],
                           [1.0, 0.0, 0.0, 0.0])
        below = EpochState(0.0, [MOON.radius_km - 0.1, 0.0, 0.0], [0.0, 1.0, 0.0],
                           [1.0, 0.0, 0.0, 0.0])
        assert not surface_impact(above)
        assert surface_impact(below)

    def test_nadir_attitude_points_boresight_down(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            r = rng.normal(size=3) * 2000.0
            v = rng.normal(size=3) * 1.5
            if np.linalg.norm(np.cross(r, v)) < 1.0:
                continue
            q = nadir_attitude(r, v)
            assert quat_rotate(q, [0.0, 0.0, 1.0]) == pytest.approx(
                -r / np.linalg.norm(r), abs=1e-12
            )
            h = np.cross(r, v)
            assert quat_rotate(q, [0.0, 1.0, 0.0]) == pytest.approx(
                -h / np.linalg.norm(h), abs=1e-12
            )

    def test_nadir_attitude_matches_orbit_frame(self):
        r = np.array([1900.0, -300.0, 400.0])
        v = np.array([0.3, 1.4, -0.2])
        from craternav import quat_to_dcm

        assert quat_to_dcm(nadir_attitude(r, v)) == pytest.approx(orbit_frame_dcm(r, v))
