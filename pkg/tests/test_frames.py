"""Frames and rotation algebra: conventions pinned against closed forms."""

import math

import numpy as np
import pytest

from craternav import (
    MOON,
    MoonConstants,
    SelenographicPoint,
    dcm_to_quat,
    mcmf_to_mci_dcm,
    mcmf_to_selenographic,
    moon_rotation_angle,
    orbit_frame_dcm,
    quat_conjugate,
    quat_multiply,
    quat_normalize,
    quat_rotate,
    quat_to_dcm,
    selenographic_to_mcmf,
)


def axis_angle_quat(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate(([math.cos(angle / 2.0)], math.sin(angle / 2.0) * axis))


def rodrigues(axis, angle):
    """Independent rotation-matrix oracle: R = I cos a + (1-c) uu^T + s [u]x."""
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    ux = np.array([[0.0, -u[2], u[1]], [u[2], 0.0, -u[0]], [-u[1], u[0], 0.0]])
    return math.cos(angle) * np.eye(3) + (1.0 - math.cos(angle)) * np.outer(u, u) + math.sin(angle) * ux


class TestMoonConstants:
    def test_fact_sheet_values(self):
        assert MOON.radius_km == 1737.4
        assert MOON.mu_km3_s2 == 4902.8
        assert MOON.spin_rate_rad_s == 2.6617e-6

    def test_rejects_non_positive(self):
        with pytest.raises(ValueError):
            MoonConstants(radius_km=-1.0)


class TestMoonRotation:
    def test_zero_time(self):
        assert moon_rotation_angle(0.0) == 0.0

    def test_linear_in_time(self):
        assert moon_rotation_angle(1000.0) == pytest.approx(2.6617e-3)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError):
            moon_rotation_angle(-1.0)

    def test_identity_at_zero(self):
        assert mcmf_to_mci_dcm(0.0) == pytest.approx(np.eye(3))

    @pytest.mark.parametrize("theta", [0.0, 0.3, -1.2, math.pi, 5.9])
    def test_rotation_matrix_properties(self, theta):
        r = mcmf_to_mci_dcm(theta)
        assert r.T @ r == pytest.approx(np.eye(3), abs=1e-14)
        assert np.linalg.det(r) == pytest.approx(1.0)
        assert r @ np.array([0.0, 0.0, 1.0]) == pytest.approx([0.0, 0.0, 1.0])

    def test_group_property(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            a, b = rng.uniform(-10.0, 10.0, 2)
            combined = mcmf_to_mci_dcm(a) @ mcmf_to_mci_dcm(b)
            assert combined == pytest.approx(mcmf_to_mci_dcm(a + b), abs=1e-13)


class TestSelenographic:
    @pytest.mark.parametrize(
        "lat, lon, expected",
        [
            (0.0, 0.0, [0.0, 1.0, 0.0]),
            (0.0, math.pi / 2, [1.0, 0.0, 0.0]),
            (math.pi / 2, 0.0, [0.0, 0.0, 1.0]),
            (-math.pi / 2, 0.0, [0.0, 0.0, -1.0]),
            (0.0, math.pi, [0.0, -1.0, 0.0]),
        ],
    )
    def test_cardinal_directions(self, lat, lon, expected):
        p = selenographic_to_mcmf(lat, lon, 1.0)
        assert p == pytest.approx(expected, abs=1e-15)

    def test_broadcasts(self):
        p = selenographic_to_mcmf(np.zeros(4), np.linspace(0.0, 1.0, 4), 1737.4)
        assert p.shape == (4, 3)
        assert np.linalg.norm(p, axis=1) == pytest.approx(np.full(4, 1737.4))

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            lat = rng.uniform(-math.pi / 2 + 1e-6, math.pi / 2 - 1e-6)
            lon = rng.uniform(-math.pi + 1e-6, math.pi)
            r = rng.uniform(1000.0, 2000.0)
            pt = mcmf_to_selenographic(selenographic_to_mcmf(lat, lon, r))
            assert pt.lat == pytest.approx(lat, abs=1e-12)
            assert pt.lon == pytest.approx(lon, abs=1e-12)
            assert pt.radius_km == pytest.approx(r, rel=1e-13)

    def test_pole_longitude_defined_as_zero(self):
        assert mcmf_to_selenographic([0.0, 0.0, 5.0]).lon == 0.0

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            mcmf_to_selenographic([0.0, 0.0, 0.0])

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"lat": 2.0, "lon": 0.0, "radius_km": 1.0},
            {"lat": 0.0, "lon": -math.pi, "radius_km": 1.0},
            {"lat": 0.0, "lon": 4.0, "radius_km": 1.0},
            {"lat": 0.0, "lon": 0.0, "radius_km": 0.0},
        ],
    )
    def test_point_validation(self, kwargs):
        with pytest.raises(ValueError):
            SelenographicPoint(**kwargs)


class TestQuaternions:
    def test_identity_product(self):
        q = quat_normalize([0.3, -0.4, 0.5, 0.1])
        identity = np.array([1.0, 0.0, 0.0, 0.0])
        assert quat_multiply(identity, q) == pytest.approx(q)
        assert quat_multiply(q, identity) == pytest.approx(q)
        assert quat_multiply(q, quat_conjugate(q)) == pytest.approx(identity, abs=1e-15)

    def test_two_quarter_turns_make_a_half_turn(self):
        qz90 = axis_angle_quat([0, 0, 1], math.pi / 2)
        assert quat_multiply(qz90, qz90) == pytest.approx([0.0, 0.0, 0.0, 1.0], abs=1e-15)

    def test_product_is_not_commutative(self):
        qx = axis_angle_quat([1, 0, 0], math.pi / 2)
        qy = axis_angle_quat([0, 1, 0], math.pi / 2)
        assert not np.allclose(quat_multiply(qx, qy), quat_multiply(qy, qx))

    def test_quarter_turn_about_z_maps_x_to_y(self):
        q = axis_angle_quat([0, 0, 1], math.pi / 2)
        assert quat_rotate(q, [1.0, 0.0, 0.0]) == pytest.approx([0.0, 1.0, 0.0], abs=1e-15)

    def test_dcm_matches_rodrigues_formula(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            axis = rng.normal(size=3)
            angle = rng.uniform(-math.pi, math.pi)
            got = quat_to_dcm(axis_angle_quat(axis, angle))
            assert got == pytest.approx(rodrigues(axis, angle), abs=1e-13)

    def test_dcm_is_product_homomorphism(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            q1 = quat_normalize(rng.normal(size=4))
            q2 = quat_normalize(rng.normal(size=4))
            lhs = quat_to_dcm(quat_multiply(q1, q2))
            assert lhs == pytest.approx(quat_to_dcm(q1) @ quat_to_dcm(q2), abs=1e-13)

    def test_double_cover(self):
        q = quat_normalize([0.2, 0.9, -0.1, 0.3])
        assert quat_to_dcm(q) == pytest.approx(quat_to_dcm(-q))

    def test_non_unit_quaternion_rejected(self):
        with pytest.raises(ValueError):
            quat_to_dcm([1.0, 1.0, 0.0, 0.0])

    def test_zero_quaternion_rejected(self):
        with pytest.raises(ValueError):
            quat_normalize([0.0, 0.0, 0.0, 0.0])


class TestDcmToQuat:
    @pytest.mark.parametrize("axis", [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
    @pytest.mark.parametrize("angle", [0.0, 0.4, math.pi / 2, 3.11, math.radians(179.9)])
    def test_round_trip_all_branches(self, axis, angle):
        q = axis_angle_quat(axis, angle)
        recovered = dcm_to_quat(quat_to_dcm(q))
        expected = q if q[0] >= 0.0 else -q
        assert recovered == pytest.approx(expected, abs=1e-12)

    def test_canonical_sign(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            q = quat_normalize(rng.normal(size=4))
            assert dcm_to_quat(quat_to_dcm(q))[0] >= 0.0

    @pytest.mark.parametrize(
        "matrix",
        [2.0 * np.eye(3), np.diag([1.0, 1.0, -1.0]), np.ones((3, 3)), np.eye(4)],
    )
    def test_non_rotation_rejected(self, matrix):
        with pytest.raises(ValueError):
            dcm_to_quat(matrix)


class TestOrbitFrame:
    def test_equatorial_circular_geometry(self):
        r = np.array([2000.0, 0.0, 0.0])
        v = np.array([0.0, 1.5, 0.0])
        dcm = orbit_frame_dcm(r, v)
        assert dcm[:, 0] == pytest.approx([0.0, 1.0, 0.0])   # x near velocity
        assert dcm[:, 1] == pytest.approx([0.0, 0.0, -1.0])  # y opposite h
        assert dcm[:, 2] == pytest.approx([-1.0, 0.0, 0.0])  # z toward nadir

    def test_axes_properties(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            r = rng.uniform(-1.0, 1.0, 3) * 2000.0
            v = rng.uniform(-1.0, 1.0, 3) * 2.0
            if np.linalg.norm(np.cross(r, v)) < 1.0:
                continue
            dcm = orbit_frame_dcm(r, v)
            assert dcm.T @ dcm == pytest.approx(np.eye(3), abs=1e-12)
            assert np.linalg.det(dcm) == pytest.approx(1.0)
            assert dcm[:, 2] @ r == pytest.approx(-np.linalg.norm(r))
            assert dcm[:, 1] @ np.cross(r, v) == pytest.approx(-np.linalg.norm(np.cross(r, v)))

    def test_parallel_vectors_rejected(self):
        with pytest.raises(ValueError):
            orbit_frame_dcm([1.0, 0.0, 0.0], [2.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            orbit_frame_dcm([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
