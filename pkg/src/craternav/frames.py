"""Lunar coordinate frames and rotation algebra.

Frames used throughout the package:

* MCI  - Moon-centered inertial; z along the lunar spin axis.
* MCMF - Moon-centered Moon-fixed; coincides with MCI at t = 0 and rotates
  about the shared z axis at the constant lunar spin rate.
* selenographic - spherical Moon-fixed coordinates (latitude, longitude,
  radius) over the MCMF axes: (lat, lon) = (0, 0) lies on +Y, lon = +90 deg
  on +X, the north pole on +Z.
* orbit frame - z toward nadir (-r_hat), y opposite the orbital angular
  momentum, x completing the right-handed triad (near the velocity
  direction for prograde orbits).
* body - spacecraft-fixed; the camera boresight is body +z.

Quaternion convention, declared once and used everywhere: scalar-first
``[w, x, y, z]`` with the Hamilton product.  ``q_ib`` carries body-frame
coordinates into MCI: ``v_i = quat_to_dcm(q_ib) @ v_b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "MOON",
    "MoonConstants",
    "SelenographicPoint",
    "dcm_to_quat",
    "mcmf_to_mci_dcm",
    "mcmf_to_selenographic",
    "moon_rotation_angle",
    "orbit_frame_dcm",
    "quat_conjugate",
    "quat_multiply",
    "quat_normalize",
    "quat_rotate",
    "quat_to_dcm",
    "selenographic_to_mcmf",
]

# Orthonormality tolerance for matrices accepted as rotations.
DCM_TOL = 1e-10


@dataclass(frozen=True)
class MoonConstants:
    """Spherical-Moon model constants (fact-sheet values)."""

    radius_km: float = 1737.4
    mu_km3_s2: float = 4902.8
    spin_rate_rad_s: float = 2.6617e-6

    def __post_init__(self):
        if min(self.radius_km, self.mu_km3_s2, self.spin_rate_rad_s) <= 0.0:
            raise ValueError("Moon constants must be strictly positive")


MOON = MoonConstants()


@dataclass(frozen=True)
class SelenographicPoint:
    """Moon-fixed spherical coordinates; angles in radians, radius in km."""

    lat: float
    lon: float
    radius_km: float

    def __post_init__(self):
        if not -math.pi / 2 <= self.lat <= math.pi / 2:
            raise ValueError(f"latitude {self.lat!r} outside [-pi/2, pi/2]")
        if not -math.pi < self.lon <= math.pi:
            raise ValueError(f"longitude {self.lon!r} outside (-pi, pi]")
        if not self.radius_km > 0.0:
            raise ValueError("radius must be positive")


def moon_rotation_angle(t_s: float, spin_rate_rad_s: float = MOON.spin_rate_rad_s) -> float:
    """Angle of the MCMF frame relative to MCI after ``t_s`` seconds."""
    if t_s < 0.0:
        raise ValueError("time must be nonnegative")
    return spin_rate_rad_s * t_s


def mcmf_to_mci_dcm(theta_m: float) -> np.ndarray:
    """DCM taking MCMF coordinates to MCI for Moon rotation angle theta_m."""
    c, s = math.cos(theta_m), math.sin(theta_m)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def selenographic_to_mcmf(lat, lon, radius_km) -> np.ndarray:
    """Cartesian MCMF position(s) of selenographic coordinates.

    Accepts scalars or broadcastable arrays; returns shape ``(..., 3)`` in km.
    """
    lat = np.asarray(lat, dtype=float)
    lon = np.asarray(lon, dtype=float)
    radius_km = np.asarray(radius_km, dtype=float)
    x = radius_km * np.cos(lat) * np.sin(lon)
    y = radius_km * np.cos(lat) * np.cos(lon)
    z = radius_km * np.sin(lat)
    return np.stack(np.broadcast_arrays(x, y, z), axis=-1)


def mcmf_to_selenographic(v) -> SelenographicPoint:
    """Inverse of :func:`selenographic_to_mcmf` for a single MCMF point.

    Longitude is measured with atan2(x, y) so that (0, 0) lies on +Y; it is
    defined as exactly 0 at the poles and kept in (-pi, pi].
    """
    v = np.asarray(v, dtype=float)
    r = float(np.linalg.norm(v))
    if r == 0.0:
        raise ValueError("zero vector has no selenographic coordinates")
    lat = math.asin(min(1.0, max(-1.0, v[2] / r)))
    lon = math.atan2(v[0], v[1])
    if lon <= -math.pi:
        lon = math.pi
    return SelenographicPoint(lat, lon, r)


def quat_normalize(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(q))
    if n == 0.0:
        raise ValueError("cannot normalize a zero quaternion")
    return q / n


def quat_conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_multiply(q, p) -> np.ndarray:
    """Hamilton product q*p (scalar-first)."""
    w1, x1, y1, z1 = np.asarray(q, dtype=float)
    w2, x2, y2, z2 = np.asarray(p, dtype=float)
    return np.array(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    )


def quat_to_dcm(q) -> np.ndarray:
    """Rotation matrix of a unit quaternion (for q_ib this is R_ib)."""
    q = np.asarray(q, dtype=float)
    n = float(np.linalg.norm(q))
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"quaternion norm {n} too far from unity")
    w, x, y, z = q / n
    return np.array(
        [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ]
    )


def _check_rotation(m: np.ndarray) -> None:
    if m.shape != (3, 3):
        raise ValueError("DCM must be 3x3")
    if not np.all(np.isfinite(m)):
        raise ValueError("DCM has non-finite entries")
    err = float(np.max(np.abs(m.T @ m - np.eye(3))))
    det = float(np.linalg.det(m))
    if err > DCM_TOL or abs(det - 1.0) > DCM_TOL:
        raise ValueError(
            f"matrix is not a rotation (orthonormality error {err:.3e}, det {det:.12f})"
        )


def dcm_to_quat(dcm) -> np.ndarray:
    """Quaternion of a rotation matrix, canonical sign (scalar >= 0)."""
    m = np.asarray(dcm, dtype=float)
    _check_rotation(m)
    t = m[0, 0] + m[1, 1] + m[2, 2]
    # Shepperd's method: pick the numerically largest of the four pivots.
    branch = int(np.argmax([t, m[0, 0], m[1, 1], m[2, 2]]))
    if branch == 0:
        s = 2.0 * math.sqrt(1.0 + t)
        q = np.array(
            [s / 4.0, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s]
        )
    elif branch == 1:
        s = 2.0 * math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2])
        q = np.array(
            [(m[2, 1] - m[1, 2]) / s, s / 4.0, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s]
        )
    elif branch == 2:
        s = 2.0 * math.sqrt(1.0 - m[0, 0] + m[1, 1] - m[2, 2])
        q = np.array(
            [(m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, s / 4.0, (m[1, 2] + m[2, 1]) / s]
        )
    else:
        s = 2.0 * math.sqrt(1.0 - m[0, 0] - m[1, 1] + m[2, 2])
        q = np.array(
            [(m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, s / 4.0]
        )
    q = quat_normalize(q)
    if q[0] < 0.0:
        q = -q
    return q


def quat_rotate(q, v) -> np.ndarray:
    """Rotate vector v by quaternion q: quat_to_dcm(q) @ v."""
    return quat_to_dcm(q) @ np.asarray(v, dtype=float)


def orbit_frame_dcm(r, v) -> np.ndarray:
    """DCM from the orbit frame to MCI (columns are the orbit axes in MCI).

    z points to nadir, y along -h with h = r x v, x = y x z.  Raises for
    degenerate geometry (zero or parallel r, v).
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    rn = float(np.linalg.norm(r))
    vn = float(np.linalg.norm(v))
    h = np.cross(r, v)
    hn = float(np.linalg.norm(h))
    if rn == 0.0 or vn == 0.0 or hn <= 1e-12 * rn * vn:
        raise ValueError("orbit frame undefined: r and v are parallel or zero")
    z = -r / rn
    y = -h / hn
    x = np.cross(y, z)
    return np.column_stack((x, y, z))
