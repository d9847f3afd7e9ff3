"""Ground-truth spacecraft motion over the spherical Moon.

Translational dynamics are two-body point-mass gravity expressed through the
orbit frame; attitude follows quaternion kinematics driven by a body angular
rate.  Integration is classical fixed-step RK4 with quaternion
renormalization after every step.  Units: km, km/s, s, rad.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .frames import (
    MOON,
    MoonConstants,
    dcm_to_quat,
    orbit_frame_dcm,
    quat_normalize,
    quat_to_dcm,
)

__all__ = [
    "EpochState",
    "StateDerivative",
    "gravity_orbit_frame",
    "nadir_attitude",
    "propagate",
    "state_derivative",
    "surface_impact",
]


@dataclass
class EpochState:
    """Spacecraft state: time (s), MCI position r (km), MCI velocity v
    (km/s) and attitude quaternion q = q_ib."""

    t: float
    r: np.ndarray
    v: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        self.q = quat_normalize(self.q)

    @property
    def radius_km(self) -> float:
        return float(np.linalg.norm(self.r))

    def altitude_km(self, moon: MoonConstants = MOON) -> float:
        return self.radius_km - moon.radius_km


class StateDerivative(NamedTuple):
    r_dot: np.ndarray
    v_dot: np.ndarray
    q_dot: np.ndarray


def gravity_orbit_frame(radius_km: float, moon: MoonConstants = MOON) -> np.ndarray:
    """Point-mass gravity in orbit-frame coordinates: (0, 0, mu/r^2).

    The orbit frame's z axis points to nadir, so the acceleration is +z there.
    """
    if radius_km <= 0.0:
        raise ValueError("radius must be positive")
    return np.array([0.0, 0.0, moon.mu_km3_s2 / radius_km**2])


def _omega_matrix(w) -> np.ndarray:
    wx, wy, wz = w
    return np.array(
        [
            [0.0, -wx, -wy, -wz],
            [wx, 0.0, wz, -wy],
            [wy, -wz, 0.0, wx],
            [wz, wy, -wx, 0.0],
        ]
    )


def _derivatives(r, v, q, f_b, omega_b, moon):
    v_dot = orbit_frame_dcm(r, v) @ gravity_orbit_frame(float(np.linalg.norm(r)), moon)
    if f_b is not None:
        v_dot = v_dot + quat_to_dcm(q) @ np.asarray(f_b, dtype=float)
    if omega_b is None:
        q_dot = np.zeros(4)
    else:
        q_dot = 0.5 * (_omega_matrix(omega_b) @ q)
    return v, v_dot, q_dot


def state_derivative(
    state: EpochState,
    specific_force_b=None,
    omega_b=None,
    moon: MoonConstants = MOON,
) -> StateDerivative:
    """Time derivative of the state under gravity, an optional body-frame
    specific force and an optional body angular rate (rad/s)."""
    r_dot, v_dot, q_dot = _derivatives(state.r, state.v, state.q, specific_force_b, omega_b, moon)
    return StateDerivative(np.array(r_dot, dtype=float), v_dot, q_dot)


def propagate(
    state: EpochState,
    dt_s: float,
    specific_force_b=None,
    omega_b=None,
    moon: MoonConstants = MOON,
) -> EpochState:
    """Advance the state by one RK4 step of dt_s seconds."""
    if dt_s <= 0.0:
        raise ValueError("time step must be positive")
    r0, v0, q0 = state.r, state.v, state.q

    k1 = _derivatives(r0, v0, q0, specific_force_b, omega_b, moon)
    k2 = _derivatives(
        r0 + 0.5 * dt_s * k1[0], v0 + 0.5 * dt_s * k1[1], q0 + 0.5 * dt_s * k1[2],
        specific_force_b, omega_b, moon,
    )
    k3 = _derivatives(
        r0 + 0.5 * dt_s * k2[0], v0 + 0.5 * dt_s * k2[1], q0 + 0.5 * dt_s * k2[2],
        specific_force_b, omega_b, moon,
    )
    k4 = _derivatives(
        r0 + dt_s * k3[0], v0 + dt_s * k3[1], q0 + dt_s * k3[2],
        specific_force_b, omega_b, moon,
    )

    sixth = dt_s / 6.0
    r1 = r0 + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v1 = v0 + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    q1 = q0 + sixth * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    return EpochState(state.t + dt_s, r1, v1, quat_normalize(q1))


def surface_impact(state: EpochState, moon: MoonConstants = MOON) -> bool:
    """True once the position has fallen below the lunar surface."""
    return state.radius_km < moon.radius_km


def nadir_attitude(r, v) -> np.ndarray:
    """Quaternion locking the body frame to the orbit frame (boresight to
    nadir)."""
    return dcm_to_quat(orbit_frame_dcm(r, v))
