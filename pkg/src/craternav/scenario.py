"""Hard-landing descent experiment: truth propagation, per-step crater
detection and pose estimation, error series, RMSE windows, crater-limit sweep.

The reference trajectory starts at the apoapsis of an elliptical orbit whose
periapsis lies inside the Moon, so the spacecraft falls ballistically until
surface impact (about 3000 s from a 300 km apoapsis).  Each step the truth
state is propagated, the nadir-locked camera detects craters, the crater list
is optionally capped, and pose is estimated with the previous converged
position as warm start.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import CraterCatalog
from .dynamics import EpochState, nadir_attitude, propagate, surface_impact
from .estimator import (
    STATUS_CONVERGED,
    STATUS_SKIPPED,
    NlsSettings,
    PoseEstimate,
    estimate_pose,
)
from .frames import (
    MOON,
    MoonConstants,
    moon_rotation_angle,
    quat_conjugate,
    quat_multiply,
    quat_to_dcm,
)
from .sensor import CameraModel, NoiseSpec, detect

__all__ = [
    "DEFAULT_PERIAPSIS_RADIUS_KM",
    "DEFAULT_SWEEP_LIMITS",
    "DEFAULT_WINDOW_S",
    "ScenarioConfig",
    "StepRecord",
    "SweepResult",
    "WindowRmse",
    "attitude_error_euler",
    "build_initial_state",
    "crater_limit_sweep",
    "rmse_window",
    "run_scenario",
    "select_craters",
]

# Periapsis radius (inside the Moon) calibrated by bisection so that the
# default 300 km-apoapsis descent impacts the surface near t = 3020 s.
DEFAULT_PERIAPSIS_RADIUS_KM = 1710.3

DEFAULT_SWEEP_LIMITS = (10, 20, 50, 100, 200, None)
DEFAULT_WINDOW_S = (1800.0, 2400.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of one descent experiment.

    ``crater_limit`` of None means unlimited; ``selection_policy`` is
    "largest" (largest diameter first) or "random".  The single seed feeds
    two independent streams, one for detection noise and one for random
    selection, so runs differing only in the limit share identical
    detections.
    """

    apoapsis_altitude_km: float = 300.0
    periapsis_radius_km: float = DEFAULT_PERIAPSIS_RADIUS_KM
    inclination_rad: float = math.radians(15.0)
    duration_s: float = 3600.0
    dt_s: float = 1.0
    camera: CameraModel = field(default_factory=CameraModel)
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    estimator: NlsSettings = field(default_factory=NlsSettings)
    crater_limit: int | None = None
    selection_policy: str = "largest"
    diameter_units: str = "km"
    seed: int = 0

    def __post_init__(self):
        if self.apoapsis_altitude_km <= 0.0:
            raise ValueError("apoapsis altitude must be positive")
        if self.dt_s <= 0.0 or self.duration_s <= 0.0:
            raise ValueError("time step and duration must be positive")
        if self.crater_limit is not None and self.crater_limit < 0:
            raise ValueError("crater limit must be >= 0 or None for unlimited")
        if self.selection_policy not in ("largest", "random"):
            raise ValueError(f"unknown selection policy {self.selection_policy!r}")


@dataclass
class StepRecord:
    """One epoch of a run: counts, truth, estimate, and errors.

    Error fields are None on non-converged steps.  ``warm_start_mci`` is the
    estimator's initial guess entering the step (None before the first
    convergence), recorded so warm-start behavior is directly testable.
    """

    t: float
    state: EpochState
    altitude_km: float
    n_candidates: int
    n_visible: int
    n_identified: int
    n_used: int
    estimate: PoseEstimate
    position_error_m: np.ndarray | None = None
    attitude_error_deg: np.ndarray | None = None
    warm_start_mci: np.ndarray | None = None


@dataclass
class WindowRmse:
    """Per-axis RMSE (position in m, attitude in deg) over converged steps in
    one time window, with the converged/skipped split."""

    position_rmse_m: np.ndarray
    attitude_rmse_deg: np.ndarray
    n_converged: int
    n_skipped: int
    window_s: tuple


@dataclass
class SweepResult:
    """Crater-limit sweep output: one run and one RMSE row per limit."""

    limits: list
    rmse: list
    records: dict
    window_s: tuple


def build_initial_state(cfg: ScenarioConfig, moon: MoonConstants = MOON) -> EpochState:
    """Truth state at apoapsis of the configured orbit, nadir-locked.

    The apoapsis is placed on the MCI -x axis with the orbit plane rotated
    about +x by the inclination, so the descending motion starts along -y.
    """
    r_apo = moon.radius_km + cfg.apoapsis_altitude_km
    r_per = cfg.periapsis_radius_km
    if r_per <= 0.0:
        raise ValueError("periapsis radius must be positive")
    if r_per > r_apo:
        raise ValueError("periapsis radius exceeds apoapsis radius")
    sma = 0.5 * (r_apo + r_per)
    v_apo = math.sqrt(moon.mu_km3_s2 * (2.0 / r_apo - 1.0 / sma))
    ci, si = math.cos(cfg.inclination_rad), math.sin(cfg.inclination_rad)
    r0 = np.array([-r_apo, 0.0, 0.0])
    v0 = np.array([0.0, -v_apo * ci, -v_apo * si])
    return EpochState(0.0, r0, v0, nadir_attitude(r0, v0))


def select_craters(observations, diameters_km, limit, policy: str = "largest",
                   rng=None) -> np.ndarray:
    """Positions (into ``observations``) of the craters to keep under a cap.

    Under the default policy the ``limit`` largest diameters win, ties broken
    by crater id; "random" draws a seeded uniform subset.  The returned index
    array is ascending, preserving the original observation order.
    """
    n = len(observations)
    if limit is None or n <= limit:
        return np.arange(n, dtype=np.int64)
    if limit == 0:
        return np.empty(0, dtype=np.int64)
    if policy == "largest":
        ids = np.array([obs.crater_id for obs in observations], dtype=np.int64)
        order = np.lexsort((ids, -np.asarray(diameters_km, dtype=float)))
        chosen = order[:limit]
    elif policy == "random":
        if rng is None:
            raise ValueError("random selection policy needs an rng")
        chosen = rng.choice(n, size=limit, replace=False)
    else:
        raise ValueError(f"unknown selection policy {policy!r}")
    return np.sort(chosen.astype(np.int64))


def attitude_error_euler(q_estimate, q_true) -> np.ndarray:
    """3-2-1 Euler angles (degrees) of the body-frame error rotation.

    The error quaternion is true^-1 * estimate, i.e. the small rotation that
    carries the true body axes onto the estimated ones; a 0.01 deg estimate
    offset about body z therefore reads out as yaw = 0.01 deg regardless of
    the absolute attitude.
    """
    r = quat_to_dcm(quat_multiply(quat_conjugate(q_true), q_estimate))
    roll = math.atan2(r[2, 1], r[2, 2])
    pitch = math.asin(min(1.0, max(-1.0, -r[2, 0])))
    yaw = math.atan2(r[1, 0], r[0, 0])
    return np.degrees([roll, pitch, yaw])


def run_scenario(cfg: ScenarioConfig, catalog: CraterCatalog,
                 moon: MoonConstants = MOON) -> list:
    """Run the full descent and return one StepRecord per epoch.

    Epochs are recorded at t = 0, dt, 2*dt, ... until the configured duration
    or the last epoch above the surface, whichever comes first.  The run is a
    pure function of (config, catalog): all randomness flows from cfg.seed.
    """
    if len(catalog) == 0:
        raise ValueError("crater catalog is empty")
    det_rng = np.random.default_rng([cfg.seed, 0])
    sel_rng = np.random.default_rng([cfg.seed, 1])

    records: list[StepRecord] = []
    state = build_initial_state(cfg, moon)
    warm_start = None
    n_steps = int(round(cfg.duration_s / cfg.dt_s))

    for k in range(n_steps + 1):
        theta_m = moon_rotation_angle(state.t, moon.spin_rate_rad_s)
        result = detect(state, catalog, cfg.camera, cfg.noise, theta_m, det_rng,
                        cfg.diameter_units, moon)

        diameters = catalog.diameter_km[result.catalog_indices]
        keep = select_craters(result.observations, diameters, cfg.crater_limit,
                              cfg.selection_policy, sel_rng)
        obs = [result.observations[i] for i in keep]
        kept_rows = result.catalog_indices[keep]
        centers = (catalog.positions_mci(kept_rows, theta_m) if kept_rows.size
                   else np.empty((0, 3)))
        estimate = estimate_pose(
            centers,
            np.array([o.range_km for o in obs]),
            np.array([o.direction_body for o in obs]).reshape(len(obs), 3),
            initial_guess=warm_start,
            settings=cfg.estimator,
        )

        record = StepRecord(
            t=state.t,
            state=state,
            altitude_km=state.radius_km - moon.radius_km,
            n_candidates=result.n_candidates,
            n_visible=result.n_visible,
            n_identified=result.n_identified,
            n_used=len(obs),
            estimate=estimate,
            warm_start_mci=None if warm_start is None else warm_start.copy(),
        )
        if estimate.status == STATUS_CONVERGED:
            record.position_error_m = (estimate.position_mci - state.r) * 1e3
            record.attitude_error_deg = attitude_error_euler(estimate.quaternion_ib, state.q)
            warm_start = estimate.position_mci
        records.append(record)

        if k == n_steps:
            break
        state = propagate(state, cfg.dt_s, moon=moon)
        state = EpochState(state.t, state.r, state.v, nadir_attitude(state.r, state.v))
        if surface_impact(state, moon):
            break
    return records


def rmse_window(records, t_start: float, t_end: float) -> WindowRmse:
    """Per-axis RMSE over the converged steps with t in [t_start, t_end].

    Non-converged steps are excluded from the averages and counted in
    ``n_skipped``; a window without a single converged step is an error.
    """
    in_window = [rec for rec in records if t_start <= rec.t <= t_end]
    converged = [rec for rec in in_window if rec.estimate.status == STATUS_CONVERGED]
    if not converged:
        raise ValueError(
            f"no converged steps in window [{t_start}, {t_end}] s "
            f"({len(in_window)} steps inspected)"
        )
    pos = np.array([rec.position_error_m for rec in converged])
    att = np.array([rec.attitude_error_deg for rec in converged])
    return WindowRmse(
        position_rmse_m=np.sqrt(np.mean(pos**2, axis=0)),
        attitude_rmse_deg=np.sqrt(np.mean(att**2, axis=0)),
        n_converged=len(converged),
        n_skipped=len(in_window) - len(converged),
        window_s=(t_start, t_end),
    )


def crater_limit_sweep(cfg: ScenarioConfig, catalog: CraterCatalog,
                       limits=DEFAULT_SWEEP_LIMITS, window_s=DEFAULT_WINDOW_S,
                       moon: MoonConstants = MOON) -> SweepResult:
    """One full run per crater limit on identical seeds, with window RMSE.

    Detection randomness is drawn before the limit is applied, so every run
    sees the same crater observations and the limit is the only difference.
    """
    limits = list(limits)
    rows, per_limit = [], {}
    for limit in limits:
        records = run_scenario(dataclasses.replace(cfg, crater_limit=limit), catalog, moon)
        per_limit[limit] = records
        rows.append(rmse_window(records, *window_s))
    return SweepResult(limits=limits, rmse=rows, records=per_limit, window_s=tuple(window_s))
