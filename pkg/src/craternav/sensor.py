"""Crater camera model: footprint geometry, visibility, noisy measurements.

The camera is a square pyramid looking along body +z.  Each step the four
corner rays are cast onto the spherical Moon; the lat/lon bounding region of
the four ground points selects candidate craters, an altitude-dependent
diameter threshold decides which are large enough to detect, and a Bernoulli
draw models the identification success rate.  Detected craters yield a unit
line-of-sight direction in the body frame plus a range, both with additive
Gaussian noise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import CraterCatalog, CraterRecord
from .frames import MOON, MoonConstants, mcmf_to_mci_dcm, mcmf_to_selenographic, quat_to_dcm
from .dynamics import EpochState

__all__ = [
    "CameraModel",
    "CraterObservation",
    "DetectionResult",
    "NoiseSpec",
    "corner_rays",
    "detect",
    "footprint_region",
    "identification_filter",
    "ray_sphere_intersection",
    "synthesize_measurements",
    "visibility_filter",
    "visibility_threshold_km",
]

log = logging.getLogger(__name__)

# Fitted minimum-detectable-diameter model: coefficient (km) and growth rate
# (1/km of altitude).
VISIBILITY_COEFF_KM = 0.1826
VISIBILITY_RATE_PER_KM = 0.01701


@dataclass(frozen=True)
class CameraModel:
    """Square-pyramid camera along body +z with the given FULL angle of view
    (radians) across each transverse axis.  For a half-angle specification,
    pass twice the half angle."""

    angle_of_view_rad: float = math.radians(45.0)

    def __post_init__(self):
        if not 0.0 < self.angle_of_view_rad < math.pi:
            raise ValueError("angle of view must lie in (0, pi)")


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement noise and identification model.

    sigma_direction is the per-component Gaussian noise on the unit
    line-of-sight vector (dimensionless); sigma_range_km the range noise;
    identification_probability the per-crater Bernoulli success rate.
    """

    sigma_direction: float = 1e-4
    sigma_range_km: float = 0.01
    identification_probability: float = 0.85
    seed: int = 0

    def __post_init__(self):
        if self.sigma_direction < 0.0 or self.sigma_range_km < 0.0:
            raise ValueError("noise levels must be nonnegative")
        if not 0.0 <= self.identification_probability <= 1.0:
            raise ValueError("identification probability must lie in [0, 1]")


NOISELESS = NoiseSpec(sigma_direction=0.0, sigma_range_km=0.0, identification_probability=1.0)


@dataclass(frozen=True)
class CraterObservation:
    """One detected crater: id, unit direction in the body frame, range (km)."""

    crater_id: int
    direction_body: np.ndarray
    range_km: float


@dataclass
class DetectionResult:
    """Everything one detection step produced.

    ``observations`` is order-aligned with ``catalog_indices``;
    ``matched_positions`` maps each observed crater id to its MCI position.
    Counts satisfy len(observations) <= n_identified <= n_visible <=
    n_candidates.
    """

    observations: list = field(default_factory=list)
    catalog_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    matched_positions: dict = field(default_factory=dict)
    n_candidates: int = 0
    n_visible: int = 0
    n_identified: int = 0
    footprint: tuple | None = None
    footprint_complete: bool = False


def corner_rays(q_ib, camera: CameraModel) -> np.ndarray:
    """Unit MCI directions of the four camera-pyramid corner rays (4, 3)."""
    t = math.tan(0.5 * camera.angle_of_view_rad)
    corners = np.array(
        [
            [t, t, 1.0],
            [t, -t, 1.0],
            [-t, -t, 1.0],
            [-t, t, 1.0],
        ]
    )
    corners /= math.sqrt(1.0 + 2.0 * t * t)
    return corners @ quat_to_dcm(q_ib).T


def ray_sphere_intersection(origin, direction, center=None, radius_km: float = MOON.radius_km):
    """Nearest forward intersection of a ray with a sphere, or None.

    Returns (point, distance).  ``direction`` must be a unit vector; misses
    and intersections behind the origin both return None.
    """
    u = np.asarray(direction, dtype=float)
    if abs(float(np.linalg.norm(u)) - 1.0) > 1e-9:
        raise ValueError("ray direction must be a unit vector")
    o = np.asarray(origin, dtype=float)
    m = o if center is None else o - np.asarray(center, dtype=float)
    b = float(u @ m)
    disc = b * b - (float(m @ m) - radius_km * radius_km)
    if disc < 0.0:
        return None
    d = -b - math.sqrt(disc)
    if d < 0.0:
        return None
    return o + d * u, d


def footprint_region(corner_points_mci, theta_m: float):
    """Lat/lon bounding region of the four corner ground points.

    Returns ((lat_lo, lat_hi), (lon_lo, lon_hi)); the longitude interval is
    the minimal arc containing all four points and wraps the +-pi seam when
    lon_lo > lon_hi.  The region is the bounding box of the corner points
    only, slightly over-inclusive versus the true ground quadrilateral.
    """
    pts = np.asarray(corner_points_mci, dtype=float)
    if pts.shape != (4, 3):
        raise ValueError("expected four MCI corner points")
    to_mcmf = mcmf_to_mci_dcm(theta_m).T
    lats, lons = [], []
    for p in pts:
        sp = mcmf_to_selenographic(to_mcmf @ p)
        lats.append(sp.lat)
        lons.append(sp.lon)
    lam = np.sort(np.asarray(lons))
    gaps = np.append(np.diff(lam), lam[0] + 2.0 * math.pi - lam[-1])
    k = int(np.argmax(gaps))
    if k == lam.size - 1:
        lon_range = (float(lam[0]), float(lam[-1]))
    else:
        lon_range = (float(lam[k + 1]), float(lam[k]))
    return (min(lats), max(lats)), lon_range


def visibility_threshold_km(altitude_km: float, diameter_units: str = "km") -> float:
    """Smallest detectable crater diameter (km) at the given altitude.

    The empirical threshold grows exponentially with altitude.  The fitted
    coefficient is interpreted in km by default; ``diameter_units="m"``
    selects the literal-meters reading (threshold / 1000), under which
    essentially every cataloged crater is visible from any altitude.
    """
    if altitude_km < 0.0:
        raise ValueError("altitude must be nonnegative")
    threshold = VISIBILITY_COEFF_KM * math.exp(VISIBILITY_RATE_PER_KM * altitude_km)
    if diameter_units == "m":
        return threshold / 1000.0
    if diameter_units != "km":
        raise ValueError(f"unknown diameter units {diameter_units!r}")
    return threshold


def visibility_filter(craters, altitude_km: float, diameter_units: str = "km") -> list:
    """Craters whose diameter exceeds the altitude-dependent threshold."""
    thr = visibility_threshold_km(altitude_km, diameter_units)
    return [c for c in craters if c.diameter_km > thr]


def identification_filter(craters, probability: float, rng) -> list:
    """Bernoulli thinning: each crater is identified with the given
    probability."""
    if not 0.0 <= probability <= 1.0:
        raise ValueError("probability must lie in [0, 1]")
    keep = rng.random(len(craters)) < probability
    return [c for c, k in zip(craters, keep) if k]


def synthesize_measurements(state: EpochState, crater_ids, positions_mci,
                            noise: NoiseSpec, rng):
    """Noisy body-frame directions and ranges toward the given craters.

    Returns (observations, kept) where ``kept`` indexes the input rows that
    produced an observation; craters coincident with the spacecraft or with
    a non-positive noisy range are dropped with a diagnostic.
    """
    positions = np.atleast_2d(np.asarray(positions_mci, dtype=float))
    crater_ids = np.asarray(crater_ids, dtype=np.int64)
    diff = positions - state.r
    dist = np.linalg.norm(diff, axis=1)
    ok = dist > 0.0
    if not np.all(ok):
        log.warning("dropping %d crater(s) coincident with the spacecraft", int((~ok).sum()))
    kept = np.flatnonzero(ok)
    if kept.size == 0:
        return [], kept

    dirs_i = diff[kept] / dist[kept, None]
    r_bi = quat_to_dcm(state.q).T
    dirs_b = dirs_i @ r_bi.T
    dirs_b = dirs_b + rng.normal(0.0, noise.sigma_direction, dirs_b.shape)
    norms = np.linalg.norm(dirs_b, axis=1)
    ranges = dist[kept] + rng.normal(0.0, noise.sigma_range_km, kept.size)

    good = (norms > 0.0) & (ranges > 0.0)
    if not np.all(good):
        log.warning("dropping %d measurement(s) with non-positive range", int((~good).sum()))
        kept = kept[good]
        dirs_b, norms, ranges = dirs_b[good], norms[good], ranges[good]
    dirs_b /= norms[:, None]

    observations = [
        CraterObservation(int(crater_ids[j]), dirs_b[i], float(ranges[i]))
        for i, j in enumerate(kept)
    ]
    return observations, kept


def detect(state: EpochState, catalog: CraterCatalog, camera: CameraModel,
           noise: NoiseSpec, theta_m: float, rng,
           diameter_units: str = "km", moon: MoonConstants = MOON) -> DetectionResult:
    """Run one full detection step: footprint, candidates, visibility,
    identification, measurement synthesis.

    Raises ValueError if the spacecraft is not above the surface.  If any
    corner ray misses the Moon the footprint is incomplete and the step
    yields no detections.
    """
    altitude = state.radius_km - moon.radius_km
    if altitude <= 0.0:
        raise ValueError("spacecraft must be above the surface to detect craters")

    rays = corner_rays(state.q, camera)
    pts = []
    for u in rays:
        hit = ray_sphere_intersection(state.r, u, radius_km=moon.radius_km)
        if hit is None:
            log.debug("corner ray missed the Moon at t=%.1f; skipping detection", state.t)
            return DetectionResult()
        pts.append(hit[0])

    region = footprint_region(np.asarray(pts), theta_m)
    cand = catalog.query_region_indices(*region)
    thr = visibility_threshold_km(altitude, diameter_units)
    vis = cand[catalog.diameter_km[cand] > thr]
    ident = vis[rng.random(vis.size) < noise.identification_probability]

    positions = catalog.positions_mci(ident, theta_m)
    observations, kept = synthesize_measurements(state, catalog.ids[ident], positions, noise, rng)
    matched = {obs.crater_id: positions[j] for obs, j in zip(observations, kept)}
    return DetectionResult(
        observations=observations,
        catalog_indices=ident[kept],
        matched_positions=matched,
        n_candidates=int(cand.size),
        n_visible=int(vis.size),
        n_identified=int(ident.size),
        footprint=region,
        footprint_complete=True,
    )
