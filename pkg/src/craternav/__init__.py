"""craternav: lunar crater-based terrain-absolute navigation simulator.

Propagates a ballistic lunar descent, synthesizes crater observations
through a nadir camera model, and estimates the spacecraft pose — position
by nonlinear least squares on crater ranges, attitude by QUEST — against
the ground truth.
"""

from .frames import (
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
from .dynamics import (
    EpochState,
    gravity_orbit_frame,
    nadir_attitude,
    propagate,
    state_derivative,
    surface_impact,
)
from .catalog import (
    CatalogError,
    CraterCatalog,
    CraterRecord,
    ROBBINS_COLUMN_MAP,
    crater_position_mci,
    generate_synthetic,
    load_catalog,
    load_catalog_text,
)
from .sensor import (
    NOISELESS,
    CameraModel,
    CraterObservation,
    DetectionResult,
    NoiseSpec,
    corner_rays,
    detect,
    footprint_region,
    identification_filter,
    ray_sphere_intersection,
    synthesize_measurements,
    visibility_filter,
    visibility_threshold_km,
)
from .estimator import (
    NlsSettings,
    PoseEstimate,
    STATUS_CONVERGED,
    STATUS_DIVERGED,
    STATUS_SKIPPED,
    build_reference_vectors,
    cold_start_position,
    estimate_attitude_quest,
    estimate_pose,
    estimate_position,
    nls_jacobian,
    nls_residuals,
    wahba_loss,
)
from .scenario import (
    DEFAULT_PERIAPSIS_RADIUS_KM,
    ScenarioConfig,
    StepRecord,
    SweepResult,
    WindowRmse,
    attitude_error_euler,
    build_initial_state,
    crater_limit_sweep,
    rmse_window,
    run_scenario,
    select_craters,
)

__version__ = "0.1.0"

__all__ = [
    "MOON",
    "MoonConstants",
    "SelenographicPoint",
    "EpochState",
    "CatalogError",
    "CraterCatalog",
    "CraterRecord",
    "ROBBINS_COLUMN_MAP",
    "CameraModel",
    "CraterObservation",
    "DetectionResult",
    "NOISELESS",
    "NoiseSpec",
    "NlsSettings",
    "PoseEstimate",
    "STATUS_CONVERGED",
    "STATUS_DIVERGED",
    "STATUS_SKIPPED",
    "DEFAULT_PERIAPSIS_RADIUS_KM",
    "ScenarioConfig",
    "StepRecord",
    "SweepResult",
    "WindowRmse",
    "attitude_error_euler",
    "build_initial_state",
    "build_reference_vectors",
    "corner_rays",
    "crater_limit_sweep",
    "crater_position_mci",
    "dcm_to_quat",
    "cold_start_position",
    "detect",
    "estimate_attitude_quest",
    "estimate_pose",
    "estimate_position",
    "footprint_region",
    "generate_synthetic",
    "gravity_orbit_frame",
    "identification_filter",
    "load_catalog",
    "load_catalog_text",
    "mcmf_to_mci_dcm",
    "mcmf_to_selenographic",
    "moon_rotation_angle",
    "nadir_attitude",
    "nls_jacobian",
    "nls_residuals",
    "orbit_frame_dcm",
    "propagate",
    "quat_conjugate",
    "quat_multiply",
    "quat_normalize",
    "quat_rotate",
    "quat_to_dcm",
    "ray_sphere_intersection",
    "rmse_window",
    "run_scenario",
    "select_craters",
    "selenographic_to_mcmf",
    "state_derivative",
    "surface_impact",
    "synthesize_measurements",
    "visibility_filter",
    "visibility_threshold_km",
    "wahba_loss",
]
