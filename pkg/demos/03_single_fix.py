"""Estimate one position/attitude fix from a single frame of crater sightings.

The spacecraft is coasted 2000 s into the default descent, the catalog is
observed through the nadir camera with realistic noise, and the pose is
solved cold (no prior position).  The script prints the detection counts,
the Gauss-Newton iteration history, and the final errors against truth.
"""

import numpy as np

from craternav import (
    EpochState,
    ScenarioConfig,
    attitude_error_euler,
    build_initial_state,
    detect,
    estimate_pose,
    generate_synthetic,
    moon_rotation_angle,
    nadir_attitude,
    propagate,
)


def main():
    cfg = ScenarioConfig()
    state = build_initial_state(cfg)
    while state.t < 2000.0:
        state = propagate(state, cfg.dt_s)
    # Point the camera back down; the coast above was pure ballistic motion.
    state = EpochState(state.t, state.r, state.v, nadir_attitude(state.r, state.v))

    print(f"epoch t = {state.t:.0f} s, altitude {state.radius_km - 1737.4:.1f} km")

    catalog = generate_synthetic(500_000, seed=2026)
    rng = np.random.default_rng(7)
    frame = detect(state, catalog, cfg.camera, cfg.noise, moon_rotation_angle(state.t), rng)
    print(f"craters in footprint {frame.n_candidates}, above size cutoff "
          f"{frame.n_visible}, identified {frame.n_identified}")

    centers = np.array([frame.matched_positions[obs.crater_id] for obs in frame.observations])
    ranges = np.array([obs.range_km for obs in frame.observations])
    directions = np.array([obs.direction_body for obs in frame.observations])
    pose = estimate_pose(centers, ranges, directions)

    print(f"\nsolver status: {pose.status} after {pose.iterations} iterations")
    print("residual norm per iteration:")
    for i, rnorm in enumerate(pose.residual_history):
        print(f"  iter {i}: {rnorm:12.6e}")

    err_m = 1000.0 * (pose.position_mci - state.r)
    euler = attitude_error_euler(pose.quaternion_ib, state.q)
    print(f"\nposition error  [{err_m[0]:+8.2f}, {err_m[1]:+8.2f}, {err_m[2]:+8.2f}] m")
    print(f"attitude error  roll {euler[0]:+.4f} deg, pitch {euler[1]:+.4f} deg, "
          f"yaw {euler[2]:+.4f} deg")
    print(f"({pose.n_craters} craters in the solution)")


if __name__ == "__main__":
    main()
