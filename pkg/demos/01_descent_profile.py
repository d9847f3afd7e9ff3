"""Propagate the default ballistic descent and chart its altitude profile.

The trajectory starts at a 300 km apoapsis on a transfer ellipse whose
periapsis sits below the surface, so the coast ends at lunar impact.  The
script prints the orbit geometry, steps the propagator at 1 Hz until the
radius drops through the surface, and saves an altitude/speed profile plot
next to this file.
"""

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from craternav import (
    MOON,
    ScenarioConfig,
    build_initial_state,
    mcmf_to_mci_dcm,
    mcmf_to_selenographic,
    moon_rotation_angle,
    propagate,
    surface_impact,
)


def main():
    cfg = ScenarioConfig()
    state = build_initial_state(cfg)

    r_apo = np.linalg.norm(state.r)
    energy = 0.5 * float(state.v @ state.v) - MOON.mu_km3_s2 / r_apo
    sma = -MOON.mu_km3_s2 / (2.0 * energy)
    r_per = 2.0 * sma - r_apo

    print("Ballistic descent geometry")
    print(f"  apoapsis radius    {r_apo:10.1f} km  (altitude {r_apo - MOON.radius_km:.1f} km)")
    print(f"  periapsis radius   {r_per:10.1f} km  ({MOON.radius_km - r_per:.1f} km below the surface)")
    print(f"  inclination        {math.degrees(cfg.inclination_rad):10.1f} deg")
    print(f"  initial speed      {np.linalg.norm(state.v):10.4f} km/s")

    times, altitudes, speeds = [], [], []
    while not surface_impact(state):
        times.append(state.t)
        altitudes.append(state.radius_km - MOON.radius_km)
        speeds.append(float(np.linalg.norm(state.v)))
        state = propagate(state, cfg.dt_s)
        if state.t > cfg.duration_s:
            break

    theta = moon_rotation_angle(state.t)
    site = mcmf_to_selenographic(mcmf_to_mci_dcm(theta).T @ state.r)
    print("\nImpact")
    print(f"  time               {state.t:10.0f} s")
    print(f"  speed              {np.linalg.norm(state.v):10.4f} km/s")
    print(f"  site               lat {math.degrees(site.lat):+7.2f} deg, "
          f"lon {math.degrees(site.lon):+8.2f} deg")

    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax1.plot(times, altitudes)
    ax1.set_ylabel("altitude [km]")
    ax1.grid(alpha=0.3)
    ax2.plot(times, speeds, color="tab:red")
    ax2.set_xlabel("time since apoapsis [s]")
    ax2.set_ylabel("speed [km/s]")
    ax2.grid(alpha=0.3)
    fig.suptitle("Default descent: 300 km apoapsis to surface impact")
    out = Path(__file__).with_name("01_descent_profile.png")
    fig.savefig(out, dpi=120, bbox_inches="tight")
    print(f"\nwrote {out}")


if __name__ == "__main__":
    main()
