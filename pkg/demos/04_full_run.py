"""Run the full descent simulation and chart fix quality along the way.

Every second of the default descent the simulator detects craters, solves
for position and attitude, and logs the errors against the propagated truth.
The script summarizes convergence, reports the RMSE over the late-descent
window, and saves two plots: the visible-crater count and the per-axis
position error history.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from craternav import (
    STATUS_CONVERGED,
    ScenarioConfig,
    generate_synthetic,
    rmse_window,
    run_scenario,
)


def main():
    catalog = generate_synthetic(500_000, seed=2026)
    cfg = ScenarioConfig()
    records = run_scenario(cfg, catalog)

    converged = [r for r in records if r.estimate.status == STATUS_CONVERGED]
    print(f"{len(records)} epochs simulated, {len(converged)} fixes converged, "
          f"{sum(r.n_used <= 2 for r in records)} skipped for sparse coverage")

    window = (1800.0, 2400.0)
    out = rmse_window(records, *window)
    print(f"\nRMSE over t = {window[0]:.0f}..{window[1]:.0f} s "
          f"({out.n_converged} fixes):")
    print(f"  position  x {out.position_rmse_m[0]:6.2f}  y {out.position_rmse_m[1]:6.2f}  "
          f"z {out.position_rmse_m[2]:6.2f}  m")
    print(f"  attitude  roll {out.attitude_rmse_deg[0]:.5f}  pitch {out.attitude_rmse_deg[1]:.5f}  "
          f"yaw {out.attitude_rmse_deg[2]:.5f}  deg")

    t = np.array([r.t for r in records])
    visible = np.array([r.n_visible for r in records])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(t, visible)
    ax.set_xlabel("time since apoapsis [s]")
    ax.set_ylabel("craters above size cutoff")
    ax.set_title("Visible-crater count along the descent")
    ax.grid(alpha=0.3)
    out_counts = Path(__file__).with_name("04_visible_counts.png")
    fig.savefig(out_counts, dpi=120, bbox_inches="tight")

    tc = np.array([r.t for r in converged])
    err = np.array([r.position_error_m for r in converged])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for i, label in enumerate("xyz"):
        ax.plot(tc, err[:, i], label=label, linewidth=0.8)
    ax.set_xlabel("time since apoapsis [s]")
    ax.set_ylabel("position error [m]")
    ax.set_title("Per-axis position error of converged fixes")
    ax.legend()
    ax.grid(alpha=0.3)
    out_err = Path(__file__).with_name("04_position_error.png")
    fig.savefig(out_err, dpi=120, bbox_inches="tight")

    print(f"\nwrote {out_counts}")
    print(f"wrote {out_err}")


if __name__ == "__main__":
    main()
