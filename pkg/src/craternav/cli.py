"""Command-line front end: catalog tooling, descent runs, crater-limit sweeps.

Subcommands::

    craternav catalog import   raw CSV -> canonical catalog + rejection report
    craternav catalog generate synthetic catalog -> canonical CSV
    craternav run              one descent -> steps.csv (+ plots) + manifest
    craternav sweep            one run per crater limit -> rmse_table.csv + ...

Configs are flat ``key = value`` text with units spelled in the key names;
every effective value (defaults included) is echoed into the manifest, and
all numeric CSV output uses 17-significant-digit decimal so reruns are
bit-comparable.  Exit codes: 0 success, 1 usage error, 2 input-data error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import (
    CatalogError,
    CraterCatalog,
    ROBBINS_COLUMN_MAP,
    generate_synthetic,
    load_catalog,
)
from .estimator import STATUS_CONVERGED, NlsSettings
from .scenario import (
    DEFAULT_PERIAPSIS_RADIUS_KM,
    DEFAULT_SWEEP_LIMITS,
    DEFAULT_WINDOW_S,
    ScenarioConfig,
    SweepResult,
    crater_limit_sweep,
    run_scenario,
)
from .sensor import CameraModel, NoiseSpec

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3

STEPS_SCHEMA = "craternav-steps-v1"
RMSE_SCHEMA = "craternav-rmse-v1"

STEPS_HEADER = [
    "t_s", "x_km", "y_km", "z_km", "vx_km_s", "vy_km_s", "vz_km_s",
    "altitude_km", "n_candidates", "n_visible", "n_identified", "n_used",
    "status", "iterations",
    "est_x_km", "est_y_km", "est_z_km",
    "est_qw", "est_qx", "est_qy", "est_qz",
    "err_x_m", "err_y_m", "err_z_m",
    "err_roll_deg", "err_pitch_deg", "err_yaw_deg",
]


class ConfigError(ValueError):
    """Bad config file or config value."""


class _Parser(argparse.ArgumentParser):
    """argparse defaults to exit code 2 on usage errors; remap to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _g17(x) -> str:
    return format(float(x), ".17g")


def _sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


# -- config files -------------------------------------------------------------

CONFIG_KEYS = (
    "apoapsis_altitude_km",
    "periapsis_radius_km",
    "inclination_deg",
    "duration_s",
    "dt_s",
    "camera_angle_of_view_deg",
    "sigma_direction",
    "sigma_range_km",
    "identification_probability",
    "crater_limit",
    "selection_policy",
    "threshold_units",
    "nls_tolerance_km",
    "nls_max_iterations",
    "seed",
)


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` config; '#' starts a comment."""
    raw = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate config key {key!r}")
        raw[key] = value
    return raw


def _get(raw, key, cast, default):
    value = raw.get(key)
    if value is None:
        return default
    try:
        return cast(value)
    except ValueError as exc:
        raise ConfigError(f"config key {key!r}: {exc}") from exc


def _cast_limit(value: str):
    if value.lower() in ("unlimited", "none"):
        return None
    limit = int(value)
    if limit < 0:
        raise ValueError(f"negative crater limit {limit}")
    return limit


def build_scenario_config(raw: dict, seed=None, noiseless: bool = False,
                          threshold_units=None) -> tuple:
    """Effective ScenarioConfig from raw config text plus CLI overrides.

    Returns (config, echo) where ``echo`` maps every config key to the
    string form of the value actually used, for the manifest.
    """
    sigma_d = 0.0 if noiseless else _get(raw, "sigma_direction", float, 1e-4)
    sigma_rho = 0.0 if noiseless else _get(raw, "sigma_range_km", float, 0.01)
    ident_p = 1.0 if noiseless else _get(raw, "identification_probability", float, 0.85)
    units = threshold_units or _get(raw, "threshold_units", str, "km")
    if units not in ("km", "m"):
        raise ConfigError(f"threshold_units must be 'km' or 'm', got {units!r}")
    inclination_deg = _get(raw, "inclination_deg", float, 15.0)
    view_deg = _get(raw, "camera_angle_of_view_deg", float, 45.0)
    limit = _cast_limit(raw["crater_limit"]) if "crater_limit" in raw else None
    effective_seed = seed if seed is not None else _get(raw, "seed", int, 0)
    try:
        cfg = ScenarioConfig(
            apoapsis_altitude_km=_get(raw, "apoapsis_altitude_km", float, 300.0),
            periapsis_radius_km=_get(raw, "periapsis_radius_km", float,
                                     DEFAULT_PERIAPSIS_RADIUS_KM),
            inclination_rad=math.radians(inclination_deg),
            duration_s=_get(raw, "duration_s", float, 3600.0),
            dt_s=_get(raw, "dt_s", float, 1.0),
            camera=CameraModel(math.radians(view_deg)),
            noise=NoiseSpec(sigma_direction=sigma_d, sigma_range_km=sigma_rho,
                            identification_probability=ident_p),
            estimator=NlsSettings(
                tolerance_km=_get(raw, "nls_tolerance_km", float, 1e-9),
                max_iterations=_get(raw, "nls_max_iterations", int, 50),
            ),
            crater_limit=limit,
            selection_policy=_get(raw, "selection_policy", str, "largest"),
            diameter_units=units,
            seed=effective_seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    # Echo the values as parsed (degrees, not the radian round trip) so a
    # config rebuilt from the manifest reproduces this run bit-exactly.
    echo = {
        "apoapsis_altitude_km": _g17(cfg.apoapsis_altitude_km),
        "periapsis_radius_km": _g17(cfg.periapsis_radius_km),
        "inclination_deg": _g17(inclination_deg),
        "duration_s": _g17(cfg.duration_s),
        "dt_s": _g17(cfg.dt_s),
        "camera_angle_of_view_deg": _g17(view_deg),
        "sigma_direction": _g17(sigma_d),
        "sigma_range_km": _g17(sigma_rho),
        "identification_probability": _g17(ident_p),
        "crater_limit": "unlimited" if limit is None else str(limit),
        "selection_policy": cfg.selection_policy,
        "threshold_units": units,
        "nls_tolerance_km": _g17(cfg.estimator.tolerance_km),
        "nls_max_iterations": str(cfg.estimator.max_iterations),
        "seed": str(effective_seed),
    }
    return cfg, echo


# -- output writers -----------------------------------------------------------

def _field(value) -> str:
    return "" if value is None else _g17(value)


def write_steps_csv(records, path) -> None:
    """One row per step; estimate/error fields empty on non-converged rows."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# {STEPS_SCHEMA}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STEPS_HEADER)
        for rec in records:
            est = rec.estimate
            pos = est.position_mci if est.position_mci is not None else [None] * 3
            quat = est.quaternion_ib if est.quaternion_ib is not None else [None] * 4
            err_p = rec.position_error_m if rec.position_error_m is not None else [None] * 3
            err_a = rec.attitude_error_deg if rec.attitude_error_deg is not None else [None] * 3
            writer.writerow(
                [_g17(rec.t)]
                + [_g17(x) for x in rec.state.r]
                + [_g17(x) for x in rec.state.v]
                + [_g17(rec.altitude_km), rec.n_candidates, rec.n_visible,
                   rec.n_identified, rec.n_used, est.status, est.iterations]
                + [_field(x) for x in pos]
                + [_field(x) for x in quat]
                + [_field(x) for x in err_p]
                + [_field(x) for x in err_a]
            )


def _limit_label(limit) -> str:
    return "unlimited" if limit is None else str(limit)


def write_rmse_csv(sweep: SweepResult, path) -> None:
    """Table 1-shaped summary: metric rows, one column per crater limit."""
    labels = [_limit_label(limit) for limit in sweep.limits]
    rows = [
        ("x_rmse_m", [r.position_rmse_m[0] for r in sweep.rmse]),
        ("y_rmse_m", [r.position_rmse_m[1] for r in sweep.rmse]),
        ("z_rmse_m", [r.position_rmse_m[2] for r in sweep.rmse]),
        ("roll_rmse_deg", [r.attitude_rmse_deg[0] for r in sweep.rmse]),
        ("pitch_rmse_deg", [r.attitude_rmse_deg[1] for r in sweep.rmse]),
        ("yaw_rmse_deg", [r.attitude_rmse_deg[2] for r in sweep.rmse]),
    ]
    with open(path, "w", newline="") as fh:
        fh.write(f"# {RMSE_SCHEMA}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["metric"] + [f"limit_{label}" for label in labels])
        for name, values in rows:
            writer.writerow([name] + [_g17(v) for v in values])
        writer.writerow(["n_converged"] + [str(r.n_converged) for r in sweep.rmse])
        writer.writerow(["n_skipped"] + [str(r.n_skipped) for r in sweep.rmse])


def write_manifest(path, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key} = {value}\n")


def _manifest_entries(command, echo, catalog_path, catalog: CraterCatalog) -> dict:
    entries = {"tool": f"craternav {__version__}", "command": command}
    entries.update({f"config.{k}": v for k, v in echo.items()})
    entries["catalog.path"] = str(catalog_path)
    entries["catalog.sha256"] = _sha256_file(catalog_path)
    entries["catalog.craters"] = str(len(catalog))
    return entries


def _hash_outputs(entries: dict, out_dir: Path, files) -> None:
    for rel in files:
        entries[f"output.{rel}"] = f"sha256:{_sha256_file(out_dir / rel)}"


# -- plots (optional, SVG only) -----------------------------------------------

def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "craternav"
    return plt


def _save(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def write_run_plots(records, out_dir: Path) -> list:
    """Crater-count, position-error, and attitude-error series as SVG."""
    plt = _pyplot()
    t = np.array([rec.t for rec in records])
    written = []

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for attr, label in (("n_visible", "visible"), ("n_identified", "identified"),
                        ("n_used", "used")):
        ax.plot(t, [getattr(rec, attr) for rec in records], label=label, lw=0.9)
    ax.set_xlabel("time [s]")
    ax.set_ylabel("craters")
    ax.legend()
    fig.tight_layout()
    _save(fig, out_dir / "crater_counts.svg")
    plt.close(fig)
    written.append("crater_counts.svg")

    conv = [rec for rec in records if rec.estimate.status == STATUS_CONVERGED]
    if conv:
        tc = np.array([rec.t for rec in conv])
        for attr, names, unit, fname in (
            ("position_error_m", ("x", "y", "z"), "m", "position_error.svg"),
            ("attitude_error_deg", ("roll", "pitch", "yaw"), "deg", "attitude_error.svg"),
        ):
            data = np.array([getattr(rec, attr) for rec in conv])
            fig, ax = plt.subplots(figsize=(8, 4.5))
            for j, name in enumerate(names):
                ax.plot(tc, data[:, j], label=name, lw=0.9)
            ax.set_xlabel("time [s]")
            ax.set_ylabel(f"error [{unit}]")
            ax.legend()
            fig.tight_layout()
            _save(fig, out_dir / fname)
            plt.close(fig)
            written.append(fname)
    return written


def write_sweep_plot(sweep: SweepResult, out_dir: Path) -> list:
    """RMSE versus crater limit, position and attitude panels."""
    plt = _pyplot()
    labels = [_limit_label(limit) for limit in sweep.limits]
    x = np.arange(len(labels))
    pos = np.array([r.position_rmse_m for r in sweep.rmse])
    att = np.array([r.attitude_rmse_deg for r in sweep.rmse])

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4.5))
    for j, name in enumerate(("x", "y", "z")):
        ax1.plot(x, pos[:, j], marker="o", label=name)
    ax1.set_ylabel("position RMSE [m]")
    for j, name in enumerate(("roll", "pitch", "yaw")):
        ax2.plot(x, att[:, j], marker="o", label=name)
    ax2.set_ylabel("attitude RMSE [deg]")
    for ax in (ax1, ax2):
        ax.set_xticks(x, labels)
        ax.set_xlabel("crater limit")
        ax.set_yscale("log")
        ax.legend()
    fig.tight_layout()
    _save(fig, out_dir / "rmse_vs_limit.svg")
    plt.close(fig)
    return ["rmse_vs_limit.svg"]


# -- subcommands --------------------------------------------------------------

def _parse_column_map(text):
    if text is None:
        return None
    if text == "robbins":
        return dict(ROBBINS_COLUMN_MAP)
    mapping = {}
    for item in text.split(","):
        if "=" not in item:
            raise ConfigError(f"column map entries are field=COLUMN, got {item!r}")
        key, col = (part.strip() for part in item.split("=", 1))
        mapping[key] = col
    return mapping


def _print_counts(catalog: CraterCatalog) -> None:
    d = catalog.diameter_km
    print(f"{len(catalog)} craters loaded "
          f"({catalog.n_rejected} rejected, {catalog.n_filtered} below size cut)")
    for cut in (1.0, 5.0, 20.0):
        print(f"  > {cut:g} km: {int(np.count_nonzero(d > cut))}")


def cmd_catalog(args) -> int:
    if args.catalog_command == "generate":
        catalog = generate_synthetic(args.n, d_min_km=args.d_min_km,
                                     d_max_km=args.d_max_km,
                                     exponent=args.exponent, seed=args.seed)
        catalog.to_csv(args.output)
    else:
        report_path = args.report or f"{args.output}.rejects.txt"
        with open(report_path, "w") as report:
            catalog = load_catalog(args.input, column_map=_parse_column_map(args.column_map),
                                   min_diameter_km=args.min_diameter_km, report=report)
        catalog.to_csv(args.output)
        print(f"rejection report: {report_path}")
    _print_counts(catalog)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_run(args) -> int:
    raw = parse_config_file(args.config) if args.config else {}
    cfg, echo = build_scenario_config(raw, seed=args.seed, noiseless=args.noiseless,
                                      threshold_units=args.threshold_units)
    catalog = load_catalog(args.catalog, min_diameter_km=0.0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records = run_scenario(cfg, catalog)
    write_steps_csv(records, out_dir / "steps.csv")
    outputs = ["steps.csv"]
    if args.plots:
        outputs += write_run_plots(records, out_dir)

    entries = _manifest_entries("run", echo, args.catalog, catalog)
    _hash_outputs(entries, out_dir, outputs)
    write_manifest(out_dir / "manifest.txt", entries)

    n_conv = sum(rec.estimate.status == STATUS_CONVERGED for rec in records)
    print(f"{len(records)} steps (last epoch t={records[-1].t:g} s), "
          f"{n_conv} converged; outputs in {out_dir}")
    return EXIT_OK


def _parse_limits(text):
    limits = []
    for item in text.split(","):
        item = item.strip()
        limits.append(None if item.lower() in ("unlimited", "none") else int(item))
    if not limits:
        raise ConfigError("empty limits list")
    return limits


def cmd_sweep(args) -> int:
    raw = parse_config_file(args.config) if args.config else {}
    cfg, echo = build_scenario_config(raw, seed=args.seed, noiseless=args.noiseless,
                                      threshold_units=args.threshold_units)
    limits = _parse_limits(args.limits) if args.limits else list(DEFAULT_SWEEP_LIMITS)
    if args.window:
        try:
            t0, t1 = (float(part) for part in args.window.split(","))
        except ValueError as exc:
            raise ConfigError(f"--window expects 't_start,t_end': {exc}") from exc
    else:
        t0, t1 = DEFAULT_WINDOW_S
    catalog = load_catalog(args.catalog, min_diameter_km=0.0)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    sweep = crater_limit_sweep(cfg, catalog, limits=limits, window_s=(t0, t1))
    write_rmse_csv(sweep, out_dir / "rmse_table.csv")
    outputs = ["rmse_table.csv"]
    for limit in sweep.limits:
        sub = out_dir / f"limit_{_limit_label(limit)}"
        sub.mkdir(exist_ok=True)
        write_steps_csv(sweep.records[limit], sub / "steps.csv")
        outputs.append(f"limit_{_limit_label(limit)}/steps.csv")
    if args.plots:
        outputs += write_sweep_plot(sweep, out_dir)

    entries = _manifest_entries("sweep", echo, args.catalog, catalog)
    entries["sweep.limits"] = ",".join(_limit_label(limit) for limit in sweep.limits)
    entries["sweep.window_s"] = f"{_g17(t0)},{_g17(t1)}"
    _hash_outputs(entries, out_dir, outputs)
    write_manifest(out_dir / "manifest.txt", entries)

    print(f"swept limits {entries['sweep.limits']} over window [{t0:g}, {t1:g}] s; "
          f"outputs in {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="craternav",
                     description="Crater-based lunar descent navigation simulator")
    parser.add_argument("--version", action="version", version=f"craternav {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_cat = sub.add_parser("catalog", help="catalog tooling")
    cat_sub = p_cat.add_subparsers(dest="catalog_command", required=True)

    p_imp = cat_sub.add_parser("import", help="raw CSV to canonical catalog")
    p_imp.add_argument("--input", required=True)
    p_imp.add_argument("--output", required=True)
    p_imp.add_argument("--column-map", default=None,
                       help="'robbins' or comma list field=COLUMN "
                            "(fields: id,name,lat,lon,diameter_km)")
    p_imp.add_argument("--min-diameter-km", type=float, default=1.0)
    p_imp.add_argument("--report", default=None,
                       help="rejection report path (default OUTPUT.rejects.txt)")

    p_gen = cat_sub.add_parser("generate", help="synthetic catalog")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--output", required=True)
    p_gen.add_argument("--d-min-km", type=float, default=0.7773)
    p_gen.add_argument("--d-max-km", type=float, default=300.0)
    p_gen.add_argument("--exponent", type=float, default=1.7095)
    p_gen.add_argument("--seed", type=int, default=0)

    def add_run_args(p):
        p.add_argument("--catalog", required=True, help="canonical catalog CSV")
        p.add_argument("--out-dir", required=True)
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--plots", action="store_true", help="emit SVG plots")
        p.add_argument("--noiseless", action="store_true",
                       help="zero measurement noise, identification probability 1")
        p.add_argument("--threshold-units", choices=("km", "m"), default=None,
                       help="units of the crater visibility threshold")

    p_run = sub.add_parser("run", help="single descent run")
    add_run_args(p_run)

    p_sweep = sub.add_parser("sweep", help="crater-limit sweep")
    add_run_args(p_sweep)
    p_sweep.add_argument("--limits", default=None,
                         help="comma list of limits, e.g. '10,20,50,100,200,unlimited'")
    p_sweep.add_argument("--window", default=None,
                         help="RMSE window 't_start,t_end' in seconds")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "catalog":
            return cmd_catalog(args)
        if args.command == "run":
            return cmd_run(args)
        return cmd_sweep(args)
    except SystemExit:
        raise
    except (CatalogError, ConfigError) as exc:
        print(f"craternav: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"craternav: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"craternav: unexpected failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
