"""Shared fixtures: synthetic catalogs, reference runs, and a CLI workspace.

The expensive artifacts (the two-million-crater catalog, the crater-limit
sweep, the noiseless end-to-end run) are session scoped so the acceptance
tests and the unit tests that probe the same runs pay for them once.
"""

import time
from collections import namedtuple

import pytest

from craternav import (
    NoiseSpec,
    ScenarioConfig,
    crater_limit_sweep,
    generate_synthetic,
    run_scenario,
)

TimedRun = namedtuple("TimedRun", ["records", "elapsed_s"])
TimedSweep = namedtuple("TimedSweep", ["sweep", "elapsed_s"])


@pytest.fixture(scope="session")
def big_catalog():
    """Two million synthetic craters, the full-scale navigation database."""
    return generate_synthetic(2_000_000, seed=12345)


@pytest.fixture(scope="session")
def large_crater_catalog():
    """Ten thousand craters, all at least 35 km across.

    Every crater this size passes the visibility size cut at any altitude on
    the descent, which makes noiseless runs well-populated and fast.
    """
    return generate_synthetic(10_000, d_min_km=35.0, d_max_km=300.0, seed=7)


@pytest.fixture(scope="session")
def noiseless_run(large_crater_catalog):
    """Full descent with perfect measurements and no identification losses."""
    cfg = ScenarioConfig(
        noise=NoiseSpec(sigma_direction=0.0, sigma_range_km=0.0,
                        identification_probability=1.0),
        seed=1,
    )
    start = time.perf_counter()
    records = run_scenario(cfg, large_crater_catalog)
    return TimedRun(records, time.perf_counter() - start)


@pytest.fixture(scope="session")
def reference_sweep(big_catalog):
    """Crater-limit sweep at the default limits, noise, and window."""
    cfg = ScenarioConfig(seed=0)
    start = time.perf_counter()
    sweep = crater_limit_sweep(cfg, big_catalog)
    return TimedSweep(sweep, time.perf_counter() - start)


@pytest.fixture(scope="session")
def cli_workspace(tmp_path_factory):
    """Catalog file plus a quick-descent config for command-line tests.

    The low apoapsis and deep periapsis make the full run last about eight
    minutes of simulated time, so a complete CLI invocation stays cheap.
    """
    root = tmp_path_factory.mktemp("cli-inputs")
    catalog_path = root / "catalog.csv"
    generate_synthetic(50_000, seed=9).to_csv(catalog_path)
    config_path = root / "quick.cfg"
    config_path.write_text(
        "# quick descent used by the command-line tests\n"
        "apoapsis_altitude_km = 50\n"
        "periapsis_radius_km = 1000\n"
        "inclination_deg = 15\n"
        "duration_s = 500\n"
        "dt_s = 1\n"
        "seed = 4\n"
    )
    return {"catalog": catalog_path, "config": config_path}


@pytest.fixture()
def run_cli():
    """Invoke the CLI in-process and return its exit code."""
    from craternav import cli

    def invoke(argv):
        try:
            return cli.main(list(argv))
        except SystemExit as exc:  # argparse exits for usage errors
            return int(exc.code)

    return invoke
