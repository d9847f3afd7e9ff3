"""Crater catalog: CSV ingestion, synthetic generation, spatial queries.

Catalogs are stored as parallel numpy arrays (id, lat, lon, diameter) with
an optional name column.  Angles are radians internally; the canonical CSV
format is degrees.  The exact degree values from the source file are kept
alongside the derived radians so a load -> serialize -> load round trip is
bit-exact.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .frames import MOON, MoonConstants, mcmf_to_mci_dcm, selenographic_to_mcmf

__all__ = [
    "CANONICAL_COLUMNS",
    "ROBBINS_COLUMN_MAP",
    "CatalogError",
    "CraterCatalog",
    "CraterRecord",
    "crater_position_mci",
    "generate_synthetic",
    "load_catalog",
]

log = logging.getLogger(__name__)

# Canonical CSV header; lat/lon in degrees, diameter in km.
CANONICAL_COLUMNS = {
    "id": "id",
    "name": "name",
    "lat": "lat",
    "lon": "lon",
    "diameter_km": "diameter_km",
}

# Column names used by the published global crater database export.
ROBBINS_COLUMN_MAP = {
    "id": "CRATER_ID",
    "lat": "LAT_CIRC_IMG",
    "lon": "LON_CIRC_IMG",
    "diameter_km": "DIAM_CIRC_IMG",
}

_N_LAT_BANDS = 256


class CatalogError(ValueError):
    """Raised for unreadable, empty, or structurally invalid catalog input."""


@dataclass(frozen=True)
class CraterRecord:
    """One crater: unique id, optional name, selenographic lat/lon (radians)
    and rim diameter in km."""

    id: int
    lat: float
    lon: float
    diameter_km: float
    name: str | None = None

    def __post_init__(self):
        if not -math.pi / 2 <= self.lat <= math.pi / 2:
            raise ValueError(f"crater latitude {self.lat!r} outside [-pi/2, pi/2]")
        if not -math.pi < self.lon <= math.pi:
            raise ValueError(f"crater longitude {self.lon!r} outside (-pi, pi]")
        if not self.diameter_km > 0.0:
            raise ValueError("crater diameter must be positive")


class CraterCatalog:
    """Immutable-by-convention crater collection with a lat-band spatial index.

    Parameters are parallel arrays; ids must be unique.  ``lat_deg``/``lon_deg``
    preserve the exact source-file degree values when the catalog came from a
    file (otherwise they are derived once from the radians).
    """

    def __init__(self, ids, lat, lon, diameter_km, names=None, lat_deg=None,
                 lon_deg=None, source: str = "memory"):
        self.ids = np.asarray(ids, dtype=np.int64)
        self.lat = np.asarray(lat, dtype=float)
        self.lon = np.asarray(lon, dtype=float)
        self.diameter_km = np.asarray(diameter_km, dtype=float)
        self.names = list(names) if names is not None else None
        self.lat_deg = np.degrees(self.lat) if lat_deg is None else np.asarray(lat_deg, float)
        self.lon_deg = np.degrees(self.lon) if lon_deg is None else np.asarray(lon_deg, float)
        self.source = source
        self.n_rejected = 0
        self.n_filtered = 0

        n = self.ids.size
        if not (self.lat.size == self.lon.size == self.diameter_km.size == n):
            raise CatalogError("catalog columns have mismatched lengths")
        if self.names is not None and len(self.names) != n:
            raise CatalogError("name column has mismatched length")
        if n and np.unique(self.ids).size != n:
            raise CatalogError("crater ids are not unique")
        if n and (np.any(self.lat < -math.pi / 2) or np.any(self.lat > math.pi / 2)):
            raise CatalogError("latitude outside [-pi/2, pi/2]")
        if n and (np.any(self.lon <= -math.pi) or np.any(self.lon > math.pi)):
            raise CatalogError("longitude outside (-pi, pi]")
        if n and np.any(self.diameter_km <= 0.0):
            raise CatalogError("non-positive crater diameter")

        self._index = None
        self._mcmf = None

    def __len__(self) -> int:
        return int(self.ids.size)

    def record(self, i: int) -> CraterRecord:
        name = self.names[i] if self.names is not None else None
        return CraterRecord(
            id=int(self.ids[i]),
            lat=float(self.lat[i]),
            lon=float(self.lon[i]),
            diameter_km=float(self.diameter_km[i]),
            name=name,
        )

    def records(self) -> list[CraterRecord]:
        return [self.record(i) for i in range(len(self))]

    # -- spatial index -----------------------------------------------------

    def _build_index(self):
        edges = np.linspace(-math.pi / 2, math.pi / 2, _N_LAT_BANDS + 1)
        band = np.clip(np.searchsorted(edges, self.lat, side="right") - 1, 0, _N_LAT_BANDS - 1)
        order = np.lexsort((self.lon, band))
        self._index = {
            "edges": edges,
            "order": order,
            "band_start": np.searchsorted(band[order], np.arange(_N_LAT_BANDS + 1)),
            "lon_sorted": self.lon[order],
        }

    def query_region_indices(self, lat_range, lon_range) -> np.ndarray:
        """Catalog indices of every crater inside the closed region.

        ``lat_range`` is (lo, hi) with lo <= hi.  ``lon_range`` is (lo, hi)
        and wraps across the +-pi seam when lo > hi.
        """
        lat_lo, lat_hi = float(lat_range[0]), float(lat_range[1])
        lon_lo, lon_hi = float(lon_range[0]), float(lon_range[1])
        if lat_lo > lat_hi:
            raise ValueError("latitude range is inverted")
        if lat_lo < -math.pi / 2 - 1e-12 or lat_hi > math.pi / 2 + 1e-12:
            raise ValueError("latitude range outside [-pi/2, pi/2]")
        if len(self) == 0:
            return np.empty(0, dtype=np.int64)
        if self._index is None:
            self._build_index()
        idx = self._index
        edges, order = idx["edges"], idx["order"]
        starts, lon_sorted = idx["band_start"], idx["lon_sorted"]

        b_lo = int(np.clip(np.searchsorted(edges, lat_lo, side="right") - 1, 0, _N_LAT_BANDS - 1))
        b_hi = int(np.clip(np.searchsorted(edges, lat_hi, side="right") - 1, 0, _N_LAT_BANDS - 1))

        hits = []
        for b in range(b_lo, b_hi + 1):
            s, e = int(starts[b]), int(starts[b + 1])
            if s == e:
                continue
            seg = lon_sorted[s:e]
            if lon_lo <= lon_hi:
                i0 = s + int(np.searchsorted(seg, lon_lo, side="left"))
                i1 = s + int(np.searchsorted(seg, lon_hi, side="right"))
                if i0 < i1:
                    hits.append(order[i0:i1])
            else:  # region wraps the +-pi seam
                i1 = s + int(np.searchsorted(seg, lon_hi, side="right"))
                if s < i1:
                    hits.append(order[s:i1])
                i0 = s + int(np.searchsorted(seg, lon_lo, side="left"))
                if i0 < e:
                    hits.append(order[i0:e])
        if not hits:
            return np.empty(0, dtype=np.int64)
        out = np.concatenate(hits)
        out = out[(self.lat[out] >= lat_lo) & (self.lat[out] <= lat_hi)]
        return np.sort(out)

    def query_region(self, lat_range, lon_range) -> list[CraterRecord]:
        return [self.record(int(i)) for i in self.query_region_indices(lat_range, lon_range)]

    # -- crater positions ----------------------------------------------------

    def positions_mcmf(self, indices=None) -> np.ndarray:
        """MCMF positions (km) on the mean sphere, cached on first use."""
        if self._mcmf is None:
            self._mcmf = selenographic_to_mcmf(self.lat, self.lon, MOON.radius_km)
        return self._mcmf if indices is None else self._mcmf[indices]

    def positions_mci(self, indices, theta_m: float) -> np.ndarray:
        """MCI positions (km) of the indexed craters at Moon angle theta_m."""
        return self.positions_mcmf(indices) @ mcmf_to_mci_dcm(theta_m).T

    # -- serialization -------------------------------------------------------

    def to_csv(self, dest) -> None:
        """Write the canonical CSV: id,name,lat,lon,diameter_km (degrees/km)."""
        if isinstance(dest, (str, Path)):
            with open(dest, "w", newline="") as fh:
                self.to_csv(fh)
            return
        writer = csv.writer(dest, lineterminator="\n")
        writer.writerow(["id", "name", "lat", "lon", "diameter_km"])
        names = self.names if self.names is not None else [""] * len(self)
        for i in range(len(self)):
            writer.writerow(
                [
                    int(self.ids[i]),
                    names[i] or "",
                    format(self.lat_deg[i], ".17g"),
                    format(self.lon_deg[i], ".17g"),
                    format(self.diameter_km[i], ".17g"),
                ]
            )


def _wrap_lon_deg(lon: float) -> float:
    if -180.0 < lon <= 180.0:
        return lon  # modulo arithmetic would perturb in-range values by an ulp
    w = (lon + 180.0) % 360.0 - 180.0
    return 180.0 if w == -180.0 else w


def load_catalog(source, column_map=None, min_diameter_km: float = 1.0,
                 report=None) -> CraterCatalog:
    """Load a crater catalog from CSV (path, file object, or text).

    Parameters
    ----------
    source : str | Path | file-like
        CSV input with a header row; lat/lon in degrees, diameter in km.
    column_map : dict, optional
        Maps the canonical fields ("lat", "lon", "diameter_km", and
        optionally "id", "name") to the source header names.  Defaults to
        the canonical header; ``ROBBINS_COLUMN_MAP`` covers the published
        database export.
    min_diameter_km : float
        Craters below this diameter are dropped (reported separately from
        invalid rows).
    report : file-like, optional
        Destination for the per-row rejection report.

    Rows with non-finite values, latitudes outside [-90, 90], non-positive
    diameters, or duplicate ids are rejected individually; longitudes are
    wrapped into (-180, 180].  Raises :class:`CatalogError` when the header
    is unusable or no valid rows remain.
    """
    if isinstance(source, (str, Path)):
        path = Path(source)
        if not path.exists():
            raise CatalogError(f"catalog file not found: {path}")
        with open(path, newline="") as fh:
            cat = load_catalog(fh, column_map, min_diameter_km, report)
        cat.source = str(path)
        return cat

    colmap = dict(CANONICAL_COLUMNS if column_map is None else column_map)
    for required in ("lat", "lon", "diameter_km"):
        if required not in colmap:
            raise CatalogError(f"column map lacks required field {required!r}")

    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise CatalogError("catalog source is empty") from None
    header = [h.strip() for h in header]
    pos = {}
    for field, col in colmap.items():
        if col in header:
            pos[field] = header.index(col)
        elif field in ("lat", "lon", "diameter_km"):
            raise CatalogError(f"required column {col!r} missing from header {header}")

    def reject(rownum, reason):
        nonlocal n_rejected
        n_rejected += 1
        line = f"row {rownum}: rejected: {reason}"
        if report is not None:
            report.write(line + "\n")
        else:
            log.debug("%s", line)

    ids, names = [], []
    lat_deg, lon_deg, diam = [], [], []
    seen_ids = set()
    n_rejected = 0
    n_filtered = 0
    next_auto_id = 0

    for rownum, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            la = float(row[pos["lat"]])
            lo = float(row[pos["lon"]])
            d = float(row[pos["diameter_km"]])
        except (ValueError, IndexError) as exc:
            reject(rownum, f"unparseable numeric field ({exc})")
            continue
        if not (math.isfinite(la) and math.isfinite(lo) and math.isfinite(d)):
            reject(rownum, "non-finite value")
            continue
        if not -90.0 <= la <= 90.0:
            reject(rownum, f"latitude out of range: {la}")
            continue
        if d <= 0.0:
            reject(rownum, f"non-positive diameter: {d}")
            continue
        if d < min_diameter_km:
            n_filtered += 1
            continue
        if "id" in pos and pos["id"] < len(row) and row[pos["id"]].strip():
            raw = row[pos["id"]].strip()
            try:
                cid = int(raw)
            except ValueError:
                cid = next_auto_id
        else:
            cid = next_auto_id
        if cid in seen_ids:
            reject(rownum, f"duplicate id: {cid}")
            continue
        seen_ids.add(cid)
        next_auto_id = max(next_auto_id, cid + 1)
        ids.append(cid)
        names.append(row[pos["name"]].strip() or None if "name" in pos and pos["name"] < len(row) else None)
        lat_deg.append(la)
        lon_deg.append(_wrap_lon_deg(lo))
        diam.append(d)

    if not ids:
        raise CatalogError("no valid crater rows in catalog source")

    lat_deg = np.array(lat_deg)
    lon_deg = np.array(lon_deg)
    cat = CraterCatalog(
        ids=np.array(ids, dtype=np.int64),
        lat=np.radians(lat_deg),
        lon=np.radians(lon_deg),
        diameter_km=np.array(diam),
        names=names if any(n is not None for n in names) else None,
        lat_deg=lat_deg,
        lon_deg=lon_deg,
        source="stream",
    )
    cat.n_rejected = n_rejected
    cat.n_filtered = n_filtered
    return cat


def load_catalog_text(text: str, **kwargs) -> CraterCatalog:
    """Convenience wrapper: load a catalog from an in-memory CSV string."""
    return load_catalog(io.StringIO(text), **kwargs)


def generate_synthetic(
    n: int,
    d_min_km: float = 0.7773,
    d_max_km: float = 300.0,
    exponent: float = 1.7095,
    seed: int = 0,
) -> CraterCatalog:
    """Generate a uniform-on-the-sphere synthetic catalog.

    Longitudes are uniform, latitudes sine-uniform (equal area), and
    diameters follow a truncated power law with survival function
    ``P(D > x) ~ x**-exponent`` on [d_min_km, d_max_km].  The defaults are
    calibrated to the size distribution of the published global lunar
    crater database (about 2M craters total, 1.3M above 1 km, 83k above
    5 km): exponent 1.7095, minimum diameter 0.7773 km.
    """
    if n <= 0:
        raise ValueError("crater count must be positive")
    if not 0.0 < d_min_km < d_max_km:
        raise ValueError("need 0 < d_min_km < d_max_km")
    if exponent <= 0.0:
        raise ValueError("power-law exponent must be positive")
    rng = np.random.default_rng(seed)
    lon = rng.uniform(-math.pi, math.pi, n)
    lat = np.arcsin(rng.uniform(-1.0, 1.0, n))
    u = rng.random(n)
    a = d_min_km**-exponent
    b = d_max_km**-exponent
    diam = (a - u * (a - b)) ** (-1.0 / exponent)
    return CraterCatalog(
        ids=np.arange(n, dtype=np.int64),
        lat=lat,
        lon=lon,
        diameter_km=diam,
        source=f"synthetic(n={n}, seed={seed})",
    )


def crater_position_mci(record: CraterRecord, theta_m: float,
                        moon: MoonConstants = MOON) -> np.ndarray:
    """MCI position (km) of a crater on the mean sphere at Moon angle
    theta_m."""
    p_mcmf = selenographic_to_mcmf(record.lat, record.lon, moon.radius_km)
    return mcmf_to_mci_dcm(theta_m) @ p_mcmf
