"""Read-only HTTP/JSON API serving snapshots, aggregates, and hotspots.

Concurrency model: the served snapshot lives behind a holder whose reference
is swapped atomically after a reload finishes building the replacement, so
readers never observe a half-built dataset and every response derives from
exactly one snapshot.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Request
from fastapi.responses import JSONResponse

from . import analytics, emit, hotspot
from .config import AppConfig
from .filters import QueryFilter
from .geo import BoundaryError, load_boundaries
from .ingest import IngestError, parse_crash_csv
from .records import FLAG_NAMES, SeverityGroup, UrbanRural
from .snapshot import DatasetSnapshot, build_snapshot


class SnapshotHolder:
    """Mutable slot for the currently served snapshot."""

    def __init__(self) -> None:
        self._current: Optional[DatasetSnapshot] = None
        self._sequence = 0
        self._swap_lock = threading.Lock()

    @property
    def current(self) -> Optional[DatasetSnapshot]:
        return self._current

    def publish(self, snapshot: DatasetSnapshot) -> None:
        self._current = snapshot

    def next_sequence(self) -> int:
        with self._swap_lock:
            self._sequence += 1
            return self._sequence

    def load_files(
        self,
        crash_csv: str,
        persons_csv: Optional[str],
        boundaries_path: str,
        sequence: Optional[int] = None,
    ) -> DatasetSnapshot:
        """Build a snapshot from files and publish it atomically."""
        crash_bytes = Path(crash_csv).read_bytes()
        persons_bytes = Path(persons_csv).read_bytes() if persons_csv else None
        boundary_bytes = Path(boundaries_path).read_bytes()
        records, report = parse_crash_csv(crash_bytes, persons_bytes)
        boundaries = load_boundaries(boundary_bytes)
        snapshot = build_snapshot(
            records, boundaries, report.source_digest, report=report,
            sequence=self.next_sequence() if sequence is None else sequence,
        )
        self.publish(snapshot)
        return snapshot


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, param: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.param = param

    def response(self) -> JSONResponse:
        body = {"code": self.code, "message": self.message}
        if self.param is not None:
            body["param"] = self.param
        return JSONResponse(body, status_code=self.status)


def _bad_param(param: str, message: str) -> ApiError:
    return ApiError(400, "invalid_param", message, param=param)


def _parse_int(params: dict, name: str) -> Optional[int]:
    raw = params.get(name)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise _bad_param(name, f"{name} must be an integer") from None


def _parse_float(params: dict, name: str) -> Optional[float]:
    raw = params.get(name)
    if raw is None or raw == "":
        return None
    try:
        return float(raw)
    except ValueError:
        raise _bad_param(name, f"{name} must be a number") from None


def _parse_bbox(params: dict, name: str = "bbox") -> Optional[tuple[float, float, float, float]]:
    raw = params.get(name)
    if raw is None or raw == "":
        return None
    parts = raw.split(",")
    if len(parts) != 4:
        raise _bad_param(name, "bbox must be min_lon,min_lat,max_lon,max_lat")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise _bad_param(name, "bbox coordinates must be numbers") from None
    if values[0] > values[2] or values[1] > values[3]:
        raise _bad_param(name, "bbox min must not exceed max")
    return values  # type: ignore[return-value]


def parse_filters(params: dict, snapshot: DatasetSnapshot) -> tuple[QueryFilter, str, Optional[str]]:
    """Validate shared query params into (filter, scope, tribe_id)."""
    scope = params.get("scope", "statewide") or "statewide"
    if scope not in analytics.SCOPES:
        raise _bad_param("scope", f"scope must be one of {', '.join(analytics.SCOPES)}")

    tribe_id = params.get("tribe_id") or None
    if tribe_id is not None:
        if tribe_id not in snapshot.tribe_ids():
            raise _bad_param("tribe_id", f"unknown tribe_id {tribe_id!r}")
        scope = "tribal"

    year_from = _parse_int(params, "year_from")
    year_to = _parse_int(params, "year_to")
    if year_from is not None and year_to is not None and year_from > year_to:
        raise _bad_param("year_from", "year_from must not exceed year_to")

    severity_group = None
    raw_group = params.get("severity_group")
    if raw_group:
        try:
            severity_group = SeverityGroup(raw_group.upper())
        except ValueError:
            raise _bad_param("severity_group", "severity_group must be KA, KAB, or ALL") from None

    urban_rural = None
    raw_area = params.get("urban_rural")
    if raw_area:
        try:
            urban_rural = UrbanRural(raw_area.lower())
        except ValueError:
            raise _bad_param("urban_rural", "urban_rural must be urban or rural") from None

    road_class = params.get("road_class") or None
    if road_class is not None and road_class not in ("highway", "non_highway", "unknown"):
        raise _bad_param("road_class", "road_class must be highway, non_highway, or unknown")

    key_factor = params.get("key_factor") or None
    if key_factor is not None and key_factor not in FLAG_NAMES:
        raise _bad_param("key_factor", f"key_factor must be one of {', '.join(FLAG_NAMES)}")

    filters = QueryFilter(
        year_from=year_from,
        year_to=year_to,
        severity_group=severity_group,
        urban_rural=urban_rural,
        road_class=road_class,
        key_factor=key_factor,
        crash_type=params.get("crash_type") or None,
        bbox=_parse_bbox(params),
    )
    return filters, scope, tribe_id


def create_app(config: Optional[AppConfig] = None, holder: Optional[SnapshotHolder] = None) -> FastAPI:
    config = config or AppConfig()
    holder = holder or SnapshotHolder()

    app = FastAPI(title="crashboard", docs_url=None, redoc_url=None)
    app.state.holder = holder
    app.state.config = config

    if config.cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.cors_origin],
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(ApiError)
    async def handle_api_error(_request: Request, exc: ApiError):
        return exc.response()

    def require_snapshot() -> DatasetSnapshot:
        snapshot = holder.current
        if snapshot is None:
            raise ApiError(503, "no_snapshot", "no dataset snapshot is loaded")
        return snapshot

    @app.get("/api/v1/snapshot")
    def get_snapshot():
        return require_snapshot().info_dict()

    @app.get("/api/v1/boundaries")
    def get_boundaries():
        snapshot = require_snapshot()
        features = []
        for boundary in snapshot.boundaries:
            coordinates = [
                [[list(v) for v in poly.outer]] + [[list(v) for v in h] for h in poly.holes]
                for poly in boundary.polygons
            ]
            geometry = (
                {"type": "Polygon", "coordinates": coordinates[0]}
                if len(coordinates) == 1
                else {"type": "MultiPolygon", "coordinates": coordinates}
            )
            features.append(
                {
                    "type": "Feature",
                    "geometry": geometry,
                    "properties": {"tribe_id": boundary.tribe_id, "name": boundary.name},
                }
            )
        return {
            "type": "FeatureCollection",
            "features": features,
            "snapshot_id": snapshot.snapshot_id,
        }

    @app.get("/api/v1/summary")
    def get_summary(request: Request):
        snapshot = require_snapshot()
        params = dict(request.query_params)
        filters, scope, tribe_id = parse_filters(params, snapshot)
        return emit.build_summary(snapshot, scope=scope, tribe_id=tribe_id, filters=filters)

    @app.get("/api/v1/tribes/rankings")
    def get_rankings(request: Request):
        snapshot = require_snapshot()
        filters, _, _ = parse_filters(dict(request.query_params), snapshot)
        return emit.build_rankings(snapshot, filters=filters)

    @app.get("/api/v1/breakdown")
    def get_breakdown(request: Request):
        snapshot = require_snapshot()
        params = dict(request.query_params)
        dimension = params.get("dimension", "")
        if dimension == "road":
            filters, scope, tribe_id = parse_filters(params, snapshot)
            return emit.build_road_table(snapshot, scope=scope, tribe_id=tribe_id, filters=filters)
        if dimension not in analytics.BREAKDOWN_DIMENSIONS:
            raise _bad_param(
                "dimension",
                f"dimension must be one of {', '.join(analytics.BREAKDOWN_DIMENSIONS)} or road",
            )
        attribution = params.get("attribution", "primary") or "primary"
        if attribution not in ("primary", "any"):
            raise _bad_param("attribution", "attribution must be primary or any")
        filters, scope, tribe_id = parse_filters(params, snapshot)
        return emit.build_breakdown(
            snapshot, dimension, scope=scope, tribe_id=tribe_id,
            filters=filters, attribution=attribution,
        )

    @app.get("/api/v1/crash-types")
    def get_crash_types(request: Request):
        snapshot = require_snapshot()
        params = dict(request.query_params)
        weight = params.get("weight", "total") or "total"
        if weight not in ("total", "kab"):
            raise _bad_param("weight", "weight must be total or kab")
        n = _parse_int(params, "n")
        n = 10 if n is None else n
        if n < 1:
            raise _bad_param("n", "n must be >= 1")
        filters, _, _ = parse_filters(params, snapshot)
        return emit.build_crash_types(snapshot, n=n, weight=weight, filters=filters)

    @app.get("/api/v1/hotspots")
    def get_hotspots(request: Request):
        snapshot = require_snapshot()
        params = dict(request.query_params)
        cell_size = _parse_float(params, "cell")
        cell_size = config.default_cell_size if cell_size is None else cell_size
        if cell_size <= 0:
            raise _bad_param("cell", "cell must be positive")
        radius = _parse_int(params, "radius")
        radius = 1 if radius is None else radius
        if radius < 0:
            raise _bad_param("radius", "radius must be >= 0")
        filters, scope, tribe_id = parse_filters(params, snapshot)

        subset = filters.apply(analytics.resolve_scope(snapshot, scope, tribe_id))
        points = [r.location for r in subset if r.location is not None]
        grid_bbox = filters.bbox
        if grid_bbox is None:
            if not points:
                return {
                    "type": "FeatureCollection", "features": [],
                    "snapshot_id": snapshot.snapshot_id,
                    "cell_size": cell_size, "radius": radius, "overflow": 0,
                }
            grid_bbox = hotspot.points_bbox(points, cell_size)

        grid = hotspot.bin_to_grid(points, grid_bbox, cell_size)
        if grid.nrows * grid.ncols < 2:
            cells = [
                hotspot.GiStarCell(col=0, row=0, count=int(grid.cells[0, 0]), z=0.0)
            ]
            cells = hotspot.classify_hotspots(cells)
        else:
            cells = hotspot.gi_star(grid, radius)
        return hotspot.cells_to_geojson(
            grid, cells,
            extra={
                "snapshot_id": snapshot.snapshot_id,
                "cell_size": cell_size, "radius": radius,
                "bbox": list(grid_bbox), "overflow": grid.overflow,
            },
        )

    @app.get("/api/v1/crashes")
    def get_crashes(request: Request):
        snapshot = require_snapshot()
        params = dict(request.query_params)
        filters, scope, tribe_id = parse_filters(params, snapshot)
        limit = _parse_int(params, "limit")
        limit = config.page_size if limit is None else min(limit, config.page_size)
        if limit < 1:
            raise _bad_param("limit", "limit must be >= 1")

        offset = 0
        raw_cursor = params.get("cursor")
        if raw_cursor:
            parts = raw_cursor.rsplit(":", 1)
            if len(parts) != 2 or not parts[1].isdigit():
                raise _bad_param("cursor", "malformed cursor")
            if parts[0] != snapshot.snapshot_id:
                raise ApiError(400, "stale_cursor", "cursor is from another snapshot", "cursor")
            offset = int(parts[1])

        subset = filters.apply(analytics.resolve_scope(snapshot, scope, tribe_id))
        located = [r for r in subset if r.location is not None]
        page = located[offset : offset + limit]
        next_cursor = (
            f"{snapshot.snapshot_id}:{offset + limit}" if offset + limit < len(located) else None
        )
        return {
            "snapshot_id": snapshot.snapshot_id,
            "total_located": len(located),
            "points": [
                {
                    "id": r.crash_id,
                    "lon": r.location[0],
                    "lat": r.location[1],
                    "severity": r.severity.value,
                    "tribe_id": snapshot.tribe_of(r.crash_id),
                    "crash_type": r.crash_type,
                }
                for r in page
            ],
            "next_cursor": next_cursor,
        }

    @app.post("/api/v1/admin/reload")
    def admin_reload(
        body: dict,
        x_admin_token: Optional[str] = Header(default=None),
    ):
        if not config.admin_token:
            raise ApiError(403, "admin_disabled", "no admin token configured")
        if x_admin_token != config.admin_token:
            raise ApiError(401, "unauthorized", "bad admin token")
        crash_csv = body.get("crash_csv_path")
        boundaries_path = body.get("boundaries_path")
        if not crash_csv:
            raise _bad_param("crash_csv_path", "crash_csv_path is required")
        if not boundaries_path:
            raise _bad_param("boundaries_path", "boundaries_path is required")
        try:
            snapshot = holder.load_files(
                crash_csv, body.get("persons_csv_path"), boundaries_path
            )
        except (OSError, IngestError, BoundaryError) as exc:
            raise ApiError(422, "ingest_failed", str(exc)) from None
        return snapshot.info_dict()

    return app
