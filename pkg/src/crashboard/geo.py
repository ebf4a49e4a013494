"""Tribal-land boundaries: GeoJSON loading, containment tests, tribe assignment."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import BinaryIO, Optional, Sequence, Union

from .records import CrashRecord

Ring = tuple[tuple[float, float], ...]


class BoundaryError(Exception):
    """Fatal boundary-load failure, naming the offending feature."""


@dataclass(frozen=True)
class PolygonGeometry:
    """One polygon: an outer ring plus zero or more hole rings (closed)."""

    outer: Ring
    holes: tuple[Ring, ...] = ()


@dataclass(frozen=True)
class TribeBoundary:
    """Named tribal-land geometry; one or more polygons."""

    tribe_id: str
    name: str
    polygons: tuple[PolygonGeometry, ...]

    def contains(self, point: tuple[float, float]) -> bool:
        return any(point_in_polygon(point, poly) for poly in self.polygons)

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v[0] for poly in self.polygons for v in poly.outer]
        ys = [v[1] for poly in self.polygons for v in poly.outer]
        return (min(xs), min(ys), max(xs), max(ys))


class AssignmentSource(enum.Enum):
    ATTRIBUTE = "attribute"
    SPATIAL = "spatial"
    BOTH_AGREE = "both_agree"
    CONFLICT = "conflict"


@dataclass(frozen=True)
class TribeAssignment:
    """Resolved tribal membership for one crash.

    tribe_id is None when neither the attribute nor the spatial path
    resolves. On conflict, tribe_id is the attribute tribe and
    conflict_detail carries (attribute tribe, spatial tribe).
    """

    crash_id: str
    tribe_id: Optional[str]
    source: Optional[AssignmentSource]
    conflict_detail: Optional[tuple[str, str]] = None

    def __post_init__(self) -> None:
        if self.source is AssignmentSource.CONFLICT:
            if self.conflict_detail is None or self.conflict_detail[0] == self.conflict_detail[1]:
                raise ValueError("conflict requires two differing tribes")


def _check_ring(ring: Sequence[Sequence[float]], feature_index: int) -> Ring:
    if len(ring) < 4:
        raise BoundaryError(f"ring has fewer than 4 vertices, feature {feature_index}")
    first, last = tuple(ring[0]), tuple(ring[-1])
    if first != last:
        raise BoundaryError(f"ring not closed, feature {feature_index}")
    return tuple((float(x), float(y)) for x, y in ring)


def _ring_area(ring: Ring) -> float:
    """Twice the signed shoelace area; zero means degenerate."""
    area = 0.0
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        area += x1 * y2 - x2 * y1
    return area


def _polygon_from_coords(coords, feature_index: int) -> PolygonGeometry:
    if not coords:
        raise BoundaryError(f"polygon has no rings, feature {feature_index}")
    rings = [_check_ring(ring, feature_index) for ring in coords]
    if _ring_area(rings[0]) == 0.0:
        raise BoundaryError(f"polygon has zero area, feature {feature_index}")
    return PolygonGeometry(outer=rings[0], holes=tuple(rings[1:]))


def load_boundaries(source: Union[bytes, bytearray, str, BinaryIO]) -> list[TribeBoundary]:
    """Load a GeoJSON FeatureCollection of Polygon/MultiPolygon tribe features.

    Each feature needs properties tribe_id and name; any geometry or property
    violation raises BoundaryError naming the feature index.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("utf-8")
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise BoundaryError(f"malformed GeoJSON: {exc}") from None

    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise BoundaryError("not a GeoJSON FeatureCollection")

    boundaries: list[TribeBoundary] = []
    seen_ids: set[str] = set()
    for index, feature in enumerate(doc.get("features", [])):
        props = feature.get("properties") or {}
        tribe_id = props.get("tribe_id")
        name = props.get("name")
        if not tribe_id:
            raise BoundaryError(f"missing tribe_id, feature {index}")
        if tribe_id in seen_ids:
            raise BoundaryError(f"duplicate tribe_id {tribe_id!r}, feature {index}")
        seen_ids.add(tribe_id)
        if not name:
            raise BoundaryError(f"missing name, feature {index}")

        geometry = feature.get("geometry") or {}
        gtype = geometry.get("type")
        coords = geometry.get("coordinates")
        if gtype == "Polygon":
            polygons = (_polygon_from_coords(coords, index),)
        elif gtype == "MultiPolygon":
            polygons = tuple(_polygon_from_coords(c, index) for c in coords)
        else:
            raise BoundaryError(f"unsupported geometry {gtype!r}, feature {index}")
        boundaries.append(TribeBoundary(tribe_id=tribe_id, name=name, polygons=polygons))
    return boundaries


def _on_segment(px: float, py: float, x1: float, y1: float, x2: float, y2: float) -> bool:
    cross = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
    if cross != 0.0:
        return False
    return min(x1, x2) <= px <= max(x1, x2) and min(y1, y2) <= py <= max(y1, y2)


def _ring_contains(point: tuple[float, float], ring: Ring) -> bool:
    """Even-odd ray-casting; boundary points handled by the caller."""
    px, py = point
    inside = False
    for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
        if (y1 > py) != (y2 > py):
            x_cross = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
            if px < x_cross:
                inside = not inside
    return inside


def point_in_polygon(point: tuple[float, float], polygon: PolygonGeometry) -> bool:
    """Even-odd containment; points exactly on any ring edge count as inside."""
    px, py = point
    for ring in (polygon.outer, *polygon.holes):
        for (x1, y1), (x2, y2) in zip(ring, ring[1:]):
            if _on_segment(px, py, x1, y1, x2, y2):
                return True
    if not _ring_contains(point, polygon.outer):
        return False
    return not any(_ring_contains(point, hole) for hole in polygon.holes)


@dataclass
class AssignmentDiagnostics:
    """Side-channel notes from tribe resolution, surfaced per snapshot."""

    unknown_codes: list[tuple[str, str]]  # (crash_id, tribal_code)
    overlaps: list[tuple[str, tuple[str, ...]]]  # (crash_id, containing tribe_ids)
    conflicts: list[tuple[str, str, str]]  # (crash_id, attribute tribe, spatial tribe)

    def __init__(self) -> None:
        self.unknown_codes = []
        self.overlaps = []
        self.conflicts = []


class TribeIndex:
    """Prebuilt lookup over a boundary list: code map plus bbox prefilter."""

    def __init__(self, boundaries: Sequence[TribeBoundary]):
        self.boundaries = list(boundaries)
        self.by_code = {b.tribe_id.lower(): b.tribe_id for b in self.boundaries}
        self._bboxes = [b.bbox() for b in self.boundaries]

    def containing(self, point: tuple[float, float]) -> list[str]:
        lon, lat = point
        found = []
        for boundary, (min_lon, min_lat, max_lon, max_lat) in zip(
            self.boundaries, self._bboxes
        ):
            if min_lon <= lon <= max_lon and min_lat <= lat <= max_lat:
                if boundary.contains(point):
                    found.append(boundary.tribe_id)
        return found


def assign_tribe(
    record: CrashRecord,
    boundaries: Sequence[TribeBoundary],
    diagnostics: Optional[AssignmentDiagnostics] = None,
    index: Optional[TribeIndex] = None,
) -> TribeAssignment:
    """Resolve a crash to a tribe via attribute and spatial paths.

    Attribute path: tribal_code matched (case-insensitively) to a boundary
    tribe_id. Spatial path: first boundary in file order containing the
    location. Agreement, single-path, and conflict cases per TribeAssignment;
    the attribute tribe wins on conflict.
    """
    if index is None:
        index = TribeIndex(boundaries)

    attribute_tribe: Optional[str] = None
    if record.tribal_code:
        attribute_tribe = index.by_code.get(record.tribal_code.strip().lower())
        if attribute_tribe is None and diagnostics is not None:
            diagnostics.unknown_codes.append((record.crash_id, record.tribal_code))

    spatial_tribe: Optional[str] = None
    if record.location is not None:
        containing = index.containing(record.location)
        if containing:
            spatial_tribe = containing[0]
            if len(containing) > 1 and diagnostics is not None:
                diagnostics.overlaps.append((record.crash_id, tuple(containing)))

    if attribute_tribe and spatial_tribe:
        if attribute_tribe == spatial_tribe:
            return TribeAssignment(record.crash_id, attribute_tribe, AssignmentSource.BOTH_AGREE)
        if diagnostics is not None:
            diagnostics.conflicts.append((record.crash_id, attribute_tribe, spatial_tribe))
        return TribeAssignment(
            record.crash_id,
            attribute_tribe,
            AssignmentSource.CONFLICT,
            conflict_detail=(attribute_tribe, spatial_tribe),
        )
    if attribute_tribe:
        return TribeAssignment(record.crash_id, attribute_tribe, AssignmentSource.ATTRIBUTE)
    if spatial_tribe:
        return TribeAssignment(record.crash_id, spatial_tribe, AssignmentSource.SPATIAL)
    return TribeAssignment(record.crash_id, None, None)
