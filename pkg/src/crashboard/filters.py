"""Query filters shared by the analytics library, CLI, and HTTP service."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .records import (
    FLAG_NAMES,
    CrashRecord,
    RoadFunctional,
    SeverityGroup,
    UrbanRural,
    in_group,
)

HIGHWAY_CLASSES = frozenset({RoadFunctional.STH, RoadFunctional.USH, RoadFunctional.IH})
NON_HIGHWAY_CLASSES = frozenset({RoadFunctional.CTH, RoadFunctional.LOCAL})


def highway_class(road: RoadFunctional) -> str:
    """'highway' (STH/USH/IH), 'non_highway' (CTH/local), else 'unknown'."""
    if road in HIGHWAY_CLASSES:
        return "highway"
    if road in NON_HIGHWAY_CLASSES:
        return "non_highway"
    return "unknown"


@dataclass(frozen=True)
class QueryFilter:
    """Conjunctive crash predicates; None means the dimension is unrestricted."""

    year_from: Optional[int] = None
    year_to: Optional[int] = None
    severity_group: Optional[SeverityGroup] = None
    urban_rural: Optional[UrbanRural] = None
    road_class: Optional[str] = None  # "highway" | "non_highway" | "unknown"
    key_factor: Optional[str] = None  # one of FLAG_NAMES
    crash_type: Optional[str] = None
    bbox: Optional[tuple[float, float, float, float]] = None

    def __post_init__(self) -> None:
        if self.year_from is not None and self.year_to is not None:
            if self.year_from > self.year_to:
                raise ValueError("year_from must not exceed year_to")
        if self.road_class is not None and self.road_class not in (
            "highway",
            "non_highway",
            "unknown",
        ):
            raise ValueError(f"invalid road_class {self.road_class!r}")
        if self.key_factor is not None and self.key_factor not in FLAG_NAMES:
            raise ValueError(f"unknown key_factor {self.key_factor!r}")
        if self.bbox is not None:
            min_lon, min_lat, max_lon, max_lat = self.bbox
            if min_lon > max_lon or min_lat > max_lat:
                raise ValueError("bbox min must not exceed max")

    def matches(self, record: CrashRecord) -> bool:
        if self.year_from is not None and record.year < self.year_from:
            return False
        if self.year_to is not None and record.year > self.year_to:
            return False
        if self.severity_group is not None and not in_group(
            record.severity, self.severity_group
        ):
            return False
        if self.urban_rural is not None and record.urban_rural is not self.urban_rural:
            return False
        if self.road_class is not None and highway_class(record.road_functional) != self.road_class:
            return False
        if self.key_factor is not None and not record.flag(self.key_factor):
            return False
        if self.crash_type is not None:
            if record.crash_type.strip().lower() != self.crash_type.strip().lower():
                return False
        if self.bbox is not None:
            if record.location is None:
                return False
            lon, lat = record.location
            min_lon, min_lat, max_lon, max_lat = self.bbox
            if not (min_lon <= lon <= max_lon and min_lat <= lat <= max_lat):
                return False
        return True

    def apply(self, records) -> list[CrashRecord]:
        return [r for r in records if self.matches(r)]


EMPTY_FILTER = QueryFilter()
