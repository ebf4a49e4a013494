"""Crash-safety analytics: ingestion, tribal-land resolution, KABCO rate
statistics, spatial hotspot detection, and a read-only dashboard API."""

from .analytics import (
    CategoryBreakdown,
    CrashTypeComparison,
    RateSummary,
    TribeRanking,
    age_group_of,
    breakdown,
    injury_counts,
    rate_summary,
    road_category,
    road_table,
    top_crash_types,
    tribe_rankings,
)
from .filters import QueryFilter
from .geo import (
    AssignmentSource,
    TribeAssignment,
    TribeBoundary,
    assign_tribe,
    load_boundaries,
    point_in_polygon,
)
from .hotspot import (
    GiStarCell,
    HotspotGrid,
    bin_to_grid,
    classify_hotspots,
    gi_star,
)
from .ingest import IngestError, IngestReport, parse_crash_csv
from .records import (
    CrashRecord,
    PersonRecord,
    SeverityGroup,
    SeverityLevel,
    derive_crash_severity,
    in_group,
)
from .snapshot import DatasetSnapshot, build_snapshot
from .synth import ClusterSpec, ScopeMix, SynthSpec, calibrated_spec, generate, simple_spec

__version__ = "0.1.0"

__all__ = [
    "AssignmentSource",
    "CategoryBreakdown",
    "ClusterSpec",
    "CrashRecord",
    "CrashTypeComparison",
    "DatasetSnapshot",
    "GiStarCell",
    "HotspotGrid",
    "IngestError",
    "IngestReport",
    "PersonRecord",
    "QueryFilter",
    "RateSummary",
    "ScopeMix",
    "SeverityGroup",
    "SeverityLevel",
    "SynthSpec",
    "TribeAssignment",
    "TribeBoundary",
    "TribeRanking",
    "age_group_of",
    "assign_tribe",
    "bin_to_grid",
    "breakdown",
    "build_snapshot",
    "calibrated_spec",
    "classify_hotspots",
    "derive_crash_severity",
    "generate",
    "gi_star",
    "in_group",
    "injury_counts",
    "load_boundaries",
    "parse_crash_csv",
    "point_in_polygon",
    "rate_summary",
    "road_category",
    "road_table",
    "simple_spec",
    "top_crash_types",
    "tribe_rankings",
]
