"""Immutable, tribe-resolved dataset snapshots: the unit all queries run against."""

from __future__ import annotations

import datetime
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .geo import (
    AssignmentDiagnostics,
    AssignmentSource,
    TribeAssignment,
    TribeBoundary,
    TribeIndex,
    assign_tribe,
)
from .ingest import IngestReport
from .records import CrashLocationClass, CrashRecord


@dataclass(frozen=True)
class DatasetSnapshot:
    """Validated crash records with resolved tribe membership and metadata.

    Immutable after construction; safe to share across threads. Tribal
    membership can be queried three ways (CRSHLOC attribute, TRBCODE
    attribute, spatial containment) since source data may disagree.
    """

    snapshot_id: str
    ingested_at: datetime.datetime
    source_digest: str
    records: tuple[CrashRecord, ...]
    boundaries: tuple[TribeBoundary, ...]
    assignments: dict[str, TribeAssignment]
    diagnostics: AssignmentDiagnostics
    report: Optional[IngestReport] = None
    _by_tribe: dict[str, tuple[CrashRecord, ...]] = field(default_factory=dict, repr=False)

    @property
    def record_count(self) -> int:
        return len(self.records)

    @property
    def tribal_count(self) -> int:
        """Crashes resolved to some tribe (attribute or spatial)."""
        return sum(1 for a in self.assignments.values() if a.tribe_id is not None)

    @property
    def conflict_count(self) -> int:
        return sum(
            1 for a in self.assignments.values() if a.source is AssignmentSource.CONFLICT
        )

    @property
    def crshloc_tribal_count(self) -> int:
        """Crashes whose location-class attribute says tribal land."""
        return sum(
            1 for r in self.records
            if r.crash_location_class is CrashLocationClass.TRIBAL_LAND
        )

    @property
    def attribute_tribal_count(self) -> int:
        """Crashes whose TRBCODE resolved to a known tribe."""
        return sum(
            1 for a in self.assignments.values()
            if a.source in (AssignmentSource.ATTRIBUTE, AssignmentSource.BOTH_AGREE,
                            AssignmentSource.CONFLICT)
        )

    @property
    def spatial_tribal_count(self) -> int:
        """Crashes whose coordinates fall inside a tribal boundary."""
        count = 0
        for a in self.assignments.values():
            if a.source in (AssignmentSource.SPATIAL, AssignmentSource.BOTH_AGREE):
                count += 1
            elif a.source is AssignmentSource.CONFLICT:
                count += 1  # spatially inside a (different) tribe
        return count

    def tribe_of(self, crash_id: str) -> Optional[str]:
        assignment = self.assignments.get(crash_id)
        return assignment.tribe_id if assignment else None

    def tribe_name(self, tribe_id: str) -> Optional[str]:
        for boundary in self.boundaries:
            if boundary.tribe_id == tribe_id:
                return boundary.name
        return None

    def tribe_ids(self) -> list[str]:
        return [b.tribe_id for b in self.boundaries]

    def tribal_records(self) -> tuple[CrashRecord, ...]:
        """All crashes assigned to any tribe, in record order."""
        return self._by_tribe.get("", ())

    def records_for_tribe(self, tribe_id: str) -> tuple[CrashRecord, ...]:
        return self._by_tribe.get(tribe_id, ())

    def info_dict(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "ingested_at": self.ingested_at.isoformat(),
            "record_count": self.record_count,
            "tribal_count": self.tribal_count,
            "conflict_count": self.conflict_count,
            "source_digest": self.source_digest,
        }


def build_snapshot(
    records: Sequence[CrashRecord],
    boundaries: Sequence[TribeBoundary],
    source_digest: str,
    report: Optional[IngestReport] = None,
    sequence: int = 0,
    ingested_at: Optional[datetime.datetime] = None,
) -> DatasetSnapshot:
    """Assign tribes to every record and freeze the result as a snapshot.

    snapshot_id combines a load sequence number with the content digest, so
    reloading the same bytes in a fresh slot still yields a distinct id.
    """
    diagnostics = AssignmentDiagnostics()
    index = TribeIndex(boundaries)
    assignments: dict[str, TribeAssignment] = {}
    for record in records:
        assignments[record.crash_id] = assign_tribe(record, boundaries, diagnostics, index)

    by_tribe: dict[str, list[CrashRecord]] = {"": []}
    for record in records:
        tribe_id = assignments[record.crash_id].tribe_id
        if tribe_id is not None:
            by_tribe[""].append(record)
            by_tribe.setdefault(tribe_id, []).append(record)

    if ingested_at is None:
        ingested_at = datetime.datetime.now(datetime.timezone.utc)

    return DatasetSnapshot(
        snapshot_id=f"snap-{sequence:06d}-{source_digest[:12]}",
        ingested_at=ingested_at,
        source_digest=source_digest,
        records=tuple(records),
        boundaries=tuple(boundaries),
        assignments=assignments,
        diagnostics=diagnostics,
        report=report,
        _by_tribe={k: tuple(v) for k, v in by_tribe.items()},
    )
