"""Severity-rate statistics, demographic/key-factor/road breakdowns,
per-tribe rankings, and crash-type comparisons over a snapshot."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .filters import EMPTY_FILTER, QueryFilter, highway_class
from .records import (
    FLAG_NAMES,
    CrashRecord,
    PersonRecord,
    PersonRole,
    SeverityGroup,
    SeverityLevel,
    Sex,
    UrbanRural,
    in_group,
)
from .snapshot import DatasetSnapshot

# Default age-group bin edges: [lo, hi] inclusive, partitioning 0..120.
DEFAULT_AGE_BINS: tuple[tuple[int, int], ...] = (
    (0, 4),
    (5, 14),
    (15, 24),
    (25, 44),
    (45, 64),
    (65, 74),
    (75, 120),
)

KEY_FACTOR_LABELS = {
    "speeding": "Speeding",
    "impaired": "Impaired",
    "pedestrian_involved": "Pedestrian",
    "hit_and_run": "Hit & Run",
    "safety_belt": "Safety Belt",
}

BREAKDOWN_DIMENSIONS = ("sex", "age_group", "key_factor", "road_category")
SCOPES = ("statewide", "tribal")


@dataclass(frozen=True)
class RateSummary:
    """Crash counts with KAB/KA rates; rates are undefined when total is 0."""

    total: int
    kab: int
    ka: int

    def __post_init__(self) -> None:
        if not 0 <= self.ka <= self.kab <= self.total:
            raise ValueError(f"need 0 <= ka <= kab <= total, got {self}")

    @property
    def kab_rate(self) -> Optional[float]:
        """Percent of crashes in KAB; None (undefined) on an empty subset."""
        if self.total == 0:
            return None
        return 100.0 * self.kab / self.total

    @property
    def ka_rate(self) -> Optional[float]:
        if self.total == 0:
            return None
        return 100.0 * self.ka / self.total

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "kab": self.kab,
            "kab_rate": self.kab_rate,
            "ka": self.ka,
            "ka_rate": self.ka_rate,
        }


@dataclass(frozen=True)
class BreakdownRow:
    label: str
    share: Optional[float]  # percent of scope total; None when scope empty
    rates: RateSummary

    def to_dict(self) -> dict:
        return {"label": self.label, "share": self.share, **self.rates.to_dict()}


@dataclass(frozen=True)
class CategoryBreakdown:
    dimension: str
    scope: str
    rows: tuple[BreakdownRow, ...]
    grand_total: RateSummary

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "scope": self.scope,
            "rows": [row.to_dict() for row in self.rows],
            "grand_total": self.grand_total.to_dict(),
        }


@dataclass(frozen=True)
class TribeRankingRow:
    tribe_id: str
    name: str
    rates: RateSummary
    kab_rank: int
    ka_rank: int

    def to_dict(self) -> dict:
        return {
            "tribe_id": self.tribe_id,
            "name": self.name,
            **self.rates.to_dict(),
            "kab_rank": self.kab_rank,
            "ka_rank": self.ka_rank,
        }


@dataclass(frozen=True)
class TribeRanking:
    rows: tuple[TribeRankingRow, ...]  # listed in kab_rank order

    def to_dict(self) -> dict:
        return {"rows": [row.to_dict() for row in self.rows]}


@dataclass(frozen=True)
class CrashTypeRow:
    crash_type: str
    tribal_percent: float
    statewide_percent: float

    def to_dict(self) -> dict:
        return {
            "crash_type": self.crash_type,
            "tribal_percent": self.tribal_percent,
            "statewide_percent": self.statewide_percent,
        }


@dataclass(frozen=True)
class CrashTypeComparison:
    weight: str  # "total" | "kab"
    rows: tuple[CrashTypeRow, ...]

    def to_dict(self) -> dict:
        return {"weight": self.weight, "rows": [row.to_dict() for row in self.rows]}


def rate_summary(subset: Iterable[CrashRecord]) -> RateSummary:
    """Count crashes and KAB/KA crashes by rolled-up severity."""
    total = kab = ka = 0
    for record in subset:
        total += 1
        if in_group(record.severity, SeverityGroup.KAB):
            kab += 1
        if in_group(record.severity, SeverityGroup.KA):
            ka += 1
    return RateSummary(total=total, kab=kab, ka=ka)


def injury_counts(subset: Iterable[CrashRecord]) -> dict[str, int]:
    """Crash counts by rolled-up severity level K/A/B/C/O."""
    counts = {level.value: 0 for level in SeverityLevel}
    for record in subset:
        counts[record.severity.value] += 1
    return counts


def person_totals(subset: Iterable[CrashRecord]) -> dict[str, int]:
    """Person-level totals: fatalities (K persons) and injuries (A/B/C persons)."""
    fatalities = injuries = 0
    for record in subset:
        for person in record.persons:
            if person.injury is SeverityLevel.K:
                fatalities += 1
            elif person.injury is not SeverityLevel.O:
                injuries += 1
    return {"fatalities": fatalities, "injuries": injuries}


def age_group_of(age: Optional[int], bins: Sequence[tuple[int, int]] = DEFAULT_AGE_BINS) -> str:
    """Bin an age in years into its group label; None maps to 'unknown'."""
    if age is None:
        return "unknown"
    if not 0 <= age <= 120:
        raise ValueError(f"age {age} outside [0, 120]")
    for lo, hi in bins:
        if lo <= age <= hi:
            return _age_bin_label(lo, hi, bins)
    return "unknown"


def _age_bin_label(lo: int, hi: int, bins: Sequence[tuple[int, int]]) -> str:
    if lo == 0:
        return f"≤{hi}"
    if hi >= bins[-1][1]:
        return f"≥{lo}"
    return f"{lo}–{hi}"


def age_bin_labels(bins: Sequence[tuple[int, int]] = DEFAULT_AGE_BINS) -> list[str]:
    return [_age_bin_label(lo, hi, bins) for lo, hi in bins]


def road_category(record: CrashRecord) -> tuple[str, str]:
    """(urban/rural/unknown, highway/non_highway/unknown) for one crash."""
    return record.urban_rural.value, highway_class(record.road_functional)


_ROAD_LABELS = {
    ("rural", "highway"): "Rural Highway",
    ("rural", "non_highway"): "Rural Non-highway",
    ("urban", "highway"): "Urban Highway",
    ("urban", "non_highway"): "Urban Non-highway",
}


def road_category_label(record: CrashRecord) -> str:
    pair = road_category(record)
    if pair in _ROAD_LABELS:
        return _ROAD_LABELS[pair]
    area = pair[0].capitalize() if pair[0] != "unknown" else "Unknown"
    road = {"highway": "Highway", "non_highway": "Non-highway"}.get(pair[1], "Unknown")
    return f"{area} {road}"


def primary_person(record: CrashRecord) -> Optional[PersonRecord]:
    """The person a crash is demographically attributed to: the first listed
    driver, else the first listed person, else None."""
    for person in record.persons:
        if person.role is PersonRole.DRIVER:
            return person
    return record.persons[0] if record.persons else None


def resolve_scope(
    snapshot: DatasetSnapshot, scope: str, tribe_id: Optional[str] = None
) -> tuple[CrashRecord, ...]:
    """Resolve a scope name (+ optional tribe) to its crash subset."""
    if scope == "statewide":
        return snapshot.records
    if scope == "tribal":
        if tribe_id is not None:
            return snapshot.records_for_tribe(tribe_id)
        return snapshot.tribal_records()
    raise ValueError(f"unknown scope {scope!r}")


_SEX_LABELS = ((Sex.FEMALE, "Female"), (Sex.MALE, "Male"), (Sex.UNKNOWN, "Unknown"))


def breakdown(
    snapshot: DatasetSnapshot,
    dimension: str,
    scope: str = "statewide",
    filters: QueryFilter = EMPTY_FILTER,
    tribe_id: Optional[str] = None,
    age_bins: Sequence[tuple[int, int]] = DEFAULT_AGE_BINS,
    attribution: str = "primary",
) -> CategoryBreakdown:
    """One row per category label with share-of-scope and KAB/KA rates.

    Sex and age-group rows attribute each crash to its primary person (first
    driver, else first person), so those rows partition the scope; with
    attribution="any" a crash instead counts under every label its persons
    carry, and rows may overlap. Key-factor rows always may overlap;
    road-category rows always partition.
    """
    if dimension not in BREAKDOWN_DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    if attribution not in ("primary", "any"):
        raise ValueError(f"unknown attribution {attribution!r}")

    subset = filters.apply(resolve_scope(snapshot, scope, tribe_id))
    scope_total = len(subset)
    grand_total = rate_summary(subset)

    groups: dict[str, list[CrashRecord]]
    if dimension == "sex":
        labels = [label for _, label in _SEX_LABELS]
        groups = {label: [] for label in labels}
        for record in subset:
            for label in _sex_labels_of(record, attribution):
                groups[label].append(record)
    elif dimension == "age_group":
        labels = age_bin_labels(age_bins) + ["unknown"]
        groups = {label: [] for label in labels}
        for record in subset:
            for label in _age_labels_of(record, attribution, age_bins):
                groups[label].append(record)
    elif dimension == "key_factor":
        labels = [KEY_FACTOR_LABELS[f] for f in FLAG_NAMES]
        groups = {label: [] for label in labels}
        for record in subset:
            for flag in FLAG_NAMES:
                if record.flag(flag):
                    groups[KEY_FACTOR_LABELS[flag]].append(record)
    else:  # road_category
        labels = list(_ROAD_LABELS.values())
        groups = {label: [] for label in labels}
        for record in subset:
            label = road_category_label(record)
            groups.setdefault(label, []).append(record)
        # unknown-area/class combos appear after the four known rows
        labels += sorted(set(groups) - set(labels))

    rows = []
    for label in labels:
        rates = rate_summary(groups.get(label, ()))
        share = None if scope_total == 0 else 100.0 * rates.total / scope_total
        rows.append(BreakdownRow(label=label, share=share, rates=rates))

    scope_name = "single_tribe" if (scope == "tribal" and tribe_id) else scope
    return CategoryBreakdown(
        dimension=dimension, scope=scope_name, rows=tuple(rows), grand_total=grand_total
    )


def _sex_labels_of(record: CrashRecord, attribution: str) -> list[str]:
    if attribution == "primary":
        person = primary_person(record)
        sex = person.sex if person is not None else Sex.UNKNOWN
        return [dict(_SEX_LABELS)[sex]]
    labels = {dict(_SEX_LABELS)[p.sex] for p in record.persons}
    return sorted(labels) if labels else ["Unknown"]


def _age_labels_of(
    record: CrashRecord, attribution: str, bins: Sequence[tuple[int, int]]
) -> list[str]:
    if attribution == "primary":
        person = primary_person(record)
        return [age_group_of(person.age, bins) if person is not None else "unknown"]
    labels = {age_group_of(p.age, bins) for p in record.persons}
    return sorted(labels) if labels else ["unknown"]


def road_table(
    snapshot: DatasetSnapshot,
    scope: str = "statewide",
    filters: QueryFilter = EMPTY_FILTER,
    tribe_id: Optional[str] = None,
) -> list[tuple[str, RateSummary]]:
    """Road-type severity table: total, highway/non-highway marginals, then
    the four urban/rural x highway/non-highway rows (plus unknowns if any)."""
    subset = filters.apply(resolve_scope(snapshot, scope, tribe_id))
    rows: list[tuple[str, RateSummary]] = [("Total Crashes", rate_summary(subset))]

    by_class: dict[str, list[CrashRecord]] = {"highway": [], "non_highway": [], "unknown": []}
    for record in subset:
        by_class[highway_class(record.road_functional)].append(record)
    rows.append(("Highway", rate_summary(by_class["highway"])))
    rows.append(("Non-highway", rate_summary(by_class["non_highway"])))
    if by_class["unknown"]:
        rows.append(("Unknown road class", rate_summary(by_class["unknown"])))

    by_combo: dict[str, list[CrashRecord]] = {}
    for record in subset:
        by_combo.setdefault(road_category_label(record), []).append(record)
    for label in _ROAD_LABELS.values():
        rows.append((label, rate_summary(by_combo.get(label, ()))))
    for label in sorted(set(by_combo) - set(_ROAD_LABELS.values())):
        rows.append((label, rate_summary(by_combo[label])))
    return rows


def tribe_rankings(
    snapshot: DatasetSnapshot, filters: QueryFilter = EMPTY_FILTER
) -> TribeRanking:
    """Per-tribe KAB/KA rates with 1-based rankings.

    Ranks order by the target rate descending; exact rate ties fall back to
    the other group's rate, then larger total, then tribe name. Rows are
    listed in KAB-rank order.
    """
    entries: list[tuple[str, str, RateSummary]] = []
    for tribe_id in snapshot.tribe_ids():
        subset = filters.apply(snapshot.records_for_tribe(tribe_id))
        if not subset:
            continue
        name = snapshot.tribe_name(tribe_id) or tribe_id
        entries.append((tribe_id, name, rate_summary(subset)))

    def kab_key(e: tuple[str, str, RateSummary]):
        _, name, r = e
        return (-(r.kab_rate or 0.0), -(r.ka_rate or 0.0), -r.total, name)

    def ka_key(e: tuple[str, str, RateSummary]):
        _, name, r = e
        return (-(r.ka_rate or 0.0), -(r.kab_rate or 0.0), -r.total, name)

    kab_rank = {e[0]: i for i, e in enumerate(sorted(entries, key=kab_key), start=1)}
    ka_rank = {e[0]: i for i, e in enumerate(sorted(entries, key=ka_key), start=1)}

    rows = [
        TribeRankingRow(
            tribe_id=tid, name=name, rates=rates,
            kab_rank=kab_rank[tid], ka_rank=ka_rank[tid],
        )
        for tid, name, rates in entries
    ]
    rows.sort(key=lambda row: row.kab_rank)
    return TribeRanking(rows=tuple(rows))


def _normalize_type(label: str) -> str:
    return label.strip().lower()


def top_crash_types(
    snapshot: DatasetSnapshot,
    n: int = 10,
    weight: str = "total",
    filters: QueryFilter = EMPTY_FILTER,
) -> CrashTypeComparison:
    """Top-N tribal crash types with tribal vs statewide percent shares.

    With weight="kab" both shares are computed over KAB crashes only.
    Labels match case-insensitively after trimming; each group displays its
    lexicographically smallest observed spelling.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if weight not in ("total", "kab"):
        raise ValueError(f"unknown weight {weight!r}")

    tribal = filters.apply(snapshot.tribal_records())
    statewide = filters.apply(snapshot.records)
    if weight == "kab":
        tribal = [r for r in tribal if in_group(r.severity, SeverityGroup.KAB)]
        statewide = [r for r in statewide if in_group(r.severity, SeverityGroup.KAB)]

    def tally(records: Sequence[CrashRecord]) -> tuple[dict[str, int], dict[str, str]]:
        counts: dict[str, int] = {}
        display: dict[str, str] = {}
        for record in records:
            key = _normalize_type(record.crash_type)
            counts[key] = counts.get(key, 0) + 1
            spelling = record.crash_type.strip()
            if key not in display or spelling < display[key]:
                display[key] = spelling
        return counts, display

    tribal_counts, tribal_display = tally(tribal)
    statewide_counts, _ = tally(statewide)

    rows = []
    for key, count in tribal_counts.items():
        tribal_pct = 100.0 * count / len(tribal)
        statewide_pct = (
            100.0 * statewide_counts.get(key, 0) / len(statewide) if statewide else 0.0
        )
        rows.append(
            CrashTypeRow(
                crash_type=tribal_display[key],
                tribal_percent=tribal_pct,
                statewide_percent=statewide_pct,
            )
        )
    rows.sort(key=lambda row: (-row.tribal_percent, row.crash_type))
    return CrashTypeComparison(weight=weight, rows=tuple(rows[:n]))
