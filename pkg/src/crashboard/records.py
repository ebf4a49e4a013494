"""Core crash-record types: KABCO severity, persons, crashes."""

from __future__ import annotations

import datetime
import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence


class SeverityLevel(enum.Enum):
    """KABCO injury severity code, totally ordered K > A > B > C > O."""

    K = "K"  # fatal injury
    A = "A"  # suspected serious injury
    B = "B"  # suspected minor injury
    C = "C"  # possible injury
    O = "O"  # no apparent injury

    @property
    def rank(self) -> int:
        """Position in the K>A>B>C>O order; higher means more severe."""
        return _SEVERITY_RANK[self]

    def __lt__(self, other: "SeverityLevel") -> bool:
        if not isinstance(other, SeverityLevel):
            return NotImplemented
        return self.rank < other.rank

    def __le__(self, other: "SeverityLevel") -> bool:
        if not isinstance(other, SeverityLevel):
            return NotImplemented
        return self.rank <= other.rank

    def __gt__(self, other: "SeverityLevel") -> bool:
        if not isinstance(other, SeverityLevel):
            return NotImplemented
        return self.rank > other.rank

    def __ge__(self, other: "SeverityLevel") -> bool:
        if not isinstance(other, SeverityLevel):
            return NotImplemented
        return self.rank >= other.rank


_SEVERITY_RANK = {
    SeverityLevel.O: 0,
    SeverityLevel.C: 1,
    SeverityLevel.B: 2,
    SeverityLevel.A: 3,
    SeverityLevel.K: 4,
}

SEVERITY_ORDER = (
    SeverityLevel.K,
    SeverityLevel.A,
    SeverityLevel.B,
    SeverityLevel.C,
    SeverityLevel.O,
)


def parse_severity(code: str) -> SeverityLevel:
    """Parse a one-letter KABCO code; raises ValueError on anything else."""
    try:
        return SeverityLevel(code.strip().upper())
    except (ValueError, AttributeError):
        raise ValueError(f"invalid severity code {code!r}") from None


class SeverityGroup(enum.Enum):
    """Severity groupings used for rate computation."""

    KA = "KA"
    KAB = "KAB"
    ALL = "ALL"


_GROUP_MEMBERS = {
    SeverityGroup.KA: frozenset({SeverityLevel.K, SeverityLevel.A}),
    SeverityGroup.KAB: frozenset({SeverityLevel.K, SeverityLevel.A, SeverityLevel.B}),
    SeverityGroup.ALL: frozenset(SeverityLevel),
}


def in_group(severity: SeverityLevel, group: SeverityGroup) -> bool:
    """True iff the severity belongs to the group (KA ⊂ KAB ⊂ ALL)."""
    return severity in _GROUP_MEMBERS[group]


class PersonRole(enum.Enum):
    DRIVER = "driver"
    PASSENGER = "passenger"
    PEDESTRIAN = "pedestrian"
    OTHER = "other"


class Sex(enum.Enum):
    FEMALE = "female"
    MALE = "male"
    UNKNOWN = "unknown"


class CrashLocationClass(enum.Enum):
    PUBLIC_PROPERTY = "public_property"
    PRIVATE_PROPERTY = "private_property"
    TRIBAL_LAND = "tribal_land"
    UNKNOWN = "unknown"


class Jurisdiction(enum.Enum):
    NONE = "none"
    COLLEGE_CAMPUS = "college_campus"
    MILITARY = "military"
    NATIONAL_PARK = "national_park"
    INDIAN_RESERVATION_TRUST = "indian_reservation_trust"
    OTHER = "other"
    UNKNOWN = "unknown"


class AgencyType(enum.Enum):
    STATE_PATROL = "state_patrol"
    COUNTY_SHERIFF = "county_sheriff"
    CITY_POLICE = "city_police"
    TRIBAL = "tribal"
    OTHER = "other"
    UNKNOWN = "unknown"


class RoadFunctional(enum.Enum):
    STH = "STH"
    USH = "USH"
    IH = "IH"
    CTH = "CTH"
    LOCAL = "local"
    OTHER = "other"
    UNKNOWN = "unknown"


class UrbanRural(enum.Enum):
    URBAN = "urban"
    RURAL = "rural"
    UNKNOWN = "unknown"


# Key-factor flag names, in canonical column order.
FLAG_NAMES = ("speeding", "impaired", "pedestrian_involved", "hit_and_run", "safety_belt")


@dataclass(frozen=True)
class PersonRecord:
    """One person involved in a crash."""

    role: PersonRole
    sex: Sex
    age: Optional[int]  # years; None when unknown
    injury: SeverityLevel

    def __post_init__(self) -> None:
        if self.age is not None and not 0 <= self.age <= 120:
            raise ValueError(f"age {self.age} outside [0, 120]")


@dataclass(frozen=True)
class CrashRecord:
    """One reported crash with classification fields and per-person injuries.

    ``severity`` is the crash-level roll-up: the maximum person injury under
    K>A>B>C>O, or O when there are no persons.
    """

    crash_id: str
    crash_date: datetime.date
    location: Optional[tuple[float, float]]  # (longitude, latitude), WGS84
    crash_location_class: CrashLocationClass
    jurisdiction: Jurisdiction
    agency_type: AgencyType
    tribal_code: Optional[str]
    tribal_name: Optional[str]
    road_functional: RoadFunctional
    urban_rural: UrbanRural
    crash_type: str
    speeding: bool
    impaired: bool
    pedestrian_involved: bool
    hit_and_run: bool
    safety_belt: bool
    persons: tuple[PersonRecord, ...] = field(default_factory=tuple)
    severity: SeverityLevel = SeverityLevel.O

    def __post_init__(self) -> None:
        if not self.crash_id:
            raise ValueError("crash_id must be non-empty")
        if self.location is not None:
            lon, lat = self.location
            if not -180.0 <= lon <= 180.0:
                raise ValueError(f"longitude {lon} outside [-180, 180]")
            if not -90.0 <= lat <= 90.0:
                raise ValueError(f"latitude {lat} outside [-90, 90]")
        expected = derive_crash_severity(self.persons)
        if self.severity is not expected:
            raise ValueError(
                f"severity {self.severity.value} does not match persons "
                f"(expected {expected.value})"
            )

    def flag(self, name: str) -> bool:
        """Key-factor flag by canonical name."""
        if name not in FLAG_NAMES:
            raise KeyError(f"unknown flag {name!r}")
        attr = {"pedestrian_involved": "pedestrian_involved"}.get(name, name)
        return getattr(self, attr)

    @property
    def year(self) -> int:
        return self.crash_date.year


def derive_crash_severity(persons: Sequence[PersonRecord]) -> SeverityLevel:
    """Crash-level severity: max person injury under K>A>B>C>O, O if empty."""
    severity = SeverityLevel.O
    for person in persons:
        if person.injury.rank > severity.rank:
            severity = person.injury
    return severity


def make_crash_record(persons: Sequence[PersonRecord] = (), **kwargs) -> CrashRecord:
    """Build a CrashRecord with severity derived from its persons."""
    persons_t = tuple(persons)
    return CrashRecord(persons=persons_t, severity=derive_crash_severity(persons_t), **kwargs)
