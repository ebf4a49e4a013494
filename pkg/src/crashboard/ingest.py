"""CSV ingestion: parse, validate, and normalize crash and person files."""

from __future__ import annotations

import csv
import datetime
import hashlib
import io
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Optional, Union

from .records import (
    AgencyType,
    CrashLocationClass,
    CrashRecord,
    Jurisdiction,
    PersonRecord,
    PersonRole,
    RoadFunctional,
    Sex,
    SeverityLevel,
    UrbanRural,
    derive_crash_severity,
    parse_severity,
)

ByteSource = Union[bytes, bytearray, BinaryIO]

# Logical field -> default CSV column name.
DEFAULT_CRASH_SCHEMA: dict[str, str] = {
    "crash_id": "crash_id",
    "crash_date": "crash_date",
    "longitude": "longitude",
    "latitude": "latitude",
    "crash_location_class": "crshloc",
    "jurisdiction": "crshjur",
    "agency_type": "agcytype",
    "tribal_code": "trbcode",
    "tribal_name": "trbname",
    "road_functional": "road_functional",
    "urban_rural": "urban_rural",
    "crash_type": "crash_type",
    "speeding": "flag_speeding",
    "impaired": "flag_impaired",
    "pedestrian_involved": "flag_pedestrian",
    "hit_and_run": "flag_hitrun",
    "safety_belt": "flag_beltnonuse",
}

DEFAULT_PERSON_SCHEMA: dict[str, str] = {
    "crash_id": "crash_id",
    "role": "role",
    "sex": "sex",
    "age": "age",
    "injury": "injury",
}


class IngestError(Exception):
    """Fatal ingest failure: unreadable stream or missing header/columns."""


@dataclass(frozen=True)
class Rejection:
    """One rejected data row."""

    row_number: int  # 1-based over data rows (header excluded)
    field: str
    message: str


@dataclass
class IngestReport:
    """Outcome of one ingest run; accepted + rejected = input data rows."""

    accepted_count: int = 0
    rejected: list[Rejection] = field(default_factory=list)
    person_accepted_count: int = 0
    person_rejected: list[Rejection] = field(default_factory=list)
    source_digest: str = ""

    def to_dict(self) -> dict:
        return {
            "accepted_count": self.accepted_count,
            "rejected": [
                {"row": r.row_number, "field": r.field, "message": r.message}
                for r in self.rejected
            ],
            "person_accepted_count": self.person_accepted_count,
            "person_rejected": [
                {"row": r.row_number, "field": r.field, "message": r.message}
                for r in self.person_rejected
            ],
            "source_digest": self.source_digest,
        }


_CRSHLOC_VALUES = {
    "public property": CrashLocationClass.PUBLIC_PROPERTY,
    "private property": CrashLocationClass.PRIVATE_PROPERTY,
    "tribal land": CrashLocationClass.TRIBAL_LAND,
}

_CRSHJUR_VALUES = {
    "no special jurisdiction": Jurisdiction.NONE,
    "none": Jurisdiction.NONE,
    "college/university campus": Jurisdiction.COLLEGE_CAMPUS,
    "military": Jurisdiction.MILITARY,
    "national park service": Jurisdiction.NATIONAL_PARK,
    "indian reservation/trust": Jurisdiction.INDIAN_RESERVATION_TRUST,
    "other": Jurisdiction.OTHER,
}

_AGCYTYPE_VALUES = {
    "state patrol": AgencyType.STATE_PATROL,
    "county sheriff": AgencyType.COUNTY_SHERIFF,
    "city police": AgencyType.CITY_POLICE,
    "tribal": AgencyType.TRIBAL,
    "other": AgencyType.OTHER,
}

_ROAD_VALUES = {
    "sth": RoadFunctional.STH,
    "ush": RoadFunctional.USH,
    "ih": RoadFunctional.IH,
    "cth": RoadFunctional.CTH,
    "local": RoadFunctional.LOCAL,
    "other": RoadFunctional.OTHER,
}

_URBAN_RURAL_VALUES = {
    "u": UrbanRural.URBAN,
    "urban": UrbanRural.URBAN,
    "r": UrbanRural.RURAL,
    "rural": UrbanRural.RURAL,
}

_ROLE_VALUES = {
    "driver": PersonRole.DRIVER,
    "passenger": PersonRole.PASSENGER,
    "pedestrian": PersonRole.PEDESTRIAN,
    "other": PersonRole.OTHER,
}

_SEX_VALUES = {
    "f": Sex.FEMALE,
    "female": Sex.FEMALE,
    "m": Sex.MALE,
    "male": Sex.MALE,
    "u": Sex.UNKNOWN,
    "unknown": Sex.UNKNOWN,
}

_TRUTHY = {"1", "true", "t", "y", "yes"}


def _read_bytes(source: ByteSource) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    data = source.read()
    if isinstance(data, str):
        return data.encode("utf-8")
    return data


def _lookup_enum(raw: Optional[str], table: dict, unknown):
    """Blank or unrecognized cells map to the enum's unknown value."""
    if raw is None:
        return unknown
    key = raw.strip().lower()
    if not key:
        return unknown
    return table.get(key, unknown)


def _parse_bool(raw: Optional[str]) -> bool:
    if raw is None:
        return False
    return raw.strip().lower() in _TRUTHY


def source_digest(crash_bytes: bytes, persons_bytes: bytes = b"") -> str:
    """Content hash over both input files; stable across reruns."""
    h = hashlib.sha256()
    h.update(b"crash:")
    h.update(crash_bytes)
    h.update(b"\x00persons:")
    h.update(persons_bytes)
    return h.hexdigest()


def _open_reader(raw: bytes, which: str):
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise IngestError(f"{which} CSV is not valid UTF-8: {exc}") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise IngestError(f"{which} CSV has no header row")
    return reader, header


def _column_map(header: list[str], schema: dict[str, str], which: str) -> dict[str, int]:
    missing = [col for col in schema.values() if col not in header]
    if missing:
        raise IngestError(f"{which} CSV missing columns: {', '.join(sorted(missing))}")
    positions = {name: i for i, name in enumerate(header)}
    return {field: positions[column] for field, column in schema.items()}


def parse_crash_csv(
    crash_csv: ByteSource,
    persons_csv: Optional[ByteSource] = None,
    schema: Optional[dict[str, str]] = None,
    person_schema: Optional[dict[str, str]] = None,
) -> tuple[list[CrashRecord], IngestReport]:
    """Parse crash (and optional person) CSV files into validated records.

    Per-row violations reject the row and are listed in the report; a missing
    header or unreadable stream raises IngestError. Person rows are joined to
    crashes by crash_id; persons of rejected or unknown crashes are rejected.
    """
    schema = dict(DEFAULT_CRASH_SCHEMA if schema is None else schema)
    person_schema = dict(DEFAULT_PERSON_SCHEMA if person_schema is None else person_schema)

    crash_bytes = _read_bytes(crash_csv)
    persons_bytes = _read_bytes(persons_csv) if persons_csv is not None else b""

    report = IngestReport(source_digest=source_digest(crash_bytes, persons_bytes))

    reader, header = _open_reader(crash_bytes, "crash")
    columns = _column_map(header, schema, "crash")

    # First pass: validate crash fields, accumulate persons later.
    parsed: dict[str, dict] = {}  # crash_id -> validated field dict
    order: list[str] = []
    for row_number, row in enumerate(reader, start=1):
        outcome = _validate_crash_row(row, row_number, columns, parsed)
        if isinstance(outcome, Rejection):
            report.rejected.append(outcome)
        else:
            order.append(outcome)

    persons_by_crash: dict[str, list[PersonRecord]] = {cid: [] for cid in parsed}
    if persons_bytes:
        preader, pheader = _open_reader(persons_bytes, "persons")
        person_columns = _column_map(pheader, person_schema, "persons")
        for row_number, row in enumerate(preader, start=1):
            outcome = _validate_person_row(row, row_number, person_columns, persons_by_crash)
            if isinstance(outcome, Rejection):
                report.person_rejected.append(outcome)
            else:
                report.person_accepted_count += 1

    records: list[CrashRecord] = []
    for crash_id in order:
        fields = parsed[crash_id]
        persons = tuple(persons_by_crash[crash_id])
        records.append(
            CrashRecord(
                persons=persons,
                severity=derive_crash_severity(persons),
                **fields,
            )
        )
    report.accepted_count = len(records)
    return records, report


def _validate_crash_row(
    row: list, row_number: int, columns: dict[str, int], parsed: dict[str, dict]
) -> Union[Rejection, str]:
    def cell(field: str) -> Optional[str]:
        index = columns[field]
        return row[index] if index < len(row) else None

    crash_id = (cell("crash_id") or "").strip()
    if not crash_id:
        return Rejection(row_number, "crash_id", "empty")
    if crash_id in parsed:
        return Rejection(row_number, "crash_id", f"duplicate of {crash_id!r}")

    raw_date = (cell("crash_date") or "").strip()
    try:
        crash_date = datetime.date.fromisoformat(raw_date)
    except ValueError:
        return Rejection(row_number, "crash_date", f"not an ISO date: {raw_date!r}")

    raw_lon = (cell("longitude") or "").strip()
    raw_lat = (cell("latitude") or "").strip()
    location: Optional[tuple[float, float]] = None
    if raw_lon or raw_lat:
        if not (raw_lon and raw_lat):
            missing = "longitude" if not raw_lon else "latitude"
            return Rejection(row_number, missing, "incomplete coordinate pair")
        try:
            lon = float(raw_lon)
        except ValueError:
            return Rejection(row_number, "longitude", f"not a number: {raw_lon!r}")
        try:
            lat = float(raw_lat)
        except ValueError:
            return Rejection(row_number, "latitude", f"not a number: {raw_lat!r}")
        if not -180.0 <= lon <= 180.0:
            return Rejection(row_number, "longitude", f"{lon} outside [-180, 180]")
        if not -90.0 <= lat <= 90.0:
            return Rejection(row_number, "latitude", f"{lat} outside [-90, 90]")
        location = (lon, lat)

    tribal_code = (cell("tribal_code") or "").strip() or None
    tribal_name = (cell("tribal_name") or "").strip() or None

    parsed[crash_id] = {
        "crash_id": crash_id,
        "crash_date": crash_date,
        "location": location,
        "crash_location_class": _lookup_enum(
            cell("crash_location_class"), _CRSHLOC_VALUES, CrashLocationClass.UNKNOWN
        ),
        "jurisdiction": _lookup_enum(cell("jurisdiction"), _CRSHJUR_VALUES, Jurisdiction.UNKNOWN),
        "agency_type": _lookup_enum(cell("agency_type"), _AGCYTYPE_VALUES, AgencyType.UNKNOWN),
        "tribal_code": tribal_code,
        "tribal_name": tribal_name,
        "road_functional": _lookup_enum(
            cell("road_functional"), _ROAD_VALUES, RoadFunctional.UNKNOWN
        ),
        "urban_rural": _lookup_enum(cell("urban_rural"), _URBAN_RURAL_VALUES, UrbanRural.UNKNOWN),
        "crash_type": (cell("crash_type") or "").strip(),
        "speeding": _parse_bool(cell("speeding")),
        "impaired": _parse_bool(cell("impaired")),
        "pedestrian_involved": _parse_bool(cell("pedestrian_involved")),
        "hit_and_run": _parse_bool(cell("hit_and_run")),
        "safety_belt": _parse_bool(cell("safety_belt")),
    }
    return crash_id


def _validate_person_row(
    row: list,
    row_number: int,
    columns: dict[str, int],
    persons_by_crash: dict[str, list[PersonRecord]],
) -> Union[Rejection, PersonRecord]:
    def cell(field: str) -> Optional[str]:
        index = columns[field]
        return row[index] if index < len(row) else None

    crash_id = (cell("crash_id") or "").strip()
    if not crash_id:
        return Rejection(row_number, "crash_id", "empty")
    if crash_id not in persons_by_crash:
        return Rejection(row_number, "crash_id", f"no accepted crash {crash_id!r}")

    try:
        injury = parse_severity(cell("injury") or "")
    except ValueError:
        return Rejection(row_number, "injury", f"invalid injury code {cell('injury')!r}")

    raw_age = (cell("age") or "").strip()
    age: Optional[int] = None
    if raw_age:
        try:
            age = int(raw_age)
        except ValueError:
            return Rejection(row_number, "age", f"not an integer: {raw_age!r}")
        if not 0 <= age <= 120:
            return Rejection(row_number, "age", f"{age} outside [0, 120]")

    person = PersonRecord(
        role=_lookup_enum(cell("role"), _ROLE_VALUES, PersonRole.OTHER),
        sex=_lookup_enum(cell("sex"), _SEX_VALUES, Sex.UNKNOWN),
        age=age,
        injury=injury,
    )
    persons_by_crash[crash_id].append(person)
    return person
