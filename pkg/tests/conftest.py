"""Shared fixtures: hand-built records, CSV fixtures, and small snapshots."""

from __future__ import annotations

import datetime
import io
import json

import pytest

from crashboard.geo import PolygonGeometry, TribeBoundary, load_boundaries
from crashboard.ingest import parse_crash_csv, source_digest
from crashboard.records import (
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
)
from crashboard.snapshot import build_snapshot


def person(injury="O", role="driver", sex="female", age=30):
    return PersonRecord(
        role=PersonRole(role), sex=Sex(sex), age=age, injury=SeverityLevel(injury)
    )


def crash(
    crash_id,
    severity_persons=("O",),
    date="2019-06-15",
    location=None,
    tribal_code=None,
    road="local",
    area="rural",
    crash_type="Rear End",
    crshloc="public_property",
    persons=None,
    **flags,
):
    if persons is None:
        persons = tuple(person(injury=code) for code in severity_persons)
    else:
        persons = tuple(persons)
    defaults = dict(speeding=False, impaired=False, pedestrian_involved=False,
                    hit_and_run=False, safety_belt=False)
    defaults.update(flags)
    return CrashRecord(
        crash_id=crash_id,
        crash_date=datetime.date.fromisoformat(date),
        location=location,
        crash_location_class=CrashLocationClass(crshloc),
        jurisdiction=Jurisdiction.UNKNOWN,
        agency_type=AgencyType.UNKNOWN,
        tribal_code=tribal_code,
        tribal_name=None,
        road_functional=RoadFunctional(road),
        urban_rural=UrbanRural(area),
        crash_type=crash_type,
        persons=persons,
        severity=derive_crash_severity(persons),
        **defaults,
    )


def square_boundary(tribe_id, name, cx, cy, half=0.5):
    ring = (
        (cx - half, cy - half), (cx + half, cy - half),
        (cx + half, cy + half), (cx - half, cy + half),
        (cx - half, cy - half),
    )
    return TribeBoundary(tribe_id=tribe_id, name=name, polygons=(PolygonGeometry(outer=ring),))


@pytest.fixture
def two_tribes():
    return [
        square_boundary("LCO", "Lac Courte Oreilles Band", -91.0, 45.9),
        square_boundary("ONEIDA", "Oneida Nation", -88.2, 44.5),
    ]


def snapshot_from(records, boundaries, sequence=0):
    digest = source_digest(repr([r.crash_id for r in records]).encode())
    return build_snapshot(records, boundaries, digest, sequence=sequence)


def crash_csv_text(rows):
    """Render crash rows (list of dicts with default column names) to CSV."""
    import csv as _csv

    header = [
        "crash_id", "crash_date", "longitude", "latitude", "crshloc", "crshjur",
        "agcytype", "trbcode", "trbname", "road_functional", "urban_rural",
        "crash_type", "flag_speeding", "flag_impaired", "flag_pedestrian",
        "flag_hitrun", "flag_beltnonuse",
    ]
    buffer = io.StringIO()
    writer = _csv.DictWriter(buffer, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({key: row.get(key, "") for key in header})
    return buffer.getvalue()


def person_csv_text(rows):
    import csv as _csv

    buffer = io.StringIO()
    writer = _csv.DictWriter(
        buffer, fieldnames=["crash_id", "role", "sex", "age", "injury"], lineterminator="\n"
    )
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def hundred_row_fixture():
    """100 crash rows, three of which carry malformed latitudes."""
    rows = []
    for i in range(1, 101):
        rows.append(
            {
                "crash_id": f"F{i:03d}",
                "crash_date": f"2020-01-{(i % 28) + 1:02d}",
                "longitude": f"{-90.0 + i * 0.01:.6f}",
                "latitude": f"{44.0 + i * 0.005:.6f}",
                "crshloc": "Public Property",
                "road_functional": "LOCAL",
                "urban_rural": "R",
                "crash_type": "Rear End",
            }
        )
    rows[9]["latitude"] = "91.5"     # out of range
    rows[49]["latitude"] = "abc"     # not a number
    rows[89]["latitude"] = "-95.0"   # out of range
    return rows


@pytest.fixture
def hundred_row_csv():
    return crash_csv_text(hundred_row_fixture()).encode()


def boundaries_geojson_text(boundaries):
    features = []
    for b in boundaries:
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[list(v) for v in b.polygons[0].outer]],
                },
                "properties": {"tribe_id": b.tribe_id, "name": b.name},
            }
        )
    return json.dumps({"type": "FeatureCollection", "features": features})


# ---------------------------------------------------------------------------
# Published Wisconsin 2017-2021 reference tables used across tests.
# ---------------------------------------------------------------------------

# (name, total, kab, printed kab_rate, ka, printed ka_rate, kab_rank, ka_rank)
TRIBE_TABLE = [
    ("Menominee Indian Tribe", 74, 16, 21.62, 6, 8.11, 1, 3),
    ("Lac Courte Oreilles Band", 202, 42, 20.79, 18, 8.91, 2, 2),
    ("St. Croix Chippewa Indians", 29, 6, 20.69, 4, 13.79, 3, 1),
    ("Bad River Band", 103, 20, 19.42, 6, 5.83, 4, 6),
    ("Lac Du Flambeau Band", 349, 58, 16.62, 14, 4.01, 5, 7),
    ("Sokaogon Chippewa Community", 14, 2, 14.29, 0, 0.00, 6, 11),
    ("Ho-Chunk Nation", 130, 17, 13.08, 5, 3.85, 7, 8),
    ("Oneida Tribe Of Indians", 2277, 287, 12.60, 47, 2.06, 8, 9),
    ("Red Cliff", 34, 4, 11.76, 2, 5.88, 9, 4),
    ("Stockbridge-Munsee Community", 68, 6, 8.82, 4, 5.88, 10, 5),
    ("Forest County Potawatomi Community", 116, 7, 6.03, 2, 1.72, 11, 10),
]


def tribe_table_records_and_boundaries():
    """Materialize one crash per row of the per-tribe rate table.

    Severity layout per tribe: ka crashes get injury A, (kab - ka) get B,
    the rest O; crashes resolve to tribes via the attribute path.
    """
    boundaries = []
    records = []
    for index, (name, total, kab, _, ka, _, _, _) in enumerate(TRIBE_TABLE):
        tribe_id = f"WI{index + 1:02d}"
        boundaries.append(square_boundary(tribe_id, name, -93.0 + index * 0.5, 43.0, half=0.2))
        for j in range(total):
            if j < ka:
                codes = ("A",)
            elif j < kab:
                codes = ("B",)
            else:
                codes = ("O",)
            records.append(
                crash(f"{tribe_id}-{j:04d}", severity_persons=codes, tribal_code=tribe_id)
            )
    return records, boundaries


@pytest.fixture(scope="session")
def tribe_table_snapshot():
    records, boundaries = tribe_table_records_and_boundaries()
    return snapshot_from(records, boundaries)


def parse_fixture(crash_bytes, persons_bytes=None):
    return parse_crash_csv(crash_bytes, persons_bytes)


def build_synth_snapshot(spec):
    """Full in-memory pipeline: generate -> CSV bytes -> parse -> snapshot."""
    from crashboard.synth import _CRASH_HEADER, _PERSON_HEADER, generate, render_csv

    crash_rows, person_rows, boundaries_doc = generate(spec)
    crash_bytes = render_csv(_CRASH_HEADER, crash_rows)
    person_bytes = render_csv(_PERSON_HEADER, person_rows)
    records, report = parse_crash_csv(crash_bytes, person_bytes)
    boundaries = load_boundaries(json.dumps(boundaries_doc))
    return build_snapshot(records, boundaries, report.source_digest, report=report)
