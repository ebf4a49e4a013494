"""Canonical result payloads and CSV renderers.

The HTTP service and the CLI report command both build responses through
these functions, so the two interfaces agree field for field and output is
byte-stable for a fixed snapshot and parameter set.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Optional

from . import analytics
from .filters import EMPTY_FILTER, QueryFilter
from .snapshot import DatasetSnapshot


def format_rate(value: Optional[float], decimals: int) -> str:
    return "" if value is None else f"{value:.{decimals}f}"


def build_summary(
    snapshot: DatasetSnapshot,
    scope: str = "statewide",
    tribe_id: Optional[str] = None,
    filters: QueryFilter = EMPTY_FILTER,
) -> dict:
    subset = filters.apply(analytics.resolve_scope(snapshot, scope, tribe_id))
    rates = analytics.rate_summary(subset)
    payload = {
        "snapshot_id": snapshot.snapshot_id,
        "scope": "single_tribe" if (scope == "tribal" and tribe_id) else scope,
        "tribe_id": tribe_id,
        **rates.to_dict(),
        "injury_counts": analytics.injury_counts(subset),
        **analytics.person_totals(subset),
    }
    return payload


def build_breakdown(
    snapshot: DatasetSnapshot,
    dimension: str,
    scope: str = "statewide",
    tribe_id: Optional[str] = None,
    filters: QueryFilter = EMPTY_FILTER,
    attribution: str = "primary",
) -> dict:
    result = analytics.breakdown(
        snapshot, dimension, scope=scope, filters=filters,
        tribe_id=tribe_id, attribution=attribution,
    )
    return {"snapshot_id": snapshot.snapshot_id, "tribe_id": tribe_id, **result.to_dict()}


def build_road_table(
    snapshot: DatasetSnapshot,
    scope: str = "statewide",
    tribe_id: Optional[str] = None,
    filters: QueryFilter = EMPTY_FILTER,
) -> dict:
    rows = analytics.road_table(snapshot, scope=scope, filters=filters, tribe_id=tribe_id)
    return {
        "snapshot_id": snapshot.snapshot_id,
        "scope": "single_tribe" if (scope == "tribal" and tribe_id) else scope,
        "tribe_id": tribe_id,
        "rows": [{"label": label, **rates.to_dict()} for label, rates in rows],
    }


def build_rankings(snapshot: DatasetSnapshot, filters: QueryFilter = EMPTY_FILTER) -> dict:
    ranking = analytics.tribe_rankings(snapshot, filters)
    return {"snapshot_id": snapshot.snapshot_id, **ranking.to_dict()}


def build_crash_types(
    snapshot: DatasetSnapshot,
    n: int = 10,
    weight: str = "total",
    filters: QueryFilter = EMPTY_FILTER,
) -> dict:
    comparison = analytics.top_crash_types(snapshot, n=n, weight=weight, filters=filters)
    return {"snapshot_id": snapshot.snapshot_id, **comparison.to_dict()}


def _writer(buffer: io.StringIO) -> "csv.writer":
    return csv.writer(buffer, lineterminator="\n")


def summary_csv(payload: dict, decimals: int = 1) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(
        ["scope", "tribe_id", "total", "kab", "kab_rate", "ka", "ka_rate",
         "K", "A", "B", "C", "O", "fatalities", "injuries"]
    )
    counts = payload["injury_counts"]
    writer.writerow(
        [
            payload["scope"], payload["tribe_id"] or "",
            payload["total"], payload["kab"], format_rate(payload["kab_rate"], decimals),
            payload["ka"], format_rate(payload["ka_rate"], decimals),
            counts["K"], counts["A"], counts["B"], counts["C"], counts["O"],
            payload["fatalities"], payload["injuries"],
        ]
    )
    return buffer.getvalue()


def breakdown_csv(payload: dict, decimals: int = 1) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["label", "total", "share", "kab", "kab_rate", "ka", "ka_rate"])
    for row in payload["rows"]:
        writer.writerow(
            [
                row["label"], row["total"], format_rate(row["share"], decimals),
                row["kab"], format_rate(row["kab_rate"], decimals),
                row["ka"], format_rate(row["ka_rate"], decimals),
            ]
        )
    total = payload["grand_total"]
    writer.writerow(
        [
            "Grand Total", total["total"], "",
            total["kab"], format_rate(total["kab_rate"], decimals),
            total["ka"], format_rate(total["ka_rate"], decimals),
        ]
    )
    return buffer.getvalue()


def road_csv(payload: dict, decimals: int = 1) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["label", "total", "kab", "kab_rate", "ka", "ka_rate"])
    for row in payload["rows"]:
        writer.writerow(
            [
                row["label"], row["total"],
                row["kab"], format_rate(row["kab_rate"], decimals),
                row["ka"], format_rate(row["ka_rate"], decimals),
            ]
        )
    return buffer.getvalue()


def rankings_csv(payload: dict, decimals: int = 2) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(
        ["tribe_id", "name", "total", "kab", "kab_rate", "ka", "ka_rate",
         "kab_rank", "ka_rank"]
    )
    for row in payload["rows"]:
        writer.writerow(
            [
                row["tribe_id"], row["name"], row["total"],
                row["kab"], format_rate(row["kab_rate"], decimals),
                row["ka"], format_rate(row["ka_rate"], decimals),
                row["kab_rank"], row["ka_rank"],
            ]
        )
    return buffer.getvalue()


def crash_types_csv(payload: dict, decimals: int = 2) -> str:
    buffer = io.StringIO()
    writer = _writer(buffer)
    writer.writerow(["crash_type", "tribal_percent", "statewide_percent"])
    for row in payload["rows"]:
        writer.writerow(
            [
                row["crash_type"],
                format_rate(row["tribal_percent"], decimals),
                format_rate(row["statewide_percent"], decimals),
            ]
        )
    return buffer.getvalue()


def to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
