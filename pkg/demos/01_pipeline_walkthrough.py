"""End-to-end walkthrough: synthesize a dataset, ingest it, print the tables.

Generates a seeded synthetic dataset calibrated to the published Wisconsin
2017-2021 marginals, runs it through the full ingest + tribe-resolution
pipeline, and prints the severity-rate tables the dashboard serves.
"""

import json
import tempfile
from pathlib import Path

from crashboard import emit
from crashboard.geo import load_boundaries
from crashboard.ingest import parse_crash_csv
from crashboard.snapshot import build_snapshot
from crashboard.synth import calibrated_spec, write_dataset


def main() -> None:
    workdir = Path(tempfile.mkdtemp(prefix="crashboard-demo-"))
    spec = calibrated_spec(seed=42, n_crashes=30_000, tribal_fraction=0.05)
    counts = write_dataset(
        spec,
        workdir / "crashes.csv",
        workdir / "persons.csv",
        workdir / "boundaries.geojson",
    )
    print(f"generated {counts['crashes']} crashes / {counts['persons']} persons in {workdir}")

    records, report = parse_crash_csv(
        (workdir / "crashes.csv").read_bytes(),
        (workdir / "persons.csv").read_bytes(),
    )
    boundaries = load_boundaries((workdir / "boundaries.geojson").read_bytes())
    snapshot = build_snapshot(records, boundaries, report.source_digest, report=report)
    print(
        f"snapshot {snapshot.snapshot_id}: {snapshot.record_count} crashes, "
        f"{snapshot.tribal_count} tribal, {snapshot.conflict_count} conflicts\n"
    )

    print("== tribal summary ==")
    print(emit.summary_csv(emit.build_summary(snapshot, scope="tribal")))

    print("== road-type severity table (tribal) ==")
    print(emit.road_csv(emit.build_road_table(snapshot, scope="tribal")))

    print("== road-type severity table (statewide) ==")
    print(emit.road_csv(emit.build_road_table(snapshot, scope="statewide")))

    print("== per-tribe rankings ==")
    print(emit.rankings_csv(emit.build_rankings(snapshot)))

    print("== top crash types, tribal vs statewide (KAB-weighted) ==")
    print(emit.crash_types_csv(emit.build_crash_types(snapshot, n=10, weight="kab")))

    print("== key-factor breakdown (tribal), JSON shape ==")
    payload = emit.build_breakdown(snapshot, "key_factor", scope="tribal")
    print(json.dumps(payload["rows"][:2], indent=2))


if __name__ == "__main__":
    main()
