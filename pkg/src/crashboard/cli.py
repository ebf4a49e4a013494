"""Operator command line: ingest, report, hotspots, synth, serve."""

from __future__ import annotations

import datetime
import json
import sys
from pathlib import Path
from typing import Optional

import click

from . import emit, hotspot
from .analytics import BREAKDOWN_DIMENSIONS
from .config import load_config
from .filters import QueryFilter
from .geo import BoundaryError, load_boundaries
from .ingest import IngestError, parse_crash_csv
from .records import SeverityGroup, UrbanRural
from .service import SnapshotHolder, create_app
from .snapshot import DatasetSnapshot, build_snapshot
from .synth import ClusterSpec, SynthSpecError, calibrated_spec, simple_spec, write_dataset

MANIFEST_NAME = "manifest.json"
DIAGNOSTICS_NAME = "diagnostics.json"


def _fail(message: str, code: int = 2) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _read_file(path: str, label: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        _fail(f"cannot read {label} {path!r}: {exc}")
        raise  # unreachable


def _load_snapshot(data_dir: str) -> DatasetSnapshot:
    manifest_path = Path(data_dir) / MANIFEST_NAME
    if not manifest_path.exists():
        _fail(f"no snapshot manifest in {data_dir!r}; run `crashboard ingest` first")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    crash_bytes = _read_file(manifest["crash_csv"], "crash CSV")
    persons_bytes = (
        _read_file(manifest["persons_csv"], "persons CSV") if manifest.get("persons_csv") else None
    )
    boundary_bytes = _read_file(manifest["boundaries"], "boundaries")
    try:
        records, report = parse_crash_csv(crash_bytes, persons_bytes)
        boundaries = load_boundaries(boundary_bytes)
    except (IngestError, BoundaryError) as exc:
        _fail(str(exc))
        raise
    if report.source_digest != manifest["source_digest"]:
        _fail("source files changed since ingest (digest mismatch); re-run ingest")
    return build_snapshot(records, boundaries, report.source_digest, report=report, sequence=0)


def _parse_filter_options(
    year_from: Optional[int],
    year_to: Optional[int],
    severity_group: Optional[str],
    urban_rural: Optional[str],
    road_class: Optional[str],
    key_factor: Optional[str],
    crash_type: Optional[str],
) -> QueryFilter:
    try:
        return QueryFilter(
            year_from=year_from,
            year_to=year_to,
            severity_group=SeverityGroup(severity_group.upper()) if severity_group else None,
            urban_rural=UrbanRural(urban_rural.lower()) if urban_rural else None,
            road_class=road_class,
            key_factor=key_factor,
            crash_type=crash_type,
        )
    except ValueError as exc:
        _fail(str(exc))
        raise


_FILTER_OPTIONS = [
    click.option("--year-from", type=int, default=None),
    click.option("--year-to", type=int, default=None),
    click.option("--severity-group", type=click.Choice(["KA", "KAB", "ALL"], case_sensitive=False), default=None),
    click.option("--urban-rural", type=click.Choice(["urban", "rural"]), default=None),
    click.option("--road-class", type=click.Choice(["highway", "non_highway", "unknown"]), default=None),
    click.option(
        "--key-factor",
        type=click.Choice(["speeding", "impaired", "pedestrian_involved", "hit_and_run", "safety_belt"]),
        default=None,
    ),
    click.option("--crash-type", default=None),
]


def _with_filter_options(func):
    for option in reversed(_FILTER_OPTIONS):
        func = option(func)
    return func


@click.group()
@click.option("--data-dir", default="./data", show_default=True, help="Snapshot/diagnostics directory.")
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.pass_context
def main(ctx: click.Context, data_dir: str, config_path: Optional[str]) -> None:
    """Crash-safety analytics: ingest data, emit reports, find hotspots, serve the API."""
    ctx.obj = {"data_dir": data_dir, "config": config_path}


@main.command()
@click.argument("crash_csv", type=click.Path())
@click.argument("persons_csv", type=click.Path(), required=False)
@click.option("--boundaries", required=True, type=click.Path(), help="Tribal boundary GeoJSON.")
@click.pass_context
def ingest(ctx: click.Context, crash_csv: str, persons_csv: Optional[str], boundaries: str) -> None:
    """Parse and validate the dataset; write the snapshot manifest."""
    data_dir = Path(ctx.obj["data_dir"])
    crash_bytes = _read_file(crash_csv, "crash CSV")
    persons_bytes = _read_file(persons_csv, "persons CSV") if persons_csv else None
    boundary_bytes = _read_file(boundaries, "boundaries")

    try:
        records, report = parse_crash_csv(crash_bytes, persons_bytes)
        boundary_list = load_boundaries(boundary_bytes)
    except (IngestError, BoundaryError) as exc:
        _fail(str(exc))
        raise

    snapshot = build_snapshot(records, boundary_list, report.source_digest, report=report, sequence=0)

    data_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "crash_csv": str(Path(crash_csv).resolve()),
        "persons_csv": str(Path(persons_csv).resolve()) if persons_csv else None,
        "boundaries": str(Path(boundaries).resolve()),
        "source_digest": report.source_digest,
        "record_count": snapshot.record_count,
        "tribal_count": snapshot.tribal_count,
        "conflict_count": snapshot.conflict_count,
        "ingested_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (data_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    diagnostics = {
        "rejected": [
            {"row": r.row_number, "field": r.field, "message": r.message}
            for r in report.rejected
        ],
        "person_rejected": [
            {"row": r.row_number, "field": r.field, "message": r.message}
            for r in report.person_rejected
        ],
        "unknown_tribal_codes": snapshot.diagnostics.unknown_codes,
        "overlaps": snapshot.diagnostics.overlaps,
        "conflicts": snapshot.diagnostics.conflicts,
    }
    (data_dir / DIAGNOSTICS_NAME).write_text(
        json.dumps(diagnostics, indent=2) + "\n", encoding="utf-8"
    )

    click.echo(json.dumps(report.to_dict(), indent=2))
    if report.rejected or report.person_rejected:
        click.echo(
            f"warning: {len(report.rejected)} crash rows and "
            f"{len(report.person_rejected)} person rows rejected",
            err=True,
        )
        sys.exit(1)


@main.command()
@click.argument(
    "kind", type=click.Choice(["summary", "breakdown", "road", "rankings", "crash-types"])
)
@click.option("--scope", type=click.Choice(["statewide", "tribal"]), default="statewide", show_default=True)
@click.option("--tribe-id", default=None)
@click.option("--dimension", type=click.Choice(list(BREAKDOWN_DIMENSIONS)), default=None)
@click.option("--weight", type=click.Choice(["total", "kab"]), default="total", show_default=True)
@click.option("--n", type=int, default=10, show_default=True)
@click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default="csv", show_default=True)
@_with_filter_options
@click.pass_context
def report(
    ctx: click.Context,
    kind: str,
    scope: str,
    tribe_id: Optional[str],
    dimension: Optional[str],
    weight: str,
    n: int,
    output_format: str,
    **filter_options,
) -> None:
    """Emit a statistics table (CSV or JSON) from the ingested snapshot."""
    snapshot = _load_snapshot(ctx.obj["data_dir"])
    filters = _parse_filter_options(**filter_options)
    if tribe_id is not None:
        if tribe_id not in snapshot.tribe_ids():
            _fail(f"unknown tribe_id {tribe_id!r}")
        scope = "tribal"

    if kind == "summary":
        payload = emit.build_summary(snapshot, scope=scope, tribe_id=tribe_id, filters=filters)
        text = emit.summary_csv(payload)
    elif kind == "breakdown":
        if dimension is None:
            raise click.UsageError("--dimension is required for `report breakdown`")
        payload = emit.build_breakdown(
            snapshot, dimension, scope=scope, tribe_id=tribe_id, filters=filters
        )
        text = emit.breakdown_csv(payload)
    elif kind == "road":
        payload = emit.build_road_table(snapshot, scope=scope, tribe_id=tribe_id, filters=filters)
        text = emit.road_csv(payload)
    elif kind == "rankings":
        payload = emit.build_rankings(snapshot, filters=filters)
        text = emit.rankings_csv(payload)
    else:  # crash-types
        if n < 1:
            raise click.UsageError("--n must be >= 1")
        payload = emit.build_crash_types(snapshot, n=n, weight=weight, filters=filters)
        text = emit.crash_types_csv(payload)

    if output_format == "json":
        click.echo(emit.to_json(payload), nl=False)
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--scope", type=click.Choice(["statewide", "tribal"]), default="statewide", show_default=True)
@click.option("--tribe-id", default=None)
@click.option("--cell-size", type=float, default=0.01, show_default=True, help="Cell edge in degrees.")
@click.option("--radius", type=int, default=1, show_default=True, help="Neighborhood radius in cells.")
@click.option("--bbox", default=None, help="min_lon,min_lat,max_lon,max_lat (default: point extent).")
@click.option("--out", required=True, type=click.Path(), help="Output GeoJSON path.")
@click.option("--csv-out", type=click.Path(), default=None, help="Also write a per-cell CSV.")
@click.option("--include-empty", is_flag=True, default=False, help="Emit empty neutral cells too.")
@_with_filter_options
@click.pass_context
def hotspots(
    ctx: click.Context,
    scope: str,
    tribe_id: Optional[str],
    cell_size: float,
    radius: int,
    bbox: Optional[str],
    out: str,
    csv_out: Optional[str],
    include_empty: bool,
    **filter_options,
) -> None:
    """Run grid hotspot detection and write a GeoJSON layer."""
    if cell_size <= 0:
        raise click.UsageError("--cell-size must be positive")
    if radius < 0:
        raise click.UsageError("--radius must be >= 0")
    snapshot = _load_snapshot(ctx.obj["data_dir"])
    filters = _parse_filter_options(**filter_options)
    if tribe_id is not None:
        if tribe_id not in snapshot.tribe_ids():
            _fail(f"unknown tribe_id {tribe_id!r}")
        scope = "tribal"

    from .analytics import resolve_scope

    subset = filters.apply(resolve_scope(snapshot, scope, tribe_id))
    points = [r.location for r in subset if r.location is not None]
    if not points:
        _fail("no located crashes match the filters")

    if bbox is not None:
        parts = bbox.split(",")
        if len(parts) != 4:
            raise click.UsageError("--bbox must be min_lon,min_lat,max_lon,max_lat")
        grid_bbox = tuple(float(p) for p in parts)
    else:
        grid_bbox = hotspot.points_bbox(points, cell_size)

    grid = hotspot.bin_to_grid(points, grid_bbox, cell_size)
    if grid.nrows * grid.ncols < 2:
        click.echo("warning: degenerate extent, single-cell grid (no z-scores)", err=True)
        cells = hotspot.classify_hotspots(
            [hotspot.GiStarCell(col=0, row=0, count=int(grid.cells[0, 0]), z=0.0)]
        )
    else:
        cells = hotspot.gi_star(grid, radius)

    doc = hotspot.cells_to_geojson(
        grid, cells, include_empty=include_empty,
        extra={
            "snapshot_id": snapshot.snapshot_id,
            "cell_size": cell_size, "radius": radius,
            "bbox": list(grid_bbox), "overflow": grid.overflow,
        },
    )
    Path(out).write_text(hotspot.hotspot_geojson_text(doc), encoding="utf-8")
    if csv_out is not None:
        Path(csv_out).write_text(hotspot.cells_to_csv(grid, cells), encoding="utf-8")
    click.echo(f"wrote {len(doc['features'])} cells to {out}", err=True)


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--n", "n_crashes", type=int, required=True)
@click.option("--tribal-fraction", type=float, default=0.2, show_default=True)
@click.option("--profile", type=click.Choice(["calibrated", "simple"]), default="calibrated", show_default=True)
@click.option("--cluster", "clusters", multiple=True, help="lon,lat,weight[,spread]; repeatable.")
@click.option("--year-from", type=int, default=2017, show_default=True)
@click.option("--year-to", type=int, default=2021, show_default=True)
@click.option("--out-dir", type=click.Path(), default=".", show_default=True)
def synth(
    seed: int,
    n_crashes: int,
    tribal_fraction: float,
    profile: str,
    clusters: tuple[str, ...],
    year_from: int,
    year_to: int,
    out_dir: str,
) -> None:
    """Write a deterministic synthetic dataset (crashes, persons, boundaries)."""
    cluster_specs = []
    for raw in clusters:
        parts = raw.split(",")
        if len(parts) not in (3, 4):
            raise click.UsageError("--cluster must be lon,lat,weight[,spread]")
        values = [float(p) for p in parts]
        cluster_specs.append(
            ClusterSpec(
                lon=values[0], lat=values[1], weight=values[2],
                spread=values[3] if len(values) == 4 else 0.004,
            )
        )

    factory = calibrated_spec if profile == "calibrated" else simple_spec
    try:
        spec = factory(
            seed=seed, n_crashes=n_crashes, tribal_fraction=tribal_fraction,
            cluster_centers=tuple(cluster_specs), year_range=(year_from, year_to),
        )
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        counts = write_dataset(
            spec,
            out / "crashes.csv",
            out / "persons.csv",
            out / "boundaries.geojson",
        )
    except SynthSpecError as exc:
        _fail(str(exc))
        raise
    click.echo(json.dumps({"seed": seed, **counts}, indent=2))


@main.command()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON config file.")
@click.pass_context
def serve(ctx: click.Context, config_path: Optional[str]) -> None:
    """Run the read-only dashboard API until terminated."""
    import uvicorn

    config = load_config(config_path or ctx.obj.get("config"))
    if not config_path or not config.data_dir:
        config.data_dir = ctx.obj["data_dir"]

    holder = SnapshotHolder()
    initial = config.data or {}
    manifest_path = Path(config.data_dir) / MANIFEST_NAME
    try:
        if initial.get("crash_csv") and initial.get("boundaries"):
            holder.load_files(
                initial["crash_csv"], initial.get("persons_csv"), initial["boundaries"],
                sequence=0,
            )
        elif manifest_path.exists():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
            holder.load_files(
                manifest["crash_csv"], manifest.get("persons_csv"), manifest["boundaries"],
                sequence=0,
            )
    except (OSError, IngestError, BoundaryError) as exc:
        _fail(f"initial data load failed: {exc}")

    app = create_app(config, holder)
    click.echo(
        json.dumps({"event": "startup", "listen": config.listen_addr,
                    "snapshot_loaded": holder.current is not None}),
        err=True,
    )
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and not exc.code:
            return
        _fail(f"server failed to start: {exc}")
    click.echo(json.dumps({"event": "shutdown"}), err=True)


if __name__ == "__main__":
    main()
