"""Hotspot detection walkthrough: planted clusters, Gi* z-scores, GeoJSON.

Plants two spatial clusters of known location in otherwise-uniform synthetic
data, bins crash points to a grid, and shows that Gi* flags the planted
cells hot while the background stays neutral.
"""

import tempfile
from collections import Counter
from pathlib import Path

from crashboard.hotspot import (
    bin_to_grid,
    cells_to_geojson,
    gi_star,
    hotspot_geojson_text,
)
from crashboard.synth import ClusterSpec, generate, simple_spec

CENTER_A = (-89.8, 44.1)
CENTER_B = (-88.6, 44.9)


def main() -> None:
    spec = simple_spec(
        seed=7,
        n_crashes=6_000,
        tribal_fraction=0.0,
        cluster_centers=(
            ClusterSpec(lon=CENTER_A[0], lat=CENTER_A[1], weight=0.25, spread=0.01),
            ClusterSpec(lon=CENTER_B[0], lat=CENTER_B[1], weight=0.15, spread=0.006),
        ),
    )
    crash_rows, _, _ = generate(spec)
    points = [(float(r[2]), float(r[3])) for r in crash_rows if r[2] and r[3]]
    print(f"{len(points)} located crash points, clusters planted at {CENTER_A} and {CENTER_B}")

    bbox = (-90.4, 43.6, -88.0, 45.4)
    grid = bin_to_grid(points, bbox, cell_size=0.05)
    print(f"grid {grid.ncols}x{grid.nrows}, {grid.overflow} points outside the bbox")

    cells = gi_star(grid, neighborhood_radius=1)
    labels = Counter(c.label for c in cells)
    print("label counts:", dict(labels))

    hot = sorted(
        (c for c in cells if c.label in ("hot95", "hot99")),
        key=lambda c: -c.z,
    )
    print("hottest cells (center lon/lat, count, z):")
    for cell in hot[:6]:
        lon, lat = grid.cell_center(cell.col, cell.row)
        print(f"  ({lon:8.3f}, {lat:7.3f})  count={cell.count:4d}  z={cell.z:7.2f}  {cell.label}")

    out = Path(tempfile.mkdtemp(prefix="crashboard-demo-")) / "hotspots.geojson"
    doc = cells_to_geojson(grid, cells, extra={"cell_size": 0.05, "radius": 1})
    out.write_text(hotspot_geojson_text(doc), encoding="utf-8")
    print(f"wrote {len(doc['features'])} cell features to {out}")


if __name__ == "__main__":
    main()
