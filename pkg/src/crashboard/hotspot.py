"""Grid-based spatial hotspot detection: binning and Getis-Ord Gi* z-scores."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

HOT_THRESHOLDS = (1.645, 1.960, 2.576)  # 90 / 95 / 99 percent confidence

LABELS = ("hot99", "hot95", "hot90", "neutral", "cold90", "cold95", "cold99")


@dataclass(frozen=True)
class HotspotGrid:
    """Dense crash-count grid over a bbox; row-major cells, row 0 at min_lat."""

    bbox: tuple[float, float, float, float]  # (min_lon, min_lat, max_lon, max_lat)
    cell_size: float
    ncols: int
    nrows: int
    cells: np.ndarray  # shape (nrows, ncols), int64 counts
    overflow: int = 0  # points outside the bbox, tallied not dropped

    def cell_center(self, col: int, row: int) -> tuple[float, float]:
        min_lon, min_lat, _, _ = self.bbox
        return (
            min_lon + (col + 0.5) * self.cell_size,
            min_lat + (row + 0.5) * self.cell_size,
        )

    def cell_bounds(self, col: int, row: int) -> tuple[float, float, float, float]:
        min_lon, min_lat, _, _ = self.bbox
        x0 = min_lon + col * self.cell_size
        y0 = min_lat + row * self.cell_size
        return (x0, y0, x0 + self.cell_size, y0 + self.cell_size)


@dataclass(frozen=True)
class GiStarCell:
    col: int
    row: int
    count: int
    z: float
    label: str = "neutral"


def bin_to_grid(
    points: Iterable[tuple[float, float]],
    bbox: tuple[float, float, float, float],
    cell_size: float,
) -> HotspotGrid:
    """Bin points into half-open cells [x, x+size) with the last column/row
    closed; out-of-bbox points go to the overflow tally."""
    min_lon, min_lat, max_lon, max_lat = bbox
    if cell_size <= 0:
        raise ValueError("cell_size must be positive")
    if max_lon <= min_lon or max_lat <= min_lat:
        raise ValueError("bbox is degenerate")

    ncols = math.ceil((max_lon - min_lon) / cell_size)
    nrows = math.ceil((max_lat - min_lat) / cell_size)
    cells = np.zeros((nrows, ncols), dtype=np.int64)

    overflow = 0
    for lon, lat in points:
        if not (min_lon <= lon <= max_lon and min_lat <= lat <= max_lat):
            overflow += 1
            continue
        col = min(int((lon - min_lon) / cell_size), ncols - 1)
        row = min(int((lat - min_lat) / cell_size), nrows - 1)
        cells[row, col] += 1

    return HotspotGrid(
        bbox=bbox, cell_size=cell_size, ncols=ncols, nrows=nrows,
        cells=cells, overflow=overflow,
    )


def _window_sums(values: np.ndarray, radius: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cell neighborhood sum and neighbor count for a Chebyshev-distance
    square window clipped at the grid border, via a summed-area table."""
    nrows, ncols = values.shape
    sat = np.zeros((nrows + 1, ncols + 1), dtype=np.float64)
    sat[1:, 1:] = np.cumsum(np.cumsum(values, axis=0), axis=1)

    rows = np.arange(nrows)[:, None]
    cols = np.arange(ncols)[None, :]
    r0 = np.maximum(rows - radius, 0)
    r1 = np.minimum(rows + radius + 1, nrows)
    c0 = np.maximum(cols - radius, 0)
    c1 = np.minimum(cols + radius + 1, ncols)

    r0b = np.broadcast_to(r0, (nrows, ncols))
    r1b = np.broadcast_to(r1, (nrows, ncols))
    c0b = np.broadcast_to(c0, (nrows, ncols))
    c1b = np.broadcast_to(c1, (nrows, ncols))

    sums = sat[r1b, c1b] - sat[r0b, c1b] - sat[r1b, c0b] + sat[r0b, c0b]
    weights = ((r1b - r0b) * (c1b - c0b)).astype(np.float64)
    return sums, weights


def gi_star(grid: HotspotGrid, neighborhood_radius: int = 1) -> list[GiStarCell]:
    """Getis-Ord Gi* z-score per cell, binary square neighborhoods including
    the cell itself. Degenerate variance or neighborhood yields z = 0."""
    n = grid.nrows * grid.ncols
    if n < 2:
        raise ValueError("grid needs at least 2 cells for a variance")
    if neighborhood_radius < 0:
        raise ValueError("neighborhood_radius must be >= 0")

    x = grid.cells.astype(np.float64)
    mean = float(x.sum()) / n
    s = math.sqrt(max(float((x * x).sum()) / n - mean * mean, 0.0))

    sums, w = _window_sums(x, neighborhood_radius)
    # binary weights: sum of squared weights equals the neighbor count
    discriminant = (n * w - w * w) / (n - 1)

    z = np.zeros_like(sums)
    if s > 0.0:
        valid = discriminant > 0.0
        z[valid] = (sums[valid] - mean * w[valid]) / (s * np.sqrt(discriminant[valid]))

    cells = [
        GiStarCell(
            col=col, row=row,
            count=int(grid.cells[row, col]),
            z=float(z[row, col]),
        )
        for row in range(grid.nrows)
        for col in range(grid.ncols)
    ]
    return classify_hotspots(cells)


def classify_label(z: float) -> str:
    """Confidence label from a z-score, strict inequality outward."""
    t90, t95, t99 = HOT_THRESHOLDS
    if z > t99:
        return "hot99"
    if z > t95:
        return "hot95"
    if z > t90:
        return "hot90"
    if z < -t99:
        return "cold99"
    if z < -t95:
        return "cold95"
    if z < -t90:
        return "cold90"
    return "neutral"


def classify_hotspots(cells: Sequence[GiStarCell]) -> list[GiStarCell]:
    """Return the cells with labels assigned from their z-scores."""
    return [
        GiStarCell(col=c.col, row=c.row, count=c.count, z=c.z, label=classify_label(c.z))
        for c in cells
    ]


def cells_to_geojson(
    grid: HotspotGrid,
    cells: Sequence[GiStarCell],
    include_empty: bool = False,
    extra: dict | None = None,
) -> dict:
    """GeoJSON FeatureCollection of cell polygons with count/z/label.

    By default only cells that hold points or carry a non-neutral label are
    emitted; include_empty emits every cell.
    """
    features = []
    for cell in cells:
        if not include_empty and cell.count == 0 and cell.label == "neutral":
            continue
        x0, y0, x1, y1 = grid.cell_bounds(cell.col, cell.row)
        features.append(
            {
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]]],
                },
                "properties": {
                    "col": cell.col,
                    "row": cell.row,
                    "count": cell.count,
                    "z": cell.z,
                    "label": cell.label,
                },
            }
        )
    doc = {"type": "FeatureCollection", "features": features}
    if extra:
        doc.update(extra)
    return doc


def cells_to_csv(grid: HotspotGrid, cells: Sequence[GiStarCell]) -> str:
    """CSV of (col, row, lon_center, lat_center, count, z, label)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["col", "row", "lon_center", "lat_center", "count", "z", "label"])
    for cell in cells:
        lon, lat = grid.cell_center(cell.col, cell.row)
        writer.writerow(
            [cell.col, cell.row, f"{lon:.6f}", f"{lat:.6f}", cell.count, f"{cell.z:.9f}", cell.label]
        )
    return buffer.getvalue()


def points_bbox(
    points: Sequence[tuple[float, float]], cell_size: float
) -> tuple[float, float, float, float]:
    """Tight bbox over points, expanded to be non-degenerate for gridding."""
    if not points:
        raise ValueError("no points")
    lons = [p[0] for p in points]
    lats = [p[1] for p in points]
    min_lon, max_lon = min(lons), max(lons)
    min_lat, max_lat = min(lats), max(lats)
    if max_lon - min_lon < cell_size:
        pad = (cell_size - (max_lon - min_lon)) / 2
        min_lon, max_lon = min_lon - pad, max_lon + pad
    if max_lat - min_lat < cell_size:
        pad = (cell_size - (max_lat - min_lat)) / 2
        min_lat, max_lat = min_lat - pad, max_lat + pad
    return (min_lon, min_lat, max_lon, max_lat)


def hotspot_geojson_text(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
