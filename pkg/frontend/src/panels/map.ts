import { el, svgEl } from "../dom.js";
import { HOTSPOT_FILLS, SEVERITY_COLORS, SEVERITY_LABELS, SEVERITY_ORDER } from "../severity.js";
import type {
  BoundariesPayload,
  CrashesPayload,
  HotspotsPayload,
  SeverityCode,
} from "../types.js";

export interface MapCallbacks {
  onTribeClick?: (tribeId: string) => void;
}

export interface MapLayers {
  points: boolean;
  hotspots: boolean;
}

const WIDTH = 860;
const HEIGHT = 640;

interface Projection {
  x(lon: number): number;
  y(lat: number): number;
}

function computeProjection(
  boundaries: BoundariesPayload | null,
  crashes: CrashesPayload | null,
): Projection {
  let minLon = Infinity, minLat = Infinity, maxLon = -Infinity, maxLat = -Infinity;
  const extend = (lon: number, lat: number) => {
    minLon = Math.min(minLon, lon);
    maxLon = Math.max(maxLon, lon);
    minLat = Math.min(minLat, lat);
    maxLat = Math.max(maxLat, lat);
  };
  for (const feature of boundaries?.features ?? []) {
    const polys =
      feature.geometry.type === "Polygon"
        ? [feature.geometry.coordinates]
        : feature.geometry.coordinates;
    for (const poly of polys) {
      for (const ring of poly) {
        for (const vertex of ring) extend(vertex[0] ?? 0, vertex[1] ?? 0);
      }
    }
  }
  for (const point of crashes?.points ?? []) extend(point.lon, point.lat);
  if (!Number.isFinite(minLon)) {
    minLon = -93; maxLon = -86; minLat = 42; maxLat = 47;
  }
  const padLon = (maxLon - minLon || 1) * 0.03;
  const padLat = (maxLat - minLat || 1) * 0.03;
  minLon -= padLon; maxLon += padLon; minLat -= padLat; maxLat += padLat;
  const sx = WIDTH / (maxLon - minLon);
  const sy = HEIGHT / (maxLat - minLat);
  return {
    x: (lon) => (lon - minLon) * sx,
    y: (lat) => HEIGHT - (lat - minLat) * sy, // north up
  };
}

function ringPath(ring: number[][], proj: Projection): string {
  return (
    ring
      .map((v, i) => `${i === 0 ? "M" : "L"}${proj.x(v[0] ?? 0).toFixed(1)},${proj.y(v[1] ?? 0).toFixed(1)}`)
      .join("") + "Z"
  );
}

/** Crash map: severity-colored points, tribal boundary outlines, and the
 * hotspot cell layer. Clicking a boundary selects that tribe. Layer toggles
 * only flip visibility; they never refetch. */
export function renderMap(
  container: HTMLElement,
  data: {
    crashes: CrashesPayload | null;
    hotspots: HotspotsPayload | null;
    boundaries: BoundariesPayload | null;
  },
  layers: MapLayers,
  callbacks: MapCallbacks = {},
  selectedTribe?: string,
): void {
  container.replaceChildren();
  const projection = computeProjection(data.boundaries, data.crashes);
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "crash-map",
    role: "img",
  });

  const hotspotLayer = svgEl("g", {
    class: "layer-hotspots",
    style: layers.hotspots ? "" : "display:none",
  });
  for (const feature of data.hotspots?.features ?? []) {
    const ring = feature.geometry.coordinates[0] ?? [];
    const cell = svgEl("path", {
      d: ringPath(ring, projection),
      fill: HOTSPOT_FILLS[feature.properties.label] ?? HOTSPOT_FILLS.neutral ?? "",
      class: `hotspot-cell ${feature.properties.label}`,
      "data-z": String(feature.properties.z),
      "data-count": String(feature.properties.count),
      "data-label": feature.properties.label,
    });
    hotspotLayer.append(cell);
  }
  svg.append(hotspotLayer);

  const boundaryLayer = svgEl("g", { class: "layer-boundaries" });
  for (const feature of data.boundaries?.features ?? []) {
    const polys =
      feature.geometry.type === "Polygon"
        ? [feature.geometry.coordinates]
        : feature.geometry.coordinates;
    const d = polys.map((poly) => (poly[0] ? ringPath(poly[0], projection) : "")).join(" ");
    const path = svgEl("path", {
      d,
      class: `boundary${feature.properties.tribe_id === selectedTribe ? " selected" : ""}`,
      "data-tribe-id": feature.properties.tribe_id,
    });
    path.append(svgEl("title"));
    (path.firstChild as SVGElement).textContent = feature.properties.name;
    path.addEventListener("click", () => callbacks.onTribeClick?.(feature.properties.tribe_id));
    boundaryLayer.append(path);
  }
  svg.append(boundaryLayer);

  const pointsLayer = svgEl("g", {
    class: "layer-points",
    style: layers.points ? "" : "display:none",
  });
  for (const point of data.crashes?.points ?? []) {
    pointsLayer.append(
      svgEl("circle", {
        cx: projection.x(point.lon).toFixed(1),
        cy: projection.y(point.lat).toFixed(1),
        r: "2.4",
        fill: SEVERITY_COLORS[point.severity],
        class: "crash-point",
        "data-id": point.id,
        "data-severity": point.severity,
      }),
    );
  }
  svg.append(pointsLayer);
  container.append(svg);

  const legend = el("div", { class: "map-legend" });
  for (const code of SEVERITY_ORDER) {
    legend.append(
      el("span", { class: "legend-item" }, [
        el("span", {
          class: "legend-dot",
          style: `background:${SEVERITY_COLORS[code as SeverityCode]}`,
        }),
        ` ${SEVERITY_LABELS[code as SeverityCode]}`,
      ]),
    );
  }
  container.append(legend);
}
