/** API payload shapes (/api/v1). The dashboard renders these verbatim and
 * performs no analytics of its own. */

export type SeverityCode = "K" | "A" | "B" | "C" | "O";
export type SeverityGroup = "KA" | "KAB" | "ALL";

export interface SnapshotInfo {
  snapshot_id: string;
  ingested_at: string;
  record_count: number;
  tribal_count: number;
  conflict_count: number;
  source_digest: string;
}

export interface SummaryPayload {
  snapshot_id: string;
  scope: string;
  tribe_id: string | null;
  total: number;
  kab: number;
  kab_rate: number | null;
  ka: number;
  ka_rate: number | null;
  injury_counts: Record<SeverityCode, number>;
  fatalities: number;
  injuries: number;
}

export interface BreakdownRow {
  label: string;
  share: number | null;
  total: number;
  kab: number;
  kab_rate: number | null;
  ka: number;
  ka_rate: number | null;
}

export interface BreakdownPayload {
  snapshot_id: string;
  tribe_id: string | null;
  dimension: string;
  scope: string;
  rows: BreakdownRow[];
  grand_total: Omit<BreakdownRow, "label" | "share">;
}

export interface RankingRow {
  tribe_id: string;
  name: string;
  total: number;
  kab: number;
  kab_rate: number | null;
  ka: number;
  ka_rate: number | null;
  kab_rank: number;
  ka_rank: number;
}

export interface RankingsPayload {
  snapshot_id: string;
  rows: RankingRow[];
}

export interface CrashTypeRow {
  crash_type: string;
  tribal_percent: number;
  statewide_percent: number;
}

export interface CrashTypesPayload {
  snapshot_id: string;
  weight: "total" | "kab";
  rows: CrashTypeRow[];
}

export type HotspotLabel =
  | "hot99" | "hot95" | "hot90" | "neutral" | "cold90" | "cold95" | "cold99";

export interface HotspotFeature {
  type: "Feature";
  geometry: { type: "Polygon"; coordinates: number[][][] };
  properties: { col: number; row: number; count: number; z: number; label: HotspotLabel };
}

export interface HotspotsPayload {
  type: "FeatureCollection";
  features: HotspotFeature[];
  snapshot_id: string;
  cell_size: number;
  radius: number;
  bbox?: number[];
  overflow: number;
}

export interface CrashPoint {
  id: string;
  lon: number;
  lat: number;
  severity: SeverityCode;
  tribe_id: string | null;
  crash_type: string;
}

export interface CrashesPayload {
  snapshot_id: string;
  total_located: number;
  points: CrashPoint[];
  next_cursor: string | null;
}

export interface BoundaryFeature {
  type: "Feature";
  geometry:
    | { type: "Polygon"; coordinates: number[][][] }
    | { type: "MultiPolygon"; coordinates: number[][][][] };
  properties: { tribe_id: string; name: string };
}

export interface BoundariesPayload {
  type: "FeatureCollection";
  features: BoundaryFeature[];
  snapshot_id: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  param?: string;
}
