import type { SeverityGroup } from "./types.js";

/** Analyst-facing filter state; mirrors the API's shared query params. */
export interface Filters {
  scope: "statewide" | "tribal";
  tribeId?: string;
  yearFrom?: number;
  yearTo?: number;
  severityGroup?: SeverityGroup;
  urbanRural?: "urban" | "rural";
  roadClass?: "highway" | "non_highway";
  keyFactor?: string;
}

export const DEFAULT_FILTERS: Filters = { scope: "tribal" };

export const KEY_FACTORS = [
  "speeding",
  "impaired",
  "pedestrian_involved",
  "hit_and_run",
  "safety_belt",
] as const;

/** Canonical param order; every panel query and the URL use exactly this. */
const PARAM_ORDER: [string, keyof Filters][] = [
  ["scope", "scope"],
  ["tribe_id", "tribeId"],
  ["year_from", "yearFrom"],
  ["year_to", "yearTo"],
  ["severity_group", "severityGroup"],
  ["urban_rural", "urbanRural"],
  ["road_class", "roadClass"],
  ["key_factor", "keyFactor"],
];

export function canonicalQuery(filters: Filters): string {
  const params = new URLSearchParams();
  for (const [param, key] of PARAM_ORDER) {
    const value = filters[key];
    if (value !== undefined && value !== null && value !== "") {
      params.set(param, String(value));
    }
  }
  return params.toString();
}

/** Parse a query string back into filters; inverse of canonicalQuery. */
export function filtersFromQuery(query: string): Filters {
  const params = new URLSearchParams(query);
  const filters: Filters = { scope: params.get("scope") === "statewide" ? "statewide" : "tribal" };
  const tribeId = params.get("tribe_id");
  if (tribeId) filters.tribeId = tribeId;
  const yearFrom = params.get("year_from");
  if (yearFrom !== null && yearFrom !== "") filters.yearFrom = Number(yearFrom);
  const yearTo = params.get("year_to");
  if (yearTo !== null && yearTo !== "") filters.yearTo = Number(yearTo);
  const group = params.get("severity_group");
  if (group === "KA" || group === "KAB" || group === "ALL") filters.severityGroup = group;
  const area = params.get("urban_rural");
  if (area === "urban" || area === "rural") filters.urbanRural = area;
  const road = params.get("road_class");
  if (road === "highway" || road === "non_highway") filters.roadClass = road;
  const factor = params.get("key_factor");
  if (factor) filters.keyFactor = factor;
  return filters;
}

export interface ValidationError {
  field: string;
  message: string;
}

/** Client-side checks mirroring the API's 400s; invalid filters never leave
 * the browser. */
export function validateFilters(filters: Filters): ValidationError | null {
  if (
    filters.yearFrom !== undefined &&
    filters.yearTo !== undefined &&
    filters.yearFrom > filters.yearTo
  ) {
    return { field: "year_from", message: "start year is after end year" };
  }
  for (const key of ["yearFrom", "yearTo"] as const) {
    const value = filters[key];
    if (value !== undefined && (!Number.isInteger(value) || value < 1900 || value > 2100)) {
      return { field: key === "yearFrom" ? "year_from" : "year_to", message: "not a valid year" };
    }
  }
  if (filters.keyFactor !== undefined && !KEY_FACTORS.includes(filters.keyFactor as never)) {
    return { field: "key_factor", message: "unknown key factor" };
  }
  return null;
}
