import type { SeverityCode } from "./types.js";

/** Fixed five-color severity scale, used identically in every view.
 * K fatal, A suspected serious, B suspected minor, C possible, O none. */
export const SEVERITY_COLORS: Record<SeverityCode, string> = {
  K: "#a50f15",
  A: "#de2d26",
  B: "#fb6a4a",
  C: "#fcae91",
  O: "#3182bd",
};

export const SEVERITY_LABELS: Record<SeverityCode, string> = {
  K: "Fatal (K)",
  A: "Serious (A)",
  B: "Minor (B)",
  C: "Possible (C)",
  O: "No injury (O)",
};

export const SEVERITY_ORDER: SeverityCode[] = ["K", "A", "B", "C", "O"];

export const HOTSPOT_FILLS: Record<string, string> = {
  hot99: "rgba(165, 15, 21, 0.55)",
  hot95: "rgba(222, 45, 38, 0.45)",
  hot90: "rgba(251, 106, 74, 0.35)",
  neutral: "rgba(160, 160, 160, 0.08)",
  cold90: "rgba(158, 202, 225, 0.35)",
  cold95: "rgba(66, 146, 198, 0.45)",
  cold99: "rgba(8, 81, 156, 0.55)",
};
