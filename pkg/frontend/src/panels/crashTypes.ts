import { el, figure, formatRate } from "../dom.js";
import type { CrashTypesPayload } from "../types.js";

export interface CrashTypeCallbacks {
  onWeightChange?: (weight: "total" | "kab") => void;
}

/** Top crash types as paired bars: tribal share vs statewide share per
 * type, in the API's order (descending tribal share). */
export function renderCrashTypes(
  container: HTMLElement,
  payload: CrashTypesPayload | null,
  callbacks: CrashTypeCallbacks = {},
): void {
  container.replaceChildren();
  if (payload === null || payload.rows.length === 0) {
    container.append(el("p", { class: "empty-note" }, ["No data for these filters."]));
    return;
  }

  const toggle = el("div", { class: "weight-toggle", role: "group" });
  for (const weight of ["total", "kab"] as const) {
    const button = el(
      "button",
      {
        class: `weight-option${payload.weight === weight ? " active" : ""}`,
        type: "button",
        "data-weight": weight,
      },
      [weight === "total" ? "All crashes" : "KAB crashes"],
    );
    button.addEventListener("click", () => callbacks.onWeightChange?.(weight));
    toggle.append(button);
  }
  container.append(toggle);

  const maxPercent = Math.max(
    ...payload.rows.map((row) => Math.max(row.tribal_percent, row.statewide_percent)),
    1e-9,
  );
  const chart = el("div", { class: "type-chart" });
  for (const row of payload.rows) {
    const pair = el("div", { class: "type-row", "data-crash-type": row.crash_type });
    pair.append(el("span", { class: "type-label" }, [row.crash_type]));
    const bars = el("span", { class: "type-bars" });
    const tribalWidth = Math.max(1, Math.round((row.tribal_percent / maxPercent) * 100));
    const statewideWidth = Math.max(1, Math.round((row.statewide_percent / maxPercent) * 100));
    bars.append(
      el("span", { class: "type-bar tribal", style: `width:${tribalWidth}%` }, []),
      figure("rows.tribal_percent", row.tribal_percent, formatRate(row.tribal_percent), "type-value tribal"),
      el("span", { class: "type-bar statewide", style: `width:${statewideWidth}%` }, []),
      figure(
        "rows.statewide_percent",
        row.statewide_percent,
        formatRate(row.statewide_percent),
        "type-value statewide",
      ),
    );
    pair.append(bars);
    chart.append(pair);
  }
  container.append(chart);
  container.append(
    el("div", { class: "type-legend" }, [
      el("span", { class: "legend-swatch tribal" }, []),
      " tribal share  ",
      el("span", { class: "legend-swatch statewide" }, []),
      " statewide share",
    ]),
  );
}
