import { el } from "../dom.js";
import { Filters, KEY_FACTORS, ValidationError } from "../filters.js";
import type { BoundariesPayload } from "../types.js";

export interface FilterPanelCallbacks {
  onApply: (changes: Partial<Filters>) => void;
  onToggleLayer: (layer: "points" | "hotspots") => void;
}

function select(
  name: string,
  options: [string, string][],
  current: string,
  onChange: (value: string) => void,
): HTMLElement {
  const node = el("select", { name, "data-filter": name });
  for (const [value, label] of options) {
    const option = el("option", { value }, [label]);
    if (value === current) option.setAttribute("selected", "selected");
    node.append(option);
  }
  node.addEventListener("change", () => onChange((node as HTMLSelectElement).value));
  return node;
}

function yearInput(name: string, current: number | undefined, onChange: (value: string) => void) {
  const node = el("input", {
    name,
    "data-filter": name,
    type: "number",
    placeholder: "year",
    value: current === undefined ? "" : String(current),
  });
  node.addEventListener("change", () => onChange((node as HTMLInputElement).value));
  return node;
}

/** Filter controls; every change routes through onApply, which validates and
 * (when valid) refetches all panels. Inline errors render next to the field
 * that caused them and block the request. */
export function renderFilterPanel(
  container: HTMLElement,
  filters: Filters,
  layers: { points: boolean; hotspots: boolean },
  boundaries: BoundariesPayload | null,
  error: ValidationError | null,
  callbacks: FilterPanelCallbacks,
): void {
  container.replaceChildren();
  const form = el("div", { class: "filter-panel" });
  const field = (label: string, control: HTMLElement, name: string) => {
    const wrap = el("label", { class: "filter-field" }, [
      el("span", { class: "filter-label" }, [label]),
      control,
    ]);
    if (error && error.field === name) {
      wrap.append(el("span", { class: "field-error", "data-error-field": name }, [error.message]));
    }
    form.append(wrap);
  };

  field(
    "Scope",
    select(
      "scope",
      [["tribal", "Tribal lands"], ["statewide", "Statewide"]],
      filters.scope,
      (value) =>
        callbacks.onApply({
          scope: value as Filters["scope"],
          tribeId: value === "statewide" ? undefined : filters.tribeId,
        }),
    ),
    "scope",
  );

  const tribeOptions: [string, string][] = [["", "All tribes"]];
  for (const feature of boundaries?.features ?? []) {
    tribeOptions.push([feature.properties.tribe_id, feature.properties.name]);
  }
  field(
    "Tribe",
    select("tribe_id", tribeOptions, filters.tribeId ?? "", (value) =>
      callbacks.onApply({ tribeId: value || undefined }),
    ),
    "tribe_id",
  );

  field(
    "From",
    yearInput("year_from", filters.yearFrom, (value) =>
      callbacks.onApply({ yearFrom: value === "" ? undefined : Number(value) }),
    ),
    "year_from",
  );
  field(
    "To",
    yearInput("year_to", filters.yearTo, (value) =>
      callbacks.onApply({ yearTo: value === "" ? undefined : Number(value) }),
    ),
    "year_to",
  );

  field(
    "Severity",
    select(
      "severity_group",
      [["", "All severities"], ["KAB", "KAB only"], ["KA", "KA only"]],
      filters.severityGroup ?? "",
      (value) =>
        callbacks.onApply({ severityGroup: (value || undefined) as Filters["severityGroup"] }),
    ),
    "severity_group",
  );
  field(
    "Area",
    select(
      "urban_rural",
      [["", "Urban + rural"], ["urban", "Urban"], ["rural", "Rural"]],
      filters.urbanRural ?? "",
      (value) => callbacks.onApply({ urbanRural: (value || undefined) as Filters["urbanRural"] }),
    ),
    "urban_rural",
  );
  field(
    "Road",
    select(
      "road_class",
      [["", "All roads"], ["highway", "Highway (STH/USH/IH)"], ["non_highway", "Non-highway (CTH/local)"]],
      filters.roadClass ?? "",
      (value) => callbacks.onApply({ roadClass: (value || undefined) as Filters["roadClass"] }),
    ),
    "road_class",
  );
  field(
    "Key factor",
    select(
      "key_factor",
      [["", "Any"], ...KEY_FACTORS.map((f): [string, string] => [f, f.replace(/_/g, " ")])],
      filters.keyFactor ?? "",
      (value) => callbacks.onApply({ keyFactor: value || undefined }),
    ),
    "key_factor",
  );

  const layerBox = el("div", { class: "layer-toggles" });
  for (const layer of ["points", "hotspots"] as const) {
    const checkbox = el("input", { type: "checkbox", "data-layer": layer });
    (checkbox as HTMLInputElement).checked = layers[layer];
    checkbox.addEventListener("change", () => callbacks.onToggleLayer(layer));
    layerBox.append(el("label", { class: "layer-toggle" }, [checkbox, ` ${layer}`]));
  }
  form.append(layerBox);

  container.append(form);
}
