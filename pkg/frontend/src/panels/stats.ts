import { el, figure, formatCount, formatRate } from "../dom.js";
import { SEVERITY_ORDER } from "../severity.js";
import type { SummaryPayload } from "../types.js";

const CARD_HELP: Record<string, string> = {
  total: "Crashes matching the current filters",
  fatalities: "People killed (K injuries)",
  injuries: "People injured (A, B or C injuries)",
  kab_rate: "Share of crashes with a K, A or B injury",
  ka_rate: "Share of crashes with a K or A injury",
};

/** Stat cards: totals, person-level fatalities/injuries, KAB/KA rates, and
 * crash counts by severity level. Values come straight off the summary
 * response; an empty scope shows zeros and the undefined-rate marker. */
export function renderStats(container: HTMLElement, summary: SummaryPayload | null): void {
  container.replaceChildren();
  if (summary === null) {
    container.append(el("p", { class: "empty-note" }, ["No data loaded."]));
    return;
  }
  const cards = el("div", { class: "stat-cards" });
  const card = (field: string, label: string, value: number | null, display: string) =>
    cards.append(
      el("div", { class: "stat-card", title: CARD_HELP[field] ?? "" }, [
        figure(field, value, display, "stat-value"),
        el("div", { class: "stat-label" }, [label]),
      ]),
    );

  card("total", "Total crashes", summary.total, formatCount(summary.total));
  card("fatalities", "Fatalities", summary.fatalities, formatCount(summary.fatalities));
  card("injuries", "Injuries", summary.injuries, formatCount(summary.injuries));
  card("kab_rate", "KAB rate", summary.kab_rate, formatRate(summary.kab_rate));
  card("ka_rate", "KA rate", summary.ka_rate, formatRate(summary.ka_rate));
  container.append(cards);

  const chips = el("div", { class: "severity-chips" });
  for (const code of SEVERITY_ORDER) {
    const count = summary.injury_counts[code];
    chips.append(
      el("span", { class: `chip chip-${code}` }, [
        `${code} `,
        figure(`injury_counts.${code}`, count, formatCount(count), "chip-value"),
      ]),
    );
  }
  container.append(chips);
}
