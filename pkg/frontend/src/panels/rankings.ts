import { el, figure, formatRate } from "../dom.js";
import type { RankingsPayload } from "../types.js";

export interface RankingsCallbacks {
  onSelect?: (tribeId: string) => void;
}

/** Tribe-ranking histogram: one bar per tribe in KAB-rank order, bar length
 * proportional to the KAB rate; clicking a bar narrows to that tribe. */
export function renderRankings(
  container: HTMLElement,
  rankings: RankingsPayload | null,
  callbacks: RankingsCallbacks = {},
  selectedTribe?: string,
): void {
  container.replaceChildren();
  if (rankings === null || rankings.rows.length === 0) {
    container.append(el("p", { class: "empty-note" }, ["No tribal crashes for these filters."]));
    return;
  }
  const maxRate = Math.max(...rankings.rows.map((row) => row.kab_rate ?? 0), 1e-9);
  const list = el("div", { class: "ranking-bars" });
  for (const row of rankings.rows) {
    const width = Math.max(2, Math.round(((row.kab_rate ?? 0) / maxRate) * 100));
    const bar = el(
      "button",
      {
        class: `ranking-row${row.tribe_id === selectedTribe ? " selected" : ""}`,
        "data-tribe-id": row.tribe_id,
        type: "button",
        title: `${row.name}: ${row.total} crashes, KA rate ${formatRate(row.ka_rate, 2)}, KA rank ${row.ka_rank}`,
      },
      [
        el("span", { class: "ranking-rank" }, [
          figure(`rows.kab_rank`, row.kab_rank, `#${row.kab_rank}`, "rank-value"),
        ]),
        el("span", { class: "ranking-name" }, [row.name]),
        el("span", { class: "ranking-track" }, [
          el("span", { class: "ranking-fill", style: `width:${width}%` }, []),
        ]),
        figure(`rows.kab_rate`, row.kab_rate, formatRate(row.kab_rate, 2), "ranking-value"),
      ],
    );
    bar.addEventListener("click", () => callbacks.onSelect?.(row.tribe_id));
    list.append(bar);
  }
  container.append(list);
}
