import { ApiClient } from "./api.js";
import { el } from "./dom.js";
import { canonicalQuery, filtersFromQuery } from "./filters.js";
import { renderCrashTypes } from "./panels/crashTypes.js";
import { renderFilterPanel } from "./panels/filterPanel.js";
import { renderMap } from "./panels/map.js";
import { renderRankings } from "./panels/rankings.js";
import { renderStats } from "./panels/stats.js";
import { DashboardStore, StoreOptions } from "./store.js";

export interface AppHandles {
  store: DashboardStore;
  root: HTMLElement;
}

/** Assemble the dashboard: filter panel, crash map, stat cards, tribe
 * ranking histogram, and crash-type chart, all re-rendered from one store.
 * Filter state mirrors into the URL so views are shareable. */
export function createApp(
  root: HTMLElement,
  api: ApiClient,
  options: StoreOptions & { syncUrl?: boolean } = {},
): AppHandles {
  const store = new DashboardStore(api, options);
  const syncUrl = options.syncUrl ?? true;

  root.replaceChildren();
  const banner = el("div", { class: "banner", style: "display:none" });
  const header = el("header", { class: "app-header" }, [
    el("h1", {}, ["Tribal crash safety dashboard"]),
    el("span", { class: "snapshot-tag", "data-role": "snapshot" }, []),
  ]);
  const filterBox = el("section", { class: "panel filters", "data-panel": "filters" });
  const mapBox = el("section", { class: "panel map", "data-panel": "map" });
  const statsBox = el("section", { class: "panel stats", "data-panel": "stats" });
  const rankingsBox = el("section", { class: "panel rankings", "data-panel": "rankings" }, [
    el("h2", {}, ["Tribe ranking (KAB rate)"]),
  ]);
  const rankingsBody = el("div", {});
  rankingsBox.append(rankingsBody);
  const typesBox = el("section", { class: "panel crash-types", "data-panel": "crash-types" }, [
    el("h2", {}, ["Top crash types: tribal vs statewide"]),
  ]);
  const typesBody = el("div", {});
  typesBox.append(typesBody);

  root.append(header, banner, filterBox, mapBox, statsBox, rankingsBox, typesBox);

  if (syncUrl) {
    const fromUrl = filtersFromQuery(window.location.search);
    store.applyFilters(fromUrl);
  }

  const renderBanner = () => {
    const state = store.getState();
    banner.replaceChildren();
    if (state.emptyState) {
      banner.style.display = "";
      banner.className = "banner banner-empty";
      banner.append("No dataset is loaded on the server.");
      return;
    }
    if (state.snapshotChanged) {
      banner.style.display = "";
      banner.className = "banner banner-refresh";
      const button = el("button", { type: "button", "data-role": "refresh" }, ["Reload all panels"]);
      button.addEventListener("click", () => void store.acknowledgeSnapshotChange());
      banner.append("The dataset was updated. ", button);
      return;
    }
    banner.style.display = "none";
  };

  const render = () => {
    const state = store.getState();
    renderBanner();
    header.querySelector('[data-role="snapshot"]')!.textContent =
      state.snapshotId === null ? "" : `snapshot ${state.snapshotId}`;

    renderFilterPanel(filterBox, state.filters, state.layers, state.boundaries, state.fieldError, {
      onApply: (changes) => store.applyFilters(changes),
      onToggleLayer: (layer) => store.toggleLayer(layer),
    });
    renderMap(
      mapBox,
      {
        crashes: state.panels.crashes,
        hotspots: state.panels.hotspots,
        boundaries: state.boundaries,
      },
      state.layers,
      { onTribeClick: (tribeId) => store.selectTribe(tribeId) },
      state.filters.tribeId,
    );
    renderStats(statsBox, state.panels.summary);
    renderRankings(
      rankingsBody,
      state.panels.rankings,
      { onSelect: (tribeId) => store.selectTribe(tribeId) },
      state.filters.tribeId,
    );
    renderCrashTypes(typesBody, state.panels.crashTypes, {
      onWeightChange: (weight) => store.setCrashTypeWeight(weight),
    });

    if (syncUrl) {
      const query = canonicalQuery(state.filters);
      const target = query ? `?${query}` : window.location.pathname;
      if (window.location.search !== (query ? `?${query}` : "")) {
        window.history.replaceState(null, "", target);
      }
    }
  };

  store.subscribe(render);
  render();
  return { store, root };
}
