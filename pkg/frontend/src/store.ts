import { ApiClient, ApiFailure } from "./api.js";
import {
  DEFAULT_FILTERS,
  Filters,
  ValidationError,
  canonicalQuery,
  validateFilters,
} from "./filters.js";
import type {
  BoundariesPayload,
  BreakdownPayload,
  CrashesPayload,
  CrashTypesPayload,
  HotspotsPayload,
  RankingsPayload,
  SummaryPayload,
} from "./types.js";

export interface PanelSet {
  summary: SummaryPayload | null;
  breakdown: BreakdownPayload | null;
  rankings: RankingsPayload | null;
  crashTypes: CrashTypesPayload | null;
  hotspots: HotspotsPayload | null;
  crashes: CrashesPayload | null;
}

const EMPTY_PANELS: PanelSet = {
  summary: null,
  breakdown: null,
  rankings: null,
  crashTypes: null,
  hotspots: null,
  crashes: null,
};

export interface DashboardState {
  filters: Filters;
  layers: { points: boolean; hotspots: boolean };
  crashTypeWeight: "total" | "kab";
  panels: PanelSet;
  boundaries: BoundariesPayload | null;
  /** The one snapshot every visible panel was computed from. */
  snapshotId: string | null;
  loading: boolean;
  /** API said 503: no dataset loaded; panels are cleared, not stale. */
  emptyState: boolean;
  /** Inline validation or API 400, attached to one filter field. */
  fieldError: ValidationError | null;
  /** The served snapshot changed since last look; offer a full refresh. */
  snapshotChanged: boolean;
}

export interface StoreOptions {
  debounceMs?: number;
  pageLimit?: number;
  crashTypeCount?: number;
}

type Listener = (state: DashboardState) => void;

export class DashboardStore {
  private state: DashboardState;
  private listeners: Listener[] = [];
  private generation = 0;
  private debounceTimer: ReturnType<typeof setTimeout> | null = null;
  private readonly debounceMs: number;
  private readonly pageLimit: number;
  private readonly crashTypeCount: number;
  /** Resolves when the most recently scheduled refresh settles. */
  private pending: Promise<void> = Promise.resolve();

  constructor(private readonly api: ApiClient, options: StoreOptions = {}) {
    this.debounceMs = options.debounceMs ?? 150;
    this.pageLimit = options.pageLimit ?? 2000;
    this.crashTypeCount = options.crashTypeCount ?? 10;
    this.state = {
      filters: { ...DEFAULT_FILTERS },
      layers: { points: true, hotspots: true },
      crashTypeWeight: "total",
      panels: { ...EMPTY_PANELS },
      boundaries: null,
      snapshotId: null,
      loading: false,
      emptyState: false,
      fieldError: null,
      snapshotChanged: false,
    };
  }

  getState(): DashboardState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(partial: Partial<DashboardState>): void {
    this.state = { ...this.state, ...partial };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Await the in-flight (possibly debounced) refresh; test hook. */
  settled(): Promise<void> {
    return this.pending;
  }

  /** Apply filter changes. Returns false (and fetches nothing) when the
   * combined filter state fails local validation. */
  applyFilters(changes: Partial<Filters>): boolean {
    const next: Filters = { ...this.state.filters, ...changes };
    for (const key of Object.keys(next) as (keyof Filters)[]) {
      if (next[key] === undefined) delete next[key];
    }
    const error = validateFilters(next);
    if (error) {
      this.emit({ fieldError: error });
      return false;
    }
    this.emit({ filters: next, fieldError: null });
    this.scheduleRefresh();
    return true;
  }

  selectTribe(tribeId: string | undefined): boolean {
    return this.applyFilters({ tribeId, scope: "tribal" });
  }

  setCrashTypeWeight(weight: "total" | "kab"): void {
    if (weight === this.state.crashTypeWeight) return;
    this.emit({ crashTypeWeight: weight });
    this.scheduleRefresh();
  }

  /** Layer toggles are pure view state: no refetch. */
  toggleLayer(name: "points" | "hotspots"): void {
    this.emit({ layers: { ...this.state.layers, [name]: !this.state.layers[name] } });
  }

  acknowledgeSnapshotChange(): Promise<void> {
    this.emit({ snapshotChanged: false });
    return this.refresh();
  }

  private scheduleRefresh(): void {
    if (this.debounceTimer !== null) clearTimeout(this.debounceTimer);
    let release: () => void;
    this.pending = new Promise((resolve) => {
      release = resolve;
    });
    this.debounceTimer = setTimeout(() => {
      this.debounceTimer = null;
      void this.refresh().finally(() => release());
    }, this.debounceMs);
  }

  /** Refetch every panel with the canonical query string. Stale responses
   * (an older generation) are discarded wholesale, so the panels only ever
   * show one filter state and one snapshot. */
  async refresh(): Promise<void> {
    const generation = ++this.generation;
    this.emit({ loading: true });
    try {
      const panels = await this.fetchPanels();
      if (generation !== this.generation) return; // superseded
      const ids = new Set<string>();
      for (const payload of Object.values(panels) as ({ snapshot_id: string } | null)[]) {
        if (payload) ids.add(payload.snapshot_id);
      }
      if (ids.size > 1) {
        // a reload landed mid-cycle: try once more for a consistent set
        const retry = await this.fetchPanels();
        if (generation !== this.generation) return;
        const retryIds = new Set<string>();
        for (const payload of Object.values(retry) as ({ snapshot_id: string } | null)[]) {
          if (payload) retryIds.add(payload.snapshot_id);
        }
        if (retryIds.size > 1) throw new Error("inconsistent snapshot ids");
        this.adopt(retry, [...retryIds][0] ?? null);
        return;
      }
      this.adopt(panels, [...ids][0] ?? null);
    } catch (error) {
      if (generation !== this.generation) return;
      if (error instanceof ApiFailure && error.status === 503) {
        this.emit({
          loading: false,
          emptyState: true,
          panels: { ...EMPTY_PANELS },
          boundaries: null,
          snapshotId: null,
        });
        return;
      }
      if (error instanceof ApiFailure && error.status === 400) {
        this.emit({
          loading: false,
          fieldError: {
            field: error.body?.param ?? "filters",
            message: error.body?.message ?? "invalid filters",
          },
        });
        return; // previous data retained
      }
      throw error;
    }
  }

  private adopt(panels: PanelSet & { boundaries: BoundariesPayload | null }, id: string | null): void {
    const snapshotChanged =
      this.state.snapshotId !== null && id !== null && id !== this.state.snapshotId;
    this.emit({
      panels: {
        summary: panels.summary,
        breakdown: panels.breakdown,
        rankings: panels.rankings,
        crashTypes: panels.crashTypes,
        hotspots: panels.hotspots,
        crashes: panels.crashes,
      },
      boundaries: panels.boundaries,
      snapshotId: id,
      loading: false,
      emptyState: false,
      snapshotChanged: snapshotChanged || this.state.snapshotChanged,
    });
  }

  private async fetchPanels(): Promise<PanelSet & { boundaries: BoundariesPayload | null }> {
    const query = canonicalQuery(this.state.filters);
    const suffix = query ? `&${query}` : "";
    const [summary, breakdown, rankings, crashTypes, hotspots, crashes, boundaries] =
      await Promise.all([
        this.api.getJson<SummaryPayload>(`/api/v1/summary?${query}`),
        this.api.getJson<BreakdownPayload>(`/api/v1/breakdown?dimension=key_factor${suffix}`),
        this.api.getJson<RankingsPayload>(`/api/v1/tribes/rankings?${query}`),
        this.api.getJson<CrashTypesPayload>(
          `/api/v1/crash-types?n=${this.crashTypeCount}&weight=${this.state.crashTypeWeight}${suffix}`,
        ),
        this.api.getJson<HotspotsPayload>(`/api/v1/hotspots?${query}`),
        this.api.getJson<CrashesPayload>(`/api/v1/crashes?limit=${this.pageLimit}${suffix}`),
        this.api.getJson<BoundariesPayload>("/api/v1/boundaries"),
      ]);
    return { summary, breakdown, rankings, crashTypes, hotspots, crashes, boundaries };
  }
}
