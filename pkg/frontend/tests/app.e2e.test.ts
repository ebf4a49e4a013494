/**
 * End-to-end against a fixture-backed HTTP server: boot the full app,
 * click a tribe boundary on the map, and verify the tribe filter is set,
 * every panel refetches with it, and the URL reflects the state.
 */

import { createServer, Server } from "node:http";
import { AddressInfo } from "node:net";

import { afterAll, beforeAll, beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { createApp } from "../src/app.js";

import boundariesFixture from "./fixtures/boundaries.json";
import breakdownFixture from "./fixtures/breakdown_key_factor_tribal.json";
import crashTypesKab from "./fixtures/crash_types_kab.json";
import crashTypesTotal from "./fixtures/crash_types_total.json";
import crashesFixture from "./fixtures/crashes_tribal.json";
import hotspotsFixture from "./fixtures/hotspots_tribal.json";
import rankingsFixture from "./fixtures/rankings.json";
import summaryT01 from "./fixtures/summary_tribe_T01.json";
import summaryTribal from "./fixtures/summary_tribal.json";

let server: Server;
let baseUrl: string;
const requestLog: string[] = [];

function route(pathname: string, search: URLSearchParams): unknown {
  switch (pathname) {
    case "/api/v1/summary":
      return search.get("tribe_id") === "T01" ? summaryT01 : summaryTribal;
    case "/api/v1/breakdown":
      return breakdownFixture;
    case "/api/v1/tribes/rankings":
      return rankingsFixture;
    case "/api/v1/crash-types":
      return search.get("weight") === "kab" ? crashTypesKab : crashTypesTotal;
    case "/api/v1/hotspots":
      return hotspotsFixture;
    case "/api/v1/crashes":
      return crashesFixture;
    case "/api/v1/boundaries":
      return boundariesFixture;
    default:
      return null;
  }
}

beforeAll(async () => {
  server = createServer((request, response) => {
    const url = new URL(request.url ?? "/", "http://127.0.0.1");
    requestLog.push(url.pathname + url.search);
    const body = route(url.pathname, url.searchParams);
    if (body === null) {
      response.writeHead(404, { "content-type": "application/json" });
      response.end(JSON.stringify({ code: "not_found", message: "no such endpoint" }));
      return;
    }
    response.writeHead(200, { "content-type": "application/json" });
    response.end(JSON.stringify(body));
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  baseUrl = `http://127.0.0.1:${(server.address() as AddressInfo).port}`;
});

afterAll(async () => {
  server.closeAllConnections();
  await new Promise((resolve) => server.close(resolve));
});

beforeEach(() => {
  requestLog.length = 0;
  document.body.replaceChildren();
  window.history.replaceState(null, "", "/");
});

function boot() {
  const root = document.createElement("div");
  document.body.append(root);
  const app = createApp(root, new ApiClient(baseUrl), { debounceMs: 0 });
  return { root, app };
}

describe("dashboard e2e", () => {
  it("initial load populates every panel from the live server", async () => {
    const { root, app } = boot();
    await app.store.settled();
    expect(root.querySelectorAll(".stat-card").length).toBe(5);
    expect(root.querySelectorAll(".ranking-row").length).toBeGreaterThan(0);
    expect(root.querySelectorAll("circle.crash-point").length).toBeGreaterThan(0);
    expect(root.querySelectorAll("path.boundary").length).toBe(
      (boundariesFixture as { features: unknown[] }).features.length,
    );
  });

  it("clicking a tribe boundary sets the filter and refetches all panels", async () => {
    const { root, app } = boot();
    await app.store.settled();
    requestLog.length = 0;

    const boundary = root.querySelector('path.boundary[data-tribe-id="T01"]') as SVGElement;
    expect(boundary).not.toBeNull();
    boundary.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await app.store.settled();

    expect(app.store.getState().filters.tribeId).toBe("T01");
    const panels = ["/api/v1/summary", "/api/v1/breakdown", "/api/v1/tribes/rankings",
                    "/api/v1/crash-types", "/api/v1/hotspots", "/api/v1/crashes"];
    for (const panel of panels) {
      const hit = requestLog.find((entry) => entry.startsWith(panel));
      expect(hit, `expected a refetch of ${panel}`).toBeDefined();
      expect(hit).toContain("tribe_id=T01");
    }
    // the summary now shows the T01 fixture verbatim
    const total = root.querySelector('[data-field="total"]')!.getAttribute("data-value");
    expect(total).toBe(String((summaryT01 as { total: number }).total));
    // selection is visible on the map and in the URL
    expect(
      (root.querySelector('path.boundary[data-tribe-id="T01"]') as SVGElement).classList
        .contains("selected"),
    ).toBe(true);
    expect(window.location.search).toContain("tribe_id=T01");
  });

  it("URL state survives a reload (shareable views)", async () => {
    window.history.replaceState(null, "", "/?scope=tribal&tribe_id=T01&severity_group=KAB");
    const { app } = boot();
    await app.store.settled();
    expect(app.store.getState().filters).toEqual({
      scope: "tribal",
      tribeId: "T01",
      severityGroup: "KAB",
    });
    const summaryRequest = requestLog.find((entry) => entry.startsWith("/api/v1/summary"));
    expect(summaryRequest).toContain("tribe_id=T01");
    expect(summaryRequest).toContain("severity_group=KAB");
  });

  it("weight toggle refetches crash types with the other weighting", async () => {
    const { root, app } = boot();
    await app.store.settled();
    requestLog.length = 0;
    const kabButton = root.querySelector('button[data-weight="kab"]') as HTMLButtonElement;
    kabButton.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await app.store.settled();
    const hit = requestLog.find((entry) => entry.startsWith("/api/v1/crash-types"));
    expect(hit).toContain("weight=kab");
    const first = root.querySelector(".type-row")!.getAttribute("data-crash-type");
    expect(first).toBe((crashTypesKab as { rows: { crash_type: string }[] }).rows[0]!.crash_type);
  });

  it("hotspot layer toggle hides cells without refetching", async () => {
    const { root, app } = boot();
    await app.store.settled();
    requestLog.length = 0;
    const toggle = root.querySelector('input[data-layer="hotspots"]') as HTMLInputElement;
    toggle.dispatchEvent(new Event("change", { bubbles: true }));
    await app.store.settled();
    expect(requestLog.length).toBe(0);
    const layer = root.querySelector("g.layer-hotspots") as SVGElement;
    expect(layer.getAttribute("style")).toContain("display:none");
  });

  it("inverted year range shows an inline error and sends nothing", async () => {
    const { root, app } = boot();
    await app.store.settled();
    requestLog.length = 0;
    const from = root.querySelector('input[data-filter="year_from"]') as HTMLInputElement;
    const to = root.querySelector('input[data-filter="year_to"]') as HTMLInputElement;
    to.value = "2018";
    to.dispatchEvent(new Event("change", { bubbles: true }));
    await app.store.settled();
    requestLog.length = 0;
    from.value = "2021";
    from.dispatchEvent(new Event("change", { bubbles: true }));
    await app.store.settled();
    expect(requestLog.length).toBe(0);
    expect(root.querySelector('[data-error-field="year_from"]')).not.toBeNull();
    // previous data is still on screen
    expect(root.querySelectorAll(".stat-card").length).toBe(5);
  });
});

describe("empty server states", () => {
  it("503 shows the empty-state banner and clears panels", async () => {
    const emptyServer = createServer((_request, response) => {
      response.writeHead(503, { "content-type": "application/json" });
      response.end(JSON.stringify({ code: "no_snapshot", message: "no dataset" }));
    });
    await new Promise<void>((resolve) => emptyServer.listen(0, "127.0.0.1", resolve));
    const port = (emptyServer.address() as AddressInfo).port;
    try {
      const root = document.createElement("div");
      document.body.append(root);
      const app = createApp(root, new ApiClient(`http://127.0.0.1:${port}`), { debounceMs: 0 });
      await app.store.settled();
      expect(root.querySelector(".banner-empty")).not.toBeNull();
      expect(root.querySelectorAll(".stat-card").length).toBe(0);
      expect(root.querySelectorAll("circle.crash-point").length).toBe(0);
    } finally {
      emptyServer.closeAllConnections();
      await new Promise((resolve) => emptyServer.close(resolve));
    }
  });
});
