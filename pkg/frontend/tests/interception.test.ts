/**
 * End-to-end traceability: mount the app against a scripted fetch and check
 * that every displayed number (tagged data-server-field) is byte-equal to a
 * field of the response that produced it, and that no physics happens
 * client-side.
 */

import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountApp, SWEEP_SCALES } from "../src/main.js";
import {
  filterFixture,
  flush,
  runFixture,
  scriptedFetch,
  sweepFixture,
  waterfallFixture,
} from "./fixtures.js";

function numericFields(obj: unknown, out: Set<string> = new Set()): Set<string> {
  if (typeof obj === "number") out.add(String(obj));
  else if (Array.isArray(obj)) obj.forEach((v) => numericFields(v, out));
  else if (obj && typeof obj === "object") {
    Object.values(obj).forEach((v) => numericFields(v, out));
  }
  return out;
}

async function mountWithFixtures() {
  const scripted = scriptedFetch();
  const api = new ApiClient("", scripted.fetch);
  const root = document.createElement("div");
  document.body.replaceChildren(root);
  const app = mountApp(root, api);
  await app.refreshAll();
  await flush();
  return { app, scripted, root };
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("server-field traceability", () => {
  it("every displayed number matches a field in a triggering response", async () => {
    const { root } = await mountWithFixtures();
    // reveal all waterfall bars so the total is displayed too
    for (const badge of ["1", "2", "3"]) {
      (root.querySelector(`[data-badge="${badge}"]`) as HTMLButtonElement).click();
    }
    await flush();

    const allowed = new Set<string>();
    for (const payload of [filterFixture(), runFixture(), waterfallFixture(), sweepFixture()]) {
      numericFields(payload, allowed);
    }
    const tagged = root.querySelectorAll("[data-server-field]");
    expect(tagged.length).toBeGreaterThan(10);
    for (const node of tagged) {
      const exact = node.getAttribute("data-value");
      expect(exact, `element for ${node.getAttribute("data-server-field")}`).not.toBeNull();
      expect(allowed.has(exact!), `${node.getAttribute("data-server-field")}=${exact}`).toBe(true);
    }
  });

  it("run panel readouts equal the run response verbatim", async () => {
    const { root } = await mountWithFixtures();
    const fid = root.querySelector('[data-role="fidelity"]')!;
    const acc = root.querySelector('[data-role="accept"]')!;
    expect(fid.getAttribute("data-value")).toBe(String(runFixture().fidelity));
    expect(acc.getAttribute("data-value")).toBe(String(runFixture().accept));
  });

  it("edge and path counts echo the filter response", async () => {
    const { root } = await mountWithFixtures();
    const filter = filterFixture();
    expect(root.querySelector('[data-role="edge-count"]')!.textContent).toBe(
      String(filter.edge_count),
    );
    expect(root.querySelector('[data-role="path-count"]')!.textContent).toBe(
      String(filter.path_count),
    );
  });

  it("sweep dots carry exact response values", async () => {
    const { root } = await mountWithFixtures();
    const rows = sweepFixture().rows;
    const dots = root.querySelectorAll('circle.dot[data-server-field="f_log"]');
    expect(dots).toHaveLength(rows.length);
    const values = [...dots].map((d) => d.getAttribute("data-value"));
    expect(values).toEqual(rows.map((r) => String(r.f_log)));
  });
});

describe("interaction contracts", () => {
  it("clicking a candidate path selects it as the explicit run layout", async () => {
    const { root, scripted } = await mountWithFixtures();
    const firstPath = filterFixture().paths[0];
    (root.querySelector(".path") as HTMLButtonElement).click();
    await flush();
    const lastRun = scripted.calls.filter((c) => c.path === "/api/run").at(-1);
    expect((lastRun?.body as { layout: number[] }).layout).toEqual(firstPath);
  });

  it("badge clicks fetch the waterfall once and append bars", async () => {
    const { root, scripted } = await mountWithFixtures();
    const countWf = () => scripted.calls.filter((c) => c.path === "/api/waterfall").length;
    expect(countWf()).toBe(0);
    (root.querySelector('[data-badge="1"]') as HTMLButtonElement).click();
    await flush();
    expect(countWf()).toBe(1);
    expect(root.querySelectorAll("rect.bar")).toHaveLength(1);
    (root.querySelector('[data-badge="3"]') as HTMLButtonElement).click();
    await flush();
    expect(countWf()).toBe(1); // cached response, bars appended
    expect(root.querySelectorAll("rect.bar")).toHaveLength(3);

    const before = root.querySelector('[data-role="waterfall"]')!.innerHTML;
    (root.querySelector('[data-badge="3"]') as HTMLButtonElement).click();
    await flush();
    expect(root.querySelector('[data-role="waterfall"]')!.innerHTML).toBe(before); // idempotent
  });

  it("mode toggle re-fetches run and sweep", async () => {
    const { root, scripted } = await mountWithFixtures();
    const countRun = () => scripted.calls.filter((c) => c.path === "/api/run").length;
    const countSweep = () => scripted.calls.filter((c) => c.path === "/api/sweep").length;
    const runsBefore = countRun();
    const sweepsBefore = countSweep();
    (root.querySelector('[data-mode="encoded"]') as HTMLButtonElement).click();
    await flush();
    expect(countRun()).toBe(runsBefore + 1);
    expect(countSweep()).toBe(sweepsBefore + 1);
    const lastRun = scripted.calls.filter((c) => c.path === "/api/run").at(-1);
    expect((lastRun?.body as { mode: string }).mode).toBe("encoded");
  });

  it("slider moves are debounced to at most one request per pause", async () => {
    vi.useFakeTimers();
    try {
      const { root, scripted } = await mountWithFixtures();
      const slider = root.querySelector("#theta") as HTMLInputElement;
      const countRun = () => scripted.calls.filter((c) => c.path === "/api/run").length;
      const before = countRun();
      for (const value of ["0.5", "0.8", "1.1", "1.4"]) {
        slider.value = value;
        slider.dispatchEvent(new Event("input"));
        vi.advanceTimersByTime(60); // under the 150 ms window
      }
      expect(countRun()).toBe(before);
      vi.advanceTimersByTime(200);
      await vi.runAllTimersAsync();
      expect(countRun()).toBe(before + 1);
      const lastRun = scripted.calls.filter((c) => c.path === "/api/run").at(-1);
      expect((lastRun?.body as { theta: number }).theta).toBe(1.4);
    } finally {
      vi.useRealTimers();
    }
  });

  it("sweep request carries the fixed scale grid and the slider prep", async () => {
    const { scripted } = await mountWithFixtures();
    const sweepCall = scripted.calls.find((c) => c.path === "/api/sweep");
    expect((sweepCall?.body as { scales: number[] }).scales).toEqual(SWEEP_SCALES);
  });
});

describe("staleness indicator", () => {
  it("shows while a request is in flight and hides after", async () => {
    const scripted = scriptedFetch();
    let release: (() => void) | undefined;
    const gate = new Promise<void>((resolve) => (release = resolve));
    const gated = (async (input: RequestInfo | URL, init?: RequestInit) => {
      if (String(input) === "/api/run") await gate;
      return scripted.fetch(input, init);
    }) as typeof fetch;
    const api = new ApiClient("", gated);
    const root = document.createElement("div");
    document.body.replaceChildren(root);
    const app = mountApp(root, api);
    const indicator = root.querySelector('[data-role="staleness"]') as HTMLElement;
    const pending = app.refreshAll();
    await flush();
    expect(indicator.hidden).toBe(false);
    release!();
    await pending;
    await flush();
    expect(indicator.hidden).toBe(true);
  });
});
