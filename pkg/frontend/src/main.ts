/**
 * Panel wiring. The practitioner steers the input state (L1), the
 * threshold filter and layout pick (L2), the pulse shapes (L3), the mode
 * toggle and the noise scale; every displayed result number is a field of
 * the latest server response (tagged with data-server-field/data-value so
 * the traceability tests can check exactly that).
 */

import { ApiClient, Superseded } from "./api.js";
import type { FilterResponse, PulseSelection } from "./api.js";
import { renderBloch } from "./bloch.js";
import { computeMapModel, renderCouplingMap, renderPathList } from "./couplingMap.js";
import { debounce, SLIDER_DEBOUNCE_MS } from "./debounce.js";
import { GATE_CLASSES, renderPulseSelector } from "./pulseSelector.js";
import { Store } from "./state.js";
import { computeSweepModel, renderSweepChart } from "./sweepChart.js";
import { computeWaterfallModel, renderWaterfall } from "./waterfall.js";

export const SWEEP_SCALES = [0.5, 1.0, 1.5, 2.0, 2.5];

function el(tag: string, className: string, html = ""): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (html) node.innerHTML = html;
  return node;
}

function slider(id: string, min: number, max: number, step: number, value: number): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "range";
  input.id = id;
  input.min = String(min);
  input.max = String(max);
  input.step = String(step);
  input.value = String(value);
  return input;
}

export interface App {
  store: Store;
  api: ApiClient;
  refreshAll(): Promise<void>;
  root: HTMLElement;
}

export function mountApp(root: HTMLElement, api: ApiClient, store = new Store()): App {
  root.innerHTML = `
    <header><h1>teleportation pipeline explorer</h1>
      <span class="staleness" data-role="staleness" hidden>updating…</span>
      <span class="snapshot-id" data-role="snapshot-id"></span>
    </header>
    <main>
      <section class="panel" data-panel="prep">
        <h2>L1 · state preparation</h2>
        <div data-role="bloch"></div>
        <label>θ <span data-role="theta-label"></span></label>
        <div data-role="theta-slot"></div>
        <label>φ <span data-role="phi-label"></span></label>
        <div data-role="phi-slot"></div>
        <label>mode</label>
        <div class="mode-toggle">
          <button data-mode="physical" class="active">physical</button>
          <button data-mode="encoded">error-detected</button>
        </div>
        <label>noise scale <span data-role="ns-label"></span></label>
        <div data-role="ns-slot"></div>
      </section>
      <section class="panel" data-panel="filter">
        <h2>L2 · qubit selection</h2>
        <div data-role="map"></div>
        <label>τ_ro <span data-role="ero-label"></span></label>
        <div data-role="ero-slot"></div>
        <label>τ_2q <span data-role="e2q-label"></span></label>
        <div data-role="e2q-slot"></div>
        <p>edges <b data-role="edge-count"></b> · paths <b data-role="path-count"></b></p>
        <div class="path-list" data-role="path-list"></div>
      </section>
      <section class="panel" data-panel="pulse">
        <h2>L3 · pulse shapes</h2>
        <div data-role="pulse-grid"></div>
      </section>
      <section class="panel" data-panel="results">
        <h2>results</h2>
        <p class="readout">F = <b data-role="fidelity">–</b> · accept = <b data-role="accept">–</b></p>
        <h3>fidelity waterfall
          <span class="badges">
            <button class="badge" data-badge="1">1</button>
            <button class="badge" data-badge="2">2</button>
            <button class="badge" data-badge="3">3</button>
          </span>
        </h3>
        <div data-role="waterfall"></div>
        <p class="caption">total gain <b data-role="waterfall-total">–</b></p>
        <h3>noise sweep</h3>
        <div data-role="sweep"></div>
        <p class="caption legend">
          <span class="physical">physical F</span> ·
          <span class="logical">logical F (conditional)</span> ·
          <span class="acceptance">acceptance</span>
        </p>
      </section>
    </main>`;

  const q = <T extends Element = HTMLElement>(sel: string) => root.querySelector(sel) as T;
  const thetaSlider = slider("theta", 0, Math.PI, Math.PI / 64, store.state.theta);
  const phiSlider = slider("phi", 0, 2 * Math.PI - 1e-9, Math.PI / 32, store.state.phi);
  const nsSlider = slider("ns", 0, 2.5, 0.1, store.state.ns);
  const eroSlider = slider("ero", 0.002, 1.0, 0.002, store.state.eroMax);
  const e2qSlider = slider("e2q", 0.001, 1.0, 0.001, store.state.e2qMax);
  q('[data-role="theta-slot"]').appendChild(thetaSlider);
  q('[data-role="phi-slot"]').appendChild(phiSlider);
  q('[data-role="ns-slot"]').appendChild(nsSlider);
  q('[data-role="ero-slot"]').appendChild(eroSlider);
  q('[data-role="e2q-slot"]').appendChild(e2qSlider);

  const setServerNumber = (role: string, field: string, value: number | null) => {
    const node = q(`[data-role="${role}"]`);
    if (value === null) {
      node.textContent = "–";
      node.removeAttribute("data-server-field");
      node.removeAttribute("data-value");
      return;
    }
    node.textContent = value.toFixed(4);
    node.setAttribute("data-server-field", field);
    node.setAttribute("data-value", String(value));
  };

  const dropSuperseded = (err: unknown) => {
    if (!(err instanceof Superseded)) throw err;
  };

  async function refreshFilter(): Promise<void> {
    const { state } = store;
    store.beginRequest("filter");
    try {
      const resp = await api.filter({ ero_max: state.eroMax, e2q_max: state.e2qMax });
      const stillThere =
        state.selectedPath !== null &&
        resp.paths.some((p) => p.join("-") === state.selectedPath!.join("-"));
      store.update({ latest: { ...state.latest, filter: resp }, selectedPath: stillThere ? state.selectedPath : null });
    } catch (err) {
      dropSuperseded(err);
    } finally {
      store.endRequest("filter");
    }
  }

  async function refreshRun(): Promise<void> {
    const { state } = store;
    store.beginRequest("run");
    try {
      const resp = await api.run({
        mode: state.mode,
        theta: state.theta,
        phi: state.phi,
        ns: state.ns,
        pulse: state.pulse,
        ...(state.mode === "physical" && state.selectedPath
          ? { layout: state.selectedPath }
          : { thresholds: { ero_max: state.eroMax, e2q_max: state.e2qMax } }),
      });
      store.update({ latest: { ...store.state.latest, run: resp } });
    } catch (err) {
      dropSuperseded(err);
    } finally {
      store.endRequest("run");
    }
  }

  async function refreshWaterfall(): Promise<void> {
    const { state } = store;
    store.beginRequest("waterfall");
    try {
      const resp = await api.waterfall(state.theta, state.phi, state.ns, "physical");
      store.update({ latest: { ...store.state.latest, waterfall: resp } });
    } catch (err) {
      dropSuperseded(err);
    } finally {
      store.endRequest("waterfall");
    }
  }

  async function refreshSweep(): Promise<void> {
    const { state } = store;
    store.beginRequest("sweep");
    try {
      const resp = await api.sweep(state.theta, state.phi, SWEEP_SCALES);
      store.update({ latest: { ...store.state.latest, sweep: resp } });
    } catch (err) {
      dropSuperseded(err);
    } finally {
      store.endRequest("sweep");
    }
  }

  function render(): void {
    const { state } = store;
    q('[data-role="theta-label"]').textContent = state.theta.toFixed(3);
    q('[data-role="phi-label"]').textContent = state.phi.toFixed(3);
    q('[data-role="ns-label"]').textContent = state.ns.toFixed(1);
    q('[data-role="ero-label"]').textContent = state.eroMax.toFixed(3);
    q('[data-role="e2q-label"]').textContent = state.e2qMax.toFixed(3);
    renderBloch(q('[data-role="bloch"]'), state.theta, state.phi);

    for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-mode]")) {
      btn.classList.toggle("active", btn.dataset.mode === state.mode);
    }
    (q('[data-role="staleness"]') as HTMLElement).hidden = state.inFlight.size === 0;

    if (state.latest.snapshot) {
      q('[data-role="snapshot-id"]').textContent = state.latest.snapshot.snapshot_id;
      if (state.latest.filter) {
        const model = computeMapModel(state.latest.snapshot, state.latest.filter);
        renderCouplingMap(q('[data-role="map"]'), model, state.selectedPath, pickPath);
        renderPathList(q('[data-role="path-list"]'), model, state.selectedPath, pickPath);
        const edgeCount = q('[data-role="edge-count"]');
        edgeCount.textContent = String(model.edgeCount);
        edgeCount.setAttribute("data-server-field", "edge_count");
        edgeCount.setAttribute("data-value", String(model.edgeCount));
        const pathCount = q('[data-role="path-count"]');
        pathCount.textContent = String(model.pathCount);
        pathCount.setAttribute("data-server-field", "path_count");
        pathCount.setAttribute("data-value", String(model.pathCount));
      }
    }
    renderPulseSelector(q('[data-role="pulse-grid"]'), state.pulse, pickPulse);

    setServerNumber("fidelity", "fidelity", state.latest.run?.fidelity ?? null);
    setServerNumber("accept", "accept", state.latest.run?.accept ?? null);

    if (state.latest.waterfall) {
      const model = computeWaterfallModel(state.latest.waterfall, state.revealedBars);
      renderWaterfall(q('[data-role="waterfall"]'), model);
      if (state.revealedBars >= 3) {
        setServerNumber("waterfall-total", "total", model.displayedTotal);
      } else {
        setServerNumber("waterfall-total", "total", null);
      }
    }
    if (state.latest.sweep) {
      renderSweepChart(q('[data-role="sweep"]'), computeSweepModel(state.latest.sweep));
    }
  }

  function pickPath(path: [number, number, number]): void {
    store.update({ selectedPath: path });
    void refreshRun();
  }

  function pickPulse(gateClass: (typeof GATE_CLASSES)[number], shape: string): void {
    const pulse: PulseSelection = { ...store.state.pulse, [gateClass]: shape };
    store.update({ pulse });
    void refreshRun();
  }

  const debouncedPrepChange = debounce(() => {
    void refreshRun();
    void refreshSweep();
    if (store.state.revealedBars > 0) void refreshWaterfall();
  }, SLIDER_DEBOUNCE_MS);

  const debouncedFilterChange = debounce(() => {
    void refreshFilter().then(refreshRun);
  }, SLIDER_DEBOUNCE_MS);

  thetaSlider.addEventListener("input", () => {
    store.update({ theta: Number(thetaSlider.value) });
    debouncedPrepChange();
  });
  phiSlider.addEventListener("input", () => {
    store.update({ phi: Number(phiSlider.value) });
    debouncedPrepChange();
  });
  nsSlider.addEventListener("input", () => {
    store.update({ ns: Number(nsSlider.value) });
    debouncedPrepChange();
  });
  eroSlider.addEventListener("input", () => {
    store.update({ eroMax: Number(eroSlider.value) });
    debouncedFilterChange();
  });
  e2qSlider.addEventListener("input", () => {
    store.update({ e2qMax: Number(e2qSlider.value) });
    debouncedFilterChange();
  });
  for (const btn of root.querySelectorAll<HTMLButtonElement>("[data-mode]")) {
    btn.addEventListener("click", () => {
      const mode = btn.dataset.mode as "physical" | "encoded";
      if (mode !== store.state.mode) {
        store.update({ mode });
        void refreshRun();
        void refreshSweep();
      }
    });
  }
  for (const badge of root.querySelectorAll<HTMLButtonElement>("[data-badge]")) {
    badge.addEventListener("click", () => {
      const level = Number(badge.dataset.badge);
      const revealed = Math.max(store.state.revealedBars, level);
      const needFetch = store.state.latest.waterfall === undefined;
      if (revealed !== store.state.revealedBars) store.update({ revealedBars: revealed });
      if (needFetch) void refreshWaterfall();
    });
  }

  store.subscribe(render);
  render();

  async function refreshAll(): Promise<void> {
    store.beginRequest("snapshot");
    try {
      const snap = await api.snapshot();
      store.update({ latest: { ...store.state.latest, snapshot: snap } });
    } finally {
      store.endRequest("snapshot");
    }
    await refreshFilter();
    await Promise.all([refreshRun(), refreshSweep()]);
  }

  return { store, api, refreshAll, root };
}

declare global {
  interface Window {
    TELEFID_API_BASE?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  const api = new ApiClient(window.TELEFID_API_BASE ?? "");
  const app = mountApp(document.getElementById("app") as HTMLElement, api);
  void app.refreshAll();
}
