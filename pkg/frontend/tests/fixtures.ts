/** Realistic server payloads plus a scripted fetch for interception tests. */

import type {
  FilterResponse,
  RunResponse,
  SnapshotResponse,
  SweepResponse,
  WaterfallResponse,
} from "../src/api.js";

export const SNAPSHOT_ID = "synthetic-grid-balanced@seed-5";

export function snapshotFixture(): SnapshotResponse {
  const nodes = [0, 1, 2, 3, 4, 5, 6, 7, 8];
  const edges: [number, number][] = [
    [0, 1], [1, 2], [3, 4], [4, 5], [6, 7], [7, 8],
    [0, 3], [3, 6], [1, 4], [4, 7], [2, 5], [5, 8],
  ];
  return {
    snapshot_id: SNAPSHOT_ID,
    backend: "synthetic-grid-balanced",
    timestamp: "seed-5",
    graph: { nodes, edges },
    qubits: Object.fromEntries(
      nodes.map((q) => [
        String(q),
        { t1_us: 120, t2_us: 110, readout_e01: 0.012, readout_e10: 0.02, err_1q: 4e-4 },
      ]),
    ),
    edges: edges.map(([a, b], i) => ({ a, b, err_2q: 0.004 + 0.0005 * i })),
  };
}

export function filterFixture(edgeKeep = 12): FilterResponse {
  const snap = snapshotFixture();
  const edges = snap.graph.edges.slice(0, edgeKeep);
  const nodes = [...new Set(edges.flat())].sort((a, b) => a - b);
  const byNode = new Map<number, number[]>();
  for (const [a, b] of edges) {
    byNode.set(a, [...(byNode.get(a) ?? []), b]);
    byNode.set(b, [...(byNode.get(b) ?? []), a]);
  }
  const paths: [number, number, number][] = [];
  for (const [mid, nbrs] of [...byNode.entries()].sort((x, y) => x[0] - y[0])) {
    const sorted = [...nbrs].sort((a, b) => a - b);
    for (const a of sorted) for (const c of sorted) if (a < c) paths.push([a, mid, c]);
  }
  return {
    snapshot_id: SNAPSHOT_ID,
    graph: { nodes, edges },
    node_count: nodes.length,
    edge_count: edges.length,
    path_count: paths.length,
    paths,
  };
}

export function runFixture(overrides: Partial<RunResponse> = {}): RunResponse {
  return {
    snapshot_id: SNAPSHOT_ID,
    fidelity: 0.9794239060199642,
    accept: 1.0,
    mode: "physical",
    ns: 1.0,
    ...overrides,
  };
}

export function waterfallFixture(): WaterfallResponse {
  return {
    snapshot_id: SNAPSHOT_ID,
    f_baseline: 0.9723070701603722,
    f_after_l2: 0.9794239060199642,
    f_after_l3: 0.9802812904230642,
    delta_l2: 0.007116835859591997,
    delta_l3: 0.0008573844031000144,
    total: 0.00797422026269201,
    baseline_layout: "0-1-2",
    selected_layout: "1-4-3",
    optimal_pulse: { sx: "drag", cz: "gaussian_square", measure: "square" },
  };
}

export function sweepFixture(): SweepResponse {
  return {
    snapshot_id: SNAPSHOT_ID,
    rows: [0.5, 1.0, 1.5, 2.0, 2.5].map((ns, i) => ({
      theta: Math.PI,
      phi: 0,
      ns,
      f_phys: 0.9866 - 0.013 * i,
      f_log: 0.9959 - 0.005 * i,
      accept: 0.9712 - 0.026 * i,
    })),
  };
}

export interface ScriptedFetch {
  fetch: typeof fetch;
  calls: { path: string; body: unknown }[];
  /** swap the canned response for a path */
  respond(path: string, payload: unknown): void;
}

export function scriptedFetch(): ScriptedFetch {
  const responses = new Map<string, unknown>([
    ["/api/snapshot", snapshotFixture()],
    ["/api/filter", filterFixture()],
    ["/api/run", runFixture()],
    ["/api/waterfall", waterfallFixture()],
    ["/api/sweep", sweepFixture()],
  ]);
  const calls: { path: string; body: unknown }[] = [];
  const impl = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const path = String(input);
    calls.push({ path, body: init?.body ? JSON.parse(String(init.body)) : undefined });
    const payload = responses.get(path);
    if (payload === undefined) {
      return new Response(JSON.stringify({ error: "not_found", detail: path }), { status: 404 });
    }
    return new Response(JSON.stringify(payload), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  };
  return {
    fetch: impl as typeof fetch,
    calls,
    respond: (path, payload) => void responses.set(path, payload),
  };
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
