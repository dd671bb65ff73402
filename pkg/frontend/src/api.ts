/**
 * Typed client for the pipeline HTTP API.
 *
 * The UI performs no physics: every displayed number is a field of one of
 * these response payloads. Each panel keeps at most one request in flight;
 * when a newer request supersedes an older one, the older response is
 * dropped (latest wins).
 */

export interface Thresholds {
  t1_min?: number;
  t2_min?: number;
  e1q_max?: number;
  e2q_max?: number;
  ero_max?: number;
}

export interface PulseSelection {
  sx: string;
  cz: string;
  measure: string;
}

export interface GraphPayload {
  nodes: number[];
  edges: [number, number][];
}

export interface SnapshotResponse {
  snapshot_id: string;
  backend: string;
  timestamp: string;
  graph: GraphPayload;
  qubits: Record<string, { t1_us: number; t2_us: number; readout_e01: number; readout_e10: number; err_1q: number }>;
  edges: { a: number; b: number; err_2q: number }[];
}

export interface FilterResponse {
  snapshot_id: string;
  graph: GraphPayload;
  node_count: number;
  edge_count: number;
  path_count: number;
  paths: [number, number, number][];
}

export interface RunResponse {
  snapshot_id: string;
  fidelity: number;
  accept: number;
  mode: string;
  ns: number;
}

export interface WaterfallResponse {
  snapshot_id: string;
  f_baseline: number;
  f_after_l2: number;
  f_after_l3: number;
  delta_l2: number;
  delta_l3: number;
  total: number;
  baseline_layout: string;
  selected_layout: string;
  optimal_pulse: PulseSelection;
}

export interface SweepRowPayload {
  theta: number;
  phi: number;
  ns: number;
  f_phys: number | null;
  f_log: number | null;
  accept: number | null;
}

export interface SweepResponse {
  snapshot_id: string;
  rows: SweepRowPayload[];
}

export interface RunRequestBody {
  mode: string;
  theta: number;
  phi: number;
  ns: number;
  pulse: PulseSelection;
  layout?: number[];
  thresholds?: Thresholds;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    detail: string,
  ) {
    super(detail);
  }
}

/** Response was superseded by a newer request on the same panel. */
export class Superseded extends Error {}

export class ApiClient {
  private sequence = new Map<string, number>();

  constructor(
    readonly base: string = "",
    private fetchImpl: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, {
      method: body === undefined ? "GET" : "POST",
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, payload.error ?? "http_error", payload.detail ?? resp.statusText);
    }
    return payload as T;
  }

  /**
   * Run a request under a panel key; if a newer request for the same key
   * starts before this one resolves, reject with Superseded so stale data
   * never reaches the screen.
   */
  private async latest<T>(panel: string, work: Promise<T>): Promise<T> {
    const ticket = (this.sequence.get(panel) ?? 0) + 1;
    this.sequence.set(panel, ticket);
    const result = await work;
    if (this.sequence.get(panel) !== ticket) {
      throw new Superseded(`${panel} response superseded`);
    }
    return result;
  }

  snapshot(): Promise<SnapshotResponse> {
    return this.request("/api/snapshot");
  }

  filter(thresholds: Thresholds): Promise<FilterResponse> {
    return this.latest("filter", this.request("/api/filter", { thresholds }));
  }

  run(body: RunRequestBody): Promise<RunResponse> {
    return this.latest("run", this.request("/api/run", body));
  }

  waterfall(theta: number, phi: number, ns: number, mode: string): Promise<WaterfallResponse> {
    return this.latest("waterfall", this.request("/api/waterfall", { theta, phi, ns, mode }));
  }

  sweep(theta: number, phi: number, scales: number[]): Promise<SweepResponse> {
    return this.latest(
      "sweep",
      this.request("/api/sweep", { preps: [{ theta, phi }], scales }),
    );
  }
}
