/**
 * UI state: slider values and selections on the input side, the latest
 * server responses on the output side. Rendering always reads from the
 * stored responses, never from local computation.
 */

import type {
  FilterResponse,
  PulseSelection,
  RunResponse,
  SnapshotResponse,
  SweepResponse,
  WaterfallResponse,
} from "./api.js";

export interface UiState {
  theta: number;
  phi: number;
  ns: number;
  mode: "physical" | "encoded";
  eroMax: number;
  e2qMax: number;
  pulse: PulseSelection;
  selectedPath: [number, number, number] | null;
  /** waterfall badges revealed so far (1..3) */
  revealedBars: number;
  latest: {
    snapshot?: SnapshotResponse;
    filter?: FilterResponse;
    run?: RunResponse;
    waterfall?: WaterfallResponse;
    sweep?: SweepResponse;
  };
  inFlight: Set<string>;
}

export function initialState(): UiState {
  return {
    theta: Math.PI / 2,
    phi: 0,
    ns: 1.0,
    mode: "physical",
    eroMax: 1.0,
    e2qMax: 1.0,
    pulse: { sx: "square", cz: "square", measure: "square" },
    selectedPath: null,
    revealedBars: 0,
    latest: {},
    inFlight: new Set(),
  };
}

type Listener = (state: UiState) => void;

export class Store {
  private listeners: Listener[] = [];

  constructor(public state: UiState = initialState()) {}

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  update(patch: Partial<UiState>): void {
    Object.assign(this.state, patch);
    for (const fn of this.listeners) fn(this.state);
  }

  beginRequest(panel: string): void {
    this.state.inFlight.add(panel);
    this.update({});
  }

  endRequest(panel: string): void {
    this.state.inFlight.delete(panel);
    this.update({});
  }
}
