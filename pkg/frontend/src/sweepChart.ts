/**
 * Noise-scale sweep chart: physical and conditional-logical fidelity lines
 * plus a syndrome-acceptance series on the right axis, all taken directly
 * from the sweep response rows.
 */

import type { SweepResponse } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface SeriesPoint {
  ns: number;
  value: number;
}

export interface SweepModel {
  physical: SeriesPoint[];
  logical: SeriesPoint[];
  acceptance: SeriesPoint[];
}

export function computeSweepModel(resp: SweepResponse): SweepModel {
  const physical: SeriesPoint[] = [];
  const logical: SeriesPoint[] = [];
  const acceptance: SeriesPoint[] = [];
  for (const row of resp.rows) {
    if (row.f_phys !== null) physical.push({ ns: row.ns, value: row.f_phys });
    if (row.f_log !== null) logical.push({ ns: row.ns, value: row.f_log });
    if (row.accept !== null) acceptance.push({ ns: row.ns, value: row.accept });
  }
  return { physical, logical, acceptance };
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, val] of Object.entries(attrs)) el.setAttribute(key, String(val));
  return el;
}

function polyline(points: SeriesPoint[], sx: (ns: number) => number, sy: (v: number) => number, cls: string) {
  return svgEl("polyline", {
    points: points.map((p) => `${sx(p.ns).toFixed(1)},${sy(p.value).toFixed(1)}`).join(" "),
    class: cls,
    fill: "none",
  });
}

export function renderSweepChart(container: Element, model: SweepModel): void {
  const width = 320;
  const height = 200;
  const left = 40;
  const right = width - 40;
  const top = 14;
  const bottom = height - 26;
  container.replaceChildren();
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });

  const all = [...model.physical, ...model.logical];
  if (all.length === 0) {
    container.appendChild(svg);
    return;
  }
  const nsValues = all.map((p) => p.ns);
  const nsMin = Math.min(...nsValues);
  const nsMax = Math.max(...nsValues);
  const fValues = all.map((p) => p.value);
  const fMin = Math.min(...fValues);
  const fMax = Math.max(...fValues);
  const pad = Math.max((fMax - fMin) * 0.15, 1e-4);
  const sx = (ns: number) => left + ((ns - nsMin) / Math.max(nsMax - nsMin, 1e-12)) * (right - left);
  const syF = (v: number) => bottom - ((v - (fMin - pad)) / (fMax + pad - (fMin - pad))) * (bottom - top);
  const syA = (v: number) => bottom - v * (bottom - top); // acceptance on [0, 1]

  svg.appendChild(svgEl("line", { x1: left, y1: bottom, x2: right, y2: bottom, class: "axis" }));
  svg.appendChild(svgEl("line", { x1: left, y1: top, x2: left, y2: bottom, class: "axis" }));
  svg.appendChild(svgEl("line", { x1: right, y1: top, x2: right, y2: bottom, class: "axis accept-axis" }));

  svg.appendChild(polyline(model.physical, sx, syF, "series physical"));
  svg.appendChild(polyline(model.logical, sx, syF, "series logical"));
  svg.appendChild(polyline(model.acceptance, sx, syA, "series acceptance"));

  const mark = (points: SeriesPoint[], sy: (v: number) => number, cls: string, field: string) => {
    for (const p of points) {
      const dot = svgEl("circle", { cx: sx(p.ns), cy: sy(p.value), r: 2.6, class: `dot ${cls}` });
      dot.setAttribute("data-server-field", field);
      dot.setAttribute("data-value", String(p.value));
      svg.appendChild(dot);
    }
  };
  mark(model.physical, syF, "physical", "f_phys");
  mark(model.logical, syF, "logical", "f_log");
  mark(model.acceptance, syA, "acceptance", "accept");

  for (const p of model.physical) {
    const tick = svgEl("text", { x: sx(p.ns), y: height - 8, "text-anchor": "middle", class: "tick" });
    tick.textContent = p.ns.toFixed(1);
    svg.appendChild(tick);
  }
  container.appendChild(svg);
}
