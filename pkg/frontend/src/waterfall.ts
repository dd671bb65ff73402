/**
 * Layer fidelity waterfall: Baseline / +L2 / +L3 bars revealed by the
 * numbered action badges. All bar heights and the displayed total come
 * verbatim from the waterfall response.
 */

import type { WaterfallResponse } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface WaterfallBar {
  label: string;
  fidelity: number;
  delta: number;
}

export interface WaterfallModel {
  bars: WaterfallBar[];
  /** total gain shown in the caption; a response field, not a local sum */
  displayedTotal: number;
}

export function computeWaterfallModel(
  report: WaterfallResponse,
  revealedBars: number,
): WaterfallModel {
  const all: WaterfallBar[] = [
    { label: "Baseline", fidelity: report.f_baseline, delta: 0 },
    { label: "+L2", fidelity: report.f_after_l2, delta: report.delta_l2 },
    { label: "+L3", fidelity: report.f_after_l3, delta: report.delta_l3 },
  ];
  return {
    bars: all.slice(0, Math.max(0, Math.min(3, revealedBars))),
    displayedTotal: report.total,
  };
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, val] of Object.entries(attrs)) el.setAttribute(key, String(val));
  return el;
}

export function renderWaterfall(container: Element, model: WaterfallModel): void {
  const width = 280;
  const height = 190;
  const plotBottom = height - 26;
  container.replaceChildren();
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });

  if (model.bars.length > 0) {
    const fids = model.bars.map((b) => b.fidelity);
    const lo = Math.min(...fids);
    const hi = Math.max(...fids);
    const pad = Math.max((hi - lo) * 0.3, 0.005);
    const yOf = (f: number) => plotBottom - ((f - (lo - pad)) / (hi + pad - (lo - pad))) * (plotBottom - 22);
    const barWidth = 54;
    model.bars.forEach((bar, i) => {
      const x = 26 + i * (barWidth + 28);
      const y = yOf(bar.fidelity);
      svg.appendChild(
        svgEl("rect", { x, y, width: barWidth, height: plotBottom - y, class: `bar bar-${i}` }),
      );
      const value = svgEl("text", { x: x + barWidth / 2, y: y - 6, "text-anchor": "middle", class: "bar-value" });
      value.setAttribute("data-server-field", ["f_baseline", "f_after_l2", "f_after_l3"][i]);
      value.setAttribute("data-value", String(bar.fidelity));
      value.textContent = bar.fidelity.toFixed(4);
      svg.appendChild(value);
      const label = svgEl("text", { x: x + barWidth / 2, y: plotBottom + 14, "text-anchor": "middle", class: "bar-label" });
      label.textContent = bar.label;
      svg.appendChild(label);
      if (i > 0) {
        const delta = svgEl("text", { x: x + barWidth / 2, y: y - 18, "text-anchor": "middle", class: "bar-delta" });
        delta.setAttribute("data-server-field", i === 1 ? "delta_l2" : "delta_l3");
        delta.setAttribute("data-value", String(bar.delta));
        delta.textContent = `+${bar.delta.toFixed(4)}`;
        svg.appendChild(delta);
      }
    });
  }
  container.appendChild(svg);
}
