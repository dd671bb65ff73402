/**
 * 3x3 pulse-shape selector: one row per gate class, one column per shape,
 * the coloured cell marking the active choice.
 */

import type { PulseSelection } from "./api.js";

export const GATE_CLASSES = ["sx", "cz", "measure"] as const;
export const SHAPES = ["square", "gaussian_square", "drag"] as const;

const SHAPE_LABELS: Record<string, string> = {
  square: "Square",
  gaussian_square: "Gaussian Sq.",
  drag: "DRAG",
};

const CLASS_LABELS: Record<string, string> = {
  sx: "SX / X",
  cz: "CZ",
  measure: "Measure",
};

export function renderPulseSelector(
  container: Element,
  pulse: PulseSelection,
  onPick: (gateClass: (typeof GATE_CLASSES)[number], shape: string) => void,
): void {
  container.replaceChildren();
  const table = document.createElement("table");
  table.className = "pulse-grid";
  const head = table.insertRow();
  head.insertCell();
  for (const shape of SHAPES) {
    const th = document.createElement("th");
    th.textContent = SHAPE_LABELS[shape];
    head.appendChild(th);
  }
  for (const cls of GATE_CLASSES) {
    const row = table.insertRow();
    const name = document.createElement("th");
    name.textContent = CLASS_LABELS[cls];
    row.appendChild(name);
    for (const shape of SHAPES) {
      const cell = row.insertCell();
      const btn = document.createElement("button");
      btn.className = pulse[cls] === shape ? `cell active ${cls}` : "cell";
      btn.setAttribute("data-class", cls);
      btn.setAttribute("data-shape", shape);
      btn.title = `${CLASS_LABELS[cls]} → ${SHAPE_LABELS[shape]}`;
      btn.addEventListener("click", () => onPick(cls, shape));
      cell.appendChild(btn);
    }
  }
  container.appendChild(table);
}
