import { describe, expect, it } from "vitest";

import { renderPulseSelector } from "../src/pulseSelector.js";

describe("pulse selector", () => {
  it("renders a 3x3 matrix with one active cell per row", () => {
    const host = document.createElement("div");
    renderPulseSelector(host, { sx: "drag", cz: "gaussian_square", measure: "square" }, () => {});
    expect(host.querySelectorAll("button.cell")).toHaveLength(9);
    const active = [...host.querySelectorAll("button.cell.active")];
    expect(active).toHaveLength(3);
    expect(active.map((b) => `${b.getAttribute("data-class")}:${b.getAttribute("data-shape")}`)).toEqual([
      "sx:drag",
      "cz:gaussian_square",
      "measure:square",
    ]);
  });

  it("clicking a cell reports its class and shape", () => {
    const host = document.createElement("div");
    const picks: string[] = [];
    renderPulseSelector(host, { sx: "square", cz: "square", measure: "square" }, (cls, shape) =>
      picks.push(`${cls}:${shape}`),
    );
    (host.querySelector('button[data-class="cz"][data-shape="drag"]') as HTMLButtonElement).click();
    expect(picks).toEqual(["cz:drag"]);
  });
});
