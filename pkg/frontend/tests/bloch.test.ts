import { describe, expect, it } from "vitest";

import { projectBloch, renderBloch } from "../src/bloch.js";

describe("bloch projection", () => {
  it("theta=0 puts the marker at the north pole", () => {
    const p = projectBloch(0, 0, 90, 90, 72);
    expect(p.x).toBeCloseTo(90, 10);
    expect(p.y).toBeCloseTo(90 - 0.9 * 72, 10);
  });

  it("theta=pi is the antipode of theta=0", () => {
    const north = projectBloch(0, 0, 90, 90, 72);
    const south = projectBloch(Math.PI, 0, 90, 90, 72);
    expect(south.x).toBeCloseTo(2 * 90 - north.x, 10);
    expect(south.y).toBeCloseTo(2 * 90 - north.y, 10);
  });

  it("phi sweeps move the marker around, not up", () => {
    const a = projectBloch(Math.PI / 2, 0, 90, 90, 72);
    const b = projectBloch(Math.PI / 2, Math.PI, 90, 90, 72);
    expect(a.x).not.toBeCloseTo(b.x, 3);
  });

  it("renders a single prep marker", () => {
    const host = document.createElement("div");
    renderBloch(host, 0, 0);
    const marker = host.querySelectorAll('[data-role="prep-marker"]');
    expect(marker).toHaveLength(1);
    renderBloch(host, 1.2, 0.4); // re-render replaces, never accumulates
    expect(host.querySelectorAll('[data-role="prep-marker"]')).toHaveLength(1);
  });
});
