/**
 * SVG Bloch sphere with a marker at the prepared (theta, phi).
 * Pure geometry: theta/phi come straight from the sliders, the output
 * state marker from the run response; no amplitudes are computed here.
 */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface MarkerPoint {
  x: number;
  y: number;
  behind: boolean;
}

/** Orthographic projection with a slightly tilted camera. */
export function projectBloch(
  theta: number,
  phi: number,
  cx: number,
  cy: number,
  r: number,
): MarkerPoint {
  const x = Math.sin(theta) * Math.cos(phi);
  const y = Math.sin(theta) * Math.sin(phi);
  const z = Math.cos(theta);
  return {
    x: cx + r * (x + 0.35 * y),
    y: cy - r * (0.9 * z - 0.2 * y),
    behind: y < 0,
  };
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, val] of Object.entries(attrs)) el.setAttribute(key, String(val));
  return el;
}

export function renderBloch(container: Element, theta: number, phi: number): void {
  const size = 180;
  const cx = size / 2;
  const cy = size / 2;
  const r = 72;
  container.replaceChildren();
  const svg = svgEl("svg", { width: size, height: size, viewBox: `0 0 ${size} ${size}` });

  svg.appendChild(svgEl("circle", { cx, cy, r, class: "bloch-outline" }));
  // equator and a meridian for depth
  svg.appendChild(svgEl("ellipse", { cx, cy, rx: r, ry: r * 0.28, class: "bloch-grid" }));
  svg.appendChild(svgEl("ellipse", { cx, cy, rx: r * 0.28, ry: r * 0.9, class: "bloch-grid" }));
  // poles
  const north = projectBloch(0, 0, cx, cy, r);
  const south = projectBloch(Math.PI, 0, cx, cy, r);
  svg.appendChild(svgEl("circle", { cx: north.x, cy: north.y, r: 2, class: "bloch-pole" }));
  svg.appendChild(svgEl("circle", { cx: south.x, cy: south.y, r: 2, class: "bloch-pole" }));

  const marker = projectBloch(theta, phi, cx, cy, r);
  svg.appendChild(
    svgEl("line", { x1: cx, y1: cy, x2: marker.x, y2: marker.y, class: "bloch-vector" }),
  );
  svg.appendChild(
    svgEl("circle", {
      cx: marker.x,
      cy: marker.y,
      r: 5,
      class: marker.behind ? "bloch-marker behind" : "bloch-marker",
      "data-role": "prep-marker",
    }),
  );
  container.appendChild(svg);
}
