/**
 * Coupling-map panel: nodes on a deterministic circular layout, edges
 * colour-coded by 2q gate error (green low, red high), surviving candidate
 * paths listed and clickable as the explicit layout for runs.
 */

import type { FilterResponse, SnapshotResponse } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface EdgeView {
  a: number;
  b: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  color: string;
  err2q: number;
}

export interface MapModel {
  nodes: { id: number; x: number; y: number; surviving: boolean }[];
  edges: EdgeView[];
  edgeCount: number;
  pathCount: number;
  paths: [number, number, number][];
}

export function edgeColor(err: number, errMin: number, errMax: number): string {
  const span = errMax - errMin;
  const t = span > 0 ? (err - errMin) / span : 0;
  const hue = 120 * (1 - t); // 120 green .. 0 red
  return `hsl(${hue.toFixed(0)}, 70%, 45%)`;
}

/**
 * The rendered edge set is exactly the filter response's surviving edges;
 * node placement and colour scale come from the full snapshot so the view
 * stays stable while sliders move.
 */
export function computeMapModel(
  snapshot: SnapshotResponse,
  filtered: FilterResponse,
  size = 260,
): MapModel {
  const allNodes = [...snapshot.graph.nodes].sort((a, b) => a - b);
  const cx = size / 2;
  const cy = size / 2;
  const radius = size / 2 - 18;
  const pos = new Map<number, { x: number; y: number }>();
  allNodes.forEach((id, i) => {
    const angle = (2 * Math.PI * i) / allNodes.length - Math.PI / 2;
    pos.set(id, { x: cx + radius * Math.cos(angle), y: cy + radius * Math.sin(angle) });
  });

  const errByEdge = new Map<string, number>();
  for (const e of snapshot.edges) errByEdge.set(`${Math.min(e.a, e.b)}-${Math.max(e.a, e.b)}`, e.err_2q);
  const errs = snapshot.edges.map((e) => e.err_2q);
  const errMin = Math.min(...errs);
  const errMax = Math.max(...errs);

  const surviving = new Set(filtered.graph.nodes);
  const edges: EdgeView[] = filtered.graph.edges.map(([a, b]) => {
    const pa = pos.get(a)!;
    const pb = pos.get(b)!;
    const err = errByEdge.get(`${Math.min(a, b)}-${Math.max(a, b)}`) ?? 0;
    return { a, b, x1: pa.x, y1: pa.y, x2: pb.x, y2: pb.y, color: edgeColor(err, errMin, errMax), err2q: err };
  });

  return {
    nodes: allNodes.map((id) => ({ id, ...pos.get(id)!, surviving: surviving.has(id) })),
    edges,
    edgeCount: filtered.edge_count,
    pathCount: filtered.path_count,
    paths: filtered.paths,
  };
}

function svgEl(tag: string, attrs: Record<string, string | number>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, val] of Object.entries(attrs)) el.setAttribute(key, String(val));
  return el;
}

export function renderCouplingMap(
  container: Element,
  model: MapModel,
  selectedPath: [number, number, number] | null,
  onSelect: (path: [number, number, number]) => void,
  size = 260,
): void {
  container.replaceChildren();
  const svg = svgEl("svg", { width: size, height: size, viewBox: `0 0 ${size} ${size}` });

  const highlighted = new Set<string>();
  if (selectedPath) {
    const [a, b, c] = selectedPath;
    highlighted.add(`${Math.min(a, b)}-${Math.max(a, b)}`);
    highlighted.add(`${Math.min(b, c)}-${Math.max(b, c)}`);
  }
  for (const edge of model.edges) {
    const key = `${Math.min(edge.a, edge.b)}-${Math.max(edge.a, edge.b)}`;
    const line = svgEl("line", {
      x1: edge.x1,
      y1: edge.y1,
      x2: edge.x2,
      y2: edge.y2,
      stroke: edge.color,
      "stroke-width": highlighted.has(key) ? 5 : 2.5,
      class: highlighted.has(key) ? "edge selected" : "edge",
    });
    line.appendChild(document.createElementNS(SVG_NS, "title")).textContent =
      `(${edge.a},${edge.b}) err_2q=${edge.err2q}`;
    svg.appendChild(line);
  }
  const selectedNodes = new Set(selectedPath ?? []);
  for (const node of model.nodes) {
    const cls = node.surviving
      ? selectedNodes.has(node.id)
        ? "node selected"
        : "node"
      : "node pruned";
    svg.appendChild(svgEl("circle", { cx: node.x, cy: node.y, r: 8, class: cls }));
    const label = svgEl("text", { x: node.x, y: node.y + 3.5, class: "node-label", "text-anchor": "middle" });
    label.textContent = String(node.id);
    svg.appendChild(label);
  }
  container.appendChild(svg);
}

export function renderPathList(
  container: Element,
  model: MapModel,
  selectedPath: [number, number, number] | null,
  onSelect: (path: [number, number, number]) => void,
): void {
  container.replaceChildren();
  for (const path of model.paths) {
    const btn = document.createElement("button");
    btn.className =
      selectedPath && path.join("-") === selectedPath.join("-") ? "path selected" : "path";
    btn.textContent = path.join("–");
    btn.addEventListener("click", () => onSelect(path));
    container.appendChild(btn);
  }
}
