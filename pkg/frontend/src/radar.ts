/**
 * Pentagon rendering: pure mapping from the server's unit-frame vertices
 * to pixel space, plus SVG assembly.
 *
 * The server frame is mathematical (y up); screens point y down, so the
 * mapping flips y. The polygon itself is never recomputed client-side —
 * the server's vertices are the single source of geometry.
 */

import type { RadarModelPayload } from "./types.js";

export interface Viewport {
  side: number;
  margin: number;
}

export const DEFAULT_VIEWPORT: Viewport = { side: 200, margin: 20 };

export function toPixels(
  vertices: readonly [number, number][],
  view: Viewport = DEFAULT_VIEWPORT,
): [number, number][] {
  const center = view.side / 2;
  const scale = view.side / 2 - view.margin;
  return vertices.map(([x, y]) => [center + x * scale, center - y * scale]);
}

function ringPoints(axisCount: number, fraction: number): [number, number][] {
  const pts: [number, number][] = [];
  for (let k = 0; k < axisCount; k++) {
    const angle = Math.PI / 2 - (2 * Math.PI * k) / axisCount;
    pts.push([fraction * Math.cos(angle), fraction * Math.sin(angle)]);
  }
  return pts;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function polygonEl(doc: Document, points: [number, number][], cls: string): SVGPolygonElement {
  const el = doc.createElementNS(SVG_NS, "polygon") as SVGPolygonElement;
  el.setAttribute("points", points.map(([x, y]) => `${x},${y}`).join(" "));
  el.setAttribute("class", cls);
  return el;
}

export interface RadarOptions {
  view?: Viewport;
  animated?: boolean;
  showValues?: boolean;
}

/**
 * Build the radar SVG for a card: grid rings, axes, the value polygon,
 * and short-code labels placed just outside each vertex direction.
 *
 * The `radar-animated` class is the only thing that animates; next-view
 * cards must be rendered with `animated: false`.
 */
export function radarSvg(
  doc: Document,
  model: RadarModelPayload,
  opts: RadarOptions = {},
): SVGSVGElement {
  const view = opts.view ?? DEFAULT_VIEWPORT;
  const svg = doc.createElementNS(SVG_NS, "svg") as SVGSVGElement;
  svg.setAttribute("viewBox", `0 0 ${view.side} ${view.side}`);
  svg.setAttribute("class", "radar");

  for (const fraction of model.grid_rings) {
    svg.appendChild(polygonEl(doc, toPixels(ringPoints(model.axis_count, fraction), view), "radar-ring"));
  }
  const rim = ringPoints(model.axis_count, 1);
  const rimPx = toPixels(rim, view);
  const center = view.side / 2;
  for (const [x, y] of rimPx) {
    const axis = doc.createElementNS(SVG_NS, "line");
    axis.setAttribute("x1", String(center));
    axis.setAttribute("y1", String(center));
    axis.setAttribute("x2", String(x));
    axis.setAttribute("y2", String(y));
    axis.setAttribute("class", "radar-axis");
    svg.appendChild(axis);
  }

  const value = polygonEl(doc, toPixels(model.vertices, view), "radar-value");
  if (opts.animated) {
    value.classList.add("radar-animated");
  }
  svg.appendChild(value);

  const labelPx = toPixels(ringPoints(model.axis_count, 1.12), view);
  model.labels.forEach(([short], k) => {
    const text = doc.createElementNS(SVG_NS, "text");
    const [x, y] = labelPx[k];
    text.setAttribute("x", String(x));
    text.setAttribute("y", String(y));
    text.setAttribute("class", "radar-label");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("dominant-baseline", "middle");
    text.textContent = opts.showValues ? `${short} ${model.radii[k].toFixed(2)}` : short;
    svg.appendChild(text);
  });
  return svg;
}
