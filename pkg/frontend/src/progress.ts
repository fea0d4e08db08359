/**
 * Progress panel: scaled-score line chart plus a sparkline of the
 * pentagon areas of engaged cards.
 */

import type { ProgressSummary } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ScorePoint {
  seq: number;
  score: number;
}

function polyline(
  doc: Document,
  xs: number[],
  ys: number[],
  width: number,
  height: number,
  cls: string,
): SVGElement {
  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", cls);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const px = (x: number) => (xMax === xMin ? width / 2 : ((x - xMin) / (xMax - xMin)) * (width - 8) + 4);
  const py = (y: number) => (yMax === yMin ? height / 2 : height - (((y - yMin) / (yMax - yMin)) * (height - 8) + 4));
  const line = doc.createElementNS(SVG_NS, "polyline");
  line.setAttribute("points", xs.map((x, i) => `${px(x)},${py(ys[i])}`).join(" "));
  line.setAttribute("class", `${cls}-line`);
  svg.appendChild(line);
  xs.forEach((x, i) => {
    const dot = doc.createElementNS(SVG_NS, "circle");
    dot.setAttribute("cx", String(px(x)));
    dot.setAttribute("cy", String(py(ys[i])));
    dot.setAttribute("r", "2.5");
    dot.setAttribute("class", `${cls}-dot`);
    svg.appendChild(dot);
  });
  return svg;
}

/** Render score history (accumulated client-side) and the area sparkline. */
export function renderProgressPanel(
  el: HTMLElement,
  summary: ProgressSummary,
  scoreHistory: ScorePoint[],
): void {
  const doc = el.ownerDocument;
  el.textContent = "";
  el.classList.add("progress-panel");

  const headline = doc.createElement("div");
  headline.className = "progress-headline";
  headline.textContent =
    `score ${summary.score} · seen ${summary.cards_seen} · ` +
    `skipped ${summary.cards_skipped} · answered ${summary.cards_answered}`;
  el.appendChild(headline);

  if (scoreHistory.length === 0 && summary.area_history.length === 0) {
    const empty = doc.createElement("div");
    empty.className = "progress-empty";
    empty.textContent = "Answer a card to start tracking progress.";
    el.appendChild(empty);
    return;
  }

  if (scoreHistory.length > 0) {
    el.appendChild(
      polyline(
        doc,
        scoreHistory.map((p) => p.seq),
        scoreHistory.map((p) => p.score),
        240,
        80,
        "score-chart",
      ),
    );
  }
  if (summary.area_history.length > 0) {
    el.appendChild(
      polyline(
        doc,
        summary.area_history.map((_, i) => i),
        summary.area_history,
        240,
        36,
        "area-sparkline",
      ),
    );
  }
}
