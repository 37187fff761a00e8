/** Projection scatter: every image as a dot in the server-computed 2-D
 * layout, colored by cluster. Pure presentation; coordinates come from the
 * API untouched. */

import type { AppContext } from "../context";
import { clear, el, errorPanel } from "../dom";

const SVG_NS = "http://www.w3.org/2000/svg";
const PALETTE = [
  "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#eeca3b",
  "#b279a2", "#ff9da6", "#9d755d", "#bab0ac", "#2f4b7c", "#a05195",
];

export async function renderMap(app: AppContext, container: HTMLElement): Promise<void> {
  clear(container);
  container.append(el("p", { class: "loading" }, ["Loading projection…"]));

  const projection = await app.panels.get("map").run(async (signal) => {
    try {
      return await app.api.projection(signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(container);
      container.append(
        errorPanel(`Could not load projection: ${String((err as Error).message)}`, () => {
          void renderMap(app, container);
        }),
      );
      return undefined;
    }
  });
  if (!projection) return;

  clear(container);
  const xs = projection.points.map((p) => p.x);
  const ys = projection.points.map((p) => p.y);
  const minX = Math.min(...xs, 0);
  const maxX = Math.max(...xs, 0);
  const minY = Math.min(...ys, 0);
  const maxY = Math.max(...ys, 0);
  const padX = (maxX - minX || 1) * 0.05;
  const padY = (maxY - minY || 1) * 0.05;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "projection-map");
  svg.setAttribute(
    "viewBox",
    `${minX - padX} ${minY - padY} ${maxX - minX + 2 * padX} ${maxY - minY + 2 * padY}`,
  );
  const radius = (Math.max(maxX - minX, maxY - minY) || 1) / 120;

  for (const point of projection.points) {
    const dot = document.createElementNS(SVG_NS, "circle");
    dot.setAttribute("class", "map-dot");
    dot.setAttribute("data-id", point.image_id);
    dot.setAttribute("cx", String(point.x));
    // the svg y axis grows downward; flip so the layout reads naturally
    dot.setAttribute("cy", String(minY + maxY - point.y));
    dot.setAttribute("r", String(radius));
    const color =
      point.cluster_id === null
        ? "#888888"
        : PALETTE[point.cluster_id % PALETTE.length] ?? "#888888";
    dot.setAttribute("fill", color);
    const title = document.createElementNS(SVG_NS, "title");
    title.textContent = point.image_id;
    dot.append(title);
    dot.addEventListener("click", () => {
      app.router.navigate({ kind: "image", id: point.image_id });
    });
    svg.append(dot);
  }

  const variance = projection.explained_variance
    .map((v) => `${(v * 100).toFixed(1)}%`)
    .join(" / ");
  container.append(
    el("h1", {}, [`${projection.points.length} images`]),
    el("p", { class: "variance" }, [`Axis variance: ${variance}`]),
  );
  container.append(svg);
}
