/** Cluster grid: one cell per cluster in order_position order, showing the
 * representative thumbnail, the distinguishing keywords, and the size.
 * Clicking a cell lists its members; clicking a member opens the detail
 * route. */

import type { ClusterSummary } from "../api";
import type { AppContext } from "../context";
import { clear, el, errorPanel } from "../dom";

export async function renderGrid(app: AppContext, container: HTMLElement): Promise<void> {
  clear(container);
  container.append(el("p", { class: "loading" }, ["Loading clusters…"]));

  const list = await app.panels.get("grid").run(async (signal) => {
    try {
      return await app.api.clusters(signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(container);
      container.append(
        errorPanel(`Could not load clusters: ${String((err as Error).message)}`, () => {
          void renderGrid(app, container);
        }),
      );
      return undefined;
    }
  });
  if (!list) return;

  const ordered = [...list.clusters].sort((a, b) => a.order_position - b.order_position);
  clear(container);
  const grid = el("div", { class: "cluster-grid" });
  const membersBox = el("section", { class: "members-box" });
  for (const cluster of ordered) {
    grid.append(clusterCell(app, cluster, membersBox));
  }
  container.append(
    el("h1", {}, [`${list.k} clusters`]),
    grid,
    membersBox,
  );
}

function clusterCell(
  app: AppContext,
  cluster: ClusterSummary,
  membersBox: HTMLElement,
): HTMLElement {
  const cell = el("div", { class: "cluster-cell", "data-cluster": String(cluster.cluster_id) }, [
    el("img", {
      class: "cluster-thumb",
      src: app.api.thumbnailUrl(cluster.representative_id),
      alt: `cluster ${cluster.cluster_id}`,
      loading: "lazy",
    }),
    el(
      "ul",
      { class: "keywords" },
      cluster.terms.map((term) => el("li", {}, [term])),
    ),
    el("span", { class: "size-badge" }, [`${cluster.size}`]),
  ]);
  cell.addEventListener("click", () => {
    void showMembers(app, cluster, membersBox);
  });
  return cell;
}

async function showMembers(
  app: AppContext,
  cluster: ClusterSummary,
  box: HTMLElement,
): Promise<void> {
  clear(box);
  box.append(el("p", { class: "loading" }, [`Loading cluster ${cluster.cluster_id}…`]));

  const page = await app.panels.get("members").run(async (signal) => {
    try {
      return await app.api.clusterImages(cluster.cluster_id, 1, 60, signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(box);
      box.append(
        errorPanel(`Could not load members: ${String((err as Error).message)}`, () => {
          void showMembers(app, cluster, box);
        }),
      );
      return undefined;
    }
  });
  if (!page) return;

  clear(box);
  const strip = el("div", { class: "member-strip" });
  for (const record of page.items) {
    const card = el("a", { class: "member-card", "data-id": record.id, href: "#" }, [
      el("img", { src: app.api.thumbnailUrl(record.id), alt: record.title, loading: "lazy" }),
      el("span", { class: "member-title" }, [record.title]),
    ]);
    card.addEventListener("click", (event) => {
      event.preventDefault();
      app.router.navigate({ kind: "image", id: record.id });
    });
    strip.append(card);
  }
  box.append(
    el("h2", {}, [
      `Cluster ${cluster.cluster_id}: ${cluster.terms.join(", ") || "(no terms)"} — ${page.total} images`,
    ]),
    strip,
  );
}
