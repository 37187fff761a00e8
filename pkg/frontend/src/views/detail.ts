/** Image detail: the full image, archival metadata, the caption behind a
 * disclosure marked as automatically generated, and the recommendation strip
 * with its explanation terms. Clicking a recommendation navigates to that
 * image, which fetches its own recommendations: the exploration loop. */

import { ApiError } from "../api";
import type { Recommendations } from "../api";
import type { AppContext } from "../context";
import { clear, el, errorPanel } from "../dom";

const N_CHOICES = [3, 5, 10, 15, 25];
let currentN = 5;

export async function renderDetail(
  app: AppContext,
  container: HTMLElement,
  id: string,
): Promise<void> {
  clear(container);
  container.append(el("p", { class: "loading" }, ["Loading image…"]));

  const record = await app.panels.get("detail").run(async (signal) => {
    try {
      return await app.api.image(id, signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(container);
      if (err instanceof ApiError && err.status === 404) {
        container.append(notFound(id));
      } else {
        container.append(
          errorPanel(`Could not load image: ${String((err as Error).message)}`, () => {
            void renderDetail(app, container, id);
          }),
        );
      }
      return undefined;
    }
  });
  if (!record) return;

  clear(container);
  const figure = el("figure", { class: "detail-figure" }, [
    el("img", { src: app.api.fileUrl(id), alt: record.title, class: "detail-image" }),
  ]);

  const metaRows = Object.entries(record.metadata).map(([key, value]) =>
    el("tr", {}, [el("th", {}, [key]), el("td", {}, [String(value)])]),
  );
  const meta = el("table", { class: "meta-table" }, [
    el("tr", {}, [el("th", {}, ["size"]), el("td", {}, [`${record.width_px} × ${record.height_px}`])]),
    el("tr", {}, [el("th", {}, ["status"]), el("td", {}, [record.status])]),
    ...metaRows,
  ]);

  const recBox = el("section", { class: "rec-box" });

  container.append(
    el("h1", {}, [record.title]),
    figure,
    meta,
    captionBlock(record.caption?.text),
    recBox,
  );

  await renderRecommendations(app, recBox, id);
}

function captionBlock(text: string | undefined): HTMLElement {
  if (!text) {
    return el("p", { class: "no-caption" }, ["No caption yet."]);
  }
  // collapsed by default; the summary label flags the text as machine output
  return el("details", { class: "caption" }, [
    el("summary", {}, ["Caption (automatically generated; may misdescribe the image)"]),
    el("p", {}, [text]),
  ]);
}

function notFound(id: string): HTMLElement {
  return el("div", { class: "not-found" }, [
    el("p", {}, [`No image ${JSON.stringify(id)}.`]),
    el("a", { href: "#/" }, ["Back to the cluster grid"]),
  ]);
}

async function renderRecommendations(
  app: AppContext,
  box: HTMLElement,
  id: string,
): Promise<void> {
  clear(box);
  box.append(el("p", { class: "loading" }, ["Loading recommendations…"]));

  const recs = await app.panels.get("recommendations").run(async (signal) => {
    try {
      return await app.api.recommendations(id, currentN, signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(box);
      box.append(
        errorPanel(`Could not load recommendations: ${String((err as Error).message)}`, () => {
          void renderRecommendations(app, box, id);
        }),
      );
      return undefined;
    }
  });
  if (!recs) return;

  clear(box);
  box.append(
    el("h2", {}, ["Similar images"]),
    nSelector(app, box, id),
    strip(app, recs),
    el(
      "ul",
      { class: "explanation" },
      recs.explanation_terms.map((term) => el("li", {}, [term])),
    ),
  );
}

function nSelector(app: AppContext, box: HTMLElement, id: string): HTMLElement {
  const select = el("select", { class: "n-select" });
  for (const n of N_CHOICES) {
    const option = el("option", { value: String(n) }, [String(n)]);
    if (n === currentN) option.setAttribute("selected", "");
    select.append(option);
  }
  select.addEventListener("change", () => {
    currentN = Number(select.value);
    void renderRecommendations(app, box, id);
  });
  return el("label", { class: "n-label" }, ["Show ", select, " neighbors"]);
}

function strip(app: AppContext, recs: Recommendations): HTMLElement {
  const row = el("div", { class: "rec-strip" });
  for (const neighbor of recs.neighbors) {
    const card = el(
      "a",
      { class: "rec-card", "data-id": neighbor.image_id, href: "#" },
      [
        el("img", {
          src: app.api.thumbnailUrl(neighbor.image_id),
          alt: neighbor.image_id,
          loading: "lazy",
        }),
        el("span", { class: "rec-score" }, [neighbor.score.toFixed(3)]),
      ],
    );
    card.addEventListener("click", (event) => {
      event.preventDefault();
      app.router.navigate({ kind: "image", id: neighbor.image_id });
    });
    row.append(card);
  }
  return row;
}
