/** Full-text caption search with ranked hits, matched terms, and snippets. */

import type { AppContext } from "../context";
import { clear, el, errorPanel } from "../dom";

export async function renderSearch(
  app: AppContext,
  container: HTMLElement,
  initialQuery: string,
): Promise<void> {
  clear(container);

  const input = el("input", {
    type: "search",
    class: "search-input",
    placeholder: "Search captions…",
    value: initialQuery,
  });
  const button = el("button", { class: "search-go" }, ["Search"]);
  const results = el("section", { class: "search-results" });

  const submit = () => {
    const q = input.value.trim();
    app.router.navigate({ kind: "search", q });
    // navigate re-renders this view only when q changed; same-q resubmits here
    if (q && q === initialQuery) void runSearch(app, results, q);
  };
  button.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") submit();
  });

  container.append(el("div", { class: "search-bar" }, [input, button]), results);

  if (initialQuery) {
    await runSearch(app, results, initialQuery);
  }
}

async function runSearch(app: AppContext, results: HTMLElement, q: string): Promise<void> {
  clear(results);
  results.append(el("p", { class: "loading" }, ["Searching…"]));

  const response = await app.panels.get("search").run(async (signal) => {
    try {
      return await app.api.search(q, 20, signal);
    } catch (err) {
      if (signal.aborted) throw err;
      clear(results);
      results.append(
        errorPanel(`Search failed: ${String((err as Error).message)}`, () => {
          void runSearch(app, results, q);
        }),
      );
      return undefined;
    }
  });
  if (!response) return;

  clear(results);
  if (response.hits.length === 0) {
    results.append(el("p", { class: "no-hits" }, [`Nothing matches "${q}".`]));
    return;
  }
  const list = el("ol", { class: "hit-list" });
  for (const hit of response.hits) {
    const item = el("li", { class: "hit", "data-id": hit.image_id }, [
      el("img", { src: app.api.thumbnailUrl(hit.image_id), alt: hit.image_id, loading: "lazy" }),
      el("div", { class: "hit-body" }, [
        el("span", { class: "hit-id" }, [hit.image_id]),
        el("span", { class: "hit-score" }, [hit.score.toFixed(3)]),
        el("p", { class: "hit-snippet" }, [hit.snippet]),
        el(
          "ul",
          { class: "hit-terms" },
          hit.matched_terms.map((term) => el("li", {}, [term])),
        ),
      ]),
    ]);
    item.addEventListener("click", () => {
      app.router.navigate({ kind: "image", id: hit.image_id });
    });
    list.append(item);
  }
  results.append(list);
}
