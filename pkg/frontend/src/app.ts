/** App wiring: router → view renderers, snapshot-version refetch. */

import { ApiClient } from "./api";
import type { AppContext } from "./context";
import { clear } from "./dom";
import { PanelSet } from "./panel";
import { Router } from "./router";
import type { Route } from "./router";
import { renderDetail } from "./views/detail";
import { renderGrid } from "./views/grid";
import { renderMap } from "./views/map";
import { renderSearch } from "./views/search";

export function startApp(root: HTMLElement, api: ApiClient): AppContext {
  const app: AppContext = {
    api,
    router: new Router(),
    panels: new PanelSet(),
    root,
    settled: Promise.resolve(),
  };

  const show = (route: Route) => {
    clear(root);
    const container = document.createElement("div");
    container.className = `view view-${route.kind}`;
    root.append(container);
    switch (route.kind) {
      case "grid":
        app.settled = renderGrid(app, container);
        break;
      case "image":
        app.settled = renderDetail(app, container, route.id);
        break;
      case "search":
        app.settled = renderSearch(app, container, route.q);
        break;
      case "map":
        app.settled = renderMap(app, container);
        break;
    }
    updateBadge(api);
    void app.settled.then(() => updateBadge(api));
  };

  // a new snapshot version invalidates whatever is on screen; refetch it
  const unsubscribe = api.onVersionChange(() => show(app.router.current()));

  app.dispose = () => {
    app.router.stop();
    unsubscribe();
  };
  app.router.start(show);
  return app;
}

function updateBadge(api: ApiClient): void {
  const badge = document.getElementById("version-badge");
  if (badge) {
    const version = api.snapshotVersion();
    badge.textContent = version === null ? "" : `snapshot ${version}`;
  }
}
