/** Hash router over the four app routes.
 *
 * Hash form keeps deep links working from any static file server:
 *   #/            cluster grid
 *   #/image/<id>  image detail (id percent-encoded; ids may contain slashes)
 *   #/search?q=   full-text search
 *   #/map         projection scatter
 */

export type Route =
  | { kind: "grid" }
  | { kind: "image"; id: string }
  | { kind: "search"; q: string }
  | { kind: "map" };

export function parseRoute(hash: string): Route {
  const path = hash.replace(/^#/, "") || "/";
  if (path.startsWith("/image/")) {
    return { kind: "image", id: decodeURIComponent(path.slice("/image/".length)) };
  }
  if (path.startsWith("/search")) {
    const query = path.includes("?") ? path.slice(path.indexOf("?") + 1) : "";
    return { kind: "search", q: new URLSearchParams(query).get("q") ?? "" };
  }
  if (path.startsWith("/map")) return { kind: "map" };
  return { kind: "grid" };
}

export function routeHash(route: Route): string {
  switch (route.kind) {
    case "grid":
      return "#/";
    case "image":
      return `#/image/${encodeURIComponent(route.id)}`;
    case "search":
      return route.q ? `#/search?q=${encodeURIComponent(route.q)}` : "#/search";
    case "map":
      return "#/map";
  }
}

export class Router {
  private handler: ((route: Route) => void) | null = null;
  private applied = "";
  private listener = (): void => {
    const hash = window.location.hash || "#/";
    if (hash === this.applied) return;
    this.applied = hash;
    this.handler?.(parseRoute(hash));
  };

  current(): Route {
    return parseRoute(window.location.hash);
  }

  start(handler: (route: Route) => void): void {
    this.handler = handler;
    window.addEventListener("hashchange", this.listener);
    this.applied = window.location.hash || "#/";
    handler(this.current());
  }

  stop(): void {
    window.removeEventListener("hashchange", this.listener);
    this.handler = null;
  }

  /** Sets the hash (creating a history entry) and dispatches synchronously. */
  navigate(route: Route): void {
    const hash = routeHash(route);
    if (window.location.hash !== hash) {
      window.location.hash = hash;
    }
    if (this.applied !== hash) {
      this.applied = hash;
      this.handler?.(route);
    }
  }
}
