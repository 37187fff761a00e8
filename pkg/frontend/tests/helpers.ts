import { vi } from "vitest";
import { ApiClient } from "../src/api";
import { startApp } from "../src/app";
import type { AppContext } from "../src/context";
import { StubApi } from "./stub";

// happy-dom reuses one window per test file, so every mount must be torn
// down again or stale hashchange listeners keep fetching in later tests.
let mounted: AppContext | null = null;

export function mountAt(
  hash: string,
  configure?: (stub: StubApi) => void,
): { app: AppContext; stub: StubApi; root: HTMLElement } {
  const stub = new StubApi();
  stub.install();
  configure?.(stub);
  document.body.innerHTML = `
    <header><span id="version-badge"></span></header>
    <main id="app"></main>
  `;
  window.location.hash = hash;
  const root = document.getElementById("app")!;
  const app = startApp(root, new ApiClient(""));
  mounted = app;
  return { app, stub, root };
}

export function unmount(): void {
  mounted?.dispose?.();
  mounted = null;
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
  window.location.hash = "";
}

export function click(element: Element): void {
  element.dispatchEvent(new MouseEvent("click", { bubbles: true, cancelable: true }));
}
