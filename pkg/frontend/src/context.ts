import { ApiClient } from "./api";
import { PanelSet } from "./panel";
import { Router } from "./router";

export interface AppContext {
  api: ApiClient;
  router: Router;
  panels: PanelSet;
  root: HTMLElement;
  /** Resolves when the current route's initial render settled. */
  settled: Promise<void>;
  /** Detaches the router and version listeners; used when unmounting. */
  dispose?: () => void;
}
