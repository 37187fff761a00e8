/** One fetch slot per UI panel: starting a new request aborts the old one,
 * so a panel never has two requests in flight. */

export class Panel {
  private controller: AbortController | null = null;

  constructor(readonly name: string) {}

  busy(): boolean {
    return this.controller !== null;
  }

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | undefined> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      return await task(controller.signal);
    } catch (err) {
      if (controller.signal.aborted) return undefined;
      throw err;
    } finally {
      if (this.controller === controller) this.controller = null;
    }
  }
}

export class PanelSet {
  private panels = new Map<string, Panel>();

  get(name: string): Panel {
    let panel = this.panels.get(name);
    if (!panel) {
      panel = new Panel(name);
      this.panels.set(name, panel);
    }
    return panel;
  }
}
