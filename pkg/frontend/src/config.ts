/** The only configuration knob: where the API lives. */

declare global {
  // may be set by the hosting page before the bundle loads
  var __EXPLORER_API_BASE__: string | undefined;
}

export function apiBase(): string {
  if (typeof globalThis.__EXPLORER_API_BASE__ === "string") {
    return globalThis.__EXPLORER_API_BASE__.replace(/\/+$/, "");
  }
  const env = import.meta.env?.VITE_API_BASE;
  if (typeof env === "string" && env) return env.replace(/\/+$/, "");
  return "";
}
