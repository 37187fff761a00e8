/** Tiny element builder; enough DOM sugar for a framework-free app. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

/** Error panel with a retry hook; views show this instead of partial data. */
export function errorPanel(message: string, retry: () => void): HTMLElement {
  const button = el("button", { class: "retry" }, ["Retry"]);
  button.addEventListener("click", retry);
  return el("div", { class: "error-panel" }, [
    el("p", {}, [message]),
    button,
  ]);
}
