/** Tiny DOM builders shared by the panels. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    if (name === "class") node.className = value;
    else node.setAttribute(name, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

const SVG_NS = "http://www.w3.org/2000/svg";

export function svgEl(tag: string, attrs: Record<string, string> = {}): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  return node;
}

/** Display formatting only; raw values always travel in data-value. */
export function formatRate(value: number | null, decimals = 1): string {
  return value === null ? "—" : `${value.toFixed(decimals)}%`;
}

export function formatCount(value: number): string {
  return value.toLocaleString("en-US");
}

/** A numeric figure traceable to one API field: the raw value is attached
 * as data-value and data-field for the contract tests. */
export function figure(
  field: string,
  raw: number | string | null,
  display: string,
  cls = "figure",
): HTMLElement {
  return el(
    "span",
    { class: cls, "data-field": field, "data-value": raw === null ? "null" : String(raw) },
    [display],
  );
}
