/**
 * Element picking on a rendered snapshot: hover highlight, click to choose,
 * and preview highlighting of everything a generalized selector matches.
 */

import { nodePathOf } from "./nodePath.js";
import type { PickedElementMeta } from "./pickSession.js";
import type { SelectorJson } from "./types.js";

const HOVER_OUTLINE = "2px solid #6366f1";
const PREVIEW_BACKGROUND = "rgba(99, 102, 241, 0.25)";

export interface PickEvent {
  element: Element;
  meta: PickedElementMeta;
}

export function pickedMeta(element: Element): PickedElementMeta {
  const meta: PickedElementMeta = { nodePath: nodePathOf(element) };
  const href = element.getAttribute("href");
  if (href !== null) meta.href = href;
  const text = (element.textContent ?? "").trim();
  if (text) meta.text = text.slice(0, 120);
  return meta;
}

export class ElementPicker {
  private hovered: HTMLElement | null = null;
  private savedOutline = "";
  private detachFns: (() => void)[] = [];

  constructor(private readonly onPick: (event: PickEvent) => void) {}

  attach(doc: Document): void {
    const over = (event: Event) => {
      const el = event.target as HTMLElement | null;
      if (!el || el === this.hovered) return;
      this.restoreHover();
      this.hovered = el;
      this.savedOutline = el.style.outline;
      el.style.outline = HOVER_OUTLINE;
    };
    const out = () => this.restoreHover();
    const click = (event: Event) => {
      event.preventDefault();
      event.stopPropagation();
      const el = event.target as Element | null;
      if (el) this.onPick({ element: el, meta: pickedMeta(el) });
    };
    doc.addEventListener("mouseover", over, true);
    doc.addEventListener("mouseout", out, true);
    doc.addEventListener("click", click, true);
    this.detachFns.push(() => {
      doc.removeEventListener("mouseover", over, true);
      doc.removeEventListener("mouseout", out, true);
      doc.removeEventListener("click", click, true);
    });
  }

  detach(): void {
    this.restoreHover();
    for (const fn of this.detachFns.splice(0)) fn();
  }

  private restoreHover(): void {
    if (this.hovered) {
      this.hovered.style.outline = this.savedOutline;
      this.hovered = null;
    }
  }
}

/**
 * Highlight every node a selector matches (the background highlighting shown
 * while defining a result container). XPath needs document.evaluate; where the
 * host DOM lacks it, only the picked node is highlighted.
 */
export function previewMatches(
  doc: Document,
  selector: SelectorJson,
  fallback?: Element,
): Element[] {
  let matched: Element[] = [];
  if (selector.kind === "css") {
    matched = [...doc.querySelectorAll(selector.expression)];
  } else if (typeof doc.evaluate === "function") {
    const result = doc.evaluate(
      selector.expression,
      doc,
      null,
      7 /* ORDERED_NODE_SNAPSHOT_TYPE */,
      null,
    );
    for (let i = 0; i < result.snapshotLength; i++) {
      const node = result.snapshotItem(i);
      if (node instanceof Element) matched.push(node);
    }
  } else if (fallback) {
    matched = [fallback];
  }
  for (const el of matched) {
    (el as HTMLElement).style.backgroundColor = PREVIEW_BACKGROUND;
  }
  return matched;
}

export function clearPreview(elements: Element[]): void {
  for (const el of elements) {
    (el as HTMLElement).style.backgroundColor = "";
  }
}
