/**
 * Node paths are element-children indices from the document node, matching the
 * backend's tree: [0] is the <html> element of a full document.
 */

export function nodePathOf(element: Element): number[] {
  const steps: number[] = [];
  let current: Element = element;
  while (current.parentElement) {
    steps.unshift(
      Array.prototype.indexOf.call(current.parentElement.children, current),
    );
    current = current.parentElement;
  }
  const doc = current.ownerDocument;
  steps.unshift(Array.prototype.indexOf.call(doc.children, current));
  return steps;
}

export function resolveNodePath(doc: Document, steps: number[]): Element {
  let children: HTMLCollection = doc.children;
  let node: Element | undefined;
  for (const step of steps) {
    node = children[step];
    if (!node) throw new Error(`node path step ${step} out of range`);
    children = node.children;
  }
  if (!node) throw new Error("empty node path");
  return node;
}
