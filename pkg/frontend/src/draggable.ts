/** Minimal drag behavior: grab the handle, move the panel. */

export function makeDraggable(panel: HTMLElement, handle: HTMLElement): () => void {
  let startX = 0;
  let startY = 0;
  let originLeft = 0;
  let originTop = 0;
  let dragging = false;

  const onMouseDown = (event: MouseEvent) => {
    dragging = true;
    startX = event.clientX;
    startY = event.clientY;
    originLeft = parseInt(panel.style.left || "0", 10);
    originTop = parseInt(panel.style.top || "0", 10);
    event.preventDefault();
  };
  const onMouseMove = (event: MouseEvent) => {
    if (!dragging) return;
    panel.style.left = `${originLeft + event.clientX - startX}px`;
    panel.style.top = `${originTop + event.clientY - startY}px`;
  };
  const onMouseUp = () => {
    dragging = false;
  };

  handle.addEventListener("mousedown", onMouseDown);
  const doc = panel.ownerDocument;
  doc.addEventListener("mousemove", onMouseMove);
  doc.addEventListener("mouseup", onMouseUp);
  handle.style.cursor = "move";

  return () => {
    handle.removeEventListener("mousedown", onMouseDown);
    doc.removeEventListener("mousemove", onMouseMove);
    doc.removeEventListener("mouseup", onMouseUp);
  };
}
