/**
 * Browser bootstrap: a toolbar for loading a page into the picker iframe,
 * assigning roles, finalizing the service, and running overlay searches.
 */

import { StudioApi } from "./api.js";
import { ElementPicker } from "./picker.js";
import { StudioController } from "./studio.js";
import type { SingletonRole } from "./pickSession.js";

const api = new StudioApi(
  (window as { SVC_API_URL?: string }).SVC_API_URL ?? "http://127.0.0.1:8750",
);
const controller = new StudioController(api, (html) =>
  new DOMParser().parseFromString(html, "text/html"),
);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (text) node.textContent = text;
  return node;
}

async function boot(): Promise<void> {
  const toolbar = el("div");
  toolbar.id = "studio-toolbar";
  const urlInput = el("input");
  urlInput.placeholder = "https://…/search page";
  const loadButton = el("button", "Load page");
  const roleSelect = el("select");
  for (const role of [
    "input", "trigger", "next_page", "prev_page", "reveal",
    "result_container", "property", "filter", "ordering",
  ]) {
    const option = el("option", role);
    option.value = role;
    roleSelect.appendChild(option);
  }
  const nameInput = el("input");
  nameInput.placeholder = "name (service / property / filter)";
  const finalizeButton = el("button", "Save service");
  const statusLine = el("div");
  toolbar.append(urlInput, loadButton, roleSelect, nameInput, finalizeButton, statusLine);
  document.body.appendChild(toolbar);

  const frame = el("iframe");
  frame.id = "studio-frame";
  frame.style.width = "100%";
  frame.style.height = "70vh";
  document.body.appendChild(frame);

  loadButton.addEventListener("click", async () => {
    const doc = await controller.loadPage(urlInput.value);
    const frameDoc = frame.contentDocument;
    if (!frameDoc) return;
    frameDoc.open();
    frameDoc.write("<!doctype html>" + doc.documentElement.outerHTML);
    frameDoc.close();
    const picker = new ElementPicker(async ({ element }) => {
      const suggestions = await controller.suggestionsFor(element);
      const top = suggestions[0];
      if (!top) return;
      const role = roleSelect.value;
      if (role === "property" || role === "filter" || role === "ordering") {
        controller.assignNamedRole(role, nameInput.value, element, top);
      } else {
        controller.assignRole(role as SingletonRole, element, top);
      }
      statusLine.textContent = `${role} ← ${top.selector.expression}`;
    });
    picker.attach(frameDoc);
  });

  finalizeButton.addEventListener("click", async () => {
    if (controller.session) controller.session.draftName = nameInput.value;
    const outcome = await controller.finalizeService("Borges", "Cortázar");
    statusLine.textContent = outcome
      ? `saved ${outcome.id} (${outcome.strategy.variant})`
      : `failed: ${controller.lastFailure}`;
  });
}

void boot();
