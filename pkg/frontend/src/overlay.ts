/**
 * The in-context results panel: draggable, table visualizer by default, with
 * controls for visualizer options, filters, ordering and pagination. Each row
 * carries a «+» toggle revealing the properties that did not fit as columns.
 * Several panels can coexist; each owns its DOM subtree.
 */

import type { StudioApi } from "./api.js";
import { makeDraggable } from "./draggable.js";
import type { ResultSetJson, TableModelJson } from "./types.js";

export interface OverlayOptions {
  columns?: string[];
  maxColumns?: number;
}

export interface OverlayState {
  resultSet: ResultSetJson | null;
  table: TableModelJson | null;
  visualizerId: string;
  options: OverlayOptions;
  activeFilters: string[];
  activeOrdering: string | null;
  expandedRows: Set<number>;
  keywords: string;
  page: number;
  lastError: string | null;
}

const PANEL_STYLE =
  "position:absolute;left:120px;top:80px;min-width:320px;background:#fff;" +
  "border:1px solid #444;box-shadow:0 4px 14px rgba(0,0,0,.25);z-index:99999;" +
  "font:13px sans-serif;";

let panelCounter = 0;

export class OverlayPanel {
  readonly state: OverlayState = {
    resultSet: null,
    table: null,
    visualizerId: "table_of_properties",
    options: { maxColumns: 2 },
    activeFilters: [],
    activeOrdering: null,
    expandedRows: new Set(),
    keywords: "",
    page: 1,
    lastError: null,
  };
  readonly root: HTMLElement;
  private readonly body: HTMLElement;
  private readonly status: HTMLElement;
  private releaseDrag: () => void;

  constructor(
    private readonly api: StudioApi,
    hostDocument: Document,
    private readonly service: { id: string; name: string },
  ) {
    panelCounter += 1;
    this.root = hostDocument.createElement("div");
    this.root.className = "svc-overlay-panel";
    this.root.id = `svc-overlay-${panelCounter}`;
    this.root.setAttribute("style", PANEL_STYLE);

    const header = hostDocument.createElement("div");
    header.className = "svc-overlay-header";
    header.textContent = service.name;
    header.setAttribute(
      "style",
      "padding:6px 8px;background:#333;color:#fff;display:flex;justify-content:space-between;",
    );
    const close = hostDocument.createElement("button");
    close.className = "svc-overlay-close";
    close.textContent = "×";
    close.addEventListener("click", () => this.dispose());
    header.appendChild(close);

    this.status = hostDocument.createElement("div");
    this.status.className = "svc-overlay-status";
    this.body = hostDocument.createElement("div");
    this.body.className = "svc-overlay-body";

    this.root.appendChild(header);
    this.root.appendChild(this.status);
    this.root.appendChild(this.body);
    hostDocument.body.appendChild(this.root);
    this.releaseDrag = makeDraggable(this.root, header);
  }

  dispose(): void {
    this.releaseDrag();
    this.root.remove();
  }

  // -- state transitions ----------------------------------------------------

  async search(keywords: string, page = 1): Promise<void> {
    this.state.keywords = keywords;
    this.state.page = page;
    this.state.expandedRows.clear();
    await this.refresh();
  }

  async setOptions(options: OverlayOptions): Promise<void> {
    this.state.options = { ...this.state.options, ...options };
    await this.refresh();
  }

  async toggleFilter(name: string): Promise<void> {
    const active = this.state.activeFilters;
    this.state.activeFilters = active.includes(name)
      ? active.filter((n) => n !== name)
      : [...active, name];
    this.state.page = 1;
    await this.refresh();
  }

  async setOrdering(name: string | null): Promise<void> {
    this.state.activeOrdering = name;
    await this.refresh();
  }

  async nextPage(): Promise<void> {
    if (!this.state.resultSet?.page.has_next) return;
    this.state.page += 1;
    await this.refresh();
  }

  async prevPage(): Promise<void> {
    if (!this.state.resultSet?.page.has_prev) return;
    this.state.page -= 1;
    await this.refresh();
  }

  toggleRow(index: number): void {
    if (!this.state.resultSet) return;
    if (index < 0 || index >= this.state.resultSet.items.length) {
      throw new Error(`row ${index} is not in the active result set`);
    }
    if (this.state.expandedRows.has(index)) {
      this.state.expandedRows.delete(index);
    } else {
      this.state.expandedRows.add(index);
    }
    this.renderTable();
  }

  private async refresh(): Promise<void> {
    const payload = {
      keywords: this.state.keywords,
      filters: this.state.activeFilters,
      ordering: this.state.activeOrdering,
      page: this.state.page,
    };
    const options: Record<string, unknown> = {};
    if (this.state.options.columns) options.columns = this.state.options.columns;
    if (this.state.options.maxColumns !== undefined) {
      options.max_columns = this.state.options.maxColumns;
    }
    try {
      this.state.resultSet = await this.api.search(this.service.id, payload);
      this.state.table = await this.api.renderTable(
        this.service.id,
        payload,
        options,
      );
      this.state.lastError = null;
    } catch (error) {
      this.state.lastError = error instanceof Error ? error.message : String(error);
      this.status.textContent = this.state.lastError;
      return;
    }
    const expanded = [...this.state.expandedRows].filter(
      (i) => i < (this.state.resultSet?.items.length ?? 0),
    );
    this.state.expandedRows = new Set(expanded);
    this.renderTable();
  }

  // -- DOM ------------------------------------------------------------------

  private renderTable(): void {
    const doc = this.root.ownerDocument;
    this.body.textContent = "";
    const table = this.state.table;
    const resultSet = this.state.resultSet;
    if (!table || !resultSet) return;

    this.status.textContent =
      `${resultSet.items.length} results (page ${resultSet.page.page_index})`;

    const tableEl = doc.createElement("table");
    tableEl.className = "svc-overlay-table";
    const head = doc.createElement("tr");
    head.appendChild(doc.createElement("th")); // the «+» column
    for (const column of table.columns) {
      const th = doc.createElement("th");
      th.textContent = column;
      head.appendChild(th);
    }
    tableEl.appendChild(head);

    table.rows.forEach((row, index) => {
      const tr = doc.createElement("tr");
      tr.className = "svc-overlay-row";
      const expandCell = doc.createElement("td");
      const expand = doc.createElement("button");
      expand.className = "svc-expand";
      expand.textContent = this.state.expandedRows.has(index) ? "−" : "+";
      expand.addEventListener("click", () => this.toggleRow(index));
      expandCell.appendChild(expand);
      tr.appendChild(expandCell);
      for (const cell of row) {
        const td = doc.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      tableEl.appendChild(tr);

      if (this.state.expandedRows.has(index)) {
        const detail = doc.createElement("tr");
        detail.className = "svc-overlay-overflow";
        const td = doc.createElement("td");
        td.colSpan = table.columns.length + 1;
        const overflow = table.overflow[index] ?? {};
        for (const [name, value] of Object.entries(overflow)) {
          const line = doc.createElement("div");
          line.className = "svc-overflow-entry";
          line.textContent = `${name}: ${value}`;
          td.appendChild(line);
        }
        detail.appendChild(td);
        tableEl.appendChild(detail);
      }
    });
    this.body.appendChild(tableEl);

    const pager = doc.createElement("div");
    pager.className = "svc-overlay-pager";
    const prev = doc.createElement("button");
    prev.className = "svc-prev";
    prev.textContent = "‹ prev";
    prev.disabled = !resultSet.page.has_prev;
    prev.addEventListener("click", () => void this.prevPage());
    const next = doc.createElement("button");
    next.className = "svc-next";
    next.textContent = "next ›";
    next.disabled = !resultSet.page.has_next;
    next.addEventListener("click", () => void this.nextPage());
    pager.appendChild(prev);
    pager.appendChild(next);
    this.body.appendChild(pager);
  }
}
