/**
 * Orchestrates a definition session: load a proxied snapshot, pick elements
 * into roles, finalize (save + automatic strategy detection), then run
 * in-context searches through the overlay panel.
 */

import { ApiError, StudioApi } from "./api.js";
import { resolveNodePath } from "./nodePath.js";
import { OverlayPanel } from "./overlay.js";
import {
  PickSession,
  type NamedRoleKind,
  type RoleAssignment,
  type SingletonRole,
} from "./pickSession.js";
import { pickedMeta, previewMatches } from "./picker.js";
import { buildServiceSpec } from "./specBuilder.js";
import type {
  SelectorSuggestionJson,
  ServiceSpecJson,
  SnapshotJson,
  StrategyConfigJson,
} from "./types.js";

export interface FinalizeOutcome {
  id: string;
  strategy: StrategyConfigJson;
  warnings: string[];
}

export class StudioController {
  session: PickSession | null = null;
  snapshot: SnapshotJson | null = null;
  snapshotDoc: Document | null = null;
  lastFailure: string | null = null;

  constructor(
    readonly api: StudioApi,
    private readonly parseHtml: (html: string) => Document,
  ) {}

  /** Fetch a page through the backend proxy and start a pick session on it. */
  async loadPage(url: string): Promise<Document> {
    this.snapshot = await this.api.fetchSnapshot(url);
    this.snapshotDoc = this.parseHtml(this.snapshot.sanitized_html);
    this.session = new PickSession(this.snapshot.snapshot_id, this.snapshot.url);
    return this.snapshotDoc;
  }

  private requireSession(): PickSession {
    if (!this.session) throw new Error("no page loaded");
    return this.session;
  }

  /** Click result: ranked suggestions for the element the user picked. */
  async suggestionsFor(element: Element): Promise<SelectorSuggestionJson[]> {
    const session = this.requireSession();
    const meta = pickedMeta(element);
    return this.api.suggestSelectors(session.snapshotId, meta.nodePath);
  }

  assignRole(
    role: SingletonRole,
    element: Element,
    suggestion: SelectorSuggestionJson,
  ): RoleAssignment {
    const assignment = { suggestion, meta: pickedMeta(element) };
    this.requireSession().assign(role, assignment);
    if (role === "result_container" && this.snapshotDoc) {
      // choosing a generalized selector previews every matched instance
      previewMatches(this.snapshotDoc, suggestion.selector, element);
    }
    return assignment;
  }

  assignNamedRole(
    kind: NamedRoleKind,
    name: string,
    element: Element,
    suggestion: SelectorSuggestionJson,
  ): RoleAssignment {
    const assignment = { suggestion, meta: pickedMeta(element) };
    this.requireSession().assignNamed(kind, name, assignment);
    return assignment;
  }

  buildSpec(): ServiceSpecJson {
    const session = this.requireSession();
    const doc = this.snapshotDoc;
    if (!doc) throw new Error("no snapshot document");
    return buildServiceSpec(session, {
      snapshotDoc: doc,
      resolveElement: (path) => resolveNodePath(doc, path),
    });
  }

  /**
   * Save the drafted service, then let the backend probe which execution
   * strategy applies. A 422 is surfaced verbatim as the failure reason.
   */
  async finalizeService(
    probeA: string,
    probeB: string,
  ): Promise<FinalizeOutcome | null> {
    const spec = this.buildSpec();
    const created = await this.api.createService(spec);
    try {
      const strategy = await this.api.detectStrategy(created.id, probeA, probeB);
      this.lastFailure = null;
      return { id: created.id, strategy, warnings: created.warnings };
    } catch (error) {
      if (error instanceof ApiError) {
        this.lastFailure = error.message; // shown verbatim in the studio
        return null;
      }
      throw error;
    }
  }

  /** Services available to the ancillary-search runner menu. */
  async serviceMenu(): Promise<{ id: string; name: string }[]> {
    const services = await this.api.listServices();
    return services.map((s) => ({ id: s.id ?? "", name: s.name }));
  }

  openSearchPanel(
    hostDocument: Document,
    service: { id: string; name: string },
  ): OverlayPanel {
    return new OverlayPanel(this.api, hostDocument, service);
  }

  /** Text-selection entry point: search the selected words with a service. */
  async searchSelection(
    hostDocument: Document,
    service: { id: string; name: string },
    selectedText: string,
  ): Promise<OverlayPanel> {
    const panel = this.openSearchPanel(hostDocument, service);
    await panel.search(selectedText.trim());
    return panel;
  }
}
