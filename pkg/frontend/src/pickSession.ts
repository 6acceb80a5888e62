/**
 * One service-definition session: which page element plays which role.
 *
 * Singleton roles hold at most one choice (a re-pick replaces the previous
 * one); property/filter/ordering roles are keyed by a user-entered name.
 * Assignments capture the picked element's anchor href and text so the spec
 * builder can derive request modifiers without re-evaluating selectors.
 */

import type { SelectorSuggestionJson } from "./types.js";

export const SINGLETON_ROLES = [
  "input",
  "trigger",
  "next_page",
  "prev_page",
  "reveal",
  "result_container",
] as const;

export type SingletonRole = (typeof SINGLETON_ROLES)[number];
export type NamedRoleKind = "property" | "filter" | "ordering";

export interface PickedElementMeta {
  nodePath: number[];
  href?: string;
  text?: string;
  /** css path of the node relative to the picked result container, if any */
  relativeCss?: string;
}

export interface RoleAssignment {
  suggestion: SelectorSuggestionJson;
  meta: PickedElementMeta;
}

export interface NamedAssignment extends RoleAssignment {
  name: string;
}

export class PickSession {
  draftName = "";
  resultTypeName = "";
  private singletons = new Map<SingletonRole, RoleAssignment>();
  private named = new Map<NamedRoleKind, Map<string, NamedAssignment>>([
    ["property", new Map()],
    ["filter", new Map()],
    ["ordering", new Map()],
  ]);

  constructor(
    public readonly snapshotId: string,
    public readonly pageUrl: string,
  ) {}

  assign(role: SingletonRole, assignment: RoleAssignment): void {
    this.singletons.set(role, assignment); // second choice replaces the first
  }

  get(role: SingletonRole): RoleAssignment | undefined {
    return this.singletons.get(role);
  }

  assignNamed(kind: NamedRoleKind, name: string, assignment: RoleAssignment): void {
    if (!name.trim()) throw new Error(`${kind} role needs a name`);
    this.named.get(kind)!.set(name, { ...assignment, name });
  }

  namedAssignments(kind: NamedRoleKind): NamedAssignment[] {
    return [...this.named.get(kind)!.values()];
  }

  /** The mandatory pieces before a service can be finalized. */
  missingRoles(): string[] {
    const missing: string[] = [];
    if (!this.singletons.has("input")) missing.push("input");
    if (!this.singletons.has("result_container")) missing.push("result_container");
    if (this.namedAssignments("property").length === 0) missing.push("property");
    if (!this.draftName.trim()) missing.push("service name");
    return missing;
  }
}
