/**
 * Turns a finished pick session into a service spec JSON object containing
 * exactly the backend schema's fields, nothing invented.
 */

import type { PickSession, RoleAssignment } from "./pickSession.js";
import type {
  ConditionJson,
  OrderingSpecJson,
  PropertySpecJson,
  RequestModifierJson,
  SelectorJson,
  ServiceSpecJson,
} from "./types.js";

/** css path from an ancestor to a descendant, preferring class anchors. */
export function relativeCssPath(ancestor: Element, node: Element): string {
  const segments: string[] = [];
  let current: Element | null = node;
  while (current && current !== ancestor) {
    const tag = current.tagName.toLowerCase();
    const classes = [...current.classList].filter((c) =>
      /^-?[_a-zA-Z][_a-zA-Z0-9-]*$/.test(c),
    );
    let segment: string;
    if (classes.length) {
      segment = tag + classes.map((c) => `.${c}`).join("");
    } else {
      segment = tag;
      const parent: Element | null = current.parentElement;
      if (parent && parent.children.length > 1) {
        const index =
          Array.prototype.indexOf.call(parent.children, current) + 1;
        segment += `:nth-child(${index})`;
      }
    }
    segments.unshift(segment);
    current = current.parentElement;
  }
  if (current !== ancestor) {
    throw new Error("node is not inside the picked result container");
  }
  return segments.join(" > ");
}

/** The result link: first anchor with an href inside the container exemplar. */
export function deriveTargetUrlProperty(container: Element): PropertySpecJson {
  const anchor = container.querySelector("a[href]");
  if (!anchor) {
    throw new Error("result container has no link to the result's own page");
  }
  return {
    name: "url",
    location: "in_result",
    selector: {
      kind: "css",
      expression: relativeCssPath(container, anchor) || "a",
      expect_many: false,
    },
    extract: { attribute: "href" },
  };
}

/**
 * A filter/ordering anchor becomes a request modifier: the query parameters
 * its href adds on top of the page URL (empty values and paging are the
 * query/page machinery, not the filter).
 */
export function modifierFromHref(
  href: string,
  pageUrl: string,
): RequestModifierJson {
  const target = new URL(href, pageUrl);
  const params: [string, string][] = [];
  for (const [name, value] of target.searchParams.entries()) {
    if (!value || name === "page") continue;
    params.push([name, value]);
  }
  if (!params.length) {
    throw new Error(`anchor ${href} adds no parameters to derive a modifier from`);
  }
  return { param_set: params };
}

function selectorOf(assignment: RoleAssignment | undefined): SelectorJson | null {
  return assignment ? assignment.suggestion.selector : null;
}

export interface BuildContext {
  /** The rendered snapshot, used to derive container-relative pieces. */
  snapshotDoc: Document;
  resolveElement: (nodePath: number[]) => Element;
}

export function buildServiceSpec(
  session: PickSession,
  context: BuildContext,
): ServiceSpecJson {
  const missing = session.missingRoles();
  if (missing.length) {
    throw new Error(`definition incomplete: missing ${missing.join(", ")}`);
  }
  const containerAssignment = session.get("result_container")!;
  const containerExemplar = context.resolveElement(
    containerAssignment.meta.nodePath,
  );

  const properties: PropertySpecJson[] = session
    .namedAssignments("property")
    .map((assignment) => {
      const node = context.resolveElement(assignment.meta.nodePath);
      return {
        name: assignment.name,
        location: "in_result" as const,
        selector: {
          kind: "css" as const,
          expression: relativeCssPath(containerExemplar, node),
          expect_many: false,
        },
        extract: "text" as const,
      };
    });

  const conditions: ConditionJson[] = session
    .namedAssignments("filter")
    .map((assignment) => {
      if (!assignment.meta.href) {
        throw new Error(`filter ${assignment.name} is not an anchor`);
      }
      return {
        name: assignment.name,
        activation: modifierFromHref(assignment.meta.href, session.pageUrl),
      };
    });

  const orderings: OrderingSpecJson[] = session
    .namedAssignments("ordering")
    .map((assignment) => {
      if (!assignment.meta.href) {
        throw new Error(`ordering ${assignment.name} is not an anchor`);
      }
      return {
        name: assignment.name,
        mode: { remote: modifierFromHref(assignment.meta.href, session.pageUrl) },
      };
    });

  const container = containerAssignment.suggestion.selector;
  return {
    name: session.draftName,
    binding: {
      search_page_url: session.pageUrl,
      input: session.get("input")!.suggestion.selector,
      trigger: selectorOf(session.get("trigger")),
      next_page: selectorOf(session.get("next_page")),
      prev_page: selectorOf(session.get("prev_page")),
      reveal: selectorOf(session.get("reveal")),
    },
    strategy: null,
    result_spec: {
      type_name: session.resultTypeName || session.draftName,
      container: { ...container, expect_many: true },
      target_url: deriveTargetUrlProperty(containerExemplar),
      properties,
    },
    filters: conditions.length
      ? { groups: [{ group_name: "filters", exclusive: true, conditions }] }
      : { groups: [] },
    orderings,
  };
}
