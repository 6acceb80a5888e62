import { describe, expect, it } from "vitest";

import { nodePathOf, resolveNodePath } from "../src/nodePath.js";
import { PickSession } from "../src/pickSession.js";
import { pickedMeta } from "../src/picker.js";
import {
  buildServiceSpec,
  modifierFromHref,
  relativeCssPath,
} from "../src/specBuilder.js";
import type { SelectorSuggestionJson } from "../src/types.js";

const SNAPSHOT = `<html><head><title>s</title></head><body>
<header>
  <form id="f" action="/form/results" method="get">
    <input id="search-box" name="q">
    <button id="search-go">Search</button>
  </form>
  <nav class="filters"><a class="filter-journal" href="/form/results?q=&venue=journal">Journal only</a></nav>
</header>
<ul class="results">
  <li class="result"><h3 class="title"><a class="target" href="/detail/b01">One</a></h3><span class="rating">4.6</span></li>
  <li class="result"><h3 class="title"><a class="target" href="/detail/b02">Two</a></h3><span class="rating">4.3</span></li>
</ul>
</body></html>`;

function parse(): Document {
  return new DOMParser().parseFromString(SNAPSHOT, "text/html");
}

function suggestionFor(expression: string, count = 1): SelectorSuggestionJson {
  return {
    selector: { kind: "css", expression, expect_many: count > 1 },
    match_count: count,
    specificity: count > 1 ? "generalized" : "unique",
    rank: 0,
  };
}

function sessionOver(doc: Document): PickSession {
  const session = new PickSession("snap-1", "http://127.0.0.1:9/form/results?q=");
  session.draftName = "GoodReads fixture";
  session.resultTypeName = "Book rating";
  const pick = (selector: string) => {
    const el = doc.querySelector(selector);
    if (!el) throw new Error(`test snapshot lacks ${selector}`);
    return el;
  };
  session.assign("input", {
    suggestion: suggestionFor("#search-box"),
    meta: pickedMeta(pick("#search-box")),
  });
  session.assign("trigger", {
    suggestion: suggestionFor("#search-go"),
    meta: pickedMeta(pick("#search-go")),
  });
  session.assign("result_container", {
    suggestion: suggestionFor("li.result", 2),
    meta: pickedMeta(doc.querySelectorAll("li.result")[1]!),
  });
  const exemplar = doc.querySelectorAll("li.result")[1]!;
  session.assignNamed("property", "Title", {
    suggestion: suggestionFor("html > body > ul > li:nth-child(2) > h3 > a"),
    meta: pickedMeta(exemplar.querySelector(".title a")!),
  });
  session.assignNamed("property", "Rating", {
    suggestion: suggestionFor("html > body > ul > li:nth-child(2) > span"),
    meta: pickedMeta(exemplar.querySelector(".rating")!),
  });
  session.assignNamed("filter", "Journal only", {
    suggestion: suggestionFor("a.filter-journal"),
    meta: pickedMeta(pick("a.filter-journal")),
  });
  return session;
}

describe("relativeCssPath", () => {
  it("prefers class anchors", () => {
    const doc = parse();
    const card = doc.querySelectorAll("li.result")[1]!;
    const anchor = card.querySelector("a")!;
    expect(relativeCssPath(card, anchor)).toBe("h3.title > a.target");
    expect(relativeCssPath(card, card.querySelector(".rating")!)).toBe(
      "span.rating",
    );
  });

  it("throws for nodes outside the ancestor", () => {
    const doc = parse();
    const card = doc.querySelectorAll("li.result")[1]!;
    expect(() => relativeCssPath(card, doc.querySelector("#search-box")!)).toThrow();
  });
});

describe("modifierFromHref", () => {
  it("keeps only the parameters the anchor adds", () => {
    const modifier = modifierFromHref(
      "/form/results?q=&venue=journal&page=2",
      "http://127.0.0.1:9/form/results?q=",
    );
    expect(modifier).toEqual({ param_set: [["venue", "journal"]] });
  });

  it("rejects anchors that add nothing", () => {
    expect(() =>
      modifierFromHref("/form/results?q=", "http://127.0.0.1:9/form/results?q="),
    ).toThrow();
  });
});

describe("buildServiceSpec", () => {
  it("emits exactly the backend schema", () => {
    const doc = parse();
    const spec = buildServiceSpec(sessionOver(doc), {
      snapshotDoc: doc,
      resolveElement: (path) => resolveNodePath(doc, path),
    });

    expect(spec.name).toBe("GoodReads fixture");
    expect(spec.strategy).toBeNull();
    expect(spec.binding.search_page_url).toBe("http://127.0.0.1:9/form/results?q=");
    expect(spec.binding.input).toEqual({
      kind: "css",
      expression: "#search-box",
      expect_many: false,
    });
    expect(spec.binding.reveal).toBeNull();

    expect(spec.result_spec.type_name).toBe("Book rating");
    expect(spec.result_spec.container.expect_many).toBe(true);
    expect(spec.result_spec.target_url).toEqual({
      name: "url",
      location: "in_result",
      selector: { kind: "css", expression: "h3.title > a.target", expect_many: false },
      extract: { attribute: "href" },
    });
    expect(spec.result_spec.properties).toEqual([
      {
        name: "Title",
        location: "in_result",
        selector: { kind: "css", expression: "h3.title > a.target", expect_many: false },
        extract: "text",
      },
      {
        name: "Rating",
        location: "in_result",
        selector: { kind: "css", expression: "span.rating", expect_many: false },
        extract: "text",
      },
    ]);
    expect(spec.filters.groups).toEqual([
      {
        group_name: "filters",
        exclusive: true,
        conditions: [
          {
            name: "Journal only",
            activation: { param_set: [["venue", "journal"]] },
          },
        ],
      },
    ]);
    expect(Object.keys(spec).sort()).toEqual([
      "binding", "filters", "name", "orderings", "result_spec", "strategy",
    ]);
  });

  it("refuses to build an incomplete session", () => {
    const doc = parse();
    const session = new PickSession("snap", "http://h/p");
    expect(() =>
      buildServiceSpec(session, {
        snapshotDoc: doc,
        resolveElement: (path) => resolveNodePath(doc, path),
      }),
    ).toThrow(/missing/);
  });
});
