"""Selector suggestion from a picked node, and generalization of selectors to
cover structurally similar siblings (same tag, same parent)."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace as dc_replace

from ..dom import DOCUMENT_TAG, DocumentHandle, HtmlElement, NodePath
from ..model import Selector
from . import css as css_mod
from . import xpath as xpath_mod
from .eval import evaluate

_CSS_SAFE_IDENT = re.compile(r"^-?[_a-zA-Z][_a-zA-Z0-9-]*$")


@dataclass(frozen=True)
class SelectorSuggestion:
    selector: Selector
    match_count: int
    specificity: str  # "unique" | "generalized"
    rank: int

    def to_json(self) -> dict:
        return {
            "selector": {
                "kind": self.selector.kind,
                "expression": self.selector.expression,
                "expect_many": self.selector.expect_many,
            },
            "match_count": self.match_count,
            "specificity": self.specificity,
            "rank": self.rank,
        }


def default_rank_key(candidate: tuple[Selector, int, str]):
    """Prefer id anchors, then class anchors, then the shortest expression."""
    selector, _count, anchor = candidate
    anchor_order = {"id": 0, "class": 1, "path": 2}
    return (anchor_order.get(anchor, 3), len(selector.expression),
            selector.expression)


def _element_chain(node: HtmlElement) -> list[HtmlElement]:
    chain: list[HtmlElement] = []
    cur: HtmlElement | None = node
    while cur is not None and cur.tag != DOCUMENT_TAG:
        chain.append(cur)
        cur = cur.parent
    chain.reverse()
    return chain


def _css_path_segments(chain: list[HtmlElement]) -> list[str]:
    segments = []
    for el in chain:
        seg = el.tag
        parent = el.parent
        if parent is not None and len(parent.element_children) > 1:
            seg += f":nth-child({parent.element_children.index(el) + 1})"
        segments.append(seg)
    return segments


def _xpath_path_segments(chain: list[HtmlElement]) -> list[str]:
    segments = []
    for el in chain:
        seg = el.tag
        parent = el.parent
        if parent is not None:
            same_tag = [c for c in parent.element_children if c.tag == el.tag]
            if len(same_tag) > 1:
                seg += f"[{same_tag.index(el) + 1}]"
        segments.append(seg)
    return segments


def _similar_siblings(node: HtmlElement) -> list[HtmlElement]:
    if node.parent is None:
        return [node]
    return [c for c in node.parent.element_children if c.tag == node.tag]


def suggest_selectors(doc: DocumentHandle, path: NodePath,
                      rank_key=default_rank_key) -> list[SelectorSuggestion]:
    """Ranked selector candidates for the node at path.

    Always contains a unique candidate that evaluates to exactly that node;
    when the node has structurally similar siblings it also contains a
    generalized candidate matching all of them.
    """
    node = doc.resolve_path(path)
    chain = _element_chain(node)
    candidates: list[tuple[Selector, str]] = []  # (selector, anchor kind)

    node_id = node.get("id")
    if node_id:
        if _CSS_SAFE_IDENT.match(node_id):
            candidates.append((Selector("css", f"#{node_id}"), "id"))
        quote = '"' if "'" in node_id else "'"
        candidates.append(
            (Selector("xpath", f"//*[@id={quote}{node_id}{quote}]"), "id"))

    classes = [c for c in node.classes if _CSS_SAFE_IDENT.match(c)]
    if classes:
        candidates.append(
            (Selector("css", node.tag + "".join(f".{c}" for c in classes)), "class"))

    css_segments = _css_path_segments(chain)
    candidates.append((Selector("css", " > ".join(css_segments)), "path"))
    xpath_segments = _xpath_path_segments(chain)
    candidates.append((Selector("xpath", "/" + "/".join(xpath_segments)), "path"))

    siblings = _similar_siblings(node)
    if len(siblings) > 1:
        loose_css = " > ".join(css_segments[:-1] + [node.tag])
        candidates.append((Selector("css", loose_css, expect_many=True), "path"))
        loose_xpath = "/" + "/".join(xpath_segments[:-1] + [node.tag])
        candidates.append((Selector("xpath", loose_xpath, expect_many=True), "path"))

    scored: list[tuple[Selector, int, str]] = []
    seen: set[tuple[str, str]] = set()
    for selector, anchor in candidates:
        key = (selector.kind, selector.expression)
        if key in seen:
            continue
        seen.add(key)
        matches = evaluate(selector, doc)
        if node not in matches:
            continue  # unsound candidate; never surface it
        scored.append((selector, len(matches), anchor))

    scored.sort(key=rank_key)
    out = []
    for rank, (selector, count, _anchor) in enumerate(scored):
        specificity = "unique" if count == 1 else "generalized"
        out.append(SelectorSuggestion(
            selector=dc_replace(selector, expect_many=count > 1),
            match_count=count,
            specificity=specificity,
            rank=rank,
        ))
    return out


# ---------------------------------------------------------------------------
# Generalization


def _quote_xpath(value: str) -> str:
    return f'"{value}"' if "'" in value else f"'{value}'"


def _render_xpath_predicate(pred: xpath_mod.Predicate) -> str:
    if pred.kind == "index":
        return f"[{pred.index}]"
    if pred.kind == "last":
        return f"[last(){pred.index}]" if pred.index else "[last()]"
    if pred.kind == "attr":
        return f"[@{pred.attr}]"
    if pred.kind == "attr-eq":
        return f"[@{pred.attr}={_quote_xpath(pred.value)}]"
    return f"[contains(@{pred.attr},{_quote_xpath(pred.value)})]"


def _render_xpath(xp: xpath_mod.XPath) -> str:
    parts: list[str] = []
    for i, step in enumerate(xp.steps):
        if step.axis == "descendant":
            parts.append("//")
        elif i > 0 or xp.absolute:
            parts.append("/")
        parts.append(step.name)
        parts.extend(_render_xpath_predicate(p) for p in step.predicates)
    return "".join(parts)


def _render_css_compound(c: css_mod.Compound) -> str:
    parts: list[str] = []
    if c.tag is not None:
        parts.append(c.tag)
    if c.id_ is not None:
        parts.append(f"#{c.id_}")
    parts.extend(f".{cls}" for cls in c.classes)
    for attr in c.attrs:
        if attr.op is None:
            parts.append(f"[{attr.name}]")
        else:
            parts.append(f'[{attr.name}{attr.op}"{attr.value}"]')
    for pseudo in c.pseudos:
        if pseudo.name == "nth-child":
            nth = pseudo.nth
            if nth.a == 0:
                arg = str(nth.b)
            else:
                a_txt = {1: "", -1: "-"}.get(nth.a, str(nth.a))
                arg = f"{a_txt}n" + (f"+{nth.b}" if nth.b > 0
                                     else str(nth.b) if nth.b < 0 else "")
            parts.append(f":nth-child({arg})")
        elif pseudo.name == "not":
            parts.append(f":not({_render_css_compound(pseudo.negated)})")
        else:
            parts.append(f":{pseudo.name}")
    if not parts:
        return "*"
    return "".join(parts)


def _render_css(group: css_mod.SelectorGroup) -> str:
    alts = []
    for alt in group.alternatives:
        text = ""
        for combinator, compound in alt.parts:
            if combinator is None:
                text = _render_css_compound(compound)
            elif combinator == " ":
                text += " " + _render_css_compound(compound)
            else:
                text += f" {combinator} " + _render_css_compound(compound)
        alts.append(text)
    return ", ".join(alts)


_POSITIONAL_CSS = ("nth-child", "first-child", "last-child")


def generalize(selector: Selector, doc: DocumentHandle) -> Selector:
    """Widen a selector to cover the picked node's structurally similar
    siblings by dropping positional constraints from its final step, keeping
    the ancestor context intact. The widened selector always matches a
    superset of the original; when nothing can be dropped the input is
    returned unchanged, so the operation is idempotent."""
    original_ids = {id(el) for el in evaluate(selector, doc)}

    def still_covers(expression: str) -> bool:
        trial = dc_replace(selector, expression=expression)
        return original_ids <= {id(el) for el in evaluate(trial, doc)}

    if selector.kind == "xpath":
        xp = xpath_mod.parse_xpath(selector.expression)
        last = xp.steps[-1]
        kept = tuple(p for p in last.predicates if not p.is_positional())
        if len(kept) == len(last.predicates):
            return selector
        trial = xpath_mod.XPath(
            xp.absolute,
            xp.steps[:-1] + (xpath_mod.Step(last.axis, last.name, kept),),
        )
        expression = _render_xpath(trial)
        if not still_covers(expression):
            return selector
    elif selector.kind == "css":
        group = css_mod.parse_selector(selector.expression)
        changed = False
        alts = []
        for alt in group.alternatives:
            comb, compound = alt.parts[-1]
            kept = tuple(p for p in compound.pseudos
                         if p.name not in _POSITIONAL_CSS)
            if len(kept) != len(compound.pseudos):
                changed = True
                alts.append(css_mod.ComplexSelector(
                    alt.parts[:-1] + ((comb, dc_replace(compound, pseudos=kept)),)
                ))
            else:
                alts.append(alt)
        if not changed:
            return selector
        expression = _render_css(css_mod.SelectorGroup(tuple(alts)))
        if not still_covers(expression):
            return selector
    else:
        return selector

    matches = evaluate(dc_replace(selector, expression=expression), doc)
    return Selector(selector.kind, expression,
                    expect_many=selector.expect_many or len(matches) > 1)
