"""XPath subset: child and descendant axes, attribute predicates and
positional predicates.

Supported forms: absolute paths (/a/b, //a), relative paths (a/b, ./a, .//a),
name tests or *, and predicates [n], [last()], [@attr], [@attr='v'],
[contains(@attr,'v')]. Positional predicates follow the standard semantics:
positions are counted within each context node's candidate list.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..dom import HtmlElement
from ..errors import SelectorParseError

_NAME = re.compile(r"[_a-zA-Z][-._a-zA-Z0-9]*")
_WS = re.compile(r"\s*")


@dataclass(frozen=True)
class Predicate:
    kind: str  # "index" | "last" | "attr" | "attr-eq" | "attr-contains"
    index: int = 0
    attr: str = ""
    value: str = ""

    def accepts(self, el: HtmlElement, position: int, size: int) -> bool:
        if self.kind == "index":
            return position == self.index
        if self.kind == "last":
            return position == size + self.index  # index holds the offset (<= 0)
        actual = el.get(self.attr)
        if self.kind == "attr":
            return actual is not None
        if self.kind == "attr-eq":
            return actual == self.value
        if self.kind == "attr-contains":
            return actual is not None and self.value in actual
        return False

    def is_positional(self) -> bool:
        return self.kind in ("index", "last")


@dataclass(frozen=True)
class Step:
    axis: str  # "child" | "descendant"
    name: str  # tag name or "*" or "." (context node)
    predicates: tuple[Predicate, ...] = ()


@dataclass(frozen=True)
class XPath:
    absolute: bool
    steps: tuple[Step, ...]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def skip_ws(self):
        self.pos = _WS.match(self.text, self.pos).end()

    def startswith(self, token: str) -> bool:
        return self.text.startswith(token, self.pos)

    def take(self, token: str) -> bool:
        if self.startswith(token):
            self.pos += len(token)
            return True
        return False

    def expect(self, token: str):
        if not self.take(token):
            raise SelectorParseError(
                f"expected {token!r} at position {self.pos} in {self.text!r}"
            )

    def name(self) -> str:
        m = _NAME.match(self.text, self.pos)
        if not m:
            raise SelectorParseError(
                f"expected name at position {self.pos} in {self.text!r}"
            )
        self.pos = m.end()
        return m.group(0)

    def string_literal(self) -> str:
        quote = self.text[self.pos:self.pos + 1]
        if quote not in ("'", '"'):
            raise SelectorParseError(
                f"expected string literal at position {self.pos} in {self.text!r}"
            )
        end = self.text.find(quote, self.pos + 1)
        if end < 0:
            raise SelectorParseError(f"unterminated string in {self.text!r}")
        value = self.text[self.pos + 1:end]
        self.pos = end + 1
        return value

    def integer(self) -> int:
        m = re.match(r"[+-]?\d+", self.text[self.pos:])
        if not m:
            raise SelectorParseError(
                f"expected integer at position {self.pos} in {self.text!r}"
            )
        self.pos += m.end()
        return int(m.group(0))


def parse_xpath(text: str) -> XPath:
    if not text or not text.strip():
        raise SelectorParseError("empty xpath expression")
    scanner = _Scanner(text.strip())
    steps: list[Step] = []
    absolute = False

    if scanner.startswith(".//"):
        scanner.take(".")  # context-relative descendant: .//x
    elif scanner.take("./"):
        pass  # explicit context-relative child: ./x
    elif scanner.startswith("/"):
        absolute = True  # covers both /x and //x

    first = True
    while not scanner.eof():
        if scanner.take("//"):
            axis = "descendant"
        elif scanner.take("/"):
            axis = "child"
        elif first:
            axis = "child"
        else:
            raise SelectorParseError(
                f"unexpected {scanner.text[scanner.pos]!r} at position "
                f"{scanner.pos} in {scanner.text!r}"
            )
        first = False
        steps.append(_parse_step(scanner, axis))

    if not steps:
        raise SelectorParseError(f"no steps in xpath {text!r}")
    return XPath(absolute, tuple(steps))


def _parse_step(scanner: _Scanner, axis: str) -> Step:
    if scanner.take("*"):
        name = "*"
    elif scanner.startswith("."):
        scanner.take(".")
        name = "."
    else:
        name = scanner.name().lower()
    predicates = []
    while scanner.take("["):
        predicates.append(_parse_predicate(scanner))
        scanner.expect("]")
    return Step(axis, name, tuple(predicates))


def _parse_predicate(scanner: _Scanner) -> Predicate:
    scanner.skip_ws()
    if scanner.take("@"):
        attr = scanner.name()
        scanner.skip_ws()
        if scanner.take("="):
            scanner.skip_ws()
            value = scanner.string_literal()
            scanner.skip_ws()
            return Predicate("attr-eq", attr=attr, value=value)
        return Predicate("attr", attr=attr)
    if scanner.take("contains("):
        scanner.skip_ws()
        scanner.expect("@")
        attr = scanner.name()
        scanner.skip_ws()
        scanner.expect(",")
        scanner.skip_ws()
        value = scanner.string_literal()
        scanner.skip_ws()
        scanner.expect(")")
        scanner.skip_ws()
        return Predicate("attr-contains", attr=attr, value=value)
    if scanner.take("last()"):
        scanner.skip_ws()
        offset = 0
        if scanner.take("-"):
            scanner.skip_ws()
            offset = -scanner.integer()
            scanner.skip_ws()
        return Predicate("last", index=offset)
    if scanner.take("position()"):
        scanner.skip_ws()
        scanner.expect("=")
        scanner.skip_ws()
        n = scanner.integer()
        scanner.skip_ws()
        return Predicate("index", index=n)
    ch = scanner.text[scanner.pos:scanner.pos + 1]
    if ch.isdigit() or ch in "+-":
        n = scanner.integer()
        scanner.skip_ws()
        return Predicate("index", index=n)
    raise SelectorParseError(
        f"unsupported predicate at position {scanner.pos} in {scanner.text!r}"
    )


def _name_test(el: HtmlElement, name: str) -> bool:
    if el.tag.startswith("#"):
        return False
    return name == "*" or el.tag == name


def _candidate_groups(context: HtmlElement, step: Step) -> list[list[HtmlElement]]:
    """Candidate nodes for one step, grouped by position-counting context.

    The descendant axis expands to descendant-or-self::node()/child::name, so
    positional predicates count within each parent's child list — this is why
    the groups exist.
    """
    if step.name == ".":
        return [[context]]
    if step.axis == "child":
        kids = [c for c in context.element_children if _name_test(c, step.name)]
        return [kids] if kids else []
    groups = []
    for node in [context, *context.descendants()]:
        kids = [c for c in node.element_children if _name_test(c, step.name)]
        if kids:
            groups.append(kids)
    return groups


def _apply_predicates(nodes: list[HtmlElement], predicates) -> list[HtmlElement]:
    current = nodes
    for pred in predicates:
        size = len(current)
        current = [
            el for pos, el in enumerate(current, start=1)
            if pred.accepts(el, pos, size)
        ]
    return current


def evaluate_xpath(xpath: XPath, root: HtmlElement) -> list[HtmlElement]:
    """Evaluate against root as the context node. For absolute expressions the
    caller passes the document node (whole-document evaluation) or a scope
    element (scoped evaluation, where '/x' means a child of the scope)."""
    contexts = [root]
    for step in xpath.steps:
        gathered: list[HtmlElement] = []
        seen: set[int] = set()
        for ctx in contexts:
            for group in _candidate_groups(ctx, step):
                for el in _apply_predicates(group, step.predicates):
                    if id(el) not in seen:
                        seen.add(id(el))
                        gathered.append(el)
        contexts = gathered
        if not contexts:
            break
    return _document_order(root, contexts)


def _document_order(root: HtmlElement, nodes: list[HtmlElement]) -> list[HtmlElement]:
    if len(nodes) < 2:
        return nodes
    wanted = {id(n) for n in nodes}
    ordered = [el for el in root.iter_elements() if id(el) in wanted]
    return ordered
