"""CSS selector subset: type, universal, #id, .class, attribute tests,
:first-child/:last-child/:nth-child/:not, combinators (descendant, >, +, ~)
and comma-separated groups. Matching follows the public selector semantics;
anything outside this subset is a parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..dom import HtmlElement
from ..errors import SelectorParseError

_IDENT = re.compile(r"-?[_a-zA-Z][_a-zA-Z0-9-]*")
_STRING = re.compile(r"'([^']*)'|\"([^\"]*)\"")
_NTH = re.compile(
    r"\s*(?:(odd)|(even)|([+-]?\d+)\s*$|([+-]?\d*)n\s*(?:([+-])\s*(\d+))?)\s*$"
)


@dataclass(frozen=True)
class AttrTest:
    name: str
    op: str | None = None  # None = presence; else one of = ~= ^= $= *= |=
    value: str = ""

    def matches(self, el: HtmlElement) -> bool:
        actual = el.get(self.name)
        if actual is None:
            return False
        if self.op is None:
            return True
        if self.op == "=":
            return actual == self.value
        if self.op == "~=":
            return self.value in actual.split()
        if self.op == "^=":
            return bool(self.value) and actual.startswith(self.value)
        if self.op == "$=":
            return bool(self.value) and actual.endswith(self.value)
        if self.op == "*=":
            return bool(self.value) and self.value in actual
        if self.op == "|=":
            return actual == self.value or actual.startswith(self.value + "-")
        return False


@dataclass(frozen=True)
class NthChild:
    a: int
    b: int

    def matches_position(self, pos: int) -> bool:
        # pos is 1-based among element siblings
        if self.a == 0:
            return pos == self.b
        k, rem = divmod(pos - self.b, self.a)
        return rem == 0 and k >= 0


@dataclass(frozen=True)
class Pseudo:
    name: str
    nth: NthChild | None = None
    negated: "Compound | None" = None


@dataclass(frozen=True)
class Compound:
    tag: str | None = None  # None means universal
    id_: str | None = None
    classes: tuple[str, ...] = ()
    attrs: tuple[AttrTest, ...] = ()
    pseudos: tuple[Pseudo, ...] = ()

    def matches(self, el: HtmlElement) -> bool:
        if el.tag.startswith("#"):  # the synthetic document node never matches
            return False
        if self.tag is not None and el.tag != self.tag:
            return False
        if self.id_ is not None and el.get("id") != self.id_:
            return False
        el_classes = el.classes
        for cls in self.classes:
            if cls not in el_classes:
                return False
        for test in self.attrs:
            if not test.matches(el):
                return False
        for pseudo in self.pseudos:
            if not _pseudo_matches(pseudo, el):
                return False
        return True


def _sibling_position(el: HtmlElement) -> tuple[int, int]:
    if el.parent is None:
        return 1, 1
    siblings = el.parent.element_children
    return siblings.index(el) + 1, len(siblings)


def _pseudo_matches(pseudo: Pseudo, el: HtmlElement) -> bool:
    if pseudo.name == "first-child":
        return _sibling_position(el)[0] == 1
    if pseudo.name == "last-child":
        pos, total = _sibling_position(el)
        return pos == total
    if pseudo.name == "nth-child":
        return pseudo.nth.matches_position(_sibling_position(el)[0])
    if pseudo.name == "not":
        return not pseudo.negated.matches(el)
    return False


@dataclass(frozen=True)
class ComplexSelector:
    # (combinator, compound) pairs; the first combinator is None.
    parts: tuple[tuple[str | None, Compound], ...]


@dataclass(frozen=True)
class SelectorGroup:
    alternatives: tuple[ComplexSelector, ...] = field(default_factory=tuple)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> bool:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.pos > start

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.pos += 1
            return True
        return False

    def expect(self, ch: str) -> None:
        if not self.take(ch):
            raise SelectorParseError(
                f"expected {ch!r} at position {self.pos} in {self.text!r}"
            )

    def ident(self) -> str:
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise SelectorParseError(
                f"expected identifier at position {self.pos} in {self.text!r}"
            )
        self.pos = m.end()
        return m.group(0)


def parse_selector(text: str) -> SelectorGroup:
    if not text or not text.strip():
        raise SelectorParseError("empty css selector")
    scanner = _Scanner(text)
    alternatives = [_parse_complex(scanner)]
    scanner.skip_ws()
    while scanner.take(","):
        alternatives.append(_parse_complex(scanner))
        scanner.skip_ws()
    if not scanner.eof():
        raise SelectorParseError(
            f"unexpected {scanner.peek()!r} at position {scanner.pos} in {text!r}"
        )
    return SelectorGroup(tuple(alternatives))


def _parse_complex(scanner: _Scanner) -> ComplexSelector:
    scanner.skip_ws()
    parts: list[tuple[str | None, Compound]] = [(None, _parse_compound(scanner))]
    while True:
        had_ws = scanner.skip_ws()
        ch = scanner.peek()
        if ch in (">", "+", "~"):
            scanner.pos += 1
            scanner.skip_ws()
            parts.append((ch, _parse_compound(scanner)))
        elif had_ws and ch and ch != ",":
            parts.append((" ", _parse_compound(scanner)))
        else:
            break
    return ComplexSelector(tuple(parts))


def _parse_compound(scanner: _Scanner) -> Compound:
    tag: str | None = None
    id_: str | None = None
    classes: list[str] = []
    attrs: list[AttrTest] = []
    pseudos: list[Pseudo] = []
    matched = False

    if scanner.take("*"):
        matched = True
    else:
        m = _IDENT.match(scanner.text, scanner.pos)
        if m:
            tag = m.group(0).lower()
            scanner.pos = m.end()
            matched = True

    while True:
        ch = scanner.peek()
        if ch == "#":
            scanner.pos += 1
            id_ = scanner.ident()
        elif ch == ".":
            scanner.pos += 1
            classes.append(scanner.ident())
        elif ch == "[":
            scanner.pos += 1
            attrs.append(_parse_attr(scanner))
        elif ch == ":":
            scanner.pos += 1
            pseudos.append(_parse_pseudo(scanner))
        else:
            break
        matched = True

    if not matched:
        raise SelectorParseError(
            f"expected simple selector at position {scanner.pos} in {scanner.text!r}"
        )
    return Compound(tag, id_, tuple(classes), tuple(attrs), tuple(pseudos))


def _parse_attr(scanner: _Scanner) -> AttrTest:
    scanner.skip_ws()
    name = scanner.ident()
    scanner.skip_ws()
    op = None
    for candidate in ("~=", "^=", "$=", "*=", "|=", "="):
        if scanner.text.startswith(candidate, scanner.pos):
            op = candidate
            scanner.pos += len(candidate)
            break
    value = ""
    if op is not None:
        scanner.skip_ws()
        m = _STRING.match(scanner.text, scanner.pos)
        if m:
            value = m.group(1) if m.group(1) is not None else m.group(2)
            scanner.pos = m.end()
        else:
            value = scanner.ident()
        scanner.skip_ws()
    scanner.expect("]")
    return AttrTest(name, op, value)


def _parse_pseudo(scanner: _Scanner) -> Pseudo:
    name = scanner.ident().lower()
    if name in ("first-child", "last-child"):
        return Pseudo(name)
    if name == "nth-child":
        scanner.expect("(")
        end = scanner.text.find(")", scanner.pos)
        if end < 0:
            raise SelectorParseError(f"unclosed nth-child in {scanner.text!r}")
        arg = scanner.text[scanner.pos:end]
        scanner.pos = end + 1
        return Pseudo(name, nth=_parse_nth(arg))
    if name == "not":
        scanner.expect("(")
        scanner.skip_ws()
        inner = _parse_compound(scanner)
        scanner.skip_ws()
        scanner.expect(")")
        return Pseudo(name, negated=inner)
    raise SelectorParseError(f"unsupported pseudo-class :{name}")


def _parse_nth(arg: str) -> NthChild:
    m = _NTH.match(arg)
    if not m:
        raise SelectorParseError(f"bad nth-child argument {arg!r}")
    odd, even, const, a_part, sign, b_part = m.groups()
    if odd:
        return NthChild(2, 1)
    if even:
        return NthChild(2, 0)
    if const is not None:
        return NthChild(0, int(const))
    if a_part in ("", "+"):
        a = 1
    elif a_part == "-":
        a = -1
    else:
        a = int(a_part)
    b = int(b_part) if b_part else 0
    if sign == "-":
        b = -b
    return NthChild(a, b)


def _ancestors_within(el: HtmlElement, boundary: HtmlElement | None):
    cur = el.parent
    while cur is not None:
        yield cur
        if cur is boundary:
            return
        cur = cur.parent


def _matches_complex(el: HtmlElement, parts, idx: int,
                     boundary: HtmlElement | None) -> bool:
    prev_comb, compound = parts[idx]
    if not compound.matches(el):
        return False
    if idx == 0:
        return True
    if prev_comb == " ":
        return any(
            _matches_complex(anc, parts, idx - 1, boundary)
            for anc in _ancestors_within(el, boundary)
        )
    if prev_comb == ">":
        parent = el.parent
        if parent is None:
            return False
        if boundary is not None and el is boundary:
            return False
        return _matches_complex(parent, parts, idx - 1, boundary)
    if prev_comb in ("+", "~"):
        if el.parent is None or el is boundary:
            return False
        siblings = el.parent.element_children
        pos = siblings.index(el)
        if prev_comb == "+":
            return pos > 0 and _matches_complex(siblings[pos - 1], parts, idx - 1, boundary)
        return any(
            _matches_complex(siblings[i], parts, idx - 1, boundary)
            for i in range(pos)
        )
    return False


def evaluate_css(group: SelectorGroup, scope: HtmlElement) -> list[HtmlElement]:
    """Match elements in document order within scope's subtree.

    The scope element itself is never a candidate, and ancestor combinators
    never look above it (scoped-query semantics).
    """
    out = []
    for el in scope.descendants():
        for alt in group.alternatives:
            if _matches_complex(el, alt.parts, len(alt.parts) - 1, scope):
                out.append(el)
                break
    return out
