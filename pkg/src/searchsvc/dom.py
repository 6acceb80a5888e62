"""HTML document model: a small element tree built on the stdlib parser.

The tree is the substrate for selector evaluation, extraction and the
studio's element picker. No scripts are ever executed; parsing is purely
structural.
"""

from __future__ import annotations

import html as html_escape
from dataclasses import dataclass, field
from html.parser import HTMLParser

from .errors import PathResolutionError

VOID_ELEMENTS = frozenset(
    "area base br col embed hr img input link meta param source track wbr".split()
)

# Tags whose open element is implicitly closed when one of the given tags starts.
_IMPLIED_CLOSERS = {
    "li": {"li"},
    "p": {"p", "div", "ul", "ol", "li", "table", "form", "section", "article",
          "header", "footer", "nav", "h1", "h2", "h3", "h4", "h5", "h6", "pre",
          "blockquote"},
    "td": {"td", "th", "tr"},
    "th": {"td", "th", "tr"},
    "tr": {"tr"},
    "option": {"option", "optgroup"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
    "thead": {"tbody", "tfoot"},
    "tbody": {"tbody", "tfoot"},
}

DOCUMENT_TAG = "#document"


class HtmlElement:
    """One element node. Children is a mixed list of HtmlElement and str (text)."""

    __slots__ = ("tag", "attrs", "parent", "children")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None,
                 parent: "HtmlElement | None" = None):
        self.tag = tag
        self.attrs: dict[str, str] = attrs or {}
        self.parent = parent
        self.children: list[HtmlElement | str] = []

    def get(self, name: str, default: str | None = None) -> str | None:
        return self.attrs.get(name, default)

    @property
    def classes(self) -> list[str]:
        return (self.attrs.get("class") or "").split()

    @property
    def element_children(self) -> list["HtmlElement"]:
        return [c for c in self.children if isinstance(c, HtmlElement)]

    def iter_elements(self):
        """Preorder traversal of self and all descendant elements."""
        yield self
        for child in self.children:
            if isinstance(child, HtmlElement):
                yield from child.iter_elements()

    def descendants(self):
        """Preorder traversal of strict descendant elements."""
        for child in self.children:
            if isinstance(child, HtmlElement):
                yield from child.iter_elements()

    def text_content(self) -> str:
        parts: list[str] = []
        for node in self.children:
            if isinstance(node, str):
                parts.append(node)
            else:
                parts.append(node.text_content())
        return "".join(parts)

    def child_index(self) -> int:
        """Index of this element among the parent's element children."""
        if self.parent is None:
            return 0
        return self.parent.element_children.index(self)

    def __repr__(self):  # pragma: no cover - debugging aid
        ident = f"#{self.attrs['id']}" if "id" in self.attrs else ""
        return f"<HtmlElement {self.tag}{ident}>"


@dataclass(frozen=True)
class NodePath:
    """Element-child indices from the document root, 0-based."""

    steps: tuple[int, ...] = ()

    def to_json(self) -> list[int]:
        return list(self.steps)

    @classmethod
    def from_json(cls, raw) -> "NodePath":
        return cls(tuple(int(s) for s in raw))


@dataclass(frozen=True)
class DocumentHandle:
    """A parsed HTML document (or fragment) plus the URL it came from."""

    base_url: str
    root: HtmlElement = field(compare=False)

    def is_full_document(self) -> bool:
        return any(el.tag in ("html", "body") for el in self.root.element_children)

    def resolve_path(self, path: NodePath) -> HtmlElement:
        node = self.root
        for depth, step in enumerate(path.steps):
            kids = node.element_children
            if step < 0 or step >= len(kids):
                raise PathResolutionError(
                    f"path step {depth} out of range ({step} of {len(kids)} children)"
                )
            node = kids[step]
        return node

    def path_of(self, node: HtmlElement) -> NodePath:
        steps: list[int] = []
        cur = node
        while cur.parent is not None:
            steps.append(cur.child_index())
            cur = cur.parent
        if cur is not self.root:
            raise PathResolutionError("node is not part of this document")
        return NodePath(tuple(reversed(steps)))


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = HtmlElement(DOCUMENT_TAG)
        self.stack = [self.root]

    def _top(self) -> HtmlElement:
        return self.stack[-1]

    def handle_starttag(self, tag, attrs):
        closers = _IMPLIED_CLOSERS.get(self._top().tag)
        if closers and tag in closers:
            self.stack.pop()
        attr_map: dict[str, str] = {}
        for name, value in attrs:
            attr_map.setdefault(name, value if value is not None else "")
        el = HtmlElement(tag, attr_map, parent=self._top())
        self._top().children.append(el)
        if tag not in VOID_ELEMENTS:
            self.stack.append(el)

    def handle_startendtag(self, tag, attrs):
        attr_map = {n: (v if v is not None else "") for n, v in attrs}
        el = HtmlElement(tag, attr_map, parent=self._top())
        self._top().children.append(el)

    def handle_endtag(self, tag):
        if tag in VOID_ELEMENTS:
            return
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray end tag: ignored

    def handle_data(self, data):
        if data:
            self._top().children.append(data)


def parse_html(text: str, base_url: str = "") -> DocumentHandle:
    builder = _TreeBuilder()
    builder.feed(text)
    builder.close()
    return DocumentHandle(base_url=base_url, root=builder.root)


def _serialize_attrs(attrs: dict[str, str]) -> str:
    out = []
    for name, value in attrs.items():
        out.append(f' {name}="{html_escape.escape(value, quote=True)}"')
    return "".join(out)


_RAW_TEXT_TAGS = frozenset({"script", "style"})


def to_html(node: HtmlElement | str) -> str:
    """Serialize a node back to markup. Text is escaped except inside raw-text tags."""
    if isinstance(node, str):
        return html_escape.escape(node, quote=False)
    if node.tag == DOCUMENT_TAG:
        return inner_html(node)
    attrs = _serialize_attrs(node.attrs)
    if node.tag in VOID_ELEMENTS:
        return f"<{node.tag}{attrs}>"
    if node.tag in _RAW_TEXT_TAGS:
        body = "".join(c if isinstance(c, str) else to_html(c) for c in node.children)
        return f"<{node.tag}{attrs}>{body}</{node.tag}>"
    return f"<{node.tag}{attrs}>{inner_html(node)}</{node.tag}>"


def inner_html(node: HtmlElement) -> str:
    return "".join(to_html(c) for c in node.children)


def sanitize_html(text: str) -> str:
    """Strip script elements and on* event attributes, return clean markup."""
    doc = parse_html(text)
    _sanitize_node(doc.root)
    return to_html(doc.root)


def _sanitize_node(node: HtmlElement) -> None:
    node.children = [
        c for c in node.children
        if not (isinstance(c, HtmlElement) and c.tag == "script")
    ]
    for name in [n for n in node.attrs if n.lower().startswith("on")]:
        del node.attrs[name]
    for child in node.children:
        if isinstance(child, HtmlElement):
            _sanitize_node(child)
