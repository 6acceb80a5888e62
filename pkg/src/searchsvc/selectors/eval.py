"""Selector evaluation entry points: dispatch a Selector to the css or xpath
engine, with whole-document or subtree scoping."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..dom import DocumentHandle, HtmlElement
from ..errors import SelectorParseError
from .css import evaluate_css, parse_selector
from .xpath import evaluate_xpath, parse_xpath

if TYPE_CHECKING:  # only for annotations; model imports this package lazily
    from ..model import Selector


def evaluate(selector: "Selector", scope: DocumentHandle | HtmlElement) -> list[HtmlElement]:
    """All nodes matched by the selector, in document order.

    Passing a DocumentHandle evaluates over the whole document; passing an
    element scopes matching to its subtree (the element itself is excluded).
    Uniqueness of expect_many=False selectors is the caller's concern: every
    match is returned.
    """
    root = scope.root if isinstance(scope, DocumentHandle) else scope
    if selector.kind == "css":
        return evaluate_css(parse_selector(selector.expression), root)
    if selector.kind == "xpath":
        return evaluate_xpath(parse_xpath(selector.expression), root)
    raise SelectorParseError(f"unknown selector kind {selector.kind!r}")


def check_expression(kind: str, expression: str) -> str | None:
    """Parse-check an expression; returns the error message, or None when ok."""
    try:
        if kind == "css":
            parse_selector(expression)
        elif kind == "xpath":
            parse_xpath(expression)
        else:
            return f"unknown selector kind {kind!r}"
    except SelectorParseError as exc:
        return str(exc)
    return None
