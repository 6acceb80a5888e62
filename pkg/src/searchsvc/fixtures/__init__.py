"""Deterministic local search engines over a fixed dataset, plus the
brute-force oracle used by tests."""

from .data import PAGE_SIZE, Record, citation_text, detail_path, ground_truth, load_dataset
from .server import FixtureServer, serve
from .specs import (
    JSON_PROVIDER_ID,
    ajax_spec,
    api_spec,
    draft_of,
    form_spec,
    keystroke_spec,
    scroll_draft,
)

__all__ = [
    "PAGE_SIZE",
    "Record",
    "FixtureServer",
    "JSON_PROVIDER_ID",
    "ajax_spec",
    "api_spec",
    "citation_text",
    "detail_path",
    "draft_of",
    "form_spec",
    "ground_truth",
    "keystroke_spec",
    "load_dataset",
    "scroll_draft",
    "serve",
]
