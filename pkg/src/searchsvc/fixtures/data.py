"""The fixture dataset and its brute-force ground-truth oracle.

The dataset is a fixed constant of the repository: 30 book records, exactly 4
matching "Borges" and 3 matching "Cortázar" (case-insensitive substring over
title or author). Every record has a detail page carrying a citation block
that appears nowhere else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

PAGE_SIZE = 10


@dataclass(frozen=True, slots=True)
class Record:
    id: str
    title: str
    author: str
    rating: str
    venue_kind: str  # journal | conference
    year: int
    description: str


def load_dataset() -> tuple[Record, ...]:
    raw = json.loads(
        resources.files("searchsvc.fixtures").joinpath("dataset.json")
        .read_text("utf-8")
    )
    return tuple(Record(**entry) for entry in raw["records"])


def matches(record: Record, keywords: str) -> bool:
    needle = keywords.casefold()
    return needle in record.title.casefold() or needle in record.author.casefold()


def ground_truth(dataset: tuple[Record, ...], keywords: str = "",
                 venue: str | None = None,
                 order: str | None = None) -> list[Record]:
    """Brute-force scan: the independent oracle for every engine test."""
    hits = [r for r in dataset if matches(r, keywords)]
    if venue is not None:
        hits = [r for r in hits if r.venue_kind == venue]
    if order == "rating":
        hits.sort(key=lambda r: (-float(r.rating), r.id))
    elif order == "year":
        hits.sort(key=lambda r: (-r.year, r.id))
    return hits


def citation_text(record: Record) -> str:
    return (f"@book{{{record.id}, title={{{record.title}}}, "
            f"author={{{record.author}}}, year={{{record.year}}}}}")


def detail_path(record_id: str) -> str:
    return f"/detail/{record_id}"
