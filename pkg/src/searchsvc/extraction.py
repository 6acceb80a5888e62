"""Materializes result documents into typed domain objects per the declared
result structure, including target-page enrichment."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from urllib.parse import urljoin

from . import model
from .dom import DocumentHandle, HtmlElement, inner_html, parse_html
from .httpclient import Fetcher, HttpRequestPlan
from .model import PropertySpec, SearchQuery, SearchResultSpec, canonical_json
from .selectors import evaluate

# URL-valued attributes get resolved against the page URL on extraction.
_URL_ATTRS = frozenset({"href", "src", "action", "data-href", "data-url"})

# injectable clock (tests pin it to make serialized output reproducible)
now_fn = model.utc_now_iso


@dataclass(frozen=True, slots=True)
class PropertyValue:
    kind: str  # text | url | missing
    value: str | None = None

    @property
    def is_missing(self) -> bool:
        return self.kind == "missing"

    def to_json(self):
        if self.kind == "missing":
            return None
        return {self.kind: self.value}


MISSING = PropertyValue("missing")


@dataclass(frozen=True, slots=True)
class Provenance:
    source_url: str
    container_index: int
    fetched_at: str


@dataclass(frozen=True, slots=True)
class DomainObject:
    """One extracted result: a typed property map plus its mandatory link."""

    type_name: str
    values: dict[str, PropertyValue]
    target_url: str
    provenance: Provenance

    def to_json(self) -> dict:
        return {
            "type": self.type_name,
            "values": {name: value.to_json()
                       for name, value in sorted(self.values.items())},
            "target_url": self.target_url,
            "provenance": {
                "source_url": self.provenance.source_url,
                "container_index": self.provenance.container_index,
                "fetched_at": self.provenance.fetched_at,
            },
        }


@dataclass(frozen=True, slots=True)
class PageSummary:
    page_index: int
    has_next: bool
    has_prev: bool

    def to_json(self) -> dict:
        return {"page_index": self.page_index, "has_next": self.has_next,
                "has_prev": self.has_prev}


@dataclass(frozen=True, slots=True)
class ResultSet:
    service_id: str
    query: SearchQuery
    items: tuple[DomainObject, ...]
    page: PageSummary

    def to_json(self) -> dict:
        return {
            "service_id": self.service_id,
            "query": {
                "keywords": self.query.keywords,
                "active_filters": list(self.query.active_filters),
                "active_ordering": self.query.active_ordering,
                "page": self.query.page,
            },
            "items": [item.to_json() for item in self.items],
            "page": self.page.to_json(),
        }


def result_set_to_text(result_set: ResultSet) -> str:
    """The one canonical JSON text form, shared by the API and the CLI."""
    return canonical_json(result_set.to_json())


@dataclass
class ExtractionDiagnostics:
    """Mutable tally: dropped containers and per-object notes."""

    dropped: int = 0
    notes: list[str] = field(default_factory=list)


def normalize_text(raw: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(raw.split())


def _first_match(selector_spec: PropertySpec, scope: HtmlElement) -> HtmlElement | None:
    nodes = evaluate(selector_spec.selector, scope)
    return nodes[0] if nodes else None


def _extract_from_node(node: HtmlElement, prop: PropertySpec,
                       base_url: str) -> PropertyValue:
    mode = prop.extract.mode
    if mode == "text":
        return PropertyValue("text", normalize_text(node.text_content()))
    if mode == "inner_html":
        return PropertyValue("text", inner_html(node))
    raw = node.get(prop.extract.attr or "")
    if raw is None:
        return MISSING
    if (prop.extract.attr or "").lower() in _URL_ATTRS:
        return PropertyValue("url", urljoin(base_url, raw))
    return PropertyValue("text", raw)


def extract_results(doc: DocumentHandle, spec: SearchResultSpec,
                    base_url: str = "",
                    diagnostics: ExtractionDiagnostics | None = None
                    ) -> list[DomainObject]:
    """One object per container match, in document order. Containers without a
    target URL are dropped and tallied; absent property matches are recorded
    as missing so every object carries the full property-name set."""
    diagnostics = diagnostics if diagnostics is not None else ExtractionDiagnostics()
    base = base_url or doc.base_url
    fetched_at = now_fn()
    objects: list[DomainObject] = []

    containers = evaluate(spec.container, doc)
    for index, container in enumerate(containers):
        target_value = MISSING
        if spec.target_url is not None:
            node = _first_match(spec.target_url, container)
            if node is not None:
                target_value = _extract_from_node(node, spec.target_url, base)
        if target_value.is_missing or not target_value.value:
            diagnostics.dropped += 1
            diagnostics.notes.append(
                f"container {index}: no target URL; object dropped")
            continue
        target_url = urljoin(base, target_value.value)

        values: dict[str, PropertyValue] = {}
        for prop in spec.properties:
            if prop.location == "in_target":
                values[prop.name] = MISSING
                continue
            node = _first_match(prop, container)
            values[prop.name] = (
                _extract_from_node(node, prop, base) if node is not None else MISSING
            )

        objects.append(DomainObject(
            type_name=spec.type_name,
            values=values,
            target_url=target_url,
            provenance=Provenance(source_url=base, container_index=index,
                                  fetched_at=fetched_at),
        ))
    return objects


def enrich_in_target(objects: list[DomainObject], spec: SearchResultSpec,
                     fetcher: Fetcher,
                     diagnostics: ExtractionDiagnostics | None = None
                     ) -> list[DomainObject]:
    """Fill in_target properties by fetching each object's target page with
    bounded parallelism. Fetch failures leave those properties missing; the
    object survives and input order is preserved."""
    in_target = spec.in_target_properties
    if not in_target:
        return list(objects)
    diagnostics = diagnostics if diagnostics is not None else ExtractionDiagnostics()

    distinct_urls = list(dict.fromkeys(o.target_url for o in objects))
    pages: dict[str, DocumentHandle | None] = {}

    def fetch_page(url: str) -> tuple[str, DocumentHandle | None]:
        try:
            response = fetcher.fetch(HttpRequestPlan(method="GET", url=url))
        except Exception as exc:
            diagnostics.notes.append(f"{url}: fetch failed: {exc}")
            return url, None
        if not response.ok:
            diagnostics.notes.append(f"{url}: status {response.status}")
            return url, None
        return url, parse_html(response.body, base_url=response.final_url)

    workers = max(1, getattr(fetcher, "max_parallel", 1))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for url, page in pool.map(fetch_page, distinct_urls):
            pages[url] = page

    enriched: list[DomainObject] = []
    for obj in objects:
        page = pages.get(obj.target_url)
        if page is None:
            enriched.append(obj)
            continue
        values = dict(obj.values)
        for prop in in_target:
            nodes = evaluate(prop.selector, page)
            values[prop.name] = (
                _extract_from_node(nodes[0], prop, page.base_url)
                if nodes else MISSING
            )
        enriched.append(replace(obj, values=values))
    return enriched
