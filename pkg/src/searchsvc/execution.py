"""Turns (spec, query) into HTTP requests per strategy, detects which strategy
applies, walks pagination, and produces result sets.

The three UI strategies act over HTTP rather than a live browser DOM:
full-page reload is a real form submission re-derived from the search page;
the two ajax variants fire a recorded request template whose response is a
full document or an HTML fragment.
"""

from __future__ import annotations

import re
import threading
from collections import Counter
from dataclasses import dataclass, replace
from datetime import datetime
from typing import Protocol
from urllib.parse import quote_plus, urljoin, urlsplit, urlunsplit

from .dom import DocumentHandle, HtmlElement, parse_html
from .errors import (
    AmbiguousInputError,
    DuplicateProviderError,
    FetchFailedError,
    InputHasNoNameError,
    InputNotFoundError,
    NoApplicableStrategyError,
    NoSuchPageError,
    QueryInvalidError,
    SpecInvalidError,
    StrategyUnconfiguredError,
)
from .extraction import (
    DomainObject,
    ExtractionDiagnostics,
    PageSummary,
    ResultSet,
    extract_results,
)
from .httpclient import Fetcher, HttpRequestPlan
from .model import (
    EngineBinding,
    LocalOrdering,
    RequestModifier,
    RequestTemplate,
    SearchQuery,
    ServiceSpec,
    StrategyConfig,
    validate_query,
    validate_spec,
)
from .selectors import evaluate

_FALLBACK_PARAM_NAMES = ("q", "query", "search", "s")


# ---------------------------------------------------------------------------
# Form-request derivation


def _enclosing_form(node: HtmlElement) -> HtmlElement | None:
    cur = node.parent
    while cur is not None:
        if cur.tag == "form":
            return cur
        cur = cur.parent
    return None


def _form_params(form: HtmlElement, input_el: HtmlElement,
                 keywords: str, query_param: str) -> list[tuple[str, str]]:
    """The input's value plus all hidden-input pairs, in document order."""
    params: list[tuple[str, str]] = []
    for el in form.descendants():
        if el is input_el:
            params.append((query_param, keywords))
        elif el.tag == "input" and (el.get("type") or "").lower() == "hidden":
            name = el.get("name")
            if name:
                params.append((name, el.get("value") or ""))
    return params


def _derive_form(doc: DocumentHandle, binding: EngineBinding, keywords: str,
                 param_override: str | None = None
                 ) -> tuple[HttpRequestPlan, str]:
    matches = evaluate(binding.input, doc)
    if not matches:
        raise InputNotFoundError(
            f"input selector {binding.input.expression!r} matched nothing")
    if len(matches) > 1:
        raise AmbiguousInputError(
            f"input selector {binding.input.expression!r} matched {len(matches)} nodes")
    input_el = matches[0]
    query_param = input_el.get("name") or param_override
    if not query_param:
        raise InputHasNoNameError("input element has no name attribute")

    form = _enclosing_form(input_el)
    if form is None:
        # no form to submit: query the search page itself
        plan = HttpRequestPlan(
            method="GET",
            url=binding.search_page_url,
            params=((query_param, keywords),),
        )
        return plan, query_param

    action = form.get("action") or ""
    url = urljoin(doc.base_url or binding.search_page_url, action) \
        if action else (doc.base_url or binding.search_page_url)
    method = (form.get("method") or "get").upper()
    if method not in ("GET", "POST"):
        method = "GET"
    params = tuple(_form_params(form, input_el, keywords, query_param))
    plan = HttpRequestPlan(
        method=method,
        url=url,
        params=params,
        body_encoding="form_urlencoded" if method == "POST" else "none",
    )
    return plan, query_param


def derive_form_request(doc: DocumentHandle, binding: EngineBinding,
                        keywords: str,
                        param_override: str | None = None) -> HttpRequestPlan:
    """Reproduce HTML form-submission semantics for the bound input: action
    URL resolved against the page, method defaulting to GET, the input's name
    carrying the keywords, hidden inputs passed through in document order.

    Inputs outside any form fall back to querying the search page URL itself;
    a nameless input needs param_override (the probe-validated guess)."""
    plan, _ = _derive_form(doc, binding, keywords, param_override)
    return plan


# ---------------------------------------------------------------------------
# Templates and modifiers


def _fill_template(text: str, keywords: str, page: int, quote: bool) -> str:
    value = quote_plus(keywords) if quote else keywords
    return text.replace("{query}", value).replace("{page}", str(page))


def plan_from_template(template: RequestTemplate, keywords: str,
                       page: int = 1) -> HttpRequestPlan:
    url = _fill_template(template.url_template, keywords, page, quote=True)
    params = tuple(
        (name, _fill_template(value, keywords, page, quote=False))
        for name, value in template.static_params
    )
    return HttpRequestPlan(
        method=template.method,
        url=url,
        params=params,
        body_encoding="form_urlencoded" if template.method == "POST" else "none",
    )


def apply_modifier(plan: HttpRequestPlan, modifier: RequestModifier,
                   keywords: str, page: int) -> HttpRequestPlan:
    if modifier.url_override is not None:
        return replace(plan, url=_fill_template(modifier.url_override,
                                                keywords, page, quote=True))
    if modifier.param_set is not None:
        params = list(plan.params)
        for name, value in modifier.param_set:
            value = _fill_template(value, keywords, page, quote=False)
            for i, (existing, _) in enumerate(params):
                if existing == name:
                    params[i] = (name, value)
                    break
            else:
                params.append((name, value))
        return replace(plan, params=tuple(params))
    parts = urlsplit(plan.url)
    new_path = parts.path.rstrip("/") + (modifier.path_suffix or "")
    return replace(plan, url=urlunsplit(parts._replace(path=new_path)))


# ---------------------------------------------------------------------------
# Local ordering

_NUMBER = re.compile(r"-?\d+(?:\.\d+)?")


def _local_sort_key(obj: DomainObject, ordering: LocalOrdering):
    value = obj.values.get(ordering.property)
    if value is None or value.is_missing or value.value is None:
        return None
    raw = value.value
    if ordering.comparator == "numeric":
        m = _NUMBER.search(raw)
        return float(m.group(0)) if m else None
    if ordering.comparator == "date":
        try:
            return datetime.fromisoformat(raw).timestamp()
        except ValueError:
            m = re.search(r"\b(\d{4})\b", raw)
            return float(m.group(1)) if m else None
    return raw.casefold()


def sort_locally(objects: list[DomainObject],
                 ordering: LocalOrdering) -> list[DomainObject]:
    """Stable sort within one page; unparseable/missing values go last."""
    keyed = [(_local_sort_key(obj, ordering), obj) for obj in objects]
    present = [(k, o) for k, o in keyed if k is not None]
    absent = [o for k, o in keyed if k is None]
    present.sort(key=lambda pair: pair[0], reverse=ordering.direction == "desc")
    return [o for _, o in present] + absent


# ---------------------------------------------------------------------------
# Providers (api_based extension point)


class SearchProvider(Protocol):
    """Capability for api_based services: must implement execute/next_page
    (prev_page optional) with the engine's signatures."""

    def execute(self, spec: ServiceSpec, query: SearchQuery,
                fetcher: Fetcher) -> tuple[ResultSet, "PageCursor"]: ...

    def next_page(self, cursor: "PageCursor",
                  fetcher: Fetcher) -> tuple[ResultSet, "PageCursor"]: ...


class ProviderRegistry:
    """Registration is serialized; lookups are plain reads."""

    def __init__(self):
        self._providers: dict[str, SearchProvider] = {}
        self._lock = threading.Lock()

    def register(self, provider_id: str, provider: SearchProvider) -> None:
        with self._lock:
            if provider_id in self._providers:
                raise DuplicateProviderError(
                    f"provider {provider_id!r} is already registered")
            self._providers[provider_id] = provider

    def get(self, provider_id: str) -> SearchProvider | None:
        return self._providers.get(provider_id)

    def ids(self) -> list[str]:
        return sorted(self._providers)


default_registry = ProviderRegistry()


def register_provider(provider_id: str, provider: SearchProvider,
                      registry: ProviderRegistry | None = None) -> None:
    (registry or default_registry).register(provider_id, provider)


# ---------------------------------------------------------------------------
# Cursors


@dataclass(frozen=True)
class _Continuation:
    """Opaque request-derivation state carried between pages."""

    spec: ServiceSpec
    modifiers: tuple[RequestModifier, ...]
    local: LocalOrdering | None
    template: RequestTemplate | None  # used when it supports {page}
    next_url: str | None = None
    prev_url: str | None = None
    provider: SearchProvider | None = None
    provider_state: object = None


@dataclass(frozen=True)
class PageCursor:
    service_id: str
    query: SearchQuery
    page_index: int
    has_next: bool
    has_prev: bool
    continuation: _Continuation

    def __post_init__(self):
        assert self.page_index == self.query.page
        assert self.has_prev == (self.page_index > 1)


# ---------------------------------------------------------------------------
# Execution


def _resolve_modifiers(spec: ServiceSpec, query: SearchQuery
                       ) -> tuple[tuple[RequestModifier, ...], LocalOrdering | None]:
    modifiers = []
    for name in query.active_filters:
        condition = spec.filters.find(name)
        modifiers.append(condition.activation)
    local = None
    if query.active_ordering:
        ordering = spec.find_ordering(query.active_ordering)
        if ordering.remote is not None:
            modifiers.append(ordering.remote)
        else:
            local = ordering.local
    return tuple(modifiers), local


def _fetch_document(fetcher: Fetcher, plan: HttpRequestPlan) -> DocumentHandle:
    response = fetcher.fetch(plan)
    if not response.ok:
        raise FetchFailedError(
            f"{plan.method} {plan.url} returned status {response.status}")
    return parse_html(response.body, base_url=response.final_url)


def _page_links(doc: DocumentHandle, binding: EngineBinding
                ) -> tuple[str | None, str | None]:
    next_url = prev_url = None
    if binding.next_page is not None:
        nodes = evaluate(binding.next_page, doc)
        if nodes and nodes[0].get("href"):
            next_url = urljoin(doc.base_url, nodes[0].get("href"))
    if binding.prev_page is not None:
        nodes = evaluate(binding.prev_page, doc)
        if nodes and nodes[0].get("href"):
            prev_url = urljoin(doc.base_url, nodes[0].get("href"))
    return next_url, prev_url


def _extract_page(spec: ServiceSpec, query: SearchQuery, doc: DocumentHandle,
                  continuation: _Continuation, page_index: int,
                  diagnostics: ExtractionDiagnostics | None = None
                  ) -> tuple[ResultSet, PageCursor]:
    objects = extract_results(doc, spec.result_spec, doc.base_url,
                              diagnostics=diagnostics)
    if continuation.local is not None:
        objects = sort_locally(objects, continuation.local)

    next_url, prev_url = _page_links(doc, spec.binding)
    template_pages = (continuation.template is not None
                      and continuation.template.supports_paging())
    if spec.binding.next_page is not None:
        has_next = next_url is not None
    elif template_pages:
        has_next = bool(objects)  # optimistic until an empty page appears
    else:
        has_next = False

    query_at_page = replace(query, page=page_index)
    cursor = PageCursor(
        service_id=spec.id,
        query=query_at_page,
        page_index=page_index,
        has_next=has_next,
        has_prev=page_index > 1,
        continuation=replace(continuation, next_url=next_url, prev_url=prev_url),
    )
    result_set = ResultSet(
        service_id=spec.id,
        query=query_at_page,
        items=tuple(objects),
        page=PageSummary(page_index, has_next, cursor.has_prev),
    )
    return result_set, cursor


def _apply_all(plan: HttpRequestPlan, continuation: _Continuation,
               keywords: str, page: int) -> HttpRequestPlan:
    for modifier in continuation.modifiers:
        plan = apply_modifier(plan, modifier, keywords, page)
    return plan


def _template_plan(continuation: _Continuation, keywords: str,
                   page: int) -> HttpRequestPlan:
    plan = plan_from_template(continuation.template, keywords, page)
    return _apply_all(plan, continuation, keywords, page)


def _first_page_plan(spec: ServiceSpec, query: SearchQuery,
                     continuation: _Continuation, fetcher: Fetcher,
                     template_pages: bool) -> HttpRequestPlan:
    keywords = query.keywords
    strategy = spec.strategy
    if strategy.variant == "write_and_click_to_reload":
        try:
            search_doc = _fetch_document(
                fetcher, HttpRequestPlan("GET", spec.binding.search_page_url))
            plan, _ = _derive_form(search_doc, spec.binding, keywords)
            return _apply_all(plan, continuation, keywords, 1)
        except (InputNotFoundError, InputHasNoNameError, AmbiguousInputError):
            if strategy.request_template is None:
                raise
            # fall through to the recorded template
    page = query.page if template_pages else 1
    return _template_plan(continuation, keywords, page)


def execute(spec: ServiceSpec, query: SearchQuery, fetcher: Fetcher,
            registry: ProviderRegistry | None = None,
            diagnostics: ExtractionDiagnostics | None = None
            ) -> tuple[ResultSet, PageCursor]:
    """Run one search: build the request per strategy, apply active filters
    and ordering, fetch, extract, and report pagination state."""
    report = validate_spec(spec)
    if not report.ok:
        first = report.errors[0]
        raise SpecInvalidError(f"invalid spec: {first.path}: {first.message}")
    problems = validate_query(spec, query)
    if problems:
        raise QueryInvalidError("; ".join(problems))
    if spec.strategy is None:
        raise StrategyUnconfiguredError("service has no strategy configured")

    modifiers, local = _resolve_modifiers(spec, query)

    if spec.strategy.variant == "api_based":
        provider = (registry or default_registry).get(spec.strategy.provider_id)
        if provider is None:
            raise StrategyUnconfiguredError(
                f"no provider registered for {spec.strategy.provider_id!r}")
        result_set, cursor = provider.execute(spec, query, fetcher)
        if local is not None:
            items = tuple(sort_locally(list(result_set.items), local))
            result_set = replace(result_set, items=items)
        return result_set, cursor

    template = spec.strategy.request_template
    continuation = _Continuation(
        spec=spec, modifiers=modifiers, local=local, template=template,
    )
    template_pages = template is not None and template.supports_paging()

    plan = _first_page_plan(spec, query, continuation, fetcher, template_pages)
    doc = _fetch_document(fetcher, plan)
    page_index = query.page if template_pages else 1
    result_set, cursor = _extract_page(spec, query, doc, continuation,
                                       page_index, diagnostics)

    # anchor-driven pagination has no random access: walk to the target page
    while cursor.page_index < query.page:
        if not cursor.has_next or cursor.continuation.next_url is None:
            raise NoSuchPageError(
                f"page {query.page} does not exist (last page was "
                f"{cursor.page_index})")
        doc = _fetch_document(
            fetcher, HttpRequestPlan("GET", cursor.continuation.next_url))
        result_set, cursor = _extract_page(spec, query, doc, continuation,
                                           cursor.page_index + 1, diagnostics)
    return result_set, cursor


def _neighbor_page(cursor: PageCursor, fetcher: Fetcher, delta: int
                   ) -> tuple[ResultSet, PageCursor]:
    continuation = cursor.continuation
    spec = continuation.spec
    target = cursor.page_index + delta
    template_pages = (continuation.template is not None
                      and continuation.template.supports_paging())
    if template_pages:
        plan = _template_plan(continuation, cursor.query.keywords, target)
    else:
        url = continuation.next_url if delta > 0 else continuation.prev_url
        if url is None:
            raise NoSuchPageError(f"no link to page {target}")
        plan = HttpRequestPlan("GET", url)
    doc = _fetch_document(fetcher, plan)
    return _extract_page(spec, cursor.query, doc, continuation, target)


def next_page(cursor: PageCursor, fetcher: Fetcher) -> tuple[ResultSet, PageCursor]:
    if cursor.continuation.provider is not None:
        return cursor.continuation.provider.next_page(cursor, fetcher)
    if not cursor.has_next:
        raise NoSuchPageError(f"no page after {cursor.page_index}")
    return _neighbor_page(cursor, fetcher, +1)


def prev_page(cursor: PageCursor, fetcher: Fetcher) -> tuple[ResultSet, PageCursor]:
    provider = cursor.continuation.provider
    if provider is not None and hasattr(provider, "prev_page"):
        return provider.prev_page(cursor, fetcher)
    if not cursor.has_prev or cursor.page_index <= 1:
        raise NoSuchPageError(f"no page before {cursor.page_index}")
    return _neighbor_page(cursor, fetcher, -1)


# ---------------------------------------------------------------------------
# Strategy detection


def _target_url_multiset(objects: list[DomainObject]) -> Counter:
    return Counter(obj.target_url for obj in objects)


def _probe_once(spec: ServiceSpec, search_doc: DocumentHandle, keywords: str,
                fetcher: Fetcher, param_override: str | None
                ) -> tuple[list[DomainObject], bool, HttpRequestPlan, str]:
    plan, query_param = _derive_form(search_doc, spec.binding, keywords,
                                     param_override)
    response = fetcher.fetch(plan)
    if not response.ok:
        raise FetchFailedError(
            f"probe {keywords!r}: status {response.status} from {plan.url}")
    doc = parse_html(response.body, base_url=response.final_url)
    objects = extract_results(doc, spec.result_spec, response.final_url)
    return objects, doc.is_full_document(), plan, query_param


def _template_from_plan(plan: HttpRequestPlan, query_param: str,
                        response_kind: str) -> RequestTemplate:
    static = tuple((n, v) for n, v in plan.params if n != query_param)
    glue = "&" if urlsplit(plan.url).query else "?"
    return RequestTemplate(
        method=plan.method,
        url_template=f"{plan.url}{glue}{query_param}={{query}}",
        static_params=static,
        response_kind=response_kind,
    )


def detect_strategy(draft: ServiceSpec, probe_a: str, probe_b: str,
                    fetcher: Fetcher) -> StrategyConfig:
    """Probe the engine with two distinct keyword strings and classify which
    execution strategy applies. A strategy is accepted only when both probes
    extract at least one result and the two result sets differ; when nothing
    qualifies the engine cannot be driven (the detectable-failure case)."""
    if probe_a == probe_b:
        raise QueryInvalidError("detection probes must be two distinct strings")

    search_doc = _fetch_document(
        fetcher, HttpRequestPlan("GET", draft.binding.search_page_url))

    input_nodes = evaluate(draft.binding.input, search_doc)
    named = bool(input_nodes) and bool(input_nodes[0].get("name"))
    overrides: tuple[str | None, ...] = (None,) if named \
        else _FALLBACK_PARAM_NAMES

    failures: list[str] = []
    for override in overrides:
        try:
            objects_a, full_a, plan_a, query_param = _probe_once(
                draft, search_doc, probe_a, fetcher, override)
            objects_b, full_b, _, _ = _probe_once(
                draft, search_doc, probe_b, fetcher, override)
        except (InputNotFoundError, AmbiguousInputError, InputHasNoNameError):
            raise
        except FetchFailedError as exc:
            failures.append(str(exc))
            continue

        if not objects_a or not objects_b:
            failures.append(
                f"param {query_param!r}: probes yielded "
                f"{len(objects_a)}/{len(objects_b)} results")
            continue
        if _target_url_multiset(objects_a) == _target_url_multiset(objects_b):
            failures.append(
                f"param {query_param!r}: both probes returned identical results")
            continue

        full_document = full_a and full_b
        response_kind = "full_document" if full_document else "html_fragment"
        if draft.binding.trigger is not None and full_document:
            variant = "write_and_click_to_reload"
        elif draft.binding.trigger is not None:
            variant = "write_and_click_for_ajax_call"
        else:
            variant = "write_for_ajax_call"
        return StrategyConfig(
            variant=variant,
            request_template=_template_from_plan(plan_a, query_param,
                                                 response_kind),
        )

    raise NoApplicableStrategyError(
        "no execution strategy retrieves fresh results for this engine"
        + (f" ({'; '.join(failures)})" if failures else "")
    )
