"""Reference api_based provider: adapts a JSON search endpoint to the engine's
execute/next_page contract."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import FetchFailedError, NoSuchPageError
from .execution import PageCursor, _Continuation, apply_modifier, _resolve_modifiers
from .extraction import (
    MISSING,
    DomainObject,
    PageSummary,
    Provenance,
    PropertyValue,
    ResultSet,
)
from . import extraction
from .httpclient import Fetcher, HttpRequestPlan
from .model import SearchQuery, ServiceSpec


@dataclass
class JsonApiProvider:
    """Maps items from a JSON endpoint onto the spec's declared properties by
    field name; the item's "url" field becomes the target URL."""

    endpoint: str  # absolute URL of the JSON search endpoint

    def _fetch(self, spec: ServiceSpec, query: SearchQuery,
               fetcher: Fetcher) -> dict:
        modifiers, _ = _resolve_modifiers(spec, query)
        plan = HttpRequestPlan(
            method="GET",
            url=self.endpoint,
            params=(("q", query.keywords), ("page", str(query.page))),
        )
        for modifier in modifiers:
            plan = apply_modifier(plan, modifier, query.keywords, query.page)
        response = fetcher.fetch(plan)
        if not response.ok:
            raise FetchFailedError(
                f"provider endpoint returned status {response.status}")
        try:
            return json.loads(response.body)
        except json.JSONDecodeError as exc:
            raise FetchFailedError(f"provider returned malformed JSON: {exc}") from exc

    def _objects(self, spec: ServiceSpec, payload: dict) -> list[DomainObject]:
        fetched_at = extraction.now_fn()
        out = []
        for index, item in enumerate(payload.get("items", ())):
            target = item.get("url")
            if not target:
                continue
            values: dict[str, PropertyValue] = {}
            for prop in spec.result_spec.properties:
                raw = item.get(prop.name.lower())
                values[prop.name] = (
                    PropertyValue("text", str(raw)) if raw is not None else MISSING
                )
            out.append(DomainObject(
                type_name=spec.result_spec.type_name,
                values=values,
                target_url=self._absolute(target),
                provenance=Provenance(source_url=self.endpoint,
                                      container_index=index,
                                      fetched_at=fetched_at),
            ))
        return out

    def _absolute(self, url: str) -> str:
        from urllib.parse import urljoin

        return urljoin(self.endpoint, url)

    def execute(self, spec: ServiceSpec, query: SearchQuery,
                fetcher: Fetcher) -> tuple[ResultSet, PageCursor]:
        payload = self._fetch(spec, query, fetcher)
        objects = self._objects(spec, payload)
        total = int(payload.get("total", len(objects)))
        page_size = int(payload.get("page_size", len(objects) or 1))
        has_next = query.page * page_size < total
        cursor = PageCursor(
            service_id=spec.id,
            query=query,
            page_index=query.page,
            has_next=has_next,
            has_prev=query.page > 1,
            continuation=_Continuation(
                spec=spec, modifiers=(), local=None, template=None,
                provider=self,
            ),
        )
        result_set = ResultSet(
            service_id=spec.id,
            query=query,
            items=tuple(objects),
            page=PageSummary(query.page, has_next, query.page > 1),
        )
        return result_set, cursor

    def next_page(self, cursor: PageCursor,
                  fetcher: Fetcher) -> tuple[ResultSet, PageCursor]:
        if not cursor.has_next:
            raise NoSuchPageError(f"no page after {cursor.page_index}")
        query = replace(cursor.query, page=cursor.page_index + 1)
        return self.execute(cursor.continuation.spec, query, fetcher)

    def prev_page(self, cursor: PageCursor,
                  fetcher: Fetcher) -> tuple[ResultSet, PageCursor]:
        if cursor.page_index <= 1:
            raise NoSuchPageError("no page before 1")
        query = replace(cursor.query, page=cursor.page_index - 1)
        return self.execute(cursor.continuation.spec, query, fetcher)
