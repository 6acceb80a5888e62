"""Ready-made service specs bound to a running fixture server."""

from __future__ import annotations

from ..model import (
    Condition,
    ConditionGroup,
    ConditionManager,
    EngineBinding,
    Extract,
    LocalOrdering,
    OrderingSpec,
    PropertySpec,
    RequestModifier,
    RequestTemplate,
    SearchResultSpec,
    Selector,
    ServiceMetadata,
    ServiceSpec,
    StrategyConfig,
)

_CREATED = "2024-01-01T00:00:00+00:00"

JSON_PROVIDER_ID = "fixture-json"


def _result_spec() -> SearchResultSpec:
    return SearchResultSpec(
        type_name="Book",
        container=Selector("css", "li.result", expect_many=True),
        target_url=PropertySpec(
            name="url", location="in_result",
            selector=Selector("css", "a.target"),
            extract=Extract.attribute("href"),
        ),
        properties=(
            PropertySpec("title", "in_result",
                         Selector("css", ".title a"), Extract.text()),
            PropertySpec("author", "in_result",
                         Selector("css", ".author"), Extract.text()),
            PropertySpec("rating", "in_result",
                         Selector("css", ".rating"), Extract.text()),
            PropertySpec("citation", "in_target",
                         Selector("css", "pre.citation"), Extract.text()),
        ),
    )


def _filters() -> ConditionManager:
    return ConditionManager(groups=(
        ConditionGroup(
            group_name="venue", exclusive=True,
            conditions=(
                Condition("Journal only",
                          RequestModifier(param_set=(("venue", "journal"),))),
                Condition("Conference only",
                          RequestModifier(param_set=(("venue", "conference"),))),
            ),
        ),
    ))


def _orderings() -> tuple[OrderingSpec, ...]:
    return (
        OrderingSpec("By rating",
                     remote=RequestModifier(param_set=(("order", "rating"),))),
        OrderingSpec("By year",
                     remote=RequestModifier(param_set=(("order", "year"),))),
        OrderingSpec("rating-local",
                     local=LocalOrdering("rating", "desc", "numeric")),
        OrderingSpec("title-local",
                     local=LocalOrdering("title", "asc", "lexical")),
    )


def form_spec(base_url: str, spec_id: str = "fixture-form") -> ServiceSpec:
    """Full-page-reload engine: real form submission, anchor pagination."""
    return ServiceSpec(
        id=spec_id,
        name="Fixture Books (form)",
        binding=EngineBinding(
            search_page_url=f"{base_url}/form",
            input=Selector("css", "#search-box"),
            trigger=Selector("css", "#search-go"),
            next_page=Selector("css", ".pager .next"),
            prev_page=Selector("css", ".pager .prev"),
        ),
        strategy=StrategyConfig(
            variant="write_and_click_to_reload",
            request_template=RequestTemplate(
                method="GET",
                url_template=f"{base_url}/form/results?q={{query}}",
                static_params=(("src", "fixture"),),
                response_kind="full_document",
            ),
        ),
        result_spec=_result_spec(),
        filters=_filters(),
        orderings=_orderings(),
        metadata=ServiceMetadata(tags=("fixture",), created=_CREATED),
    )


def ajax_spec(base_url: str, spec_id: str = "fixture-ajax") -> ServiceSpec:
    """Click-triggered fragment endpoint with {page} templating."""
    return ServiceSpec(
        id=spec_id,
        name="Fixture Books (ajax)",
        binding=EngineBinding(
            search_page_url=f"{base_url}/ajax",
            input=Selector("css", "#ajax-q"),
            trigger=Selector("css", "#ajax-go"),
            next_page=Selector("css", ".pager .next"),
            prev_page=Selector("css", ".pager .prev"),
        ),
        strategy=StrategyConfig(
            variant="write_and_click_for_ajax_call",
            request_template=RequestTemplate(
                method="GET",
                url_template=f"{base_url}/ajax/api/search?q={{query}}&page={{page}}",
                response_kind="html_fragment",
            ),
        ),
        result_spec=_result_spec(),
        filters=_filters(),
        orderings=_orderings(),
        metadata=ServiceMetadata(tags=("fixture",), created=_CREATED),
    )


def keystroke_spec(base_url: str, spec_id: str = "fixture-type") -> ServiceSpec:
    """Keystroke-triggered fragment endpoint: an input with no trigger."""
    return ServiceSpec(
        id=spec_id,
        name="Fixture Books (keystroke)",
        binding=EngineBinding(
            search_page_url=f"{base_url}/type",
            input=Selector("css", "#type-q"),
            trigger=None,
            next_page=Selector("css", ".pager .next"),
            prev_page=Selector("css", ".pager .prev"),
        ),
        strategy=StrategyConfig(
            variant="write_for_ajax_call",
            request_template=RequestTemplate(
                method="GET",
                url_template=f"{base_url}/type/api/search?q={{query}}&page={{page}}",
                response_kind="html_fragment",
            ),
        ),
        result_spec=_result_spec(),
        filters=_filters(),
        orderings=_orderings(),
        metadata=ServiceMetadata(tags=("fixture",), created=_CREATED),
    )


def scroll_draft(base_url: str, spec_id: str = "fixture-scroll") -> ServiceSpec:
    """Draft for the scroll-loaded engine; no strategy can drive it."""
    return ServiceSpec(
        id=spec_id,
        name="Fixture Books (scroll)",
        binding=EngineBinding(
            search_page_url=f"{base_url}/scroll",
            input=Selector("css", "#scroll-q"),
        ),
        strategy=None,
        result_spec=_result_spec(),
        metadata=ServiceMetadata(tags=("fixture",), created=_CREATED),
    )


def api_spec(base_url: str, spec_id: str = "fixture-api") -> ServiceSpec:
    """Dispatches to the registered JSON provider instead of scraping HTML."""
    return ServiceSpec(
        id=spec_id,
        name="Fixture Books (json api)",
        binding=EngineBinding(
            search_page_url=f"{base_url}/form",
            input=Selector("css", "#search-box"),
            trigger=Selector("css", "#search-go"),
        ),
        strategy=StrategyConfig(variant="api_based", provider_id=JSON_PROVIDER_ID),
        result_spec=_result_spec(),
        filters=_filters(),
        orderings=_orderings(),
        metadata=ServiceMetadata(tags=("fixture", "api"), created=_CREATED),
    )


def draft_of(spec: ServiceSpec) -> ServiceSpec:
    """The same service with its strategy stripped (detection input)."""
    import dataclasses

    return dataclasses.replace(spec, strategy=None)
