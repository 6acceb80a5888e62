"""Shared fixtures: spec builders and the fixture search-engine harness."""

import pytest

from searchsvc.model import (
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


def build_minimal_spec(**overrides) -> ServiceSpec:
    """Smallest spec that validates clean apart from pagination warnings."""
    fields = dict(
        id="svc-minimal",
        name="Minimal",
        binding=EngineBinding(
            search_page_url="http://127.0.0.1:9/search",
            input=Selector("css", "#q"),
            trigger=Selector("css", "#go"),
        ),
        strategy=StrategyConfig(
            variant="write_and_click_to_reload",
            request_template=RequestTemplate(
                method="GET",
                url_template="http://127.0.0.1:9/results?q={query}",
            ),
        ),
        result_spec=SearchResultSpec(
            type_name="Item",
            container=Selector("css", "li.result", expect_many=True),
            target_url=PropertySpec(
                name="url", location="in_result",
                selector=Selector("css", "a"),
                extract=Extract.attribute("href"),
            ),
            properties=(
                PropertySpec(
                    name="title", location="in_result",
                    selector=Selector("css", ".title"),
                    extract=Extract.text(),
                ),
            ),
        ),
        metadata=ServiceMetadata(created="2024-01-01T00:00:00+00:00"),
    )
    fields.update(overrides)
    return ServiceSpec(**fields)


def build_full_spec() -> ServiceSpec:
    """Spec exercising filters, orderings and every optional binding role."""
    base = build_minimal_spec(id="svc-full", name="Full")
    return ServiceSpec(
        id=base.id,
        name=base.name,
        binding=EngineBinding(
            search_page_url="https://127.0.0.1:9/search",
            input=Selector("css", "#q"),
            trigger=Selector("xpath", "//button[@id='go']"),
            next_page=Selector("css", ".pager .next"),
            prev_page=Selector("css", ".pager .prev"),
            reveal=Selector("css", "#open-search"),
        ),
        strategy=base.strategy,
        result_spec=SearchResultSpec(
            type_name="Book",
            container=Selector("css", "li.result", expect_many=True),
            target_url=base.result_spec.target_url,
            properties=base.result_spec.properties + (
                PropertySpec(
                    name="rating", location="in_result",
                    selector=Selector("css", ".rating"),
                    extract=Extract.text(),
                ),
                PropertySpec(
                    name="citation", location="in_target",
                    selector=Selector("css", "pre.citation"),
                    extract=Extract.text(),
                ),
            ),
        ),
        filters=ConditionManager(groups=(
            ConditionGroup(
                group_name="venue", exclusive=True,
                conditions=(
                    Condition("Journal only",
                              RequestModifier(param_set=(("venue", "journal"),))),
                    Condition("Conference only",
                              RequestModifier(param_set=(("venue", "conference"),))),
                ),
            ),
        )),
        orderings=(
            OrderingSpec("By rating",
                         remote=RequestModifier(param_set=(("order", "rating"),))),
            OrderingSpec("rating-local",
                         local=LocalOrdering("rating", "desc", "numeric")),
            OrderingSpec("title-local",
                         local=LocalOrdering("title", "asc", "lexical")),
        ),
        metadata=ServiceMetadata(tags=("books", "fixture"),
                                 created="2024-01-01T00:00:00+00:00"),
    )


@pytest.fixture
def minimal_spec():
    return build_minimal_spec()


@pytest.fixture
def full_spec():
    return build_full_spec()
