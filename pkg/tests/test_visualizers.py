"""Visualizer models, registry, conservation."""

import pytest
from hypothesis import given, strategies as st

from searchsvc.errors import (
    DuplicateVisualizerError,
    InvalidOptionError,
    UnknownVisualizerError,
)
from searchsvc.extraction import (
    MISSING,
    DomainObject,
    PageSummary,
    Provenance,
    PropertyValue,
    ResultSet,
)
from searchsvc.model import SearchQuery
from searchsvc.visualizers import (
    AggregateModel,
    GroupedModel,
    OptionSpec,
    TableModel,
    VisualizerDescriptor,
    VisualizerRegistry,
    render,
)


def obj(n, **props):
    values = {}
    for name, value in props.items():
        values[name] = MISSING if value is None else PropertyValue("text", value)
    return DomainObject(
        type_name="Item",
        values=values,
        target_url=f"http://h.test/d/{n}",
        provenance=Provenance("http://h.test/", n, "t0"),
    )


def result_set(items):
    return ResultSet(
        service_id="svc",
        query=SearchQuery("kw"),
        items=tuple(items),
        page=PageSummary(1, False, False),
    )


SAMPLE = result_set([
    obj(0, title="A", venue="J"),
    obj(1, title="B", venue="J"),
    obj(2, title="C", venue="C"),
    obj(3, title="D", venue=None),
])


class TestTable:
    def test_rows_equal_items(self):
        model = render(SAMPLE, "table_of_properties")
        assert isinstance(model, TableModel)
        assert model.columns == ("title", "venue")
        assert len(model.rows) == 4
        assert model.rows[0] == ("A", "J")
        assert model.rows[3] == ("D", "")  # missing renders empty

    def test_default_visualizer_is_table(self):
        assert isinstance(render(SAMPLE), TableModel)

    def test_column_limit_moves_rest_to_overflow(self):
        model = render(SAMPLE, "table_of_properties", {"max_columns": 1})
        assert model.columns == ("title",)
        assert model.overflow[0] == {"venue": "J"}
        assert all(set(o) == {"venue"} for o in model.overflow)

    def test_column_selection(self):
        model = render(SAMPLE, "table_of_properties", {"columns": ["venue"]})
        assert model.columns == ("venue",)
        assert model.overflow[0] == {"title": "A"}

    def test_unknown_column_rejected(self):
        with pytest.raises(InvalidOptionError):
            render(SAMPLE, "table_of_properties", {"columns": ["nope"]})

    def test_empty_result_set(self):
        model = render(result_set([]), "table_of_properties")
        assert model.rows == ()
        assert model.columns == ()


class TestGrouped:
    def test_partition(self):
        model = render(SAMPLE, "group_by_property_value", {"property": "venue"})
        assert isinstance(model, GroupedModel)
        assert {k: len(v) for k, v in model.groups.items()} == {"J": 2, "C": 1}
        assert len(model.missing_group) == 1
        total = sum(len(v) for v in model.groups.values()) + len(model.missing_group)
        assert total == len(SAMPLE.items)

    def test_missing_property_option(self):
        with pytest.raises(InvalidOptionError):
            render(SAMPLE, "group_by_property_value", {})

    def test_empty_set_groups(self):
        model = render(result_set([]), "group_by_property_value",
                       {"property": "venue"})
        assert model.groups == {}
        assert model.missing_group == ()


class TestAggregate:
    def test_counts(self):
        model = render(SAMPLE, "aggregate_count", {"property": "venue"})
        assert isinstance(model, AggregateModel)
        assert model.counts == {"J": 2, "C": 1}
        non_missing = sum(1 for o in SAMPLE.items
                          if not o.values["venue"].is_missing)
        assert sum(model.counts.values()) == non_missing

    def test_empty(self):
        model = render(result_set([]), "aggregate_count", {"property": "venue"})
        assert model.counts == {}


class TestRegistry:
    def test_fresh_registry_lists_exactly_builtins(self):
        registry = VisualizerRegistry()
        assert [d.id for d in registry.list()] == [
            "table_of_properties", "group_by_property_value", "aggregate_count"]

    def test_register_custom(self):
        registry = VisualizerRegistry()
        descriptor = VisualizerDescriptor(
            id="timeline", display_name="Timeline",
            options_schema=(OptionSpec("property", "property_ref"),))
        registry.register(descriptor, lambda rs, opts: {"kind": "timeline"})
        assert [d.id for d in registry.list()][-1] == "timeline"
        assert registry.render(SAMPLE, "timeline", {}) == {"kind": "timeline"}

    def test_duplicate_id_rejected(self):
        registry = VisualizerRegistry()
        with pytest.raises(DuplicateVisualizerError):
            registry.register(
                VisualizerDescriptor(id="table_of_properties", display_name="x"),
                lambda rs, opts: None)

    def test_unknown_visualizer(self):
        with pytest.raises(UnknownVisualizerError):
            render(SAMPLE, "nope")

    def test_unknown_option(self):
        with pytest.raises(InvalidOptionError):
            render(SAMPLE, "table_of_properties", {"wat": 1})


values_st = st.one_of(st.none(), st.text(max_size=8))


@given(st.lists(st.tuples(values_st, values_st), max_size=30))
def test_conservation(pairs):
    items = [obj(i, title=t, venue=v) for i, (t, v) in enumerate(pairs)]
    rs = result_set(items)

    table = render(rs, "table_of_properties")
    assert len(table.rows) == len(items)
    assert len(table.overflow) == len(items)

    if items:
        grouped = render(rs, "group_by_property_value", {"property": "venue"})
        regrouped = [o for vs in grouped.groups.values() for o in vs]
        regrouped += list(grouped.missing_group)
        assert sorted(o.target_url for o in regrouped) == \
            sorted(o.target_url for o in items)

        aggregate = render(rs, "aggregate_count", {"property": "venue"})
        non_missing = sum(1 for o in items if not o.values["venue"].is_missing)
        assert sum(aggregate.counts.values()) == non_missing
        assert all(c >= 1 for c in aggregate.counts.values())
