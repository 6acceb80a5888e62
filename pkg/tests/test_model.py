"""Core model: validation, canonical serialization, bundles."""

import dataclasses
import json

import pytest

from searchsvc.errors import SpecParseError, VersionMismatchError
from searchsvc.model import (
    LocalOrdering,
    OrderingSpec,
    RequestModifier,
    ServiceMetadata,
    deserialize,
    export_bundle,
    import_bundle,
    serialize,
    spec_to_json_dict,
    validate_spec,
)

from conftest import build_full_spec, build_minimal_spec


class TestValidate:
    def test_minimal_spec_has_no_errors(self, minimal_spec):
        report = validate_spec(minimal_spec)
        assert report.ok
        assert report.errors == ()

    def test_missing_pagination_and_trigger_are_warnings(self, minimal_spec):
        binding = dataclasses.replace(minimal_spec.binding, trigger=None)
        spec = dataclasses.replace(minimal_spec, binding=binding)
        report = validate_spec(spec)
        assert report.ok
        paths = {w.path for w in report.warnings}
        assert "binding.trigger" in paths
        assert "binding.next_page" in paths

    def test_missing_target_url_is_error(self, minimal_spec):
        rs = dataclasses.replace(minimal_spec.result_spec, target_url=None)
        spec = dataclasses.replace(minimal_spec, result_spec=rs)
        report = validate_spec(spec)
        assert not report.ok
        assert any(p.path == "result_spec.target_url" for p in report.errors)

    def test_local_ordering_unknown_property(self, minimal_spec):
        spec = dataclasses.replace(
            minimal_spec,
            orderings=(OrderingSpec("bad", local=LocalOrdering("price", "asc", "numeric")),),
        )
        report = validate_spec(spec)
        assert not report.ok
        assert any("price" in p.message for p in report.errors)

    def test_relative_url_is_error(self, minimal_spec):
        binding = dataclasses.replace(minimal_spec.binding, search_page_url="/search")
        spec = dataclasses.replace(minimal_spec, binding=binding)
        assert not validate_spec(spec).ok

    def test_container_must_expect_many(self, minimal_spec):
        container = dataclasses.replace(minimal_spec.result_spec.container,
                                        expect_many=False)
        rs = dataclasses.replace(minimal_spec.result_spec, container=container)
        spec = dataclasses.replace(minimal_spec, result_spec=rs)
        report = validate_spec(spec)
        assert any(p.path == "result_spec.container" for p in report.errors)

    def test_unparseable_selector_is_error(self, minimal_spec):
        binding = dataclasses.replace(
            minimal_spec.binding,
            input=dataclasses.replace(minimal_spec.binding.input, expression="li >"),
        )
        spec = dataclasses.replace(minimal_spec, binding=binding)
        assert any(p.path == "binding.input" for p in validate_spec(spec).errors)

    def test_duplicate_property_names(self, minimal_spec):
        rs = minimal_spec.result_spec
        rs = dataclasses.replace(rs, properties=rs.properties + rs.properties)
        spec = dataclasses.replace(minimal_spec, result_spec=rs)
        assert any("duplicate property" in p.message
                   for p in validate_spec(spec).errors)

    def test_modifier_exactly_one_variant(self, minimal_spec):
        bad = RequestModifier(url_override="http://x/{query}",
                              path_suffix="/x")
        spec = dataclasses.replace(
            minimal_spec, orderings=(OrderingSpec("o", remote=bad),))
        assert not validate_spec(spec).ok

    def test_unknown_placeholder_rejected(self, minimal_spec):
        bad = RequestModifier(url_override="http://x/?q={query}&u={user}")
        spec = dataclasses.replace(
            minimal_spec, orderings=(OrderingSpec("o", remote=bad),))
        assert any("{query}" in p.message or "user" in str(p.message)
                   for p in validate_spec(spec).errors)

    def test_template_requires_query_placeholder(self, minimal_spec):
        template = dataclasses.replace(
            minimal_spec.strategy.request_template,
            url_template="http://127.0.0.1:9/results")
        strategy = dataclasses.replace(minimal_spec.strategy,
                                       request_template=template)
        spec = dataclasses.replace(minimal_spec, strategy=strategy)
        assert any("{query}" in p.message for p in validate_spec(spec).errors)

    def test_draft_without_strategy_warns(self, minimal_spec):
        spec = dataclasses.replace(minimal_spec, strategy=None)
        report = validate_spec(spec)
        assert report.ok
        assert any(w.path == "strategy" for w in report.warnings)

    def test_validate_is_total_on_garbage(self, minimal_spec):
        spec = dataclasses.replace(minimal_spec, binding=None)
        report = validate_spec(spec)  # must not raise
        assert not report.ok


class TestSerialization:
    def test_round_trip_minimal(self, minimal_spec):
        assert deserialize(serialize(minimal_spec)) == minimal_spec

    def test_round_trip_full(self, full_spec):
        assert deserialize(serialize(full_spec)) == full_spec

    def test_byte_stability(self, full_spec):
        assert serialize(full_spec) == serialize(build_full_spec())

    def test_sorted_keys(self, minimal_spec):
        text = serialize(minimal_spec)
        top_keys = list(json.loads(text).keys())
        assert top_keys == sorted(top_keys)

    def test_missing_binding_input_names_path(self, minimal_spec):
        raw = spec_to_json_dict(minimal_spec)
        del raw["binding"]["input"]
        with pytest.raises(SpecParseError) as err:
            deserialize(json.dumps(raw))
        assert "binding.input" in str(err.value)

    def test_version_mismatch(self, minimal_spec):
        raw = spec_to_json_dict(minimal_spec)
        raw["metadata"]["format_version"] = "2"
        with pytest.raises(VersionMismatchError):
            deserialize(json.dumps(raw))

    def test_malformed_json_reports_position(self):
        with pytest.raises(SpecParseError) as err:
            deserialize('{"id": "x",\n  "name": }')
        assert err.value.line == 2
        assert err.value.column is not None


class TestBundles:
    def test_export_import_round_trip(self, minimal_spec, full_spec):
        bundle = export_bundle([minimal_spec, full_spec])
        result = import_bundle(bundle)
        assert result.rejected == ()
        assert list(result.imported) == [minimal_spec, full_spec]

    def test_bundle_records_format_version(self, minimal_spec):
        raw = json.loads(export_bundle([minimal_spec]))
        assert raw["format_version"] == "1"

    def test_partial_import_reports_rejects(self, minimal_spec, full_spec):
        raw = json.loads(export_bundle([minimal_spec, full_spec]))
        del raw["services"][1]["result_spec"]["target_url"]
        result = import_bundle(json.dumps(raw))
        assert len(result.imported) == 1
        assert len(result.rejected) == 1
        assert result.rejected[0].index == 1
        assert "target_url" in result.rejected[0].reason

    def test_double_import_regenerates_ids(self, minimal_spec):
        bundle = export_bundle([minimal_spec])
        first = import_bundle(bundle)
        second = import_bundle(bundle,
                               existing_ids={s.id for s in first.imported})
        assert len(second.imported) == 1
        clone = second.imported[0]
        assert clone.id != minimal_spec.id
        assert clone.name == minimal_spec.name + " (imported)"

    def test_bad_bundle_version(self):
        with pytest.raises(VersionMismatchError):
            import_bundle('{"format_version": "9", "services": []}')


class TestMetadata:
    def test_format_version_default(self):
        assert ServiceMetadata().format_version == "1"

    def test_wrong_version_fails_validation(self, minimal_spec):
        meta = dataclasses.replace(minimal_spec.metadata, format_version="0")
        spec = dataclasses.replace(minimal_spec, metadata=meta)
        assert any(p.path == "metadata.format_version"
                   for p in validate_spec(spec).errors)
