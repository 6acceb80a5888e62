"""Acceptance suite: one test per criterion, each printing a pass line.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; the
brute-force dataset scan (ground_truth) is the oracle for every
engine-behavior check here.
"""

import dataclasses
import json
import os
import random
import time
from collections import Counter
from decimal import Decimal
from pathlib import Path

import pytest
from click.testing import CliRunner
from hypothesis import HealthCheck, given, settings

import searchsvc.extraction as extraction
from searchsvc.cli import main as cli_main
from searchsvc.errors import NoApplicableStrategyError, NoSuchPageError
from searchsvc.execution import detect_strategy, execute, next_page, prev_page
from searchsvc.extraction import (
    MISSING,
    DomainObject,
    PageSummary,
    Provenance,
    PropertyValue,
    ResultSet,
    enrich_in_target,
)
from searchsvc.fixtures import (
    ajax_spec,
    draft_of,
    form_spec,
    keystroke_spec,
    scroll_draft,
    serve,
)
from searchsvc.httpclient import HttpxFetcher
from searchsvc.klm import compare, estimate, load_scenario
from searchsvc.model import (
    SearchQuery,
    deserialize,
    export_bundle,
    import_bundle,
    serialize,
    spec_to_json_dict,
)
from searchsvc.store import SpecStore
from searchsvc.visualizers import render

from conftest import build_minimal_spec
from specgen import service_specs

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture(scope="module")
def server():
    srv = serve()
    yield srv
    srv.stop()


@pytest.fixture(scope="module")
def fetcher():
    return HttpxFetcher(politeness_seconds=0)


def ok(line):
    print(f"ACCEPTANCE {line}: PASS")


def collect_all_pages(spec, query, fetcher):
    rs, cursor = execute(spec, query, fetcher)
    pages = [rs]
    while cursor.has_next:
        assert len(pages) < 20, "runaway pagination"
        rs, cursor = next_page(cursor, fetcher)
        pages.append(rs)
    return pages


def test_klm_table1_reproduction():
    started = time.perf_counter()
    runner = CliRunner()
    expected = {
        "table1_baseline.json": "46.6",
        "table1_with_ss.json": "18.0",
        "define_service.json": "39.2",
    }
    for name, total in expected.items():
        result = runner.invoke(cli_main, ["klm", "estimate", str(SCENARIOS / name)])
        assert result.exit_code == 0
        assert result.output.strip() == total, (name, result.output)
        scenario = load_scenario((SCENARIOS / name).read_text("utf-8"))
        assert estimate(scenario) == Decimal(total)

    delta = compare(
        load_scenario((SCENARIOS / "table1_baseline.json").read_text("utf-8")),
        load_scenario((SCENARIOS / "table1_with_ss.json").read_text("utf-8")),
    ).delta
    assert delta == Decimal("28.6")
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0, f"took {elapsed:.2f}s"
    ok(f"klm-table1 (46.6 / 18.0 / 39.2, delta 28.6, {elapsed * 1000:.0f} ms)")


def test_strategy_detection_coverage(server, fetcher):
    started = time.perf_counter()
    expected = {
        "write_and_click_to_reload": draft_of(form_spec(server.base_url)),
        "write_and_click_for_ajax_call": draft_of(ajax_spec(server.base_url)),
        "write_for_ajax_call": draft_of(keystroke_spec(server.base_url)),
    }
    for variant, draft in expected.items():
        config = detect_strategy(draft, "Borges", "Cortázar", fetcher)
        assert config.variant == variant, (variant, config.variant)

    with pytest.raises(NoApplicableStrategyError):
        detect_strategy(scroll_draft(server.base_url), "Borges", "Cortázar",
                        fetcher)
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0, f"took {elapsed:.2f}s"
    ok(f"strategy-detection (3 classified + 1 refused, {elapsed:.2f} s)")


def test_extraction_oracle_equivalence(server, fetcher):
    rng = random.Random(20240809)
    keywords_pool = ["Borges", "Cortázar", "the", "of", "a", "e", "zzzz",
                     "Lispector", "solitude", "", "war", "love", "night"]
    filter_pool = [None, "Journal only", "Conference only"]
    ordering_pool = [None, "By rating", "By year", "rating-local", "title-local"]
    engines = {
        "form": form_spec(server.base_url),
        "ajax": ajax_spec(server.base_url),
        "keystroke": keystroke_spec(server.base_url),
    }
    filter_to_venue = {None: None, "Journal only": "journal",
                       "Conference only": "conference"}
    remote_orders = {"By rating": "rating", "By year": "year"}

    by_id = {f"/detail/{r.id}": r for r in server.dataset}
    combos = 0
    for _ in range(50):
        keywords = rng.choice(keywords_pool)
        filter_name = rng.choice(filter_pool)
        ordering = rng.choice(ordering_pool)
        engine_name = rng.choice(list(engines))
        spec = engines[engine_name]

        expected = server.ground_truth(
            keywords,
            venue=filter_to_venue[filter_name],
            order=remote_orders.get(ordering),
        )
        query = SearchQuery(
            keywords,
            active_filters=(filter_name,) if filter_name else (),
            active_ordering=ordering,
        )
        pages = collect_all_pages(spec, query, fetcher)
        items = [item for page in pages for item in page.items]

        got_urls = Counter(i.target_url for i in items)
        want_urls = Counter(f"{server.base_url}/detail/{r.id}" for r in expected)
        assert got_urls == want_urls, (engine_name, keywords, filter_name, ordering)

        for item in items:
            record = by_id[item.target_url.replace(server.base_url, "")]
            assert item.values["title"].value == record.title
            assert item.values["author"].value == record.author
            assert item.values["rating"].value == record.rating
        combos += 1
    assert combos == 50
    ok("extraction-oracle-equivalence (50 randomized combos, 3 engines)")


def test_pagination_completeness(server, fetcher):
    spec = form_spec(server.base_url)
    pages = collect_all_pages(spec, SearchQuery(""), fetcher)
    sizes = [len(p.items) for p in pages]
    assert sizes == [10, 10, 10], sizes

    page_urls = [set(i.target_url for i in p.items) for p in pages]
    for i in range(len(page_urls)):
        for j in range(i + 1, len(page_urls)):
            assert not (page_urls[i] & page_urls[j]), "pages overlap"

    union = set().union(*page_urls)
    expected = {f"{server.base_url}/detail/{r.id}" for r in server.ground_truth("")}
    assert union == expected

    _, cursor = execute(spec, SearchQuery(""), fetcher)
    with pytest.raises(NoSuchPageError):
        prev_page(cursor, fetcher)
    ok("pagination-completeness (10/10/10, disjoint, union = oracle, prev@1 errors)")


def test_in_target_enrichment(server, fetcher):
    spec = form_spec(server.base_url)
    rs, _ = execute(spec, SearchQuery("Borges"), fetcher)
    objects = list(rs.items)
    assert objects

    enriched = enrich_in_target(objects, spec.result_spec, fetcher)
    assert all(not o.values["citation"].is_missing for o in enriched), \
        "expected 100% fill"

    victim = objects[0].target_url.rsplit("/", 1)[-1]
    server.fail_detail_ids.add(victim)
    try:
        partial = enrich_in_target(objects, spec.result_spec, fetcher)
    finally:
        server.fail_detail_ids.discard(victim)
    missing = [o for o in partial if o.values["citation"].is_missing]
    assert len(missing) == 1
    assert missing[0].target_url.endswith(victim)
    ok("in-target-enrichment (100% fill; forced 404 leaves exactly one missing)")


@settings(max_examples=1000, deadline=None,
          suppress_health_check=[HealthCheck.too_slow])
@given(service_specs)
def test_round_trip_1000_specs(spec):
    assert deserialize(serialize(spec)) == spec


def test_round_trip_marker():
    ok("round-trips (serialize/deserialize over 1000 generated specs)")


def test_bundle_byte_stability(tmp_path):
    specs = [build_minimal_spec(),
             build_minimal_spec(id="svc-2", name="Second")]
    first = export_bundle(specs)

    # import into an empty store: ids keep, bundle is byte-stable
    clean = import_bundle(first)
    assert export_bundle(list(clean.imported)) == first

    # import over colliding ids: byte-stable modulo regenerated id + name suffix
    collided = import_bundle(first, existing_ids={s.id for s in specs})
    normalized = [
        dataclasses.replace(s, id=orig.id, name=orig.name)
        for s, orig in zip(collided.imported, specs)
    ]
    assert export_bundle(normalized) == first
    ok("bundle-round-trip (byte-stable modulo regenerated ids)")


def test_store_survives_injected_crash(tmp_path, monkeypatch):
    store = SpecStore(tmp_path / "store")
    spec = build_minimal_spec()
    store.save(spec)

    def crash(src, dst):
        raise OSError("injected crash between temp-write and rename")

    real_replace = os.replace
    monkeypatch.setattr(os, "replace", crash)
    with pytest.raises(Exception):
        store.save(dataclasses.replace(spec, name="Updated"))
    monkeypatch.setattr(os, "replace", real_replace)

    survivor = SpecStore(tmp_path / "store")
    assert survivor.load(spec.id) == spec  # old version intact
    ok("store-crash-tolerance (old version visible after injected crash)")


def _random_result_set(rng):
    items = []
    for i in range(rng.randrange(0, 25)):
        values = {}
        for prop in ("alpha", "beta"):
            if rng.random() < 0.2:
                values[prop] = MISSING
            else:
                values[prop] = PropertyValue("text", rng.choice("vwxyz"))
        items.append(DomainObject(
            type_name="T", values=values,
            target_url=f"http://h/d/{i}",
            provenance=Provenance("http://h/", i, "t"),
        ))
    return ResultSet("svc", SearchQuery("k"), tuple(items),
                     PageSummary(1, False, False))


def test_visualizer_conservation():
    rng = random.Random(7)
    for _ in range(200):
        rs = _random_result_set(rng)
        table = render(rs, "table_of_properties")
        assert len(table.rows) == len(rs.items)

        if rs.items:
            grouped = render(rs, "group_by_property_value", {"property": "alpha"})
            regrouped = sorted(
                [o.target_url for vs in grouped.groups.values() for o in vs]
                + [o.target_url for o in grouped.missing_group])
            assert regrouped == sorted(o.target_url for o in rs.items)

            aggregate = render(rs, "aggregate_count", {"property": "alpha"})
            non_missing = sum(1 for o in rs.items
                              if not o.values["alpha"].is_missing)
            assert sum(aggregate.counts.values()) == non_missing
            assert all(v >= 1 for v in aggregate.counts.values())
    ok("visualizer-conservation (200 random result sets)")


def test_end_to_end_fixture_search_under_1s(server, fetcher):
    spec = form_spec(server.base_url)
    started = time.perf_counter()
    rs, _ = execute(spec, SearchQuery("Borges"), fetcher)
    enriched = enrich_in_target(list(rs.items), spec.result_spec, fetcher)
    elapsed = time.perf_counter() - started
    assert len(enriched) == 4
    assert all(not o.values["citation"].is_missing for o in enriched)
    assert elapsed < 1.0, f"took {elapsed:.3f}s"
    ok(f"fixture-search-performance (search + enrichment in {elapsed * 1000:.0f} ms)")
