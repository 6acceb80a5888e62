"""HTTP API surface against the fixture harness."""

import json

import pytest
from fastapi.testclient import TestClient

from searchsvc.api import create_app
from searchsvc.dom import parse_html
from searchsvc.execution import ProviderRegistry
from searchsvc.fixtures import form_spec, scroll_draft, serve
from searchsvc.httpclient import HttpxFetcher
from searchsvc.model import spec_to_json_dict

from conftest import build_minimal_spec


@pytest.fixture(scope="module")
def server():
    srv = serve()
    yield srv
    srv.stop()


@pytest.fixture()
def client(server, tmp_path):
    app = create_app(str(tmp_path / "store"),
                     fetcher=HttpxFetcher(politeness_seconds=0),
                     provider_registry=ProviderRegistry())
    with TestClient(app) as c:
        yield c


def post_spec(client, spec) -> str:
    response = client.post("/services", json=spec_to_json_dict(spec))
    assert response.status_code == 201, response.text
    return response.json()["id"]


class TestServicesCrud:
    def test_create_minimal(self, client, minimal_spec):
        response = client.post("/services", json=spec_to_json_dict(minimal_spec))
        assert response.status_code == 201
        assert response.json()["id"] == minimal_spec.id

    def test_create_fills_missing_id(self, client, minimal_spec):
        raw = spec_to_json_dict(minimal_spec)
        del raw["id"]
        response = client.post("/services", json=raw)
        assert response.status_code == 201
        assert response.json()["id"]

    def test_create_invalid_spec_400(self, client, minimal_spec):
        raw = spec_to_json_dict(minimal_spec)
        raw["result_spec"]["target_url"] = None
        response = client.post("/services", json=raw)
        assert response.status_code == 400
        assert any("target_url" in p["path"]
                   for p in response.json()["problems"])

    def test_get_put_delete(self, client, minimal_spec):
        sid = post_spec(client, minimal_spec)
        got = client.get(f"/services/{sid}")
        assert got.status_code == 200
        assert got.json()["name"] == minimal_spec.name

        raw = got.json()
        raw["name"] = "Renamed"
        assert client.put(f"/services/{sid}", json=raw).status_code == 200
        assert client.get(f"/services/{sid}").json()["name"] == "Renamed"

        assert client.delete(f"/services/{sid}").status_code == 204
        assert client.get(f"/services/{sid}").status_code == 404

    def test_unknown_id_404(self, client):
        assert client.get("/services/nope").status_code == 404
        assert client.delete("/services/nope").status_code == 404
        assert client.post("/services/nope/search",
                           json={"keywords": "x"}).status_code == 404

    def test_list(self, client, minimal_spec):
        post_spec(client, minimal_spec)
        listed = client.get("/services").json()["services"]
        assert [s["id"] for s in listed] == [minimal_spec.id]


class TestSearchEndpoints:
    def test_search_borges(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/search",
                               json={"keywords": "Borges"})
        assert response.status_code == 200
        payload = response.json()
        assert len(payload["items"]) == 4
        assert payload["query"]["keywords"] == "Borges"
        assert all(item["values"]["title"]["text"] for item in payload["items"])

    def test_search_with_filter_and_enrich(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/search", json={
            "keywords": "Borges", "filters": ["Journal only"], "enrich": True})
        payload = response.json()
        expected = server.ground_truth("Borges", venue="journal")
        assert len(payload["items"]) == len(expected)
        assert all(item["values"]["citation"]["text"]
                   for item in payload["items"])

    def test_search_bad_filter_is_422(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/search",
                               json={"keywords": "x", "filters": ["nope"]})
        assert response.status_code == 422
        assert response.json()["error"] == "query-invalid"

    def test_upstream_failure_is_502(self, client):
        dead = form_spec("http://127.0.0.1:1")
        sid = post_spec(client, dead)
        response = client.post(f"/services/{sid}/search", json={"keywords": "x"})
        assert response.status_code == 502
        assert response.json()["error"] == "fetch-failed"

    def test_detect_strategy_persists(self, client, server):
        sid = post_spec(client, scroll_draft(server.base_url))
        response = client.post(f"/services/{sid}/detect-strategy",
                               json={"probe_a": "Borges", "probe_b": "Cortázar"})
        assert response.status_code == 422
        assert response.json()["error"] == "no-applicable-strategy"

        form_sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{form_sid}/detect-strategy",
                               json={"probe_a": "Borges", "probe_b": "Cortázar"})
        assert response.status_code == 200
        assert response.json()["variant"] == "write_and_click_to_reload"
        stored = client.get(f"/services/{form_sid}").json()
        assert stored["strategy"]["variant"] == "write_and_click_to_reload"


class TestRenderAndVisualizers:
    def test_visualizer_listing(self, client):
        ids = [v["id"] for v in client.get("/visualizers").json()["visualizers"]]
        assert ids == ["table_of_properties", "group_by_property_value",
                       "aggregate_count"]

    def test_render_table(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/render", json={
            "keywords": "Borges", "visualizer_id": "table_of_properties"})
        assert response.status_code == 200
        model = response.json()
        assert model["kind"] == "table"
        assert len(model["rows"]) == 4

    def test_render_aggregate(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/render", json={
            "keywords": "", "visualizer_id": "aggregate_count",
            "options": {"property": "author"}})
        counts = response.json()["counts"]
        assert sum(counts.values()) == 10  # one page of results

    def test_unknown_visualizer_422(self, client, server):
        sid = post_spec(client, form_spec(server.base_url))
        response = client.post(f"/services/{sid}/render", json={
            "keywords": "Borges", "visualizer_id": "nope"})
        assert response.status_code == 422
        assert response.json()["error"] == "unknown-visualizer"


class TestSnapshotsAndSuggest:
    def test_fetch_sanitizes(self, client, server):
        response = client.post("/fetch", json={"url": f"{server.base_url}/scroll"})
        assert response.status_code == 200
        body = response.json()
        assert body["snapshot_id"]
        reparsed = parse_html(body["sanitized_html"])
        assert all(el.tag != "script" for el in reparsed.root.iter_elements())

    def test_fetch_failure_502(self, client):
        response = client.post("/fetch", json={"url": "http://127.0.0.1:1/x"})
        assert response.status_code == 502

    def test_suggest_flow(self, client, server):
        snap = client.post("/fetch",
                           json={"url": f"{server.base_url}/form/results?q="}).json()
        doc = parse_html(snap["sanitized_html"])
        # find the path to the first result card
        from searchsvc.model import Selector
        from searchsvc.selectors import evaluate

        card = evaluate(Selector("css", "li.result", expect_many=True), doc)[0]
        path = doc.path_of(card)
        response = client.post("/selectors/suggest", json={
            "snapshot_id": snap["snapshot_id"],
            "node_path": list(path.steps)})
        assert response.status_code == 200
        suggestions = response.json()["suggestions"]
        assert any(s["specificity"] == "generalized" and s["match_count"] == 10
                   for s in suggestions)

    def test_suggest_unknown_snapshot_404(self, client):
        response = client.post("/selectors/suggest",
                               json={"snapshot_id": "nope", "node_path": []})
        assert response.status_code == 404

    def test_snapshot_ttl_expiry(self, server, tmp_path):
        app = create_app(str(tmp_path / "ttl-store"),
                         fetcher=HttpxFetcher(politeness_seconds=0),
                         snapshot_ttl_seconds=0)
        with TestClient(app) as short_client:
            snap = short_client.post(
                "/fetch", json={"url": f"{server.base_url}/form"}).json()
            response = short_client.post("/selectors/suggest", json={
                "snapshot_id": snap["snapshot_id"], "node_path": [0]})
            assert response.status_code == 404

    def test_suggest_bad_path_422(self, client, server):
        snap = client.post("/fetch", json={"url": f"{server.base_url}/form"}).json()
        response = client.post("/selectors/suggest", json={
            "snapshot_id": snap["snapshot_id"], "node_path": [9, 9, 9]})
        assert response.status_code == 422
        assert response.json()["error"] == "unresolvable-path"


class TestBundlesAndKlm:
    def test_export_import_cycle(self, client, minimal_spec):
        sid = post_spec(client, minimal_spec)
        bundle = client.get(f"/services/{sid}/export")
        assert bundle.status_code == 200
        result = client.post("/services/import", json=json.loads(bundle.text))
        body = result.json()
        assert len(body["imported"]) == 1
        assert body["imported"][0] != sid  # collision: fresh id
        assert len(client.get("/services").json()["services"]) == 2

    def test_import_reports_rejections(self, client, minimal_spec):
        raw = spec_to_json_dict(minimal_spec)
        raw["result_spec"]["target_url"] = None
        response = client.post("/services/import", json={
            "format_version": "1", "services": [raw]})
        body = response.json()
        assert body["imported"] == []
        assert len(body["rejected"]) == 1

    def test_klm_estimate(self, client):
        from pathlib import Path

        scenario = json.loads(
            (Path(__file__).resolve().parent.parent /
             "scenarios/table1_baseline.json").read_text("utf-8"))
        response = client.post("/klm/estimate", json={"scenario": scenario})
        assert response.status_code == 200
        body = response.json()
        assert body["total"] == 46.6
        assert len(body["per_step"]) == 6

    def test_klm_bad_scenario_400(self, client):
        response = client.post("/klm/estimate", json={"scenario": {"name": "x"}})
        assert response.status_code == 400
