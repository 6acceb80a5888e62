"""The fixture harness itself: dataset constants, oracle, determinism."""

import httpx
import pytest

from searchsvc.fixtures import PAGE_SIZE, load_dataset, serve


@pytest.fixture(scope="module")
def server():
    srv = serve()
    yield srv
    srv.stop()


def test_dataset_constants():
    dataset = load_dataset()
    assert len(dataset) == 30
    borges = [r for r in dataset
              if "borges" in (r.title + " " + r.author).casefold()]
    cortazar = [r for r in dataset
                if "cortázar" in (r.title + " " + r.author).casefold()]
    assert len(borges) == 4
    assert len(cortazar) == 3
    assert len({r.id for r in dataset}) == 30
    assert all(r.venue_kind in ("journal", "conference") for r in dataset)
    assert all(1.0 <= float(r.rating) <= 5.0 for r in dataset)


def test_ground_truth_counts(server):
    assert len(server.ground_truth("Borges")) == 4
    assert len(server.ground_truth("Cortázar")) == 3
    assert server.ground_truth("zzzz") == []
    journal = server.ground_truth("", venue="journal")
    assert journal
    assert all(r.venue_kind == "journal" for r in journal)
    assert len(journal) + len(server.ground_truth("", venue="conference")) == 30


def test_ground_truth_ordering(server):
    by_rating = server.ground_truth("", order="rating")
    ratings = [float(r.rating) for r in by_rating]
    assert ratings == sorted(ratings, reverse=True)
    assert len(by_rating) == 30


def test_every_record_has_detail_page(server):
    with httpx.Client() as client:
        for record in server.dataset:
            response = client.get(f"{server.base_url}/detail/{record.id}")
            assert response.status_code == 200
            assert "citation" in response.text


def test_responses_are_byte_identical(server):
    url = f"{server.base_url}/form/results?q=Borges"
    with httpx.Client() as client:
        first = client.get(url).content
        second = client.get(url).content
    assert first == second


def test_engine_modes_response_shapes(server):
    with httpx.Client() as client:
        full = client.get(f"{server.base_url}/form/results?q=Borges").text
        assert full.startswith("<html>")
        assert full.count('class="result"') == 4

        fragment = client.get(f"{server.base_url}/ajax/api/search?q=Borges").text
        assert "<html>" not in fragment
        assert fragment.count('class="result"') == 4

        fragment2 = client.get(f"{server.base_url}/type/api/search?q=Cortázar").text
        assert fragment2.count('class="result"') == 3

        shell_a = client.get(f"{server.base_url}/scroll?q=Borges").text
        shell_b = client.get(f"{server.base_url}/scroll?q=other").text
        assert shell_a == shell_b  # the feed ignores the query entirely
        assert shell_a.count('class="result"') == 10
        assert 'class="pager"' not in shell_a


def test_keystroke_page_has_no_trigger(server):
    with httpx.Client() as client:
        page = client.get(f"{server.base_url}/type").text
    assert "<button" not in page
    assert 'id="type-q"' in page


def test_pagination_slices(server):
    with httpx.Client() as client:
        p1 = client.get(f"{server.base_url}/form/results?q=&page=1").text
        p3 = client.get(f"{server.base_url}/form/results?q=&page=3").text
        p4 = client.get(f"{server.base_url}/form/results?q=&page=4").text
    assert p1.count('class="result"') == PAGE_SIZE
    assert 'class="next"' in p1
    assert 'class="prev"' not in p1
    assert p3.count('class="result"') == PAGE_SIZE
    assert 'class="next"' not in p3
    assert 'class="prev"' in p3
    assert p4.count('class="result"') == 0


def test_jsonapi(server):
    with httpx.Client() as client:
        payload = client.get(f"{server.base_url}/jsonapi?q=Borges").json()
    assert payload["total"] == 4
    assert len(payload["items"]) == 4
    assert all(item["url"].startswith("/detail/") for item in payload["items"])


def test_forced_detail_404(server):
    victim = server.dataset[0].id
    url = f"{server.base_url}/detail/{victim}"
    with httpx.Client() as client:
        assert client.get(url).status_code == 200
        server.fail_detail_ids.add(victim)
        try:
            assert client.get(url).status_code == 404
        finally:
            server.fail_detail_ids.discard(victim)
        assert client.get(url).status_code == 200
