"""Local deterministic test server: four synthetic search engines plus a JSON
API over the fixed dataset. Responses are pure functions of (query params,
dataset) — repeated requests are byte-identical."""

from __future__ import annotations

import errno
import html
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qsl, urlencode, urlsplit

from ..errors import PortInUseError
from .data import PAGE_SIZE, Record, citation_text, detail_path, ground_truth, load_dataset

_VENUES = ("journal", "conference")
_ORDERS = ("rating", "year")


def _esc(text: str) -> str:
    return html.escape(text, quote=True)


def _page_slice(records: list[Record], page: int) -> tuple[list[Record], bool, bool]:
    start = (page - 1) * PAGE_SIZE
    chunk = records[start:start + PAGE_SIZE]
    has_prev = page > 1
    has_next = page * PAGE_SIZE < len(records)
    return chunk, has_prev, has_next


def _query_string(q: str, venue: str | None, order: str | None,
                  page: int | None = None) -> str:
    params = [("q", q)]
    if venue:
        params.append(("venue", venue))
    if order:
        params.append(("order", order))
    if page is not None:
        params.append(("page", str(page)))
    return urlencode(params)


def _result_card(record: Record) -> str:
    return (
        f'<li class="result" data-id="{record.id}">\n'
        f'  <h3 class="title"><a class="target" href="{detail_path(record.id)}">'
        f"{_esc(record.title)}</a></h3>\n"
        f'  <span class="author">{_esc(record.author)}</span>\n'
        f'  <span class="rating">{record.rating}</span>\n'
        f'  <span class="year">{record.year}</span>\n'
        f'  <p class="blurb">{_esc(record.description)}</p>\n'
        f"</li>"
    )


def _results_block(results_path: str, q: str, venue: str | None,
                   order: str | None, page: int,
                   records: list[Record]) -> str:
    chunk, has_prev, has_next = _page_slice(records, page)
    cards = "\n".join(_result_card(r) for r in chunk)
    parts = [f'<ul class="results">\n{cards}\n</ul>' if chunk
             else '<ul class="results"></ul>\n<p class="empty">No results</p>']
    pager = []
    if has_prev:
        href = f"{results_path}?{_query_string(q, venue, order, page - 1)}"
        pager.append(f'<a class="prev" href="{_esc(href)}">Previous</a>')
    if has_next:
        href = f"{results_path}?{_query_string(q, venue, order, page + 1)}"
        pager.append(f'<a class="next" href="{_esc(href)}">Next</a>')
    if pager:
        parts.append('<nav class="pager">' + " ".join(pager) + "</nav>")
    parts.append(_filters_block(results_path, q))
    return "\n".join(parts)


def _filters_block(results_path: str, q: str) -> str:
    links = [
        ("filter-journal", _query_string(q, "journal", None), "Journal only"),
        ("filter-conference", _query_string(q, "conference", None), "Conference only"),
        ("order-rating", _query_string(q, None, "rating"), "By rating"),
    ]
    body = " ".join(
        f'<a class="{cls}" href="{_esc(results_path)}?{qs}">{label}</a>'
        for cls, qs, label in links
    )
    return f'<nav class="filters">{body}</nav>'


def _full_page(title: str, form_html: str, body: str) -> str:
    return (
        "<html><head><title>" + _esc(title) + "</title></head>\n"
        "<body>\n<header>\n" + form_html + "\n</header>\n"
        + body + "\n</body></html>\n"
    )


_FORM_SEARCH_FORM = (
    '<form id="search-form" action="/form/results" method="get">\n'
    '  <input id="search-box" name="q" type="text">\n'
    '  <input type="hidden" name="src" value="fixture">\n'
    '  <button id="search-go" type="submit">Search</button>\n'
    "</form>"
)

_AJAX_SEARCH_FORM = (
    '<form id="ajax-form" action="/ajax/api/search" method="get">\n'
    '  <input id="ajax-q" name="q" type="text">\n'
    '  <button id="ajax-go" type="button">Search</button>\n'
    "</form>"
)

_TYPE_SEARCH_FORM = (
    '<form id="type-form" action="/type/api/search" method="get">\n'
    '  <input id="type-q" name="q" type="text">\n'
    "</form>"
)

def _scroll_shell(dataset) -> str:
    # a scroll-loaded feed: the first slice is server-rendered and identical
    # for every query; more items only ever arrive via script-driven scrolling
    cards = "\n".join(_result_card(r) for r in dataset[:PAGE_SIZE])
    return (
        "<html><head><title>Scroll books</title></head>\n"
        "<body>\n"
        '<input id="scroll-q" name="q" type="text">\n'
        f'<div id="feed" class="feed">\n<ul class="results">\n{cards}\n</ul>\n</div>\n'
        '<script src="/static/scroll.js"></script>\n'
        "</body></html>\n"
    )


class FixtureServer:
    """Runs the four engines + /jsonapi on 127.0.0.1. Read-only after startup
    except fail_detail_ids, the hook that forces chosen detail routes to 404."""

    def __init__(self, port: int = 0):
        self.requested_port = port
        self.dataset = load_dataset()
        self.fail_detail_ids: set[str] = set()
        self._httpd: ThreadingHTTPServer | None = None
        self._thread: threading.Thread | None = None

    # -- lifecycle

    def start(self) -> "FixtureServer":
        handler = _make_handler(self)
        try:
            self._httpd = ThreadingHTTPServer(("127.0.0.1", self.requested_port),
                                              handler)
        except OSError as exc:
            if exc.errno == errno.EADDRINUSE:
                raise PortInUseError(f"port {self.requested_port} is in use") from exc
            raise
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            if self._thread is not None:
                self._thread.join(timeout=2)
            self._httpd = None
            self._thread = None

    @property
    def port(self) -> int:
        assert self._httpd is not None, "server not started"
        return self._httpd.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    # -- oracle

    def ground_truth(self, keywords: str = "", venue: str | None = None,
                     order: str | None = None) -> list[Record]:
        return ground_truth(self.dataset, keywords, venue, order)

    # -- response bodies (pure functions of the parsed request)

    def render(self, path: str, params: dict[str, str]) -> tuple[int, str, str]:
        """(status, content_type, body) for a GET. 404 body for unknown paths."""
        q = params.get("q", "")
        venue = params.get("venue") or None
        if venue not in _VENUES:
            venue = None
        order = params.get("order") or None
        if order not in _ORDERS:
            order = None
        try:
            page = max(1, int(params.get("page", "1")))
        except ValueError:
            page = 1

        if path == "/form":
            return 200, "text/html; charset=utf-8", _full_page(
                "Book search", _FORM_SEARCH_FORM,
                _filters_block("/form/results", q))
        if path == "/form/results":
            hits = self.ground_truth(q, venue, order)
            body = _results_block("/form/results", q, venue, order, page, hits)
            return 200, "text/html; charset=utf-8", _full_page(
                f"Results for {q}", _FORM_SEARCH_FORM, body)
        if path == "/ajax":
            return 200, "text/html; charset=utf-8", _full_page(
                "Ajax book search", _AJAX_SEARCH_FORM,
                '<div id="ajax-results"></div>')
        if path == "/ajax/api/search":
            hits = self.ground_truth(q, venue, order)
            body = _results_block("/ajax/api/search", q, venue, order, page, hits)
            return 200, "text/html; charset=utf-8", body + "\n"
        if path == "/type":
            return 200, "text/html; charset=utf-8", _full_page(
                "Keystroke book search", _TYPE_SEARCH_FORM,
                '<div id="type-results"></div>')
        if path == "/type/api/search":
            hits = self.ground_truth(q, venue, order)
            body = _results_block("/type/api/search", q, venue, order, page, hits)
            return 200, "text/html; charset=utf-8", body + "\n"
        if path == "/scroll":
            return 200, "text/html; charset=utf-8", _scroll_shell(self.dataset)
        if path == "/jsonapi":
            hits = self.ground_truth(q, venue, order)
            chunk, _, _ = _page_slice(hits, page)
            payload = {
                "query": q,
                "page": page,
                "page_size": PAGE_SIZE,
                "total": len(hits),
                "items": [
                    {
                        "id": r.id,
                        "title": r.title,
                        "author": r.author,
                        "rating": r.rating,
                        "venue_kind": r.venue_kind,
                        "year": r.year,
                        "url": detail_path(r.id),
                    }
                    for r in chunk
                ],
            }
            return 200, "application/json", json.dumps(payload, sort_keys=True) + "\n"
        if path.startswith("/detail/"):
            record_id = path[len("/detail/"):]
            record = next((r for r in self.dataset if r.id == record_id), None)
            if record is None or record_id in self.fail_detail_ids:
                return 404, "text/html; charset=utf-8", "<html><body>gone</body></html>\n"
            body = (
                '<article class="book-detail">\n'
                f'  <h1 class="title">{_esc(record.title)}</h1>\n'
                f'  <span class="author">{_esc(record.author)}</span>\n'
                f'  <span class="rating">{record.rating}</span>\n'
                f'  <p class="description">{_esc(record.description)}</p>\n'
                f'  <pre class="citation">{_esc(citation_text(record))}</pre>\n'
                "</article>"
            )
            return 200, "text/html; charset=utf-8", _full_page(
                record.title, "", body)
        if path == "/static/scroll.js":
            return 200, "application/javascript", "/* scroll loader stub */\n"
        return 404, "text/html; charset=utf-8", "<html><body>not found</body></html>\n"


def _make_handler(server: FixtureServer):
    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            split = urlsplit(self.path)
            params = dict(parse_qsl(split.query))
            status, content_type, body = server.render(split.path, params)
            payload = body.encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(payload)))
            self.end_headers()
            self.wfile.write(payload)

        def log_message(self, *args):  # keep test output clean
            pass

    return Handler


def serve(port: int = 0) -> FixtureServer:
    """Start a fixture server; port 0 picks a free ephemeral port."""
    return FixtureServer(port).start()
