"""Request plans and the fetching capability.

A plan is a declarative description of one HTTP request; the Fetcher contract
executes plans without ever running scripts. The default implementation is
httpx-backed with redirect limits, timeouts and per-host politeness spacing.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field
from typing import Protocol, runtime_checkable
from urllib.parse import urlencode, urlsplit

import httpx

from . import __version__
from .errors import FetchFailedError

DEFAULT_TIMEOUT = 10.0
DEFAULT_MAX_REDIRECTS = 5
DEFAULT_MAX_PARALLEL = 4
DEFAULT_POLITENESS_SECONDS = 0.1
DEFAULT_USER_AGENT = f"searchsvc/{__version__}"


@dataclass(frozen=True, slots=True)
class HttpRequestPlan:
    method: str  # GET | POST
    url: str
    params: tuple[tuple[str, str], ...] = ()
    headers: tuple[tuple[str, str], ...] = ()
    body_encoding: str = "none"  # none | form_urlencoded

    def __post_init__(self):
        if self.method == "GET" and self.body_encoding != "none":
            raise ValueError("GET requests cannot carry a body")
        if not urlsplit(self.url).scheme:
            raise ValueError(f"plan URL must be absolute, got {self.url!r}")

    def full_url(self) -> str:
        """URL with query-string params merged in (as sent for GET)."""
        if self.body_encoding != "none" or not self.params:
            return self.url
        glue = "&" if urlsplit(self.url).query else "?"
        return self.url + glue + urlencode(list(self.params))

    def describe(self) -> str:
        """Diagnostic text form, used by --dry-run output."""
        lines = [f"{self.method} {self.url}"]
        for name, value in self.params:
            lines.append(f"  {name}={value}")
        if self.body_encoding != "none":
            lines.append(f"  (body: {self.body_encoding})")
        return "\n".join(lines)


@dataclass(frozen=True, slots=True)
class FetchResponse:
    status: int
    final_url: str
    body: str
    content_type: str = ""

    @property
    def ok(self) -> bool:
        return self.status < 400


@runtime_checkable
class Fetcher(Protocol):
    """Capability contract: executes plans, never runs scripts."""

    max_parallel: int

    def fetch(self, plan: HttpRequestPlan) -> FetchResponse: ...


@dataclass
class HttpxFetcher:
    """Default fetcher. politeness_seconds spaces requests per host; set it to
    0 for the local fixture harness."""

    timeout: float = DEFAULT_TIMEOUT
    max_redirects: int = DEFAULT_MAX_REDIRECTS
    max_parallel: int = DEFAULT_MAX_PARALLEL
    user_agent: str = DEFAULT_USER_AGENT
    politeness_seconds: float = DEFAULT_POLITENESS_SECONDS
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _last_request: dict = field(default_factory=dict, repr=False)

    def _be_polite(self, url: str) -> None:
        if self.politeness_seconds <= 0:
            return
        host = urlsplit(url).netloc
        while True:
            with self._lock:
                now = time.monotonic()
                ready_at = self._last_request.get(host, 0.0) + self.politeness_seconds
                if now >= ready_at:
                    self._last_request[host] = now
                    return
            time.sleep(ready_at - now)

    def fetch(self, plan: HttpRequestPlan) -> FetchResponse:
        self._be_polite(plan.url)
        headers = {"User-Agent": self.user_agent, **dict(plan.headers)}
        try:
            with httpx.Client(
                timeout=self.timeout,
                follow_redirects=True,
                max_redirects=self.max_redirects,
                headers=headers,
            ) as client:
                # params are merged into the URL by full_url(); passing them
                # to httpx would *replace* any query string already there
                if plan.method == "POST" and plan.body_encoding == "form_urlencoded":
                    response = client.post(plan.url,
                                           content=urlencode(list(plan.params)),
                                           headers={"Content-Type":
                                                    "application/x-www-form-urlencoded"})
                elif plan.method == "POST":
                    response = client.post(plan.full_url())
                else:
                    response = client.get(plan.full_url())
        except httpx.HTTPError as exc:
            raise FetchFailedError(f"{plan.method} {plan.url}: {exc}") from exc
        return FetchResponse(
            status=response.status_code,
            final_url=str(response.url),
            body=response.text,
            content_type=response.headers.get("content-type", ""),
        )
