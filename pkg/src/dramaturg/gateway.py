"""Uniform interface to completion-style language models.

Two backends ship with the package: a deterministic mock keyed on
(prompt digest, seed) for tests and offline runs, and a thin HTTP
adapter speaking a minimal completion protocol. The gateway wraps a
backend with bounded retries, a max-in-flight limit, and a context
window pre-check.
"""

from __future__ import annotations

import hashlib
import os
import threading
import time
from dataclasses import dataclass
from typing import Callable, Mapping, Protocol

import httpx

from .errors import BackendRejected, BackendUnavailable, ContextOverflow
from .markers import END
from .model import SamplingConfig

__all__ = [
    "Completion",
    "Gateway",
    "HttpBackend",
    "MockBackend",
    "SamplingConfig",
    "mock_script",
    "text_digest",
    "truncate_at_marker",
]


def text_digest(text: str) -> str:
    """Opaque digest of an exact prompt text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def truncate_at_marker(text: str, markers: list[str] | tuple[str, ...]) -> str:
    """Text up to (excluding) the earliest occurrence of any marker."""
    cut = len(text)
    for marker in markers:
        index = text.find(marker)
        if index != -1 and index < cut:
            cut = index
    return text[:cut]


@dataclass(frozen=True)
class Completion:
    text: str
    backend_id: str
    token_count: int | None = None


class Backend(Protocol):
    backend_id: str
    context_window: int | None

    def complete_text(self, prompt_text: str, config: SamplingConfig) -> str: ...

    def count_tokens(self, text: str) -> int: ...


class MockBackend:
    """Deterministic backend returning scripted or derived pseudo-text.

    Scripted entries are keyed on (prompt digest, seed). Unscripted
    queries fall back to pseudo-text derived from the digest and seed;
    the fallback is shaped after the trailing tag of the prompt so that
    full pipelines stay parseable in tests.
    """

    def __init__(
        self,
        entries: Mapping[tuple[str, int], str] | None = None,
        context_window: int | None = None,
        latency: float = 0.0,
    ):
        self.backend_id = "mock"
        self.context_window = context_window
        self.latency = latency
        self._entries: dict[tuple[str, int], str] = dict(entries or {})
        self._lock = threading.Lock()
        self.call_log: list[tuple[str, int]] = []
        self._in_flight = 0
        self.max_in_flight_seen = 0

    def script(self, prompt_text: str, seed: int, output: str) -> None:
        self._entries[(text_digest(prompt_text), seed)] = output

    def script_digest(self, digest: str, seed: int, output: str) -> None:
        self._entries[(digest, seed)] = output

    def count_tokens(self, text: str) -> int:
        # tokenizer stub: whitespace tokens
        return len(text.split())

    def complete_text(self, prompt_text: str, config: SamplingConfig) -> str:
        digest = text_digest(prompt_text)
        with self._lock:
            self.call_log.append((digest, config.seed))
            self._in_flight += 1
            self.max_in_flight_seen = max(self.max_in_flight_seen, self._in_flight)
        try:
            if self.latency:
                time.sleep(self.latency)
            scripted = self._entries.get((digest, config.seed))
            if scripted is not None:
                return scripted
            return self._fallback(prompt_text, digest, config.seed)
        finally:
            with self._lock:
                self._in_flight -= 1

    def _fallback(self, prompt_text: str, digest: str, seed: int) -> str:
        h = hashlib.sha256(f"{digest}:{seed}".encode("utf-8")).hexdigest()
        w = [h[i : i + 6] for i in range(0, 36, 6)]
        tail = prompt_text.rstrip("\n")
        if tail.endswith("Title:"):
            return f" The {w[0].title()} Hour{END}"
        if tail.endswith("<scenes>"):
            scenes = []
            for i, element in enumerate(("Exposition", "Climax", "Resolution")):
                scenes.append(
                    f"Place: The {w[i]} room.\n"
                    f"Plot element: {element}.\n"
                    f"Beat: Something about {w[i + 3]} unfolds here."
                )
            return "\n\n" + "\n\n".join(scenes) + f"\n\n{END}"
        if tail.endswith("Description:"):
            return f" A place marked by {w[0]}. The air hums with {w[1]}.{END}"
        if tail.endswith("<dialog>"):
            return (
                f"\n\nVOICE {w[0].upper()}\nWe must speak of {w[1]}.\n\n"
                f"VOICE {w[2].upper()}\nIndeed, and of {w[3]} too.\n{END}"
            )
        if "<character>" in prompt_text:
            return (
                f"<character>Mx {w[0]} <description>Mx {w[0]} is a figure of {w[1]}.<stop>\n"
                f"<character>Dr {w[2]} <description>Dr {w[2]} is a keeper of {w[3]}.<stop>\n{END}"
            )
        return f"{w[0]} {w[1]} {w[2]}{END}"


def mock_script(entries: Mapping[tuple[str, int], str]) -> MockBackend:
    """Backend handle returning the scripted outputs for known keys."""
    return MockBackend(entries)


class HttpBackend:
    """Adapter for a remote completion endpoint.

    Protocol: POST ``base_url`` with ``{prompt, max_tokens, temperature,
    top_p, seed}``; the response body is ``{"text": ...}``. Network and
    5xx failures raise BackendUnavailable (retryable); 4xx responses
    raise BackendRejected.
    """

    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        context_window: int | None = None,
        timeout: float = 60.0,
        client: httpx.Client | None = None,
    ):
        self.base_url = base_url
        self.backend_id = f"http:{base_url}"
        self.context_window = context_window
        self._api_key = api_key
        self._client = client or httpx.Client(timeout=timeout)

    @classmethod
    def from_env(cls, context_window: int | None = None) -> "HttpBackend":
        url = os.environ.get("LMGW_BACKEND_URL")
        if not url:
            raise BackendUnavailable("LMGW_BACKEND_URL is not set")
        return cls(url, api_key=os.environ.get("LMGW_API_KEY"), context_window=context_window)

    def count_tokens(self, text: str) -> int:
        # conservative chars/4 heuristic; remote tokenizers are not exposed
        return max(1, len(text) // 4)

    def complete_text(self, prompt_text: str, config: SamplingConfig) -> str:
        payload = {
            "prompt": prompt_text,
            "max_tokens": config.max_tokens,
            "temperature": config.temperature,
            "top_p": config.nucleus_mass,
            "seed": config.seed,
        }
        headers = {}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        try:
            response = self._client.post(self.base_url, json=payload, headers=headers)
        except httpx.HTTPError as exc:
            raise BackendUnavailable(f"request failed: {exc}") from exc
        if 400 <= response.status_code < 500:
            raise BackendRejected(f"backend rejected request: {response.status_code}")
        if response.status_code >= 500:
            raise BackendUnavailable(f"backend error: {response.status_code}")
        try:
            return response.json()["text"]
        except (KeyError, ValueError) as exc:
            raise BackendUnavailable(f"malformed backend response: {exc}") from exc


class Gateway:
    """Retry, concurrency-bounding and window checks around one backend.

    ``complete`` may be called from many threads; at most
    ``max_in_flight`` requests reach the backend concurrently. Transient
    failures are retried up to ``max_attempts`` total requests with
    exponential backoff; rejections are not retried.
    """

    def __init__(
        self,
        backend: Backend,
        max_in_flight: int = 4,
        max_attempts: int = 3,
        backoff_base: float = 1.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.backend = backend
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(max_in_flight)

    def complete(self, prompt, config: SamplingConfig) -> Completion:
        if not prompt.text:
            raise ValueError("prompt text is empty")
        window = self.backend.context_window
        if window is not None and self.backend.count_tokens(prompt.text) > window:
            raise ContextOverflow(
                f"prompt exceeds the backend window of {window} tokens"
            )
        last_error: Exception | None = None
        for attempt in range(1, self.max_attempts + 1):
            try:
                with self._semaphore:
                    text = self.backend.complete_text(prompt.text, config)
                return Completion(text=text, backend_id=self.backend.backend_id)
            except BackendUnavailable as exc:
                last_error = exc
                if attempt < self.max_attempts:
                    self._sleep(self.backoff_base * 2 ** (attempt - 1))
        raise BackendUnavailable(
            f"backend unavailable after {self.max_attempts} attempts: {last_error}"
        )
