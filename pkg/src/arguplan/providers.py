"""Chat-completion backends.

Two implementations of one interface: ``complete(prompt) -> text``.

HttpProvider speaks the de-facto chat-completion wire schema (POST
/chat/completions with model, messages, temperature) against any compatible
endpoint, with bounded exponential-backoff retries on transport errors and
5xx responses only.

ReplayProvider makes the whole engine deterministic and offline-testable:
it answers from a fingerprint-keyed store of recorded responses. Given a
fallback provider it fills misses by delegating and recording (so a live
run can be captured once and replayed forever); without one, a miss is an
error. The fingerprint is a sha256 over a canonical serialization of
(task, messages, temperature), so it is stable across runs and platforms.

Both providers are safe to share across threads.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .errors import (
    DuplicateFingerprint,
    ProviderError,
    ProviderHttpError,
    ProviderTimeout,
    ReplayMiss,
)
from .prompting import RenderedPrompt

DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MODEL = "gpt-3.5-turbo"


class Provider(Protocol):
    def complete(self, prompt: RenderedPrompt) -> str: ...


@dataclass(frozen=True)
class ProviderConfig:
    base_url: str
    model: str
    api_key: str
    timeout: float = 30.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def config_from_env(env: dict[str, str]) -> ProviderConfig:
    """Build a live-provider config from LLM_* environment variables."""
    api_key = env.get("LLM_API_KEY", "")
    if not api_key:
        raise ProviderError("LLM_API_KEY is not set")
    return ProviderConfig(
        base_url=env.get("LLM_BASE_URL", DEFAULT_BASE_URL),
        model=env.get("LLM_MODEL", DEFAULT_MODEL),
        api_key=api_key,
    )


def fingerprint(prompt: RenderedPrompt) -> str:
    """Stable content hash of a rendered prompt.

    Canonical form pins everything that affects the completion: task name,
    ordered (role, content) pairs, and the temperature at fixed precision.
    ASCII-escaped JSON with sorted keys keeps the bytes platform-independent.
    """
    payload = {
        "task": prompt.task.value,
        "messages": [[m.role, m.content] for m in prompt.messages],
        "temperature": f"{prompt.temperature:.4f}",
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


class ReplayProvider:
    """Deterministic provider backed by a fingerprint -> response store."""

    def __init__(
        self,
        store: dict[str, str] | None = None,
        *,
        fallback: Provider | None = None,
    ):
        self._store: dict[str, str] = dict(store) if store else {}
        self._fallback = fallback
        self._lock = threading.Lock()
        self.calls: list[RenderedPrompt] = []

    def __len__(self) -> int:
        return len(self._store)

    def complete(self, prompt: RenderedPrompt) -> str:
        fp = fingerprint(prompt)
        with self._lock:
            self.calls.append(prompt)
            hit = self._store.get(fp)
        if hit is not None:
            return hit
        if self._fallback is None:
            raise ReplayMiss(fp)
        response = self._fallback.complete(prompt)
        with self._lock:
            self._store[fp] = response
        return response

    def record(self, prompt: RenderedPrompt, response: str, *, overwrite: bool = False) -> str:
        """Store a response for a prompt; returns the fingerprint.

        Re-recording the identical response is a no-op; a conflicting one
        needs ``overwrite=True``.
        """
        fp = fingerprint(prompt)
        with self._lock:
            existing = self._store.get(fp)
            if existing is not None and existing != response and not overwrite:
                raise DuplicateFingerprint(fp)
            self._store[fp] = response
        return fp

    # -- store persistence ----------------------------------------------

    @classmethod
    def load(cls, path: str | Path, *, fallback: Provider | None = None) -> ReplayProvider:
        raw = Path(path).read_text(encoding="utf-8")
        store = json.loads(raw)
        if not isinstance(store, dict):
            raise ProviderError(f"replay store {path} is not a JSON object")
        return cls(store, fallback=fallback)

    def save(self, path: str | Path) -> None:
        with self._lock:
            snapshot = dict(self._store)
        blob = json.dumps(snapshot, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
        Path(path).write_text(blob, encoding="utf-8")


class HttpProvider:
    """Live chat-completion client.

    ``transport`` and ``sleeper`` exist for tests (failure injection and
    backoff without real waiting).
    """

    def __init__(
        self,
        config: ProviderConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self._config = config
        self._sleeper = sleeper
        self._client = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {config.api_key}"},
            timeout=config.timeout,
            transport=transport,
        )

    def close(self) -> None:
        self._client.close()

    def complete(self, prompt: RenderedPrompt) -> str:
        body = {
            "model": self._config.model,
            "messages": [{"role": m.role, "content": m.content} for m in prompt.messages],
            "temperature": prompt.temperature,
        }
        attempts = self._config.max_retries + 1
        last_error: Exception | None = None
        last_status: int | None = None
        for attempt in range(attempts):
            if attempt > 0:
                self._sleeper(0.5 * 2 ** (attempt - 1))
            try:
                response = self._client.post("/chat/completions", json=body)
            except httpx.TimeoutException as exc:
                last_error = exc
                continue
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_status = response.status_code
                last_error = None
                continue
            if response.status_code >= 400:
                raise ProviderHttpError(response.status_code)
            return self._extract_text(response)
        if last_status is not None:
            raise ProviderHttpError(last_status)
        if isinstance(last_error, httpx.TimeoutException):
            raise ProviderTimeout(str(last_error))
        raise ProviderError(f"transport failure: {last_error}")

    @staticmethod
    def _extract_text(response: httpx.Response) -> str:
        try:
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderError(f"malformed completion response: {exc}") from exc
