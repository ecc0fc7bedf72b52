"""Chat-completion client with pluggable backends and a retry contract.

Two wire dialects are supported (OpenAI-style chat completions and
Gemini-style generateContent) plus a deterministic mock for offline runs.
Transport-level failures are retried inside :meth:`LlmClient.complete`;
format-level failures (unparseable or out-of-range responses) are retried
by :meth:`LlmClient.assess` as fresh, independent requests. One client may
be shared across worker threads; it enforces the per-backend in-flight
bound internally.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .bundles import CueBundle
from .prompts import (
    AssessmentResult,
    PromptConfig,
    ResponseFormatError,
    build_prompt,
    parse_llm_response,
)

logger = logging.getLogger(__name__)

_BACKEND_KINDS = ("openai_style", "gemini_style", "mock")


class LlmError(RuntimeError):
    pass


class AuthError(LlmError):
    pass


class TransportError(LlmError):
    pass


class RateLimited(TransportError):
    pass


class InvalidAfterRetries(LlmError):
    """Every attempt produced an invalid response."""

    def __init__(self, attempts: int, last_error: ResponseFormatError):
        super().__init__(f"no valid result after {attempts} attempts: {last_error}")
        self.attempts = attempts
        self.last_error = last_error


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"
    endpoint_url: str = ""
    model_name: str = ""
    api_key_env_var: str = ""
    max_attempts: int = 3
    request_timeout_s: float = 60.0
    max_in_flight: int = 4
    # Mock only: path to a JSONL script of canned responses.
    mock_script: str | None = None

    def __post_init__(self):
        if self.kind not in _BACKEND_KINDS:
            raise ValueError(f"unknown backend kind: {self.kind!r}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


class MockScript:
    """Canned responses keyed by utterance id or by SHA-256 of the prompt.

    Playback is ordered and per-key; exhausting a key's list is an error so
    tests fail loudly instead of looping. ``delay_s`` simulates latency for
    concurrency tests. Instances are safe to share across threads.
    """

    def __init__(self, responses: dict[str, list[str]], delay_s: float = 0.0):
        self._responses = {k: list(v) for k, v in responses.items()}
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()
        self.delay_s = delay_s
        self.calls = 0
        self.in_flight = 0
        self.max_in_flight_seen = 0

    @classmethod
    def from_jsonl(cls, path: str | Path, delay_s: float = 0.0) -> "MockScript":
        responses: dict[str, list[str]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            key = record.get("utt_id") or record.get("prompt_sha256")
            if not key:
                raise ValueError("mock script line needs utt_id or prompt_sha256")
            responses.setdefault(key, []).extend(record["responses"])
        return cls(responses, delay_s=delay_s)

    def play(self, key: str | None, prompt: str) -> str:
        with self._lock:
            self.calls += 1
            self.in_flight += 1
            self.max_in_flight_seen = max(self.max_in_flight_seen, self.in_flight)
            resolved = None
            if key is not None and key in self._responses:
                resolved = key
            else:
                digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
                if digest in self._responses:
                    resolved = digest
        try:
            if self.delay_s:
                time.sleep(self.delay_s)
            if resolved is None:
                raise TransportError(f"mock script has no entry for key {key!r}")
            with self._lock:
                cursor = self._cursor.get(resolved, 0)
                if cursor >= len(self._responses[resolved]):
                    raise TransportError(f"mock script exhausted for key {resolved!r}")
                self._cursor[resolved] = cursor + 1
                return self._responses[resolved][cursor]
        finally:
            with self._lock:
                self.in_flight -= 1


class LlmClient:
    """Shareable client bound to one backend configuration."""

    def __init__(self, backend: BackendConfig, mock_script: MockScript | None = None):
        self.backend = backend
        if backend.kind == "mock" and mock_script is None:
            if backend.mock_script is None:
                raise ValueError("mock backend needs a script")
            mock_script = MockScript.from_jsonl(backend.mock_script)
        self.mock = mock_script
        self._gate = threading.Semaphore(backend.max_in_flight)
        self._session = requests.Session() if backend.kind != "mock" else None

    def _api_key(self) -> str:
        key = os.environ.get(self.backend.api_key_env_var or "", "")
        if not key:
            raise AuthError(
                f"API key environment variable {self.backend.api_key_env_var!r} is not set"
            )
        return key

    def _request_once(self, prompt: str, api_key: str) -> str:
        cfg = self.backend
        if cfg.kind == "openai_style":
            resp = self._session.post(
                cfg.endpoint_url,
                headers={"Authorization": f"Bearer {api_key}"},
                json={
                    "model": cfg.model_name,
                    "messages": [{"role": "user", "content": prompt}],
                },
                timeout=cfg.request_timeout_s,
            )
        else:  # gemini_style
            url = f"{cfg.endpoint_url.rstrip('/')}/models/{cfg.model_name}:generateContent"
            resp = self._session.post(
                url,
                params={"key": api_key},
                json={"contents": [{"role": "user", "parts": [{"text": prompt}]}]},
                timeout=cfg.request_timeout_s,
            )
        if resp.status_code in (401, 403):
            raise AuthError(f"backend rejected credentials (HTTP {resp.status_code})")
        resp.raise_for_status()
        body = resp.json()
        if cfg.kind == "openai_style":
            return body["choices"][0]["message"]["content"]
        parts = body["candidates"][0]["content"]["parts"]
        return "".join(p.get("text", "") for p in parts)

    def complete(self, prompt: str, key: str | None = None) -> str:
        """One assistant reply; transport failures retry with backoff."""
        cfg = self.backend
        with self._gate:
            if cfg.kind == "mock":
                return self.mock.play(key, prompt)
            api_key = self._api_key()
            last_exc: Exception | None = None
            rate_limited = False
            for attempt in range(cfg.max_attempts):
                if attempt:
                    time.sleep(min(0.5 * 2 ** (attempt - 1), 8.0))
                try:
                    return self._request_once(prompt, api_key)
                except AuthError:
                    raise
                except requests.HTTPError as exc:
                    status = exc.response.status_code if exc.response is not None else 0
                    rate_limited = status == 429
                    if not rate_limited and not 500 <= status < 600:
                        raise TransportError(str(exc)) from exc
                    last_exc = exc
                except (requests.Timeout, requests.ConnectionError) as exc:
                    last_exc = exc
                logger.warning("transport failure (attempt %d/%d): %s",
                               attempt + 1, cfg.max_attempts, last_exc)
            if rate_limited:
                raise RateLimited(f"rate limited after {cfg.max_attempts} attempts")
            raise TransportError(
                f"transport failed after {cfg.max_attempts} attempts: {last_exc}"
            )

    def assess(
        self, bundle: CueBundle, config: PromptConfig
    ) -> tuple[AssessmentResult, int]:
        """Prompt, complete, and parse; re-request until the reply is valid.

        Attempts are independent requests. Returns the result and the number
        of attempts used; raises :class:`InvalidAfterRetries` once
        ``max_attempts`` replies have failed validation.
        """
        prompt = build_prompt(bundle, config)
        last_error: ResponseFormatError | None = None
        for attempt in range(1, self.backend.max_attempts + 1):
            raw = self.complete(prompt, key=bundle.utt_id)
            try:
                return parse_llm_response(raw, config, utt_id=bundle.utt_id), attempt
            except ResponseFormatError as exc:
                last_error = exc
                logger.debug("invalid response for %s (attempt %d): %s",
                             bundle.utt_id, attempt, exc)
        raise InvalidAfterRetries(self.backend.max_attempts, last_error)
