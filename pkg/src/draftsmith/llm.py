"""Provider-agnostic completion client with live, mock, and record/replay backends.

Every request is identified by a stable content digest, so a recorded store of
prompt/completion pairs makes the whole synthesis pipeline deterministic and
network-free under test. The live backend speaks a configurable HTTP+JSON
dialect; the credential comes from an environment variable, never from a file.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field as dc_field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional, Protocol

import httpx

DEFAULT_MODEL_ID = "qa-completions-001"
DEFAULT_STOP = ("\n\nQ:",)
DEFAULT_MAX_TOKENS = 256


class LLMError(Exception):
    code = "llm_error"


class AuthMissing(LLMError):
    code = "auth_missing"


class RateLimited(LLMError):
    code = "rate_limited"


class Timeout(LLMError):
    code = "timeout"


class ReplayMiss(LLMError):
    code = "replay_miss"

    def __init__(self, digest: str, preview: str = ""):
        self.digest = digest
        detail = f" (prompt starts {preview!r})" if preview else ""
        super().__init__(f"no recorded completion for digest {digest}{detail}")


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    modelId: str = DEFAULT_MODEL_ID
    temperature: float = 0.0
    frequencyPenalty: float = 0.0
    presencePenalty: float = 0.0
    maxTokens: int = DEFAULT_MAX_TOKENS
    stopSequences: tuple[str, ...] = DEFAULT_STOP

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.maxTokens < 1:
            raise ValueError("maxTokens must be >= 1")


@dataclass
class CompletionResponse:
    text: str
    latency: float
    provider: str


def request_digest(req: CompletionRequest) -> str:
    """Stable content hash of everything that influences the completion."""
    payload = {
        "prompt": req.prompt,
        "modelId": req.modelId,
        "temperature": req.temperature,
        "frequencyPenalty": req.frequencyPenalty,
        "presencePenalty": req.presencePenalty,
        "maxTokens": req.maxTokens,
        "stopSequences": list(req.stopSequences),
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class Backend(Protocol):
    provider: str

    def complete(self, req: CompletionRequest) -> CompletionResponse: ...


@dataclass
class ProviderProfile:
    """How to talk to one completions endpoint. The credential never lives
    here: apiKeyEnv names the environment variable that holds it."""

    name: str = "default"
    endpoint: str = "http://localhost:8000/v1/completions"
    apiKeyEnv: str = "LLM_API_KEY"
    promptField: str = "prompt"
    modelField: str = "model"
    temperatureField: str = "temperature"
    frequencyPenaltyField: str = "frequency_penalty"
    presencePenaltyField: str = "presence_penalty"
    maxTokensField: str = "max_tokens"
    stopField: str = "stop"
    completionPath: tuple = ("choices", 0, "text")
    timeoutSeconds: float = 30.0
    maxRetries: int = 3
    backoffSeconds: float = 0.5


def load_provider_profile(path: str | Path) -> ProviderProfile:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    secretish = {"apiKey", "api_key", "apikey", "token", "secret", "credential"}
    leaked = sorted(set(doc) & secretish)
    if leaked:
        raise AuthMissing(
            f"provider profile must not embed credentials (found {leaked}); "
            f"set the environment variable named by apiKeyEnv instead"
        )
    known = {f for f in ProviderProfile.__dataclass_fields__}
    fields = {k: v for k, v in doc.items() if k in known}
    if "completionPath" in fields:
        fields["completionPath"] = tuple(fields["completionPath"])
    return ProviderProfile(**fields)


class LiveBackend:
    """HTTP completions backend with bounded retry on transient failures."""

    def __init__(self, profile: ProviderProfile, sleep: Callable[[float], None] = time.sleep):
        self.profile = profile
        self.provider = profile.name
        self._sleep = sleep

    def _credential(self) -> str:
        key = os.environ.get(self.profile.apiKeyEnv, "")
        if not key:
            raise AuthMissing(
                f"no credential in environment variable {self.profile.apiKeyEnv!r}"
            )
        return key

    def _payload(self, req: CompletionRequest) -> dict:
        p = self.profile
        return {
            p.promptField: req.prompt,
            p.modelField: req.modelId,
            p.temperatureField: req.temperature,
            p.frequencyPenaltyField: req.frequencyPenalty,
            p.presencePenaltyField: req.presencePenalty,
            p.maxTokensField: req.maxTokens,
            p.stopField: list(req.stopSequences),
        }

    def _extract(self, doc: Any) -> str:
        node = doc
        for step in self.profile.completionPath:
            try:
                node = node[step]
            except (KeyError, IndexError, TypeError):
                raise LLMError(
                    f"completion response lacks path {list(self.profile.completionPath)}"
                ) from None
        if not isinstance(node, str):
            raise LLMError("completion response path did not end in text")
        return node

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        key = self._credential()
        headers = {"Authorization": f"Bearer {key}"}
        start = time.monotonic()
        last_error: LLMError = RateLimited("no attempts made")
        for attempt in range(self.profile.maxRetries + 1):
            if attempt:
                self._sleep(self.profile.backoffSeconds * (2 ** (attempt - 1)))
            try:
                resp = httpx.post(
                    self.profile.endpoint,
                    json=self._payload(req),
                    headers=headers,
                    timeout=self.profile.timeoutSeconds,
                )
            except httpx.TimeoutException:
                last_error = Timeout(f"no response within {self.profile.timeoutSeconds}s")
                continue
            except httpx.HTTPError as e:
                last_error = LLMError(f"transport failure: {e}")
                continue
            if resp.status_code in (401, 403):
                raise AuthMissing(f"endpoint rejected credential ({resp.status_code})")
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = RateLimited(f"status {resp.status_code}")
                continue
            if resp.status_code != 200:
                raise LLMError(f"unexpected status {resp.status_code}: {resp.text[:200]}")
            text = self._extract(resp.json())
            return CompletionResponse(
                text=text, latency=time.monotonic() - start, provider=self.provider
            )
        raise last_error


class MockBackend:
    """Digest-keyed canned completions; counts calls so tests can probe usage."""

    provider = "mock"

    def __init__(self, fixtures: Optional[dict[str, str]] = None):
        self.fixtures = dict(fixtures or {})
        self.calls = 0

    def add(self, req: CompletionRequest, text: str) -> None:
        self.fixtures[request_digest(req)] = text

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        self.calls += 1
        digest = request_digest(req)
        if digest not in self.fixtures:
            raise ReplayMiss(digest, req.prompt[:48])
        return CompletionResponse(text=self.fixtures[digest], latency=0.0, provider=self.provider)


class ReplayMode(str, Enum):
    RECORD = "record"
    REPLAY = "replay"
    PASSTHROUGH = "passthrough"


@dataclass
class ReplayStore:
    """Digest-keyed store of completions: a manifest plus one text file per entry.

    In-memory when root is None; otherwise every recorded entry is flushed to
    disk immediately.
    """

    root: Optional[Path] = None
    mode: ReplayMode = ReplayMode.REPLAY
    entries: dict[str, str] = dc_field(default_factory=dict)
    previews: dict[str, str] = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        self._lock = threading.Lock()

    @classmethod
    def open(cls, manifest_path: str | Path, mode: ReplayMode = ReplayMode.REPLAY) -> "ReplayStore":
        manifest_path = Path(manifest_path)
        root = manifest_path.parent
        store = cls(root=root, mode=mode)
        if manifest_path.exists():
            doc = json.loads(manifest_path.read_text(encoding="utf-8"))
            for digest, entry in doc.get("entries", {}).items():
                text = (root / entry["file"]).read_text(encoding="utf-8")
                store.entries[digest] = text
                store.previews[digest] = entry.get("promptPreview", "")
        elif mode is ReplayMode.REPLAY:
            raise ReplayMiss("-", f"manifest {manifest_path} does not exist")
        return store

    @property
    def manifest_path(self) -> Path:
        assert self.root is not None
        return self.root / "manifest.json"

    def lookup(self, digest: str) -> Optional[str]:
        return self.entries.get(digest)

    def record(self, req: CompletionRequest, text: str) -> str:
        digest = request_digest(req)
        with self._lock:
            self.entries[digest] = text
            self.previews[digest] = req.prompt[:64]
            if self.root is not None:
                self.root.mkdir(parents=True, exist_ok=True)
                (self.root / f"{digest}.txt").write_text(text, encoding="utf-8")
                self._write_manifest()
        return digest

    def _write_manifest(self) -> None:
        doc = {
            "version": 1,
            "entries": {
                digest: {"file": f"{digest}.txt", "promptPreview": self.previews.get(digest, "")}
                for digest in sorted(self.entries)
            },
        }
        tmp = self.manifest_path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
        tmp.replace(self.manifest_path)


class StoreBackend:
    """Applies a ReplayStore's mode in front of an optional inner backend."""

    def __init__(self, store: ReplayStore, inner: Optional[Backend] = None):
        self.store = store
        self.inner = inner
        self.provider = f"{store.mode.value}-store"

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        digest = request_digest(req)
        if self.store.mode is ReplayMode.REPLAY:
            text = self.store.lookup(digest)
            if text is None:
                raise ReplayMiss(digest, req.prompt[:48])
            return CompletionResponse(text=text, latency=0.0, provider=self.provider)
        if self.store.mode is ReplayMode.RECORD:
            text = self.store.lookup(digest)
            if text is not None:
                return CompletionResponse(text=text, latency=0.0, provider=self.provider)
            if self.inner is None:
                raise ReplayMiss(digest, req.prompt[:48])
            resp = self.inner.complete(req)
            self.store.record(req, resp.text)
            return resp
        if self.inner is None:
            raise LLMError("passthrough mode needs a live backend")
        return self.inner.complete(req)


def build_backend(
    replay_manifest: Optional[str | Path] = None,
    record: bool = False,
    profile: Optional[ProviderProfile] = None,
) -> Backend:
    """Assemble the backend stack the service and CLI use.

    A replay manifest alone gives a deterministic offline backend; with record
    set, misses fall through to the live endpoint and are persisted."""
    live: Optional[Backend] = None
    if record or replay_manifest is None:
        live = LiveBackend(profile or ProviderProfile())
    if replay_manifest is None:
        assert live is not None
        return live
    mode = ReplayMode.RECORD if record else ReplayMode.REPLAY
    manifest = Path(replay_manifest)
    if mode is ReplayMode.RECORD and not manifest.exists():
        store = ReplayStore(root=manifest.parent, mode=mode)
    else:
        store = ReplayStore.open(manifest, mode)
    return StoreBackend(store, live)
