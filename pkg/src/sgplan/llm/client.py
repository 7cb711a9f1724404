"""Chat-completion client with record/replay fixtures.

Fixtures live under ``<root>/<model>/<digest>.txt`` with a ``<digest>.json``
sidecar holding the prompt, model and timestamp. A file named
``<digest>.trial<k>.txt`` overrides the response for trial ``k`` only,
which is how seeded faults are injected into repeated trials.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

API_KEY_ENV = "SGPLAN_API_KEY"
DEFAULT_MODEL = "scripted-reference"


class LLMError(RuntimeError):
    pass


class MissingFixture(LLMError):
    def __init__(self, digest: str, model: str):
        self.digest = digest
        self.model = model
        super().__init__(f"no recorded completion for digest {digest} (model {model})")


class TransportError(LLMError):
    pass


class MalformedResponse(LLMError):
    pass


class ConfigError(LLMError):
    pass


class Backend(str, Enum):
    LIVE = "live"
    REPLAY = "replay"
    RECORD = "record"


@dataclass(frozen=True)
class CompletionRequest:
    model: str
    messages: tuple[tuple[str, str], ...]
    temperature: float = 0.0
    top_p: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple((r, c) for r, c in self.messages))
        if not self.messages:
            raise ValueError("a completion request needs at least one message")

    def body(self) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
            "temperature": self.temperature,
            "top_p": self.top_p,
        }

    def digest(self) -> str:
        canonical = json.dumps(self.body(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ClientConfig:
    endpoint_url: str = ""
    model: str = DEFAULT_MODEL
    temperature: float = 0.0
    top_p: float = 1.0
    request_timeout_s: float = 120.0
    api_key: str | None = field(default=None, repr=False)

    @classmethod
    def load(cls, path: str | os.PathLike | None = None, env=os.environ) -> ClientConfig:
        doc = {}
        if path is not None:
            try:
                doc = json.loads(Path(path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read client config {path}: {exc}") from exc
            known = {"endpoint_url", "model", "temperature", "top_p", "request_timeout_s"}
            unknown = sorted(set(doc) - known)
            if unknown:
                raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**doc, api_key=env.get(API_KEY_ENV))

    def request(self, messages) -> CompletionRequest:
        return CompletionRequest(self.model, tuple(messages), self.temperature, self.top_p)


class FixtureStore:
    """Recorded completions keyed by request digest."""

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self._lock = threading.RLock()

    def _dir(self, model: str) -> Path:
        return self.root / model

    def path(self, req: CompletionRequest, trial: int | None = None) -> Path:
        suffix = f".trial{trial}.txt" if trial is not None else ".txt"
        return self._dir(req.model) / f"{req.digest()}{suffix}"

    def get(self, req: CompletionRequest, trial: int | None = None) -> str:
        with self._lock:
            if trial is not None:
                override = self.path(req, trial)
                if override.is_file():
                    return override.read_text(encoding="utf-8")
            path = self.path(req)
            if not path.is_file():
                raise MissingFixture(req.digest(), req.model)
            return path.read_text(encoding="utf-8")

    def put(self, req: CompletionRequest, text: str, timestamp: str | None = None) -> Path:
        with self._lock:
            path = self.path(req)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            meta = {
                "model": req.model,
                "temperature": req.temperature,
                "top_p": req.top_p,
                "messages": req.body()["messages"],
                "timestamp": timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
            }
            path.with_suffix(".json").write_text(json.dumps(meta, indent=2, ensure_ascii=False) + "\n", "utf-8")
            return path

    def __contains__(self, req: CompletionRequest) -> bool:
        return self.path(req).is_file()


def http_transport(req: CompletionRequest, config: ClientConfig) -> str:
    """POST a chat-completion request and return the first choice's content."""
    if not config.endpoint_url:
        raise ConfigError("endpoint_url is not configured")
    if not config.api_key:
        raise ConfigError(f"credential missing: set {API_KEY_ENV}")
    data = json.dumps(req.body()).encode("utf-8")
    http_req = urllib.request.Request(
        config.endpoint_url,
        data=data,
        headers={"Content-Type": "application/json", "Authorization": f"Bearer {config.api_key}"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(http_req, timeout=config.request_timeout_s) as resp:
            raw = resp.read()
    except urllib.error.HTTPError as exc:
        raise TransportError(f"HTTP {exc.code} from {config.endpoint_url}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise TransportError(f"request to {config.endpoint_url} failed: {exc}") from exc
    try:
        body = json.loads(raw)
        content = body["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise MalformedResponse(f"unexpected response body: {raw[:200]!r}") from exc
    if not isinstance(content, str):
        raise MalformedResponse("response content is not text")
    return content


def complete(
    req: CompletionRequest,
    backend: Backend | str = Backend.REPLAY,
    store: FixtureStore | None = None,
    config: ClientConfig | None = None,
    transport=None,
    trial: int | None = None,
) -> str:
    """Return the completion for ``req`` from the chosen backend.

    ``transport`` is a callable ``(request, config) -> text`` used by the
    live and record backends; it defaults to :func:`http_transport`.
    """
    backend = Backend(backend)
    if backend is Backend.REPLAY:
        if store is None:
            raise ConfigError("replay needs a fixture store")
        return store.get(req, trial)
    config = config or ClientConfig(model=req.model)
    text = (transport or http_transport)(req, config)
    if backend is Backend.RECORD:
        if store is None:
            raise ConfigError("record needs a fixture store")
        store.put(req, text)
    return text
