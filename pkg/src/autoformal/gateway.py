"""Provider-agnostic chat-completion access with record/replay.

Every request is canonically hashed; transcripts are content-addressed
JSON files. Replay mode never touches the network, which is what makes
pipeline runs reproducible in sealed environments.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import httpx

from .canonical import canonical_json_bytes, hash_bytes, normalize_newlines
from .fsutil import ImmutableOverwrite, utc_now_iso, write_once

__all__ = [
    "ChatMessage",
    "ChatRequest",
    "PromptTranscript",
    "TranscriptStore",
    "GatewayConfig",
    "Gateway",
    "FailingTransport",
    "ProviderError",
    "GatewayTimeout",
    "ReplayMiss",
    "RateLimited",
    "canonical_hash",
]

_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str


@dataclass
class ChatRequest:
    messages: list[ChatMessage]
    model_id: str
    temperature: float = 0.0
    max_tokens: int = 2048

    def validate(self) -> None:
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("request needs at least one user message")
        for m in self.messages:
            if m.role not in _ROLES:
                raise ValueError(f"unknown role {m.role!r}")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be within [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    def to_json(self) -> dict:
        return {
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChatRequest":
        return cls(
            messages=[ChatMessage(m["role"], m["content"]) for m in obj["messages"]],
            model_id=obj["model_id"],
            temperature=obj.get("temperature", 0.0),
            max_tokens=obj.get("max_tokens", 2048),
        )


def canonical_hash(req: ChatRequest) -> str:
    """Platform-stable hash: sorted keys, message content CRLF/CR -> LF."""
    payload = {
        "messages": [
            {"role": m.role, "content": normalize_newlines(m.content)}
            for m in req.messages
        ],
        "model_id": req.model_id,
        "temperature": req.temperature,
        "max_tokens": req.max_tokens,
    }
    return hash_bytes(canonical_json_bytes(payload))


@dataclass
class PromptTranscript:
    request_hash: str
    request: ChatRequest
    response_text: str
    provider_meta: dict = field(default_factory=dict)
    created_at: str = ""

    def to_json(self) -> dict:
        return {
            "request_hash": self.request_hash,
            "request": self.request.to_json(),
            "response_text": self.response_text,
            "provider_meta": self.provider_meta,
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PromptTranscript":
        return cls(
            request_hash=obj["request_hash"],
            request=ChatRequest.from_json(obj["request"]),
            response_text=obj["response_text"],
            provider_meta=obj.get("provider_meta", {}),
            created_at=obj.get("created_at", ""),
        )


class TranscriptStore:
    """One JSON file per transcript, named by request hash, write-once."""

    def __init__(self, root: Path):
        self.root = Path(root)

    def path(self, request_hash: str) -> Path:
        return self.root / f"{request_hash}.json"

    def exists(self, request_hash: str) -> bool:
        return self.path(request_hash).exists()

    def get(self, request_hash: str) -> Optional[PromptTranscript]:
        path = self.path(request_hash)
        if not path.exists():
            return None
        return PromptTranscript.from_json(json.loads(path.read_text("utf-8")))

    def put(self, transcript: PromptTranscript) -> bool:
        if transcript.request_hash != canonical_hash(transcript.request):
            raise ValueError("request_hash does not match the request")
        data = canonical_json_bytes(transcript.to_json())
        existing = self.get(transcript.request_hash)
        if existing is not None:
            # timestamps may differ between identical recordings; the
            # immutable part is the request/response pair
            if (
                existing.request == transcript.request
                and existing.response_text == transcript.response_text
            ):
                return False
            raise ImmutableOverwrite(
                f"transcript {transcript.request_hash} already recorded with different content"
            )
        return write_once(self.path(transcript.request_hash), data)

    def hashes(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.stem for p in self.root.glob("*.json"))


class ProviderError(RuntimeError):
    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"provider returned {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class GatewayTimeout(RuntimeError):
    pass


class ReplayMiss(KeyError):
    def __init__(self, request_hash: str):
        super().__init__(
            f"no recorded transcript for request {request_hash}; "
            "run in record mode first"
        )
        self.request_hash = request_hash


class RateLimited(RuntimeError):
    pass


class FailingTransport(httpx.BaseTransport):
    """Transport that proves no network op happens (replay-mode tests)."""

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        raise AssertionError(f"network access attempted: {request.method} {request.url}")


@dataclass
class GatewayConfig:
    endpoint: str = "https://api.openai.com/v1/chat/completions"
    model_id: str = "gpt-4"
    temperature: float = 0.0
    max_tokens: int = 2048
    api_key_env: str = "AUTOFORMAL_API_KEY"
    timeout_s: float = 60.0
    max_retries: int = 3
    backoff_base_s: float = 1.0

    def to_json(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "model_id": self.model_id,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "api_key_env": self.api_key_env,
            "timeout_s": self.timeout_s,
            "max_retries": self.max_retries,
            "backoff_base_s": self.backoff_base_s,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GatewayConfig":
        cfg = cls()
        for key in cfg.to_json():
            if key in obj:
                setattr(cfg, key, obj[key])
        return cfg


class Gateway:
    def __init__(
        self,
        config: GatewayConfig,
        transcripts: TranscriptStore,
        transport: Optional[httpx.BaseTransport] = None,
        sleeper: Callable[[float], None] = None,
        clock: Callable[[], str] = utc_now_iso,
    ):
        self.config = config
        self.transcripts = transcripts
        self.transport = transport
        self.sleeper = sleeper if sleeper is not None else _default_sleep
        self.clock = clock

    def complete(self, req: ChatRequest, mode: str) -> PromptTranscript:
        req.validate()
        request_hash = canonical_hash(req)

        if mode == "replay":
            stored = self.transcripts.get(request_hash)
            if stored is None:
                raise ReplayMiss(request_hash)
            return stored

        if mode == "record":
            # an existing recording answers without a network call, so
            # re-running a recorded pipeline stays offline and idempotent
            stored = self.transcripts.get(request_hash)
            if stored is not None:
                return stored
            transcript = self._call(req, request_hash)
            self.transcripts.put(transcript)
            return transcript

        if mode == "live":
            return self._call(req, request_hash)

        raise ValueError(f"unknown gateway mode {mode!r}")

    def _call(self, req: ChatRequest, request_hash: str) -> PromptTranscript:
        headers = {"Content-Type": "application/json"}
        api_key = os.environ.get(self.config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        payload = {
            "model": req.model_id,
            "messages": [{"role": m.role, "content": m.content} for m in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }

        attempt = 0
        while True:
            try:
                with httpx.Client(
                    transport=self.transport, timeout=self.config.timeout_s
                ) as client:
                    response = client.post(self.config.endpoint, json=payload, headers=headers)
            except httpx.TimeoutException as exc:
                raise GatewayTimeout(
                    f"no response within {self.config.timeout_s}s"
                ) from exc
            if response.status_code == 429:
                if attempt >= self.config.max_retries:
                    raise RateLimited(
                        f"still rate-limited after {attempt} retries"
                    )
                self.sleeper(self.config.backoff_base_s * (2**attempt))
                attempt += 1
                continue
            if response.status_code != 200:
                raise ProviderError(response.status_code, response.text[:200])
            break

        body = response.json()
        try:
            text = body["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(200, f"unexpected response shape: {str(body)[:160]}") from exc
        meta = {"model": body.get("model", req.model_id)}
        if isinstance(body.get("usage"), dict):
            meta["usage"] = body["usage"]
        return PromptTranscript(
            request_hash=request_hash,
            request=req,
            response_text=text,
            provider_meta=meta,
            created_at=self.clock(),
        )


def _default_sleep(seconds: float) -> None:
    import time

    time.sleep(seconds)
