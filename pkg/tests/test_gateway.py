"""Chat gateway: canonical hashing, transcript store, record/replay, retries."""

import json

import httpx
import pytest

from autoformal.fsutil import ImmutableOverwrite
from autoformal.gateway import (
    ChatMessage,
    ChatRequest,
    FailingTransport,
    Gateway,
    GatewayConfig,
    GatewayTimeout,
    PromptTranscript,
    ProviderError,
    RateLimited,
    ReplayMiss,
    TranscriptStore,
    canonical_hash,
)


def _request(content="hello", model="test-model"):
    return ChatRequest(
        messages=[
            ChatMessage("system", "be brief"),
            ChatMessage("user", content),
        ],
        model_id=model,
    )


def _transcript(req=None, text="answer"):
    req = req or _request()
    return PromptTranscript(
        request_hash=canonical_hash(req),
        request=req,
        response_text=text,
        created_at="2026-01-01T00:00:00Z",
    )


def _ok_transport(text="answer", model="test-model"):
    def handler(http_req: httpx.Request) -> httpx.Response:
        return httpx.Response(
            200,
            json={
                "model": model,
                "choices": [{"message": {"role": "assistant", "content": text}}],
                "usage": {"prompt_tokens": 3, "completion_tokens": 2},
            },
        )

    return httpx.MockTransport(handler)


def _gateway(tmp_path, transport=None, **config_kwargs):
    config = GatewayConfig(model_id="test-model", **config_kwargs)
    store = TranscriptStore(tmp_path / "transcripts")
    store.root.mkdir(parents=True, exist_ok=True)
    sleeps = []
    gw = Gateway(
        config,
        store,
        transport=transport,
        sleeper=sleeps.append,
        clock=lambda: "2026-01-01T00:00:00Z",
    )
    return gw, store, sleeps


# --- hashing -----------------------------------------------------------------


def test_canonical_hash_is_stable_across_newline_styles():
    a = _request("line one\nline two")
    b = _request("line one\r\nline two")
    c = _request("line one\rline two")
    assert canonical_hash(a) == canonical_hash(b) == canonical_hash(c)


def test_canonical_hash_sensitive_to_parameters():
    base = _request()
    assert canonical_hash(base) != canonical_hash(_request("other"))
    warm = ChatRequest(base.messages, base.model_id, temperature=1.0)
    assert canonical_hash(warm) != canonical_hash(base)
    other_model = _request(model="different")
    assert canonical_hash(other_model) != canonical_hash(base)


def test_request_validation():
    with pytest.raises(ValueError):
        ChatRequest([ChatMessage("system", "no user turn")], "m").validate()
    with pytest.raises(ValueError):
        ChatRequest([ChatMessage("robot", "hi")], "m").validate()
    with pytest.raises(ValueError):
        ChatRequest([ChatMessage("user", "hi")], "m", temperature=3.0).validate()
    with pytest.raises(ValueError):
        ChatRequest([ChatMessage("user", "hi")], "m", max_tokens=0).validate()
    _request().validate()


def test_request_json_round_trip():
    req = _request()
    assert ChatRequest.from_json(req.to_json()) == req


# --- transcript store ---------------------------------------------------------


def test_transcript_store_write_once(tmp_path):
    store = TranscriptStore(tmp_path)
    t = _transcript()
    assert store.put(t) is True
    assert store.get(t.request_hash).response_text == "answer"
    assert store.hashes() == [t.request_hash]


def test_transcript_store_identical_put_is_noop(tmp_path):
    store = TranscriptStore(tmp_path)
    t = _transcript()
    store.put(t)
    again = _transcript()
    again.created_at = "2027-05-05T00:00:00Z"  # timestamps may differ
    assert store.put(again) is False
    assert len(store.hashes()) == 1


def test_transcript_store_rejects_conflicting_content(tmp_path):
    store = TranscriptStore(tmp_path)
    store.put(_transcript(text="first"))
    with pytest.raises(ImmutableOverwrite):
        store.put(_transcript(text="second"))


def test_transcript_store_rejects_wrong_hash(tmp_path):
    store = TranscriptStore(tmp_path)
    t = _transcript()
    t.request_hash = "0" * 64
    with pytest.raises(ValueError):
        store.put(t)


def test_transcript_json_round_trip():
    t = _transcript()
    t.provider_meta = {"model": "test-model"}
    assert PromptTranscript.from_json(t.to_json()) == t


# --- replay ------------------------------------------------------------------


def test_replay_returns_stored_without_network(tmp_path):
    gw, store, _ = _gateway(tmp_path, transport=FailingTransport())
    req = _request()
    store.put(_transcript(req, text="recorded"))
    result = gw.complete(req, mode="replay")
    assert result.response_text == "recorded"


def test_replay_miss_raises(tmp_path):
    gw, _, _ = _gateway(tmp_path, transport=FailingTransport())
    req = _request("never recorded")
    with pytest.raises(ReplayMiss) as exc:
        gw.complete(req, mode="replay")
    assert exc.value.request_hash == canonical_hash(req)


# --- record ------------------------------------------------------------------


def test_record_calls_provider_and_persists(tmp_path):
    gw, store, _ = _gateway(tmp_path, transport=_ok_transport(text="fresh"))
    req = _request()
    result = gw.complete(req, mode="record")
    assert result.response_text == "fresh"
    assert result.provider_meta["model"] == "test-model"
    assert result.provider_meta["usage"]["prompt_tokens"] == 3
    assert store.get(canonical_hash(req)).response_text == "fresh"
    # the recording then replays offline
    offline = Gateway(gw.config, store, transport=FailingTransport())
    assert offline.complete(req, mode="replay").response_text == "fresh"


def test_record_with_existing_transcript_stays_offline(tmp_path):
    gw, store, _ = _gateway(tmp_path, transport=FailingTransport())
    req = _request()
    store.put(_transcript(req, text="already here"))
    result = gw.complete(req, mode="record")
    assert result.response_text == "already here"


def test_unknown_mode_rejected(tmp_path):
    gw, _, _ = _gateway(tmp_path)
    with pytest.raises(ValueError):
        gw.complete(_request(), mode="cached")


# --- failure handling -----------------------------------------------------------


def test_rate_limit_backoff_sequence_then_raise(tmp_path):
    attempts = []

    def handler(http_req: httpx.Request) -> httpx.Response:
        attempts.append(1)
        return httpx.Response(429, text="slow down")

    gw, _, sleeps = _gateway(
        tmp_path,
        transport=httpx.MockTransport(handler),
        max_retries=3,
        backoff_base_s=1.0,
    )
    with pytest.raises(RateLimited):
        gw.complete(_request(), mode="live")
    assert sleeps == [1.0, 2.0, 4.0]
    assert len(attempts) == 4


def test_rate_limit_recovers_when_provider_clears(tmp_path):
    state = {"calls": 0}

    def handler(http_req: httpx.Request) -> httpx.Response:
        state["calls"] += 1
        if state["calls"] < 3:
            return httpx.Response(429, text="busy")
        return httpx.Response(
            200, json={"choices": [{"message": {"content": "finally"}}]}
        )

    gw, _, sleeps = _gateway(tmp_path, transport=httpx.MockTransport(handler))
    result = gw.complete(_request(), mode="live")
    assert result.response_text == "finally"
    assert sleeps == [1.0, 2.0]


def test_timeout_maps_to_gateway_timeout(tmp_path):
    def handler(http_req: httpx.Request) -> httpx.Response:
        raise httpx.ConnectTimeout("too slow")

    gw, _, _ = _gateway(tmp_path, transport=httpx.MockTransport(handler))
    with pytest.raises(GatewayTimeout):
        gw.complete(_request(), mode="live")


def test_provider_error_carries_status_and_excerpt(tmp_path):
    def handler(http_req: httpx.Request) -> httpx.Response:
        return httpx.Response(500, text="x" * 500)

    gw, _, _ = _gateway(tmp_path, transport=httpx.MockTransport(handler))
    with pytest.raises(ProviderError) as exc:
        gw.complete(_request(), mode="live")
    assert exc.value.status == 500
    assert len(exc.value.body_excerpt) == 200


def test_malformed_response_shape_is_provider_error(tmp_path):
    def handler(http_req: httpx.Request) -> httpx.Response:
        return httpx.Response(200, json={"unexpected": True})

    gw, _, _ = _gateway(tmp_path, transport=httpx.MockTransport(handler))
    with pytest.raises(ProviderError) as exc:
        gw.complete(_request(), mode="live")
    assert exc.value.status == 200


def test_live_request_payload_shape(tmp_path):
    captured = {}

    def handler(http_req: httpx.Request) -> httpx.Response:
        captured["payload"] = json.loads(http_req.content)
        return httpx.Response(200, json={"choices": [{"message": {"content": "ok"}}]})

    gw, _, _ = _gateway(tmp_path, transport=httpx.MockTransport(handler))
    gw.complete(_request("ping"), mode="live")
    payload = captured["payload"]
    assert payload["model"] == "test-model"
    assert payload["messages"][-1] == {"role": "user", "content": "ping"}
    assert payload["temperature"] == 0.0


def test_gateway_config_json_round_trip():
    config = GatewayConfig(model_id="m", max_retries=7)
    restored = GatewayConfig.from_json(config.to_json())
    assert restored == config
    # missing keys fall back to defaults
    sparse = GatewayConfig.from_json({"model_id": "n"})
    assert sparse.model_id == "n"
    assert sparse.timeout_s == 60.0
