import hashlib
import json
from concurrent.futures import ThreadPoolExecutor

import pytest

from phonoscore import tokenize_ipa
from phonoscore.bundles import CueBundle
from phonoscore.llm import (
    AuthError,
    BackendConfig,
    InvalidAfterRetries,
    LlmClient,
    MockScript,
    TransportError,
)
from phonoscore.phonemes import parse_cmu_with_pauses
from phonoscore.prompts import PromptConfig, build_prompt

VALID = json.dumps(
    {"accuracy": 4, "fluency": 3, "reason_accuracy": "close match", "reason_fluency": "steady"}
)
GARBAGE = "sorry, I cannot help with that"


def make_bundle(utt_id="u1"):
    return CueBundle(
        utt_id=utt_id,
        transcript="we should get some cake",
        ipa_recognized=tokenize_ipa("w iː ʃ ʊ d ɡ ɛ t s ʌ m k eɪ k"),
        cmu_recognized=parse_cmu_with_pauses("W IY SH UH D G EH T S AH M K EY K"),
    )


def mock_client(responses, max_attempts=3, **script_kwargs):
    script = MockScript(responses, **script_kwargs)
    backend = BackendConfig(kind="mock", max_attempts=max_attempts)
    return LlmClient(backend, mock_script=script), script


class TestComplete:
    def test_scripted_playback(self):
        client, _ = mock_client({"u1": ["first", "second"]})
        assert client.complete("whatever", key="u1") == "first"
        assert client.complete("whatever", key="u1") == "second"

    def test_exhaustion_is_error(self):
        client, _ = mock_client({"u1": ["only"]})
        client.complete("p", key="u1")
        with pytest.raises(TransportError):
            client.complete("p", key="u1")

    def test_unknown_key_is_error(self):
        client, _ = mock_client({"u1": ["x"]})
        with pytest.raises(TransportError):
            client.complete("p", key="zzz")

    def test_prompt_hash_fallback(self):
        digest = hashlib.sha256(b"exact prompt").hexdigest()
        client, _ = mock_client({digest: ["hashed reply"]})
        assert client.complete("exact prompt") == "hashed reply"

    def test_missing_api_key_fails_before_any_request(self, monkeypatch):
        monkeypatch.delenv("PHONOSCORE_TEST_KEY", raising=False)
        backend = BackendConfig(
            kind="openai_style",
            endpoint_url="https://invalid.example/v1/chat/completions",
            model_name="m",
            api_key_env_var="PHONOSCORE_TEST_KEY",
        )
        client = LlmClient(backend)
        with pytest.raises(AuthError):
            client.complete("p")


class TestAssessRetry:
    def test_first_attempt_valid(self):
        client, script = mock_client({"u1": [VALID]})
        result, attempts = client.assess(make_bundle(), PromptConfig())
        assert attempts == 1
        assert result.accuracy == 4
        assert script.calls == 1

    def test_retry_until_valid(self):
        client, script = mock_client({"u1": [GARBAGE, VALID]})
        result, attempts = client.assess(make_bundle(), PromptConfig())
        assert attempts == 2
        assert result.fluency == 3
        assert script.calls == 2

    def test_invalid_after_retries(self):
        client, script = mock_client({"u1": [GARBAGE, GARBAGE, GARBAGE]})
        with pytest.raises(InvalidAfterRetries) as exc_info:
            client.assess(make_bundle(), PromptConfig())
        assert exc_info.value.attempts == 3
        assert script.calls == 3

    def test_attempts_are_fresh_requests(self):
        # Each retry consumes the next scripted reply for the same prompt.
        bundle = make_bundle()
        prompt = build_prompt(bundle, PromptConfig())
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()
        client, script = mock_client({digest: [GARBAGE, GARBAGE, VALID]})
        _, attempts = client.assess(bundle, PromptConfig())
        assert attempts == 3

    def test_deterministic_across_clients(self):
        responses = {"u1": [VALID]}
        first, _ = mock_client(responses)
        second, _ = mock_client(responses)
        bundle = make_bundle()
        r1, _ = first.assess(bundle, PromptConfig())
        r2, _ = second.assess(bundle, PromptConfig())
        assert r1 == r2


class TestConcurrency:
    def test_in_flight_bound_respected(self):
        ids = [f"u{i:02d}" for i in range(12)]
        responses = {utt_id: [VALID] for utt_id in ids}
        script = MockScript(responses, delay_s=0.005)
        backend = BackendConfig(kind="mock", max_in_flight=2)
        client = LlmClient(backend, mock_script=script)
        bundles = [make_bundle(utt_id) for utt_id in ids]
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(lambda b: client.assess(b, PromptConfig()), bundles))
        assert script.max_in_flight_seen <= 2
        assert script.calls == len(ids)


def test_mock_script_from_jsonl(tmp_path):
    path = tmp_path / "script.jsonl"
    lines = [
        {"utt_id": "u1", "responses": ["a"]},
        {"utt_id": "u1", "responses": ["b"]},
        {"prompt_sha256": hashlib.sha256(b"p").hexdigest(), "responses": ["c"]},
    ]
    path.write_text("\n".join(json.dumps(l) for l in lines), encoding="utf-8")
    script = MockScript.from_jsonl(path)
    client = LlmClient(BackendConfig(kind="mock"), mock_script=script)
    assert client.complete("x", key="u1") == "a"
    assert client.complete("x", key="u1") == "b"
    assert client.complete("p") == "c"


def test_backend_config_validation():
    with pytest.raises(ValueError):
        BackendConfig(kind="smoke_signals")
    with pytest.raises(ValueError):
        BackendConfig(max_attempts=0)
    with pytest.raises(ValueError):
        BackendConfig(max_in_flight=0)
