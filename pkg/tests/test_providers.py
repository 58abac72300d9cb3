from __future__ import annotations

import json

import httpx
import pytest

from ttng.errors import AuthFailure, MalformedResponse, RateLimited, ReplayMiss
from ttng.providers import (
    HttpCompletionProvider,
    JournalingCompletionProvider,
    MockCompletionProvider,
    PromptRequest,
    ProviderConfig,
    RequestJournal,
    stable_seed,
)

CHAPTER_PROMPT = """\
Chapter ID: B2
Time Period: from 2023-07-01 to 2023-07-31
Themes: Ecological Crisis
Theme Context: The city faces an environmental crisis.
Entity: Eco Summit, Riverstone Park
Narrative Sturcture: The narrative structure is Arch.
Previous context: Chapter one text."""


def req(user_text: str, seed: int | None = 3) -> PromptRequest:
    return PromptRequest(system_text="write a chapter", user_text=user_text, seed=seed)


class TestPromptRequest:
    def test_rejects_empty_texts(self):
        with pytest.raises(ValueError):
            PromptRequest(system_text="", user_text="x")

    def test_rejects_out_of_range_temperature(self):
        with pytest.raises(ValueError):
            PromptRequest(system_text="s", user_text="u", temperature=3.0)

    def test_rejects_nonpositive_max_tokens(self):
        with pytest.raises(ValueError):
            PromptRequest(system_text="s", user_text="u", max_tokens=0)


class TestMockProvider:
    def test_pure_function(self):
        mock = MockCompletionProvider()
        r = req(CHAPTER_PROMPT)
        assert mock.complete(r) == mock.complete(r)

    def test_echoes_all_entities(self):
        out = MockCompletionProvider().complete(req(CHAPTER_PROMPT))
        assert "Eco Summit" in out and "Riverstone Park" in out

    def test_word_target_respected(self):
        out = MockCompletionProvider(word_target=100).complete(req(CHAPTER_PROMPT))
        assert 50 <= len(out.split()) <= 200

    def test_distinct_chapters_produce_distinct_text(self):
        mock = MockCompletionProvider()
        a = mock.complete(req(CHAPTER_PROMPT))
        b = mock.complete(req(CHAPTER_PROMPT.replace("B2", "A1")))
        assert a != b

    def test_seed_changes_output(self):
        mock = MockCompletionProvider()
        assert mock.complete(req(CHAPTER_PROMPT, seed=1)) != mock.complete(
            req(CHAPTER_PROMPT, seed=2)
        )


def make_http_provider(handler, retries=3):
    config = ProviderConfig(
        endpoint="https://llm.test/v1/chat/completions",
        model="test-model",
        retries=retries,
        backoff_base=0.0,
    )
    return HttpCompletionProvider(config, transport=httpx.MockTransport(handler))


def ok_response(text="hello"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class TestHttpProvider:
    def test_two_transient_failures_then_success(self, caplog):
        calls = []

        def handler(request):
            calls.append(request)
            if len(calls) <= 2:
                return httpx.Response(503)
            return ok_response("recovered")

        with caplog.at_level("WARNING", logger="ttng.providers"):
            assert make_http_provider(handler).complete(req(CHAPTER_PROMPT)) == "recovered"
        assert len(calls) == 3
        retries = [r for r in caplog.records if "retrying completion request" in r.message]
        assert len(retries) == 2  # attempts 2 and 3 were retries

    def test_auth_failure_is_immediate(self):
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(401)

        with pytest.raises(AuthFailure):
            make_http_provider(handler).complete(req(CHAPTER_PROMPT))
        assert len(calls) == 1

    def test_persistent_rate_limit(self):
        def handler(request):
            return httpx.Response(429)

        with pytest.raises(RateLimited):
            make_http_provider(handler, retries=2).complete(req(CHAPTER_PROMPT))

    def test_malformed_payload(self):
        def handler(request):
            return httpx.Response(200, json={"nope": True})

        with pytest.raises(MalformedResponse):
            make_http_provider(handler).complete(req(CHAPTER_PROMPT))

    def test_wire_format(self):
        seen = {}

        def handler(request):
            seen.update(json.loads(request.content))
            return ok_response()

        make_http_provider(handler).complete(req(CHAPTER_PROMPT, seed=9))
        assert seen["model"] == "test-model"
        assert [m["role"] for m in seen["messages"]] == ["system", "user"]
        assert seen["messages"][1]["content"] == CHAPTER_PROMPT
        assert "temperature" in seen and "max_tokens" in seen and seen["seed"] == 9

    def test_bearer_token_from_environment(self, monkeypatch):
        headers = {}

        def handler(request):
            headers.update(request.headers)
            return ok_response()

        monkeypatch.setenv("TTNG_API_TOKEN", "sekrit")
        make_http_provider(handler).complete(req(CHAPTER_PROMPT))
        assert headers["authorization"] == "Bearer sekrit"


class TestJournal:
    def test_record_then_replay(self, tmp_path):
        path = tmp_path / "journal.jsonl"
        mock = MockCompletionProvider()
        recorder = JournalingCompletionProvider(RequestJournal(path), inner=mock, mode="record")
        r = req(CHAPTER_PROMPT)
        recorded = recorder.complete(r)

        replayer = JournalingCompletionProvider(RequestJournal(path), mode="replay")
        assert replayer.complete(r) == recorded

    def test_replay_miss(self, tmp_path):
        path = tmp_path / "journal.jsonl"
        path.write_text("")
        replayer = JournalingCompletionProvider(RequestJournal(path), mode="replay")
        with pytest.raises(ReplayMiss):
            replayer.complete(req(CHAPTER_PROMPT))

    def test_journal_lines_are_json(self, tmp_path):
        path = tmp_path / "journal.jsonl"
        recorder = JournalingCompletionProvider(
            RequestJournal(path), inner=MockCompletionProvider(), mode="record"
        )
        recorder.complete(req(CHAPTER_PROMPT))
        lines = [json.loads(l) for l in path.read_text().splitlines()]
        assert lines and {"key", "request", "response"} <= set(lines[0])


def test_stable_seed_is_stable():
    assert stable_seed("a", 1) == stable_seed("a", 1)
    assert stable_seed("a", 1) != stable_seed("a", 2)
