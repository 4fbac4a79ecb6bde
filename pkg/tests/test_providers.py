"""Provider fingerprints, replay behavior, and the HTTP client's retry loop."""

from __future__ import annotations

import hashlib
import json

import httpx
import pytest

from arguplan.errors import (
    DuplicateFingerprint,
    ProviderError,
    ProviderHttpError,
    ProviderTimeout,
    ReplayMiss,
)
from arguplan.prompting import Message, PromptTask, RenderedPrompt
from arguplan.providers import (
    DEFAULT_BASE_URL,
    DEFAULT_MODEL,
    HttpProvider,
    ProviderConfig,
    ReplayProvider,
    config_from_env,
    fingerprint,
)


def _prompt(
    task: PromptTask = PromptTask.KEY_ASPECTS,
    system: str = "s",
    user: str = "u",
    temperature: float = 0.7,
) -> RenderedPrompt:
    return RenderedPrompt(
        task=task,
        messages=(Message("system", system), Message("user", user)),
        temperature=temperature,
    )


class TestFingerprint:
    def test_equal_prompts_equal_fingerprints(self):
        assert fingerprint(_prompt()) == fingerprint(_prompt())

    def test_sensitive_to_every_component(self):
        base = fingerprint(_prompt())
        assert fingerprint(_prompt(task=PromptTask.COUNTERARGUMENTS)) != base
        assert fingerprint(_prompt(system="other")) != base
        assert fingerprint(_prompt(user="other")) != base
        assert fingerprint(_prompt(temperature=0.8)) != base

    def test_message_order_matters(self):
        forward = RenderedPrompt(
            task=PromptTask.KEY_ASPECTS,
            messages=(Message("system", "a"), Message("user", "b")),
            temperature=0.7,
        )
        swapped = RenderedPrompt(
            task=PromptTask.KEY_ASPECTS,
            messages=(Message("system", "b"), Message("user", "a")),
            temperature=0.7,
        )
        assert fingerprint(forward) != fingerprint(swapped)

    def test_temperature_precision_is_four_places(self):
        assert fingerprint(_prompt(temperature=0.7)) == fingerprint(_prompt(temperature=0.70))
        assert fingerprint(_prompt(temperature=0.7)) != fingerprint(_prompt(temperature=0.7001))

    def test_pinned_value(self):
        # frozen reference: a change here breaks every saved replay store
        prompt = _prompt(user="naïve ’quote’")
        expected = "2f571463b0c7d18aa2ba667790fa7b075703ce934a7b2e3e987a360c341b202e"
        assert fingerprint(prompt) == expected

    def test_canonical_form(self):
        prompt = _prompt(user="naïve ’quote’")
        blob = json.dumps(
            {
                "task": "key_aspects",
                "messages": [["system", "s"], ["user", "naïve ’quote’"]],
                "temperature": "0.7000",
            },
            sort_keys=True,
            ensure_ascii=True,
            separators=(",", ":"),
        )
        assert fingerprint(prompt) == hashlib.sha256(blob.encode("ascii")).hexdigest()


class TestReplayProvider:
    def test_miss_without_fallback(self):
        provider = ReplayProvider()
        with pytest.raises(ReplayMiss) as exc:
            provider.complete(_prompt())
        assert exc.value.fingerprint == fingerprint(_prompt())

    def test_record_then_hit(self):
        provider = ReplayProvider()
        provider.record(_prompt(), "stored answer")
        assert provider.complete(_prompt()) == "stored answer"
        assert len(provider) == 1

    def test_record_identical_is_idempotent(self):
        provider = ReplayProvider()
        fp1 = provider.record(_prompt(), "same")
        fp2 = provider.record(_prompt(), "same")
        assert fp1 == fp2
        assert len(provider) == 1

    def test_record_conflict_needs_overwrite(self):
        provider = ReplayProvider()
        provider.record(_prompt(), "first")
        with pytest.raises(DuplicateFingerprint):
            provider.record(_prompt(), "second")
        provider.record(_prompt(), "second", overwrite=True)
        assert provider.complete(_prompt()) == "second"

    def test_fallback_fills_misses_once(self, scripted):
        fake = scripted(default="from fallback")
        provider = ReplayProvider(fallback=fake)
        assert provider.complete(_prompt()) == "from fallback"
        assert provider.complete(_prompt()) == "from fallback"
        assert len(fake.calls) == 1  # second call answered from the store

    def test_every_prompt_is_logged(self, scripted):
        provider = ReplayProvider(fallback=scripted(default="x"))
        provider.complete(_prompt(user="one"))
        provider.complete(_prompt(user="one"))
        provider.complete(_prompt(user="two"))
        assert [p.messages[-1].content for p in provider.calls] == ["one", "one", "two"]

    def test_save_load_round_trip(self, tmp_path):
        provider = ReplayProvider()
        provider.record(_prompt(user="q"), "a")
        path = tmp_path / "store.json"
        provider.save(path)
        loaded = ReplayProvider.load(path)
        assert loaded.complete(_prompt(user="q")) == "a"
        with pytest.raises(ReplayMiss):
            loaded.complete(_prompt(user="other"))

    def test_store_file_is_plain_sorted_json(self, tmp_path):
        provider = ReplayProvider()
        provider.record(_prompt(user="zz"), "a1")
        provider.record(_prompt(user="aa"), "a2")
        path = tmp_path / "store.json"
        provider.save(path)
        text = path.read_text(encoding="utf-8")
        data = json.loads(text)
        assert list(data) == sorted(data)
        assert text.endswith("\n")

    def test_load_rejects_non_object(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('["not", "a", "dict"]', encoding="utf-8")
        with pytest.raises(ProviderError):
            ReplayProvider.load(path)


class TestProviderConfig:
    def test_env_requires_api_key(self):
        with pytest.raises(ProviderError):
            config_from_env({})

    def test_env_defaults(self):
        config = config_from_env({"LLM_API_KEY": "k"})
        assert config.base_url == DEFAULT_BASE_URL
        assert config.model == DEFAULT_MODEL

    def test_env_overrides(self):
        config = config_from_env(
            {"LLM_API_KEY": "k", "LLM_BASE_URL": "http://box:9/v1", "LLM_MODEL": "m9"}
        )
        assert config.base_url == "http://box:9/v1"
        assert config.model == "m9"

    def test_validation(self):
        with pytest.raises(ValueError):
            ProviderConfig(base_url="u", model="m", api_key="k", timeout=0)
        with pytest.raises(ValueError):
            ProviderConfig(base_url="u", model="m", api_key="k", max_retries=-1)


def _completion_response(text: str) -> httpx.Response:
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def _make_provider(handler, max_retries: int = 2):
    sleeps: list[float] = []
    config = ProviderConfig(
        base_url="http://llm.test/v1", model="test-model", api_key="sk-test",
        max_retries=max_retries,
    )
    provider = HttpProvider(
        config, transport=httpx.MockTransport(handler), sleeper=sleeps.append
    )
    return provider, sleeps


class TestHttpProvider:
    def test_success_and_wire_format(self):
        seen: list[httpx.Request] = []

        def handler(request: httpx.Request) -> httpx.Response:
            seen.append(request)
            return _completion_response("the reply")

        provider, sleeps = _make_provider(handler)
        assert provider.complete(_prompt(system="sys", user="usr")) == "the reply"
        provider.close()

        [request] = seen
        assert request.url == "http://llm.test/v1/chat/completions"
        assert request.headers["authorization"] == "Bearer sk-test"
        body = json.loads(request.content)
        assert body == {
            "model": "test-model",
            "messages": [
                {"role": "system", "content": "sys"},
                {"role": "user", "content": "usr"},
            ],
            "temperature": 0.7,
        }
        assert sleeps == []

    def test_5xx_retried_then_succeeds(self):
        statuses = iter([500, 503])

        def handler(request: httpx.Request) -> httpx.Response:
            status = next(statuses, None)
            if status is not None:
                return httpx.Response(status)
            return _completion_response("recovered")

        provider, sleeps = _make_provider(handler)
        assert provider.complete(_prompt()) == "recovered"
        assert sleeps == [0.5, 1.0]  # doubling backoff before each retry

    def test_5xx_exhausts_to_http_error(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            return httpx.Response(502)

        provider, sleeps = _make_provider(handler, max_retries=2)
        with pytest.raises(ProviderHttpError) as exc:
            provider.complete(_prompt())
        assert exc.value.status == 502
        assert len(calls) == 3  # initial try plus two retries
        assert sleeps == [0.5, 1.0]

    def test_4xx_fails_immediately(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            return httpx.Response(401)

        provider, sleeps = _make_provider(handler)
        with pytest.raises(ProviderHttpError) as exc:
            provider.complete(_prompt())
        assert exc.value.status == 401
        assert len(calls) == 1
        assert sleeps == []

    def test_timeouts_retry_then_raise_timeout(self):
        def handler(request: httpx.Request) -> httpx.Response:
            raise httpx.ReadTimeout("too slow")

        provider, sleeps = _make_provider(handler, max_retries=1)
        with pytest.raises(ProviderTimeout):
            provider.complete(_prompt())
        assert sleeps == [0.5]

    def test_transport_errors_retry_then_raise(self):
        def handler(request: httpx.Request) -> httpx.Response:
            raise httpx.ConnectError("refused")

        provider, _ = _make_provider(handler, max_retries=1)
        with pytest.raises(ProviderError) as exc:
            provider.complete(_prompt())
        assert not isinstance(exc.value, ProviderTimeout)

    def test_timeout_recovers_on_retry(self):
        first = [True]

        def handler(request: httpx.Request) -> httpx.Response:
            if first[0]:
                first[0] = False
                raise httpx.ConnectTimeout("slow start")
            return _completion_response("late but fine")

        provider, sleeps = _make_provider(handler)
        assert provider.complete(_prompt()) == "late but fine"
        assert sleeps == [0.5]

    @pytest.mark.parametrize(
        "payload",
        [
            {"choices": []},
            {"choices": [{"message": {}}]},
            {"unexpected": True},
            "not even an object",
        ],
    )
    def test_malformed_body_is_a_provider_error(self, payload):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, json=payload)

        provider, _ = _make_provider(handler)
        with pytest.raises(ProviderError):
            provider.complete(_prompt())

    def test_non_json_body_is_a_provider_error(self):
        def handler(request: httpx.Request) -> httpx.Response:
            return httpx.Response(200, text="<html>gateway</html>")

        provider, _ = _make_provider(handler)
        with pytest.raises(ProviderError):
            provider.complete(_prompt())

    def test_base_url_trailing_slash_normalized(self):
        def handler(request: httpx.Request) -> httpx.Response:
            assert str(request.url) == "http://llm.test/v1/chat/completions"
            return _completion_response("ok")

        config = ProviderConfig(base_url="http://llm.test/v1/", model="m", api_key="k")
        provider = HttpProvider(config, transport=httpx.MockTransport(handler))
        assert provider.complete(_prompt()) == "ok"
