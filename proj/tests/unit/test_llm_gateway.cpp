#include <doctest.h>

#include <deque>
#include <filesystem>
#include <thread>

#include "draftbench/llm_gateway.hpp"
#include "draftbench/mock_backend.hpp"
#include "draftbench/prompt_strategies.hpp"

using namespace draftbench;
namespace fs = std::filesystem;

namespace {

CompletionRequest request(std::string user = "Fix the bug") {
    CompletionRequest r;
    r.provider_id = "openai";
    r.model_id = "m";
    r.system_text = "You fix bugs.";
    r.user_text = std::move(user);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("draftbench_gw_" + name);
    fs::remove_all(dir);
    return dir;
}

class ScriptedBackend : public Backend {
public:
    std::deque<std::function<BackendReply()>> script;
    std::size_t calls = 0;
    BackendReply send(const CompletionRequest&) override {
        ++calls;
        auto step = script.front();
        if (script.size() > 1) script.pop_front();
        return step();
    }
};

class ScriptedTransport : public Transport {
public:
    HttpResponse reply;
    HttpRequest last;
    HttpResponse post(const HttpRequest& r) override {
        last = r;
        return reply;
    }
};

GatewayOptions no_sleep(std::vector<std::chrono::milliseconds>* slept = nullptr) {
    GatewayOptions o;
    o.sleep = [slept](std::chrono::milliseconds d) {
        if (slept) slept->push_back(d);
    };
    return o;
}

}  // namespace

TEST_SUITE("llm_gateway") {

TEST_CASE("request hash is deterministic and field sensitive") {
    auto a = request();
    CHECK(request_hash(a) == request_hash(request()));
    CHECK(request_hash(a).hex.size() == 64);
    auto b = a;
    b.temperature = 0.3;
    CHECK(request_hash(a) != request_hash(b));
    b = a;
    b.model_id = "other";
    CHECK(request_hash(a) != request_hash(b));
    b = a;
    b.max_output_tokens = 10;
    CHECK(request_hash(a) != request_hash(b));
    // Field boundaries are not ambiguous.
    b = a;
    b.system_text = "You fix bugs.Fix";
    b.user_text = " the bug";
    CHECK(request_hash(a) != request_hash(b));
}

TEST_CASE("request validation") {
    auto r = request();
    r.temperature = 2.5;
    CHECK_THROWS_AS(r.validate(), GatewayError);
    r = request("");
    CHECK_THROWS_AS(r.validate(), GatewayError);
    r = request();
    r.max_output_tokens = 0;
    try {
        r.validate();
        FAIL("expected an error");
    } catch (const GatewayError& e) {
        CHECK(e.kind() == GatewayErrorKind::invalid_request);
    }
}

TEST_CASE("completion record json round trip") {
    CompletionRecord r;
    r.request_hash = request_hash(request());
    r.response_text = "Solution:\n\"quoted\"\n";
    r.prompt_tokens = 12;
    r.completion_tokens = 34;
    r.token_source = TokenSource::approximated;
    r.latency_ms = 12.5;
    r.timestamp = "2024-01-01T00:00:00.000Z";
    r.strategy = StrategyId::iterative_cod;
    r.task_id = "t-1";
    CHECK(completion_record_from_json(completion_record_to_json(r)) == r);
}

TEST_CASE("approximate_tokens") {
    CHECK(approximate_tokens("") == 0);
    CHECK(approximate_tokens("hello") >= 1);
    CHECK(approximate_tokens("hello world again") > approximate_tokens("hello"));
    CHECK(approximate_tokens("same text") == approximate_tokens("same text"));
}

TEST_CASE("live call records usage and persists; replay serves it offline") {
    const auto dir = fresh_dir("replay");
    auto backend = std::make_shared<ScriptedBackend>();
    backend->script.push_back([] { return BackendReply{"answer", Usage{10, 20}}; });
    auto store = std::make_shared<ReplayStore>(dir);
    Gateway live(no_sleep(), backend, store);
    const CompletionRecord rec = live.complete(request(), StrategyId::cot, "t1");
    CHECK(rec.prompt_tokens == 10);
    CHECK(rec.completion_tokens == 20);
    CHECK(rec.token_source == TokenSource::provider_reported);
    CHECK(rec.latency_ms > 0.0);
    CHECK(rec.task_id == "t1");
    CHECK(fs::exists(dir / (rec.request_hash.hex + ".json")));

    auto opts = no_sleep();
    opts.mode = GatewayMode::replay;
    auto transport = std::make_shared<FailingTransport>();
    auto http = std::make_shared<HttpBackend>(builtin_provider("openai"), transport, "key");
    Gateway replay(opts, http, std::make_shared<ReplayStore>(dir));
    CHECK(replay.complete(request(), StrategyId::cot, "t1") == rec);
    CHECK(transport->attempts() == 0);
    CHECK(replay.backend_calls() == 0);

    try {
        replay.complete(request("something else"), StrategyId::cot, "t1");
        FAIL("expected a replay miss");
    } catch (const GatewayError& e) {
        CHECK(e.kind() == GatewayErrorKind::replay_miss);
    }
    CHECK(transport->attempts() == 0);
    fs::remove_all(dir);
}

TEST_CASE("missing usage is approximated") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->script.push_back([] { return BackendReply{"some answer text", std::nullopt}; });
    Gateway gw(no_sleep(), backend, nullptr);
    auto rec = gw.complete(request(), StrategyId::standard, "t");
    CHECK(rec.token_source == TokenSource::approximated);
    CHECK(rec.completion_tokens == approximate_tokens("some answer text"));
    CHECK(rec.completion_tokens > 0);
}

TEST_CASE("rate limits are retried with growing delays") {
    std::vector<std::chrono::milliseconds> slept;
    auto backend = std::make_shared<ScriptedBackend>();
    for (int i = 0; i < 2; ++i) {
        backend->script.push_back([]() -> BackendReply { throw GatewayError(GatewayErrorKind::rate_limited, "429"); });
    }
    backend->script.push_back([] { return BackendReply{"ok", Usage{1, 1}}; });
    Gateway gw(no_sleep(&slept), backend, nullptr);
    CHECK(gw.complete(request(), StrategyId::cot, "t").response_text == "ok");
    CHECK(backend->calls == 3);
    REQUIRE(slept.size() == 2);
    CHECK(slept[1] > slept[0]);
    CHECK(slept[0] >= std::chrono::milliseconds(1000));
}

TEST_CASE("retries are bounded and other errors are not retried") {
    auto backend = std::make_shared<ScriptedBackend>();
    backend->script.push_back([]() -> BackendReply { throw GatewayError(GatewayErrorKind::rate_limited, "429"); });
    Gateway gw(no_sleep(), backend, nullptr);
    CHECK_THROWS_AS(gw.complete(request(), StrategyId::cot, "t"), GatewayError);
    CHECK(backend->calls == 4);

    auto auth = std::make_shared<ScriptedBackend>();
    auth->script.push_back([]() -> BackendReply { throw GatewayError(GatewayErrorKind::auth, "401"); });
    Gateway gw2(no_sleep(), auth, nullptr);
    CHECK_THROWS_AS(gw2.complete(request(), StrategyId::cot, "t"), GatewayError);
    CHECK(auth->calls == 1);
}

TEST_CASE("http status mapping") {
    auto transport = std::make_shared<ScriptedTransport>();
    HttpBackend backend(builtin_provider("openai"), transport, "secret");
    auto kind_for = [&](int status) {
        transport->reply = {status, "{}"};
        try {
            backend.send(request());
        } catch (const GatewayError& e) {
            return e.kind();
        }
        return GatewayErrorKind::invalid_request;
    };
    CHECK(kind_for(401) == GatewayErrorKind::auth);
    CHECK(kind_for(403) == GatewayErrorKind::auth);
    CHECK(kind_for(429) == GatewayErrorKind::rate_limited);
    CHECK(kind_for(408) == GatewayErrorKind::timeout);
    CHECK(kind_for(500) == GatewayErrorKind::transport);
    CHECK(kind_for(200) == GatewayErrorKind::bad_response);

    transport->reply = {200, R"({"choices":[{"message":{"content":"hi"}}],"usage":{"prompt_tokens":3,"completion_tokens":1}})"};
    auto reply = backend.send(request());
    CHECK(reply.text == "hi");
    REQUIRE(reply.usage.has_value());
    CHECK(reply.usage->completion_tokens == 1);
    bool has_auth = false;
    for (const auto& [k, v] : transport->last.headers) has_auth |= v.find("secret") != std::string::npos;
    CHECK(has_auth);

    HttpBackend keyless(builtin_provider("openai"), transport, "");
    try {
        keyless.send(request());
        FAIL("expected auth error");
    } catch (const GatewayError& e) {
        CHECK(e.kind() == GatewayErrorKind::auth);
    }
}

TEST_CASE("anthropic reply decoding") {
    auto transport = std::make_shared<ScriptedTransport>();
    HttpBackend backend(builtin_provider("anthropic"), transport, "k");
    transport->reply = {200, R"({"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]})"};
    auto reply = backend.send(request());
    CHECK(reply.text == "ab");
    CHECK_FALSE(reply.usage.has_value());
}

TEST_CASE("provider config") {
    CHECK_THROWS_AS(builtin_provider("nope"), GatewayError);
    auto p = provider_from_json(R"({"id":"local","kind":"openai_compatible","base_url":"http://127.0.0.1:9/v1"})");
    CHECK(p.id == "local");
    CHECK_THROWS_AS(provider_from_json(R"({"id":"x","kind":"weird","base_url":"http://a"})"), GatewayError);
}

TEST_CASE("in-flight calls never exceed the bound") {
    class SlowBackend : public Backend {
    public:
        std::atomic<int> current{0}, peak{0};
        BackendReply send(const CompletionRequest&) override {
            int now = ++current;
            int seen = peak.load();
            while (now > seen && !peak.compare_exchange_weak(seen, now)) {
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
            --current;
            return {"x", Usage{1, 1}};
        }
    };
    auto backend = std::make_shared<SlowBackend>();
    auto opts = no_sleep();
    opts.max_in_flight = 3;
    Gateway gw(opts, backend, nullptr);
    {
        std::vector<std::jthread> threads;
        for (int i = 0; i < 12; ++i) {
            threads.emplace_back([&gw, i] { gw.complete(request("task " + std::to_string(i)), StrategyId::cot, "t"); });
        }
    }
    CHECK(backend->peak.load() <= 3);
    CHECK(backend->peak.load() >= 1);
    CHECK(gw.backend_calls() == 12);
}

TEST_CASE("mock backend is deterministic and follows the strategy format") {
    MockBackend mock(PromptLibrary::builtin());
    TaskRecord t;
    t.task_id = "x";
    t.repo = "r";
    t.problem_statement = "p";
    t.code_context = {{"pkg/mod.py", "x = 1\n"}};
    for (StrategyId s : kAllStrategies) {
        const auto p = render_prompt(s, t);
        CompletionRequest r = request(p.user_text());
        r.system_text = p.system_text;
        const auto a = mock.send(r);
        CHECK(a.text == mock.send(r).text);
        const auto trace = parse_response(s, a.text);
        CHECK(validate_step_limits(trace).compliant);
        CHECK(a.text.find("pkg/mod.py") != std::string::npos);
    }
}

}
