#include "draftbench/llm_gateway.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <thread>

#include <json.hpp>

#include "text_util.hpp"

namespace draftbench {

using json = nlohmann::ordered_json;

void CompletionRequest::validate() const {
    auto bad = [](const std::string& what) { throw GatewayError(GatewayErrorKind::invalid_request, what); };
    if (provider_id.empty()) bad("provider_id is empty");
    if (model_id.empty()) bad("model_id is empty");
    if (detail::trim(system_text).empty()) bad("system_text is empty");
    if (detail::trim(user_text).empty()) bad("user_text is empty");
    if (!(temperature >= 0.0 && temperature <= 2.0)) bad("temperature must lie in [0, 2]");
    if (max_output_tokens == 0) bad("max_output_tokens must be positive");
}

RequestHash request_hash(const CompletionRequest& request) {
    std::string canonical = "draftbench-request-v1\n";
    auto field = [&](std::string_view name, std::string_view value) {
        canonical += name;
        canonical += ':';
        canonical += std::to_string(value.size());
        canonical += ':';
        canonical += value;
        canonical += '\n';
    };
    char temp[32];
    std::snprintf(temp, sizeof temp, "%.17g", request.temperature);
    field("provider_id", request.provider_id);
    field("model_id", request.model_id);
    field("system_text", request.system_text);
    field("user_text", request.user_text);
    field("temperature", temp);
    field("max_output_tokens", std::to_string(request.max_output_tokens));
    return {detail::sha256_hex(canonical)};
}

std::string_view token_source_name(TokenSource s) {
    return s == TokenSource::provider_reported ? "provider_reported" : "approximated";
}

std::string completion_record_to_json(const CompletionRecord& r) {
    json obj;
    obj["request_hash"] = r.request_hash.hex;
    obj["task_id"] = r.task_id;
    obj["strategy"] = std::string(strategy_name(r.strategy));
    obj["prompt_tokens"] = r.prompt_tokens;
    obj["completion_tokens"] = r.completion_tokens;
    obj["token_source"] = std::string(token_source_name(r.token_source));
    obj["latency_ms"] = r.latency_ms;
    obj["timestamp"] = r.timestamp;
    obj["response_text"] = r.response_text;
    return obj.dump();
}

namespace {

CompletionRecord record_from_object(const json& obj) {
    CompletionRecord r;
    r.request_hash.hex = obj.at("request_hash").get<std::string>();
    r.task_id = obj.at("task_id").get<std::string>();
    auto strategy = parse_strategy(obj.at("strategy").get<std::string>());
    if (!strategy) throw Error("unknown strategy in completion record");
    r.strategy = *strategy;
    r.prompt_tokens = obj.at("prompt_tokens").get<std::size_t>();
    r.completion_tokens = obj.at("completion_tokens").get<std::size_t>();
    const auto source = obj.at("token_source").get<std::string>();
    if (source == "provider_reported") {
        r.token_source = TokenSource::provider_reported;
    } else if (source == "approximated") {
        r.token_source = TokenSource::approximated;
    } else {
        throw Error("unknown token_source '" + source + "'");
    }
    r.latency_ms = obj.at("latency_ms").get<double>();
    r.timestamp = obj.at("timestamp").get<std::string>();
    r.response_text = obj.at("response_text").get<std::string>();
    return r;
}

}  // namespace

CompletionRecord completion_record_from_json(std::string_view text) {
    try {
        return record_from_object(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(std::string("malformed completion record: ") + e.what());
    }
}

std::size_t approximate_tokens(std::string_view text) {
    // Alphanumeric runs cost one token per four bytes (rounded up); every
    // other visible character costs one token.
    std::size_t tokens = 0;
    std::size_t run = 0;
    auto flush = [&] {
        tokens += (run + 3) / 4;
        run = 0;
    };
    for (char c : text) {
        auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u) || u >= 0x80) {
            ++run;
            continue;
        }
        flush();
        if (!std::isspace(u)) ++tokens;
    }
    flush();
    return tokens;
}

std::string_view gateway_error_kind_name(GatewayErrorKind kind) {
    switch (kind) {
        case GatewayErrorKind::invalid_request: return "invalid_request";
        case GatewayErrorKind::auth: return "auth";
        case GatewayErrorKind::rate_limited: return "rate_limited";
        case GatewayErrorKind::timeout: return "timeout";
        case GatewayErrorKind::transport: return "transport";
        case GatewayErrorKind::bad_response: return "bad_response";
        case GatewayErrorKind::replay_miss: return "replay_miss";
    }
    return "unknown";
}

GatewayError::GatewayError(GatewayErrorKind kind, const std::string& what)
    : Error(std::string(gateway_error_kind_name(kind)) + ": " + what), kind_(kind) {}

std::string utc_timestamp() {
    using namespace std::chrono;
    const auto now = system_clock::now();
    const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                  tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
    return buf;
}

// ---------------------------------------------------------------------------

Gateway::Gateway(GatewayOptions options, std::shared_ptr<Backend> backend, std::shared_ptr<ReplayStore> store)
    : options_(std::move(options)),
      backend_(std::move(backend)),
      store_(std::move(store)),
      in_flight_(std::max<std::ptrdiff_t>(1, options_.max_in_flight)),
      rng_state_(options_.jitter_seed) {
    if (options_.mode == GatewayMode::replay && !store_) {
        throw Error("replay mode requires a replay store");
    }
    if (options_.mode == GatewayMode::live && !backend_) throw Error("live mode requires a backend");
    if (!options_.sleep) options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionRecord Gateway::complete(const CompletionRequest& request, StrategyId strategy, std::string_view task_id) {
    request.validate();
    const RequestHash hash = request_hash(request);

    if (options_.mode == GatewayMode::replay) {
        if (auto hit = store_->lookup(hash)) return *hit;
        throw GatewayError(GatewayErrorKind::replay_miss, "no recorded completion for request " + hash.hex);
    }

    BackendReply reply;
    double latency_ms = 0.0;
    {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{in_flight_};

        for (int attempt = 0;; ++attempt) {
            try {
                backend_calls_.fetch_add(1);
                const auto start = std::chrono::steady_clock::now();
                reply = backend_->send(request);
                const auto stop = std::chrono::steady_clock::now();
                latency_ms = std::chrono::duration<double, std::milli>(stop - start).count();
                break;
            } catch (const GatewayError& e) {
                if (e.kind() != GatewayErrorKind::rate_limited || attempt >= options_.retry.max_retries) throw;
                options_.sleep(backoff_delay(attempt));
            }
        }
    }

    CompletionRecord record;
    record.request_hash = hash;
    record.response_text = std::move(reply.text);
    if (reply.usage) {
        record.prompt_tokens = reply.usage->prompt_tokens;
        record.completion_tokens = reply.usage->completion_tokens;
        record.token_source = TokenSource::provider_reported;
    } else {
        record.prompt_tokens = approximate_tokens(request.system_text) + approximate_tokens(request.user_text);
        record.completion_tokens = approximate_tokens(record.response_text);
        record.token_source = TokenSource::approximated;
    }
    // steady_clock is at least microsecond-resolution here; keep the record
    // strictly positive even for in-process backends.
    record.latency_ms = std::max(latency_ms, 1e-3);
    record.timestamp = utc_timestamp();
    record.strategy = strategy;
    record.task_id = std::string(task_id);

    if (store_) store_->store(record);
    return record;
}

std::chrono::milliseconds Gateway::backoff_delay(int attempt) {
    const auto& p = options_.retry;
    double nominal = static_cast<double>(p.base_delay.count()) * std::pow(p.factor, attempt);
    nominal = std::min(nominal, static_cast<double>(p.max_delay.count()));
    double unit;
    {
        std::lock_guard lock(rng_mutex_);
        detail::SplitMix64 rng{rng_state_};
        unit = static_cast<double>(rng.next() >> 11) * 0x1.0p-53;
        rng_state_ = rng.state;
    }
    return std::chrono::milliseconds(static_cast<long long>(nominal * (1.0 + p.jitter * unit)));
}

}  // namespace draftbench
