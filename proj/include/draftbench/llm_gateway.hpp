#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "draftbench/error.hpp"
#include "draftbench/strategy.hpp"

namespace draftbench {

inline constexpr double kDefaultTemperature = 0.7;

struct CompletionRequest {
    std::string provider_id;
    std::string model_id;
    std::string system_text;
    std::string user_text;
    double temperature = kDefaultTemperature;
    std::size_t max_output_tokens = 4096;

    /// Throws GatewayError(invalid_request) on empty texts, temperature
    /// outside [0, 2] or a zero token budget.
    void validate() const;
};

struct RequestHash {
    std::string hex;

    auto operator<=>(const RequestHash&) const = default;
};

/// SHA-256 over the request fields. Independent of time and call site.
RequestHash request_hash(const CompletionRequest& request);

enum class TokenSource { provider_reported, approximated };

std::string_view token_source_name(TokenSource s);

struct CompletionRecord {
    RequestHash request_hash;
    std::string response_text;
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
    TokenSource token_source = TokenSource::provider_reported;
    double latency_ms = 0.0;
    std::string timestamp;
    StrategyId strategy = StrategyId::standard;
    std::string task_id;

    bool operator==(const CompletionRecord&) const = default;
};

std::string completion_record_to_json(const CompletionRecord& record);
CompletionRecord completion_record_from_json(std::string_view json);

/// Deterministic subword estimate used when a provider omits usage.
std::size_t approximate_tokens(std::string_view text);

enum class GatewayErrorKind { invalid_request, auth, rate_limited, timeout, transport, bad_response, replay_miss };

std::string_view gateway_error_kind_name(GatewayErrorKind kind);

class GatewayError : public Error {
public:
    GatewayError(GatewayErrorKind kind, const std::string& what);
    GatewayErrorKind kind() const noexcept { return kind_; }

private:
    GatewayErrorKind kind_;
};

// ---------------------------------------------------------------------------
// Backends

struct Usage {
    std::size_t prompt_tokens = 0;
    std::size_t completion_tokens = 0;
};

struct BackendReply {
    std::string text;
    std::optional<Usage> usage;
};

/// Produces one completion. Implementations throw GatewayError.
class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendReply send(const CompletionRequest& request) = 0;
};

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::milliseconds timeout{120000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Network seam. Every call is one network operation.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// HTTPS/HTTP POST through cpp-httplib.
class HttplibTransport final : public Transport {
public:
    HttpResponse post(const HttpRequest& request) override;
};

/// Fails on use; counts attempts. Proves a code path is offline.
class FailingTransport final : public Transport {
public:
    HttpResponse post(const HttpRequest& request) override;
    std::size_t attempts() const noexcept { return attempts_.load(); }

private:
    std::atomic<std::size_t> attempts_{0};
};

enum class ProviderKind { openai_compatible, anthropic, mock };

struct ProviderConfig {
    std::string id;
    ProviderKind kind = ProviderKind::openai_compatible;
    std::string base_url;
    std::string api_key_env = "DRAFTBENCH_API_KEY";
    std::chrono::milliseconds timeout{120000};
};

/// "mock", "openai" or "anthropic". Throws GatewayError for anything else.
ProviderConfig builtin_provider(std::string_view id);
ProviderConfig provider_from_json(std::string_view json);

/// Chat-completion adapter over a Transport.
class HttpBackend final : public Backend {
public:
    HttpBackend(ProviderConfig provider, std::shared_ptr<Transport> transport, std::string api_key);
    BackendReply send(const CompletionRequest& request) override;

    /// Exposed for tests: the wire request and the reply decoding.
    HttpRequest build_request(const CompletionRequest& request) const;
    BackendReply decode_reply(const HttpResponse& response) const;

private:
    ProviderConfig provider_;
    std::shared_ptr<Transport> transport_;
    std::string api_key_;
};

// ---------------------------------------------------------------------------
// Replay store

/// Content-addressed directory of completion records: <dir>/<hash>.json.
class ReplayStore {
public:
    explicit ReplayStore(std::filesystem::path dir);

    std::optional<CompletionRecord> lookup(const RequestHash& hash) const;
    void store(const CompletionRecord& record);
    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::string, CompletionRecord> cache_;
    std::mutex write_mutex_;
};

// ---------------------------------------------------------------------------
// Gateway

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    std::chrono::milliseconds max_delay{8000};
    /// Extra random delay as a fraction of the nominal delay.
    double jitter = 0.25;
};

enum class GatewayMode {
    /// Call the backend; persist results into the replay store when one is attached.
    live,
    /// Serve only from the replay store; a miss is an error.
    replay,
};

struct GatewayOptions {
    GatewayMode mode = GatewayMode::live;
    RetryPolicy retry;
    std::ptrdiff_t max_in_flight = 4;
    std::uint64_t jitter_seed = 0;
    /// Replaceable for tests; defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;
};

class Gateway {
public:
    Gateway(GatewayOptions options, std::shared_ptr<Backend> backend,
            std::shared_ptr<ReplayStore> store);

    /// Safe to call concurrently; at most max_in_flight backend calls run at once.
    CompletionRecord complete(const CompletionRequest& request, StrategyId strategy,
                              std::string_view task_id);

    std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
    GatewayMode mode() const noexcept { return options_.mode; }

private:
    std::chrono::milliseconds backoff_delay(int attempt);

    GatewayOptions options_;
    std::shared_ptr<Backend> backend_;
    std::shared_ptr<ReplayStore> store_;
    std::counting_semaphore<> in_flight_;
    std::atomic<std::size_t> backend_calls_{0};
    std::mutex rng_mutex_;
    std::uint64_t rng_state_;
};

std::string utc_timestamp();

}  // namespace draftbench
