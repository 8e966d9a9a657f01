#include <httplib.h>

#include <json.hpp>

#include "draftbench/llm_gateway.hpp"
#include "text_util.hpp"

namespace draftbench {

using json = nlohmann::json;

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw GatewayError(GatewayErrorKind::invalid_request, "bad URL " + url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string trim_slash(std::string s) {
    while (!s.empty() && s.back() == '/') s.pop_back();
    return s;
}

std::string excerpt(const std::string& body) { return body.size() > 300 ? body.substr(0, 300) + "..." : body; }

}  // namespace

HttpResponse HttplibTransport::post(const HttpRequest& request) {
    const SplitUrl url = split_url(request.url);
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(request.timeout).count();
    client.set_connection_timeout(std::max<long long>(1, secs / 4), 0);
    client.set_read_timeout(std::max<long long>(1, secs), 0);
    client.set_write_timeout(std::max<long long>(1, secs), 0);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);
    auto result = client.Post(url.path, headers, request.body, "application/json");
    if (!result) {
        const auto err = result.error();
        const auto kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                              ? GatewayErrorKind::timeout
                              : GatewayErrorKind::transport;
        throw GatewayError(kind, "POST " + request.url + " failed: " + httplib::to_string(err));
    }
    return {result->status, result->body};
}

HttpResponse FailingTransport::post(const HttpRequest& request) {
    attempts_.fetch_add(1);
    throw GatewayError(GatewayErrorKind::transport, "network use is forbidden here (POST " + request.url + ")");
}

ProviderConfig builtin_provider(std::string_view id) {
    if (id == "mock") return {"mock", ProviderKind::mock, "", "", std::chrono::milliseconds{120000}};
    if (id == "openai") {
        return {"openai", ProviderKind::openai_compatible, "https://api.openai.com/v1", "DRAFTBENCH_API_KEY",
                std::chrono::milliseconds{120000}};
    }
    if (id == "anthropic") {
        return {"anthropic", ProviderKind::anthropic, "https://api.anthropic.com", "DRAFTBENCH_API_KEY",
                std::chrono::milliseconds{120000}};
    }
    throw GatewayError(GatewayErrorKind::invalid_request,
                       "unknown provider '" + std::string(id) + "'; describe it in the config file");
}

ProviderConfig provider_from_json(std::string_view text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::invalid_request, std::string("bad provider config: ") + e.what());
    }
    ProviderConfig p;
    p.id = obj.value("id", std::string{});
    if (p.id.empty()) throw GatewayError(GatewayErrorKind::invalid_request, "provider config needs an id");
    const std::string kind = obj.value("kind", std::string{"openai_compatible"});
    if (kind == "openai_compatible" || kind == "openai") {
        p.kind = ProviderKind::openai_compatible;
    } else if (kind == "anthropic") {
        p.kind = ProviderKind::anthropic;
    } else if (kind == "mock") {
        p.kind = ProviderKind::mock;
    } else {
        throw GatewayError(GatewayErrorKind::invalid_request, "unknown provider kind '" + kind + "'");
    }
    p.base_url = obj.value("base_url", std::string{});
    p.api_key_env = obj.value("api_key_env", std::string{"DRAFTBENCH_API_KEY"});
    p.timeout = std::chrono::milliseconds(obj.value("timeout_ms", 120000));
    if (p.kind != ProviderKind::mock && p.base_url.empty()) {
        throw GatewayError(GatewayErrorKind::invalid_request, "provider '" + p.id + "' needs a base_url");
    }
    return p;
}

HttpBackend::HttpBackend(ProviderConfig provider, std::shared_ptr<Transport> transport, std::string api_key)
    : provider_(std::move(provider)), transport_(std::move(transport)), api_key_(std::move(api_key)) {
    if (provider_.kind == ProviderKind::mock) throw Error("HttpBackend cannot serve the mock provider");
    if (!transport_) throw Error("HttpBackend needs a transport");
}

HttpRequest HttpBackend::build_request(const CompletionRequest& request) const {
    HttpRequest http;
    http.timeout = provider_.timeout;
    json body;
    body["model"] = request.model_id;
    body["temperature"] = request.temperature;
    body["max_tokens"] = request.max_output_tokens;
    if (provider_.kind == ProviderKind::anthropic) {
        http.url = trim_slash(provider_.base_url) + "/v1/messages";
        http.headers = {{"x-api-key", api_key_}, {"anthropic-version", "2023-06-01"}};
        body["system"] = request.system_text;
        body["messages"] = json::array({{{"role", "user"}, {"content", request.user_text}}});
    } else {
        http.url = trim_slash(provider_.base_url) + "/chat/completions";
        http.headers = {{"Authorization", "Bearer " + api_key_}};
        body["messages"] = json::array({{{"role", "system"}, {"content", request.system_text}},
                                        {{"role", "user"}, {"content", request.user_text}}});
    }
    http.body = body.dump();
    return http;
}

BackendReply HttpBackend::decode_reply(const HttpResponse& response) const {
    const int s = response.status;
    if (s == 401 || s == 403) throw GatewayError(GatewayErrorKind::auth, "HTTP " + std::to_string(s));
    if (s == 429 || s == 529) {
        throw GatewayError(GatewayErrorKind::rate_limited, "HTTP " + std::to_string(s));
    }
    if (s == 408 || s == 504) throw GatewayError(GatewayErrorKind::timeout, "HTTP " + std::to_string(s));
    if (s < 200 || s >= 300) {
        throw GatewayError(GatewayErrorKind::transport,
                           "HTTP " + std::to_string(s) + ": " + excerpt(response.body));
    }

    BackendReply reply;
    try {
        const json obj = json::parse(response.body);
        if (provider_.kind == ProviderKind::anthropic) {
            for (const auto& block : obj.at("content")) {
                if (block.value("type", std::string{}) == "text") reply.text += block.at("text").get<std::string>();
            }
            if (auto u = obj.find("usage"); u != obj.end() && u->contains("output_tokens")) {
                reply.usage = Usage{u->value("input_tokens", std::size_t{0}), u->at("output_tokens").get<std::size_t>()};
            }
        } else {
            const auto& message = obj.at("choices").at(0).at("message");
            if (auto c = message.find("content"); c != message.end() && c->is_string()) {
                reply.text = c->get<std::string>();
            }
            if (auto u = obj.find("usage"); u != obj.end() && u->is_object() && u->contains("completion_tokens")) {
                reply.usage =
                    Usage{u->value("prompt_tokens", std::size_t{0}), u->at("completion_tokens").get<std::size_t>()};
            }
        }
    } catch (const json::exception& e) {
        throw GatewayError(GatewayErrorKind::bad_response, std::string("cannot decode reply: ") + e.what());
    }
    return reply;
}

BackendReply HttpBackend::send(const CompletionRequest& request) {
    if (api_key_.empty()) {
        throw GatewayError(GatewayErrorKind::auth, "no API key (set " + provider_.api_key_env + ")");
    }
    return decode_reply(transport_->post(build_request(request)));
}

}  // namespace draftbench
