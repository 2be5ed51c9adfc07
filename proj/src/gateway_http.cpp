#include <chrono>
#include <cmath>

#include <httplib.h>

#include "resttsl/errors.hpp"
#include "resttsl/gateway.hpp"

namespace resttsl::gateway {

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        fail(ErrorCode::BadConfig, "endpoint URL '" + url + "' has no scheme");
    }
    size_t path_start = url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibTransport : public Transport {
public:
    Response post(const std::string& url,
                  const std::vector<std::pair<std::string, std::string>>& headers,
                  const std::string& body, double timeout_seconds) override {
        SplitUrl split = split_url(url);
        httplib::Client client(split.base);
        client.set_follow_location(true);
        auto timeout = std::chrono::milliseconds(
            static_cast<std::int64_t>(std::max(timeout_seconds, 1.0) * 1000.0));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers request_headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : headers) {
            if (name == "Content-Type") {
                content_type = value;
            } else {
                request_headers.emplace(name, value);
            }
        }
        httplib::Result result = client.Post(split.path, request_headers, body, content_type);
        if (!result) {
            if (result.error() == httplib::Error::ConnectionTimeout ||
                result.error() == httplib::Error::Read || result.error() == httplib::Error::Write) {
                fail(ErrorCode::Timeout, "request to " + url + " timed out or was interrupted");
            }
            fail(ErrorCode::ProviderError,
                 "request to " + url + " failed: " + httplib::to_string(result.error()));
        }
        return {result->status, result->body};
    }
};

} // namespace

std::shared_ptr<Transport> make_http_transport() {
    return std::make_shared<HttplibTransport>();
}

OpenAiChatProvider::OpenAiChatProvider(std::shared_ptr<Transport> transport, std::string api_key)
    : transport_(std::move(transport)), api_key_(std::move(api_key)) {}

Completion OpenAiChatProvider::send(const ProviderConfig& config,
                                    const prompt::ConversationScript& script) {
    Json body = Json::object();
    body["model"] = config.model_id;
    Json messages = Json::array();
    for (const prompt::ChatMessage& message : script.messages) {
        messages.push_back(message_to_json(message));
    }
    body["messages"] = std::move(messages);
    body["temperature"] = config.temperature;
    if (config.seed) body["seed"] = *config.seed;
    if (config.max_output_tokens) body["max_tokens"] = *config.max_output_tokens;

    std::vector<std::pair<std::string, std::string>> headers;
    headers.emplace_back("Content-Type", "application/json");
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    auto start = std::chrono::steady_clock::now();
    Transport::Response response =
        transport_->post(config.endpoint_url, headers, body.dump(), config.timeout_seconds);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    if (response.status == 401 || response.status == 403) {
        fail(ErrorCode::AuthError, "provider rejected credentials (status " +
                                       std::to_string(response.status) + ")");
    }
    if (response.status == 429) {
        fail(ErrorCode::RateLimited, "provider rate limit hit (status 429)");
    }
    if (response.status == 408) {
        fail(ErrorCode::Timeout, "provider timed out (status 408)");
    }
    if (response.status < 200 || response.status >= 300) {
        fail(ErrorCode::ProviderError, "provider returned status " +
                                           std::to_string(response.status) + ": " + response.body);
    }
    Json payload;
    try {
        payload = Json::parse(response.body);
    } catch (const std::exception& e) {
        fail(ErrorCode::ProviderError, std::string("unparsable provider response: ") + e.what());
    }
    if (!payload.contains("choices") || !payload["choices"].is_array() ||
        payload["choices"].empty()) {
        fail(ErrorCode::ProviderError, "provider response has no choices");
    }
    const Json& choice = payload["choices"][0];
    Completion completion;
    if (choice.contains("message") && choice["message"].is_object() &&
        choice["message"].contains("content") && choice["message"]["content"].is_string()) {
        completion.content = choice["message"]["content"].get<std::string>();
    }
    completion.truncated = choice.value("finish_reason", "stop") == "length";
    if (payload.contains("usage") && payload["usage"].is_object()) {
        const Json& usage = payload["usage"];
        completion.input_tokens = usage.value("prompt_tokens", std::int64_t{0});
        completion.output_tokens = usage.value("completion_tokens", std::int64_t{0});
    }
    completion.latency_ms = static_cast<std::int64_t>(elapsed);
    return completion;
}

} // namespace resttsl::gateway
