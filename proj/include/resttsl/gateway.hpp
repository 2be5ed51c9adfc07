#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "resttsl/json.hpp"
#include "resttsl/prompt.hpp"

namespace resttsl::gateway {

struct ProviderConfig {
    /// Key used for directory names and API-key lookup
    /// (RESTTSL_<KEY>_API_KEY with the key upper-cased).
    std::string provider_key;
    std::string model_id;
    std::string endpoint_url;
    double temperature = 0.0;
    std::optional<std::int64_t> seed;
    std::optional<int> max_output_tokens;
    /// USD per million tokens.
    double price_input_per_million = 0.0;
    double price_output_per_million = 0.0;
    double timeout_seconds = 120.0;
    int max_retries = 2;
};

/// Environment variable holding the provider's API key.
std::string api_key_variable(const ProviderConfig& config);
std::optional<std::string> api_key_from_env(const ProviderConfig& config);

struct Completion {
    std::string content;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::int64_t latency_ms = 0;
    bool truncated = false;
};

/// Stable FNV-1a 64-bit fingerprint over the model id and message list,
/// rendered as 16 hex digits.
std::string fingerprint(const std::string& model_id,
                        const std::vector<prompt::ChatMessage>& messages);

/// Exact integer cost in pico-dollars (1 USD = 1e12). Per-token prices are
/// derived from USD-per-million prices without floating-point accumulation.
std::int64_t cost_pico_usd(std::int64_t input_tokens, std::int64_t output_tokens,
                           const ProviderConfig& config);

/// Cost in USD; exact value, display rounding is the caller's concern.
double estimate_cost(std::int64_t input_tokens, std::int64_t output_tokens,
                     const ProviderConfig& config);

std::string format_usd(double value, int decimals = 4);

class CostLedger {
public:
    struct Entry {
        std::string model_id;
        std::string project_id;
        std::string stage;
        std::int64_t input_tokens = 0;
        std::int64_t output_tokens = 0;
        std::int64_t cost_pico_usd = 0;
    };

    void add(Entry entry);
    std::int64_t total_pico_usd() const;
    std::int64_t total_pico_usd(const std::string& model_id, const std::string& project_id) const;
    double total_usd() const;
    std::vector<Entry> entries() const;
    Json to_json() const;

private:
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
};

struct CassetteEntry {
    std::string fingerprint;
    std::string model_id;
    std::string stage;
    std::vector<prompt::ChatMessage> messages;
    Completion completion;
};

/// JSON-lines store of recorded completions, keyed by fingerprint.
class Cassette {
public:
    static Cassette open(const std::filesystem::path& path);

    const CassetteEntry* find(const std::string& fingerprint) const;
    /// Returns false when an existing fingerprint was overwritten.
    bool record(CassetteEntry entry);
    void save() const;

    const std::filesystem::path& path() const { return path_; }
    size_t size() const { return entries_.size(); }

private:
    std::filesystem::path path_;
    std::vector<CassetteEntry> entries_;
};

class Transport {
public:
    struct Response {
        int status = 0;
        std::string body;
    };

    virtual ~Transport() = default;
    virtual Response post(const std::string& url,
                          const std::vector<std::pair<std::string, std::string>>& headers,
                          const std::string& body, double timeout_seconds) = 0;
};

/// Throws on any use; offline modes assert zero calls against it.
class FailingTransport : public Transport {
public:
    Response post(const std::string&, const std::vector<std::pair<std::string, std::string>>&,
                  const std::string&, double) override;
    int calls() const { return calls_; }

private:
    int calls_ = 0;
};

std::shared_ptr<Transport> make_http_transport();

class Provider {
public:
    virtual ~Provider() = default;
    virtual Completion send(const ProviderConfig& config,
                            const prompt::ConversationScript& script) = 0;
};

/// Deterministic offline provider driven by rules matched against the
/// conversation's action stage or fingerprint.
class MockProvider : public Provider {
public:
    struct Rule {
        std::optional<prompt::PromptStage> stage;
        std::optional<std::string> fingerprint;
        std::string content;
        bool truncated = false;
    };

    explicit MockProvider(std::vector<Rule> rules);
    Completion send(const ProviderConfig& config,
                    const prompt::ConversationScript& script) override;

private:
    std::vector<Rule> rules_;
};

class ReplayProvider : public Provider {
public:
    explicit ReplayProvider(Cassette cassette);
    Completion send(const ProviderConfig& config,
                    const prompt::ConversationScript& script) override;

private:
    Cassette cassette_;
};

/// Chat-completions wire adapter for OpenAI-compatible endpoints.
class OpenAiChatProvider : public Provider {
public:
    OpenAiChatProvider(std::shared_ptr<Transport> transport, std::string api_key);
    Completion send(const ProviderConfig& config,
                    const prompt::ConversationScript& script) override;

private:
    std::shared_ptr<Transport> transport_;
    std::string api_key_;
};

struct RetryPolicy {
    int max_retries = 2;
    std::chrono::milliseconds base_delay{500};
    /// Injected for tests; defaults to a real sleep.
    std::function<void(std::chrono::milliseconds)> sleeper;
};

/// Wraps a provider with retry, cost accounting, recording, and the
/// stage-dependent truncation policy.
class Gateway {
public:
    Gateway(std::shared_ptr<Provider> provider, ProviderConfig config, RetryPolicy retry = {},
            CostLedger* ledger = nullptr, Cassette* recorder = nullptr);

    Completion send(const prompt::ConversationScript& script, const std::string& project_id);

private:
    Completion send_once(const prompt::ConversationScript& script);

    std::shared_ptr<Provider> provider_;
    ProviderConfig config_;
    RetryPolicy retry_;
    CostLedger* ledger_;
    Cassette* recorder_;
};

Json message_to_json(const prompt::ChatMessage& message);
prompt::ChatMessage message_from_json(const Json& value);

} // namespace resttsl::gateway
