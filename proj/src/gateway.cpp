#include "resttsl/gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"

namespace resttsl::gateway {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_feed(std::uint64_t& hash, std::string_view text) {
    for (unsigned char c : text) {
        hash ^= c;
        hash *= kFnvPrime;
    }
}

void fnv_feed_byte(std::uint64_t& hash, unsigned char byte) {
    hash ^= byte;
    hash *= kFnvPrime;
}

std::int64_t approximate_tokens(size_t chars) {
    return static_cast<std::int64_t>((chars + 3) / 4);
}

bool is_retryable(ErrorCode code) {
    return code == ErrorCode::RateLimited || code == ErrorCode::Timeout ||
           code == ErrorCode::ProviderError;
}

} // namespace

std::string api_key_variable(const ProviderConfig& config) {
    std::string key = config.provider_key;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
        if (c == '-' || c == '.' || c == ' ') return '_';
        return static_cast<char>(std::toupper(c));
    });
    return "RESTTSL_" + key + "_API_KEY";
}

std::optional<std::string> api_key_from_env(const ProviderConfig& config) {
    const char* value = std::getenv(api_key_variable(config).c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
}

std::string fingerprint(const std::string& model_id,
                        const std::vector<prompt::ChatMessage>& messages) {
    std::uint64_t hash = kFnvOffset;
    fnv_feed(hash, model_id);
    fnv_feed_byte(hash, 0x1E);
    for (const prompt::ChatMessage& message : messages) {
        fnv_feed(hash, to_string(message.role));
        fnv_feed_byte(hash, 0x1F);
        fnv_feed(hash, message.content);
        fnv_feed_byte(hash, 0x1E);
    }
    char buffer[17];
    std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buffer, 16);
}

std::int64_t cost_pico_usd(std::int64_t input_tokens, std::int64_t output_tokens,
                           const ProviderConfig& config) {
    // USD per million tokens scales to pico-USD per token by exactly 1e6.
    std::int64_t pico_per_input = std::llround(config.price_input_per_million * 1e6);
    std::int64_t pico_per_output = std::llround(config.price_output_per_million * 1e6);
    return input_tokens * pico_per_input + output_tokens * pico_per_output;
}

double estimate_cost(std::int64_t input_tokens, std::int64_t output_tokens,
                     const ProviderConfig& config) {
    return static_cast<double>(cost_pico_usd(input_tokens, output_tokens, config)) / 1e12;
}

std::string format_usd(double value, int decimals) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*f", decimals, value);
    return buffer;
}

void CostLedger::add(Entry entry) {
    std::lock_guard<std::mutex> lock(mutex_);
    entries_.push_back(std::move(entry));
}

std::int64_t CostLedger::total_pico_usd() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::int64_t total = 0;
    for (const Entry& entry : entries_) total += entry.cost_pico_usd;
    return total;
}

std::int64_t CostLedger::total_pico_usd(const std::string& model_id,
                                        const std::string& project_id) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::int64_t total = 0;
    for (const Entry& entry : entries_) {
        if (entry.model_id == model_id && entry.project_id == project_id) {
            total += entry.cost_pico_usd;
        }
    }
    return total;
}

double CostLedger::total_usd() const {
    return static_cast<double>(total_pico_usd()) / 1e12;
}

std::vector<CostLedger::Entry> CostLedger::entries() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_;
}

Json CostLedger::to_json() const {
    Json rows = Json::array();
    for (const Entry& entry : entries()) {
        rows.push_back(Json{{"model_id", entry.model_id},
                            {"project_id", entry.project_id},
                            {"stage", entry.stage},
                            {"input_tokens", entry.input_tokens},
                            {"output_tokens", entry.output_tokens},
                            {"cost_pico_usd", entry.cost_pico_usd}});
    }
    return rows;
}

Json message_to_json(const prompt::ChatMessage& message) {
    return Json{{"role", std::string(to_string(message.role))}, {"content", message.content}};
}

prompt::ChatMessage message_from_json(const Json& value) {
    prompt::ChatMessage message;
    message.role = prompt::role_from_string(value.value("role", "user"));
    message.content = value.value("content", "");
    return message;
}

Cassette Cassette::open(const std::filesystem::path& path) {
    Cassette cassette;
    cassette.path_ = path;
    std::ifstream in(path, std::ios::binary);
    if (!in) return cassette;
    std::string line;
    size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        Json row;
        try {
            row = Json::parse(line);
        } catch (const std::exception& e) {
            fail(ErrorCode::IoError, "cassette " + path.string() + " line " +
                                         std::to_string(line_number) + ": " + e.what());
        }
        CassetteEntry entry;
        entry.fingerprint = row.value("fingerprint", "");
        entry.model_id = row.value("model_id", "");
        entry.stage = row.value("stage", "");
        if (row.contains("messages") && row["messages"].is_array()) {
            for (const Json& m : row["messages"]) entry.messages.push_back(message_from_json(m));
        }
        if (row.contains("completion") && row["completion"].is_object()) {
            const Json& c = row["completion"];
            entry.completion.content = c.value("content", "");
            entry.completion.input_tokens = c.value("input_tokens", std::int64_t{0});
            entry.completion.output_tokens = c.value("output_tokens", std::int64_t{0});
            entry.completion.latency_ms = c.value("latency_ms", std::int64_t{0});
            entry.completion.truncated = c.value("truncated", false);
        }
        if (entry.fingerprint.empty()) {
            fail(ErrorCode::IoError, "cassette " + path.string() + " line " +
                                         std::to_string(line_number) + ": missing fingerprint");
        }
        cassette.entries_.push_back(std::move(entry));
    }
    return cassette;
}

const CassetteEntry* Cassette::find(const std::string& fingerprint) const {
    for (const CassetteEntry& entry : entries_) {
        if (entry.fingerprint == fingerprint) return &entry;
    }
    return nullptr;
}

bool Cassette::record(CassetteEntry entry) {
    for (CassetteEntry& existing : entries_) {
        if (existing.fingerprint == entry.fingerprint) {
            existing = std::move(entry);
            return false;
        }
    }
    entries_.push_back(std::move(entry));
    return true;
}

void Cassette::save() const {
    std::string out;
    for (const CassetteEntry& entry : entries_) {
        Json row = Json{{"fingerprint", entry.fingerprint},
                        {"model_id", entry.model_id},
                        {"stage", entry.stage},
                        {"messages", Json::array()},
                        {"completion", Json{{"content", entry.completion.content},
                                            {"input_tokens", entry.completion.input_tokens},
                                            {"output_tokens", entry.completion.output_tokens},
                                            {"latency_ms", entry.completion.latency_ms},
                                            {"truncated", entry.completion.truncated}}}};
        for (const prompt::ChatMessage& message : entry.messages) {
            row["messages"].push_back(message_to_json(message));
        }
        out += row.dump();
        out += '\n';
    }
    fsutil::write_text_atomic(path_, out);
}

Transport::Response FailingTransport::post(const std::string&,
                                           const std::vector<std::pair<std::string, std::string>>&,
                                           const std::string&, double) {
    ++calls_;
    fail(ErrorCode::ProviderError, "network transport is disabled in this mode");
}

MockProvider::MockProvider(std::vector<Rule> rules) : rules_(std::move(rules)) {}

Completion MockProvider::send(const ProviderConfig& config,
                              const prompt::ConversationScript& script) {
    const std::string fp = fingerprint(config.model_id, script.messages);
    const prompt::PromptStage stage = script.action_stage();
    const Rule* matched = nullptr;
    for (const Rule& rule : rules_) {
        if (rule.fingerprint && *rule.fingerprint == fp) {
            matched = &rule;
            break;
        }
    }
    if (matched == nullptr) {
        for (const Rule& rule : rules_) {
            if (rule.fingerprint) continue;
            if (rule.stage && *rule.stage == stage) {
                matched = &rule;
                break;
            }
        }
    }
    if (matched == nullptr) {
        fail(ErrorCode::NoRuleMatched,
             "no mock rule for stage '" + std::string(to_string(stage)) + "' (fingerprint " + fp + ")");
    }
    size_t prompt_chars = 0;
    for (const prompt::ChatMessage& message : script.messages) {
        prompt_chars += message.content.size();
    }
    Completion completion;
    completion.content = matched->content;
    completion.input_tokens = approximate_tokens(prompt_chars);
    completion.output_tokens = approximate_tokens(matched->content.size());
    completion.latency_ms = 0;
    completion.truncated = matched->truncated;
    return completion;
}

ReplayProvider::ReplayProvider(Cassette cassette) : cassette_(std::move(cassette)) {}

Completion ReplayProvider::send(const ProviderConfig& config,
                                const prompt::ConversationScript& script) {
    const std::string fp = fingerprint(config.model_id, script.messages);
    const CassetteEntry* entry = cassette_.find(fp);
    if (entry == nullptr) {
        fail(ErrorCode::CassetteMiss, "fingerprint " + fp + " not present in " +
                                          cassette_.path().string());
    }
    return entry->completion;
}

Gateway::Gateway(std::shared_ptr<Provider> provider, ProviderConfig config, RetryPolicy retry,
                 CostLedger* ledger, Cassette* recorder)
    : provider_(std::move(provider)), config_(std::move(config)), retry_(std::move(retry)),
      ledger_(ledger), recorder_(recorder) {
    if (!retry_.sleeper) {
        retry_.sleeper = [](std::chrono::milliseconds delay) {
            std::this_thread::sleep_for(delay);
        };
    }
}

Completion Gateway::send_once(const prompt::ConversationScript& script) {
    int attempt = 0;
    for (;;) {
        try {
            return provider_->send(config_, script);
        } catch (const Error& e) {
            if (!is_retryable(e.code()) || attempt >= retry_.max_retries) throw;
            // Exponential, nondecreasing backoff: base, 2*base, 4*base, ...
            std::chrono::milliseconds delay = retry_.base_delay * (1LL << attempt);
            retry_.sleeper(delay);
            ++attempt;
        }
    }
}

Completion Gateway::send(const prompt::ConversationScript& script, const std::string& project_id) {
    const prompt::PromptStage stage = script.action_stage();
    auto billed_send = [&]() {
        Completion completion = send_once(script);
        if (ledger_ != nullptr) {
            ledger_->add({config_.model_id, project_id, std::string(to_string(stage)),
                          completion.input_tokens, completion.output_tokens,
                          cost_pico_usd(completion.input_tokens, completion.output_tokens,
                                        config_)});
        }
        return completion;
    };
    Completion completion = billed_send();
    if (completion.truncated) {
        if (stage == prompt::PromptStage::ActionGenerateTests) {
            // One fresh attempt for the segment; a second truncation is final.
            completion = billed_send();
        }
        if (completion.truncated) {
            fail(ErrorCode::Truncated,
                 "completion for stage '" + std::string(to_string(stage)) +
                     "' was cut off by the output limit");
        }
    }
    if (recorder_ != nullptr) {
        CassetteEntry entry;
        entry.fingerprint = fingerprint(config_.model_id, script.messages);
        entry.model_id = config_.model_id;
        entry.stage = std::string(to_string(stage));
        entry.messages = script.messages;
        entry.completion = completion;
        if (!recorder_->record(std::move(entry))) {
            std::fprintf(stderr, "warning: overwrote cassette entry %s in %s\n",
                         fingerprint(config_.model_id, script.messages).c_str(),
                         recorder_->path().string().c_str());
        }
        recorder_->save();
    }
    return completion;
}

} // namespace resttsl::gateway
