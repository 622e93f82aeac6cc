#pragma once

#include "factcheck/http.hpp"
#include "factcheck/ledger.hpp"
#include "factcheck/money.hpp"
#include "factcheck/retry.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace factcheck {

inline constexpr double kDefaultTemperature = 0.0;
inline constexpr std::int64_t kDefaultMaxOutputTokens = 2500;

struct ChatRequest {
    std::string model_id;
    std::optional<std::string> system_text;
    std::string user_text;
    double temperature = kDefaultTemperature;
    std::int64_t max_output_tokens = kDefaultMaxOutputTokens;

    // Name of the prompt template this request was rendered from. Used for
    // cost attribution and as half of the mock fingerprint.
    std::string prompt_name;
    // The input that identifies this request to a mock transcript (for
    // example the claim being verified). Defaults to user_text when empty.
    std::string fingerprint_key;
    // Set on the single re-prompt after an unparseable structured reply.
    bool reprompt = false;
};

// Throws ConfigError when temperature < 0 or max_output_tokens <= 0.
void validate(const ChatRequest& request);

struct ChatResponse {
    std::string text;
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::chrono::milliseconds latency{0};
    bool truncated = false;
};

struct ModelPricing {
    std::string model_id;
    double price_per_input_token = 0.0;
    double price_per_output_token = 0.0;
};

inline constexpr double kDefaultSearchUnitCost = 0.00105;

// Prices are configuration data. Models without an entry are free, with a
// warning logged once per model.
class PricingTable {
public:
    void set(ModelPricing pricing);
    const ModelPricing* find(const std::string& model_id) const;

    Money llm_cost(const std::string& model_id, std::int64_t input_tokens, std::int64_t output_tokens) const;

    Money search_unit_cost() const { return search_unit_cost_; }
    void set_search_unit_cost(double dollars);

    // {"search_unit_cost": 0.00105,
    //  "models": {"<id>": {"input_per_token": x, "output_per_token": y}}}
    static PricingTable from_json(const nlohmann::json& j);
    static PricingTable load(const std::filesystem::path& path);
    nlohmann::json to_json() const;

private:
    std::map<std::string, ModelPricing> models_;
    Money search_unit_cost_ = Money::from_dollars(kDefaultSearchUnitCost);
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // Throws TransportError (or a subclass) on failure.
    virtual ChatResponse send(const ChatRequest& request) = 0;
    virtual std::string identity() const = 0;
};

// Serves canned replies keyed by (prompt name, fingerprint key). Requests
// with no matching entry raise MockMissError, so a mock run can never fall
// through to a live service.
//
// Transcript file format:
//   {"schema_version": 1,
//    "entries": [
//      {"prompt": "verification", "key": "<claim>", "reply": "...",
//       "input_tokens": 120, "output_tokens": 40},
//      {"prompt": "translate_en_ur", "key": "*", "reply": "[ur] {key}"},
//      {"fingerprint": "<sha256 hex>", "reply": "..."}]}
//
// A "*" key is the prompt's default; its reply may contain {key}, replaced by
// the request's fingerprint key. For re-prompts, entries under
// "<prompt>#retry" take precedence over "<prompt>". Token counts default to
// the four-bytes-per-token estimate.
class MockChatBackend final : public ChatBackend {
public:
    struct Entry {
        std::string reply;
        std::optional<std::int64_t> input_tokens;
        std::optional<std::int64_t> output_tokens;
    };

    static std::string fingerprint(const std::string& prompt, const std::string& key);

    void add(const std::string& prompt, const std::string& key, Entry entry);
    void add_default(const std::string& prompt, Entry entry);
    void add_fingerprint(const std::string& fingerprint, Entry entry);

    static std::shared_ptr<MockChatBackend> load(const std::filesystem::path& path);

    ChatResponse send(const ChatRequest& request) override;
    std::string identity() const override;

private:
    std::map<std::string, Entry> entries_;
    std::map<std::string, Entry> defaults_;
    std::string source_ = "inline";
};

// Backend driven by a callable; handy for tests that need computed replies.
class FunctionChatBackend final : public ChatBackend {
public:
    using Handler = std::function<ChatResponse(const ChatRequest&)>;
    explicit FunctionChatBackend(Handler handler, std::string identity = "function")
        : handler_(std::move(handler)), identity_(std::move(identity)) {}

    ChatResponse send(const ChatRequest& request) override { return handler_(request); }
    std::string identity() const override { return identity_; }

private:
    Handler handler_;
    std::string identity_;
};

// Chat-completions over HTTP: POST {model, messages, temperature, max_tokens}
// with a bearer token; reads choices[0].message.content and usage.
class HttpChatBackend final : public ChatBackend {
public:
    HttpChatBackend(std::shared_ptr<HttpTransport> transport, std::string endpoint, std::string api_key,
                    std::chrono::milliseconds timeout = std::chrono::seconds(120));

    static nlohmann::json request_body(const ChatRequest& request);
    static ChatResponse parse_response(const std::string& body);

    ChatResponse send(const ChatRequest& request) override;
    std::string identity() const override { return "http:" + endpoint_; }

private:
    std::shared_ptr<HttpTransport> transport_;
    std::string endpoint_;
    std::string api_key_;
    std::chrono::milliseconds timeout_;
};

// Shared handle over a backend. Copies are cheap and share the backend,
// pricing and ledgers; `charging` adds a ledger (for per-claim accounting)
// to a copy without affecting the original.
class LlmClient {
public:
    LlmClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<const PricingTable> pricing,
              std::shared_ptr<CostLedger> ledger, std::shared_ptr<Backoff> backoff = nullptr);

    ChatResponse complete(const ChatRequest& request) const;

    LlmClient charging(std::shared_ptr<CostLedger> ledger) const;

    std::string backend_identity() const { return backend_->identity(); }
    const PricingTable& pricing() const { return *pricing_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    std::shared_ptr<const PricingTable> pricing_;
    std::vector<std::shared_ptr<CostLedger>> ledgers_;
    std::shared_ptr<Backoff> backoff_;
};

}  // namespace factcheck
