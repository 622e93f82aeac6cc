#include "factcheck/llm.hpp"

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <mutex>
#include <set>

namespace factcheck {

using nlohmann::json;

void validate(const ChatRequest& request) {
    if (!(request.temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    if (request.max_output_tokens <= 0) throw ConfigError("max_output_tokens must be > 0");
}

// ---------------------------------------------------------------------------
// Pricing

void PricingTable::set(ModelPricing pricing) {
    if (pricing.price_per_input_token < 0 || pricing.price_per_output_token < 0) {
        throw ConfigError("negative price for model " + pricing.model_id);
    }
    auto id = pricing.model_id;
    models_[id] = std::move(pricing);
}

const ModelPricing* PricingTable::find(const std::string& model_id) const {
    const auto it = models_.find(model_id);
    return it == models_.end() ? nullptr : &it->second;
}

Money PricingTable::llm_cost(const std::string& model_id, std::int64_t input_tokens,
                             std::int64_t output_tokens) const {
    const auto* p = find(model_id);
    if (p == nullptr) {
        static std::mutex mutex;
        static std::set<std::string> warned;
        std::lock_guard lock(mutex);
        if (warned.insert(model_id).second) spdlog::warn("no pricing for model '{}'; billing it at 0", model_id);
        return Money{};
    }
    const double units = (static_cast<double>(input_tokens) * p->price_per_input_token +
                          static_cast<double>(output_tokens) * p->price_per_output_token) *
                         Money::kUnitsPerDollar;
    return Money::from_units(static_cast<std::int64_t>(std::llround(units)));
}

void PricingTable::set_search_unit_cost(double dollars) {
    if (dollars < 0) throw ConfigError("negative search unit cost");
    search_unit_cost_ = Money::from_dollars(dollars);
}

PricingTable PricingTable::from_json(const json& j) {
    PricingTable table;
    if (!j.is_object()) throw ConfigError("pricing table must be a JSON object");
    if (const auto it = j.find("search_unit_cost"); it != j.end()) {
        if (!it->is_number()) throw ConfigError("search_unit_cost must be a number");
        table.set_search_unit_cost(it->get<double>());
    }
    if (const auto it = j.find("models"); it != j.end()) {
        if (!it->is_object()) throw ConfigError("pricing 'models' must be an object");
        for (const auto& [id, entry] : it->items()) {
            const auto in = entry.value("input_per_token", 0.0);
            const auto out = entry.value("output_per_token", 0.0);
            table.set(ModelPricing{id, in, out});
        }
    }
    return table;
}

PricingTable PricingTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pricing table " + path.string());
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("pricing table is not valid JSON: " + path.string());
    return from_json(j);
}

json PricingTable::to_json() const {
    json models = json::object();
    for (const auto& [id, p] : models_) {
        models[id] = {{"input_per_token", p.price_per_input_token}, {"output_per_token", p.price_per_output_token}};
    }
    return {{"search_unit_cost", search_unit_cost_.dollars()}, {"models", models}};
}

// ---------------------------------------------------------------------------
// Mock backend

std::string MockChatBackend::fingerprint(const std::string& prompt, const std::string& key) {
    return text::sha256_hex(prompt + '\x1f' + key);
}

void MockChatBackend::add(const std::string& prompt, const std::string& key, Entry entry) {
    if (key == "*") {
        add_default(prompt, std::move(entry));
        return;
    }
    entries_[fingerprint(prompt, key)] = std::move(entry);
}

void MockChatBackend::add_default(const std::string& prompt, Entry entry) {
    defaults_[prompt] = std::move(entry);
}

void MockChatBackend::add_fingerprint(const std::string& fp, Entry entry) {
    entries_[fp] = std::move(entry);
}

std::shared_ptr<MockChatBackend> MockChatBackend::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open mock transcript " + path.string());
    const auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("mock transcript is not a JSON object: " + path.string());

    auto backend = std::make_shared<MockChatBackend>();
    backend->source_ = path.string();
    const auto entries = j.value("entries", json::array());
    std::size_t index = 0;
    for (const auto& e : entries) {
        ++index;
        if (!e.is_object() || !e.contains("reply") || !e["reply"].is_string()) {
            throw ConfigError(fmt::format("{}: entry {} needs a string 'reply'", path.string(), index));
        }
        Entry entry{e["reply"].get<std::string>(), std::nullopt, std::nullopt};
        if (e.contains("input_tokens")) entry.input_tokens = e["input_tokens"].get<std::int64_t>();
        if (e.contains("output_tokens")) entry.output_tokens = e["output_tokens"].get<std::int64_t>();
        if (e.contains("fingerprint")) {
            backend->add_fingerprint(e["fingerprint"].get<std::string>(), std::move(entry));
        } else if (e.contains("prompt") && e.contains("key")) {
            backend->add(e["prompt"].get<std::string>(), e["key"].get<std::string>(), std::move(entry));
        } else {
            throw ConfigError(fmt::format("{}: entry {} needs 'fingerprint' or 'prompt' + 'key'", path.string(), index));
        }
    }
    return backend;
}

ChatResponse MockChatBackend::send(const ChatRequest& request) {
    const auto& key = request.fingerprint_key.empty() ? request.user_text : request.fingerprint_key;
    const Entry* hit = nullptr;
    std::vector<std::string> prompts;
    if (request.reprompt) prompts.push_back(request.prompt_name + "#retry");
    prompts.push_back(request.prompt_name);
    bool from_default = false;
    for (const auto& p : prompts) {
        if (const auto it = entries_.find(fingerprint(p, key)); it != entries_.end()) {
            hit = &it->second;
            break;
        }
    }
    if (hit == nullptr) {
        for (const auto& p : prompts) {
            if (const auto it = defaults_.find(p); it != defaults_.end()) {
                hit = &it->second;
                from_default = true;
                break;
            }
        }
    }
    if (hit == nullptr) {
        throw MockMissError(fmt::format("mock transcript has no reply for prompt '{}' key '{}' (fingerprint {})",
                                        request.prompt_name, key, fingerprint(request.prompt_name, key)));
    }

    ChatResponse response;
    response.text = hit->reply;
    if (from_default) {
        std::string expanded;
        std::size_t pos = 0;
        const std::string slot = "{key}";
        for (auto at = response.text.find(slot); at != std::string::npos; at = response.text.find(slot, pos)) {
            expanded.append(response.text, pos, at - pos);
            expanded.append(key);
            pos = at + slot.size();
        }
        expanded.append(response.text, pos);
        response.text = std::move(expanded);
    }
    response.input_tokens = hit->input_tokens.value_or(
        text::estimate_tokens(request.system_text.value_or("")) + text::estimate_tokens(request.user_text));
    response.output_tokens = hit->output_tokens.value_or(text::estimate_tokens(response.text));
    return response;
}

std::string MockChatBackend::identity() const {
    return "mock:" + source_;
}

// ---------------------------------------------------------------------------
// HTTP backend

HttpChatBackend::HttpChatBackend(std::shared_ptr<HttpTransport> transport, std::string endpoint,
                                 std::string api_key, std::chrono::milliseconds timeout)
    : transport_(std::move(transport)), endpoint_(std::move(endpoint)), api_key_(std::move(api_key)),
      timeout_(timeout) {
    if (endpoint_.empty()) throw ConfigError("LLM endpoint URL is not set");
}

json HttpChatBackend::request_body(const ChatRequest& request) {
    json messages = json::array();
    if (request.system_text) messages.push_back({{"role", "system"}, {"content", *request.system_text}});
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    return {{"model", request.model_id},
            {"messages", messages},
            {"temperature", request.temperature},
            {"max_tokens", request.max_output_tokens}};
}

ChatResponse HttpChatBackend::parse_response(const std::string& body) {
    const auto j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw TransportError("chat endpoint returned non-JSON body", true);
    const auto choices = j.value("choices", json::array());
    if (!choices.is_array() || choices.empty()) throw TransportError("chat response has no choices", true);
    const auto& choice = choices.front();
    ChatResponse response;
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
        response.text = choice["message"]["content"].get<std::string>();
    }
    response.truncated = choice.value("finish_reason", std::string()) == "length";
    if (const auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
        response.input_tokens = usage->value("prompt_tokens", std::int64_t{0});
        response.output_tokens = usage->value("completion_tokens", std::int64_t{0});
    }
    return response;
}

ChatResponse HttpChatBackend::send(const ChatRequest& request) {
    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);
    const auto response = transport_->post(endpoint_, headers, request_body(request).dump(), timeout_);
    if (response.status != 200) throw_for_status(response.status, "chat endpoint", response.body);
    return parse_response(response.body);
}

// ---------------------------------------------------------------------------
// Client

LlmClient::LlmClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<const PricingTable> pricing,
                     std::shared_ptr<CostLedger> ledger, std::shared_ptr<Backoff> backoff)
    : backend_(std::move(backend)), pricing_(std::move(pricing)), backoff_(std::move(backoff)) {
    if (!backend_) throw ConfigError("LLM backend is not configured");
    if (!pricing_) pricing_ = std::make_shared<PricingTable>();
    if (ledger) ledgers_.push_back(std::move(ledger));
    if (!backoff_) backoff_ = std::make_shared<Backoff>(RetryPolicy{}, real_sleeper());
}

ChatResponse LlmClient::complete(const ChatRequest& request) const {
    validate(request);
    const auto start = std::chrono::steady_clock::now();
    auto response = backoff_->run([&] { return backend_->send(request); });
    response.latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    response.input_tokens = std::max<std::int64_t>(response.input_tokens, 0);
    response.output_tokens = std::max<std::int64_t>(response.output_tokens, 0);
    if (response.output_tokens > request.max_output_tokens) response.truncated = true;

    const auto cost = pricing_->llm_cost(request.model_id, response.input_tokens, response.output_tokens);
    for (const auto& ledger : ledgers_) {
        ledger->record_llm_call(request.prompt_name, response.input_tokens, response.output_tokens, cost);
    }
    return response;
}

LlmClient LlmClient::charging(std::shared_ptr<CostLedger> ledger) const {
    LlmClient copy = *this;
    if (ledger) copy.ledgers_.push_back(std::move(ledger));
    return copy;
}

}  // namespace factcheck
