#include "factcheck/ledger.hpp"

namespace factcheck {

void CostLedger::record_llm_call(const std::string& prompt, std::int64_t input_tokens,
                                 std::int64_t output_tokens, Money cost) {
    std::lock_guard lock(mutex_);
    state_.llm_calls += 1;
    state_.input_tokens += input_tokens;
    state_.output_tokens += output_tokens;
    state_.llm_cost += cost;
    state_.llm_calls_by_prompt[prompt] += 1;
    state_.llm_cost_by_prompt[prompt] += cost;
}

void CostLedger::record_search(const std::string& language, bool billed, Money cost) {
    std::lock_guard lock(mutex_);
    state_.search_requests += 1;
    state_.search_requests_by_language[language] += 1;
    if (billed) {
        state_.search_calls += 1;
        state_.search_calls_by_language[language] += 1;
        state_.search_cost += cost;
    }
}

LedgerSnapshot CostLedger::snapshot() const {
    std::lock_guard lock(mutex_);
    return state_;
}

LedgerSnapshot& operator+=(LedgerSnapshot& into, const LedgerSnapshot& other) {
    into.llm_cost += other.llm_cost;
    into.search_cost += other.search_cost;
    into.llm_calls += other.llm_calls;
    into.search_calls += other.search_calls;
    into.search_requests += other.search_requests;
    into.input_tokens += other.input_tokens;
    into.output_tokens += other.output_tokens;
    for (const auto& [k, v] : other.llm_calls_by_prompt) into.llm_calls_by_prompt[k] += v;
    for (const auto& [k, v] : other.llm_cost_by_prompt) into.llm_cost_by_prompt[k] += v;
    for (const auto& [k, v] : other.search_calls_by_language) into.search_calls_by_language[k] += v;
    for (const auto& [k, v] : other.search_requests_by_language) into.search_requests_by_language[k] += v;
    return into;
}

nlohmann::json to_json(const LedgerSnapshot& s) {
    nlohmann::json by_prompt = nlohmann::json::object();
    for (const auto& [prompt, cost] : s.llm_cost_by_prompt) by_prompt[prompt] = cost.dollars();
    return {{"llm_cost", s.llm_cost.dollars()},
            {"search_cost", s.search_cost.dollars()},
            {"total_cost", s.total().dollars()},
            {"llm_calls", s.llm_calls},
            {"search_calls", s.search_calls},
            {"search_requests", s.search_requests},
            {"input_tokens", s.input_tokens},
            {"output_tokens", s.output_tokens},
            {"llm_calls_by_prompt", s.llm_calls_by_prompt},
            {"llm_cost_by_prompt", by_prompt},
            {"search_calls_by_language", s.search_calls_by_language}};
}

}  // namespace factcheck
