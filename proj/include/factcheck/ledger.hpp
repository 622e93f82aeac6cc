#pragma once

#include "factcheck/money.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <string>

namespace factcheck {

struct LedgerSnapshot {
    Money llm_cost;
    Money search_cost;
    std::int64_t llm_calls = 0;
    std::int64_t search_calls = 0;  // billed (uncached) searches
    std::int64_t search_requests = 0;  // including cache hits
    std::int64_t input_tokens = 0;
    std::int64_t output_tokens = 0;
    std::map<std::string, std::int64_t> llm_calls_by_prompt;
    std::map<std::string, Money> llm_cost_by_prompt;
    std::map<std::string, std::int64_t> search_calls_by_language;
    std::map<std::string, std::int64_t> search_requests_by_language;

    Money total() const { return llm_cost + search_cost; }

    friend bool operator==(const LedgerSnapshot&, const LedgerSnapshot&) = default;
};

LedgerSnapshot& operator+=(LedgerSnapshot& into, const LedgerSnapshot& other);

nlohmann::json to_json(const LedgerSnapshot& snapshot);

// Accumulated spend for a run. All counters only grow; every update is a
// single locked aggregate step so the ledger can be shared by workers.
class CostLedger {
public:
    void record_llm_call(const std::string& prompt, std::int64_t input_tokens, std::int64_t output_tokens,
                         Money cost);
    void record_search(const std::string& language, bool billed, Money cost);

    LedgerSnapshot snapshot() const;

private:
    mutable std::mutex mutex_;
    LedgerSnapshot state_;
};

}  // namespace factcheck
