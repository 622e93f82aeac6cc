#pragma once

#include "factcheck/labels.hpp"
#include "factcheck/ledger.hpp"
#include "factcheck/llm.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/search.hpp"
#include "factcheck/translation.hpp"

#include <json.hpp>

#include <chrono>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace factcheck {

enum class Strategy { Monolingual, Translated, Thresholded };

std::string_view to_string(Strategy strategy);
std::optional<Strategy> parse_strategy(std::string_view text);

// FreeText decomposes the input into claims first; Benchmark treats the input
// as one claim that is already atomic.
enum class InputMode { FreeText, Benchmark };

std::string_view to_string(InputMode mode);

inline constexpr int kDefaultTau = 5;
inline constexpr int kDefaultWorkers = 4;
inline constexpr std::size_t kDefaultEvidenceTokenBudget = 6000;

struct RetrievalConfig {
    Strategy strategy = Strategy::Thresholded;
    // Minimum number of Urdu snippets needed to skip the English fallback.
    int tau = kDefaultTau;
    int requested_results = kDefaultRequestedResults;
    std::optional<std::string> urdu_locale;
    std::optional<std::string> english_locale;
};

// Throws ConfigError if tau < 1 under the thresholded strategy or
// requested_results is outside [1, 20].
void validate(const RetrievalConfig& config);

struct AtomicClaim {
    std::string text;
    // Code-point [begin, end) of the claim in the source, when it appears
    // there verbatim.
    std::optional<std::pair<std::size_t, std::size_t>> origin_span;
    std::size_t index = 0;
};

struct QueryPair {
    std::string question_query;  // asks about the fact without stating it
    std::string claim_query;     // states the claim directly
    std::size_t claim_index = 0;
};

struct EvidenceSet {
    std::vector<EvidenceSnippet> snippets;  // Urdu snippets first, then en-ur
    std::size_t urdu_count = 0;
    std::size_t translated_count = 0;
    bool fallback_used = false;
    std::vector<std::string> warnings;
};

struct Verdict {
    BinaryLabel label = BinaryLabel::True;
    std::string reasoning;
    std::optional<std::string> error;
    std::optional<std::string> correction;
    // Indices into EvidenceSet::snippets that were shown to the verifier.
    // Empty means the judgment rests on the model's own knowledge.
    std::vector<std::size_t> evidence_used;
};

enum class ClaimStatus { Verified, Unverifiable, Failed };

std::string_view to_string(ClaimStatus status);

struct ClaimResult {
    AtomicClaim claim;
    std::optional<QueryPair> queries;
    std::optional<EvidenceSet> evidence;
    std::optional<Verdict> verdict;
    ClaimStatus status = ClaimStatus::Failed;
    std::string error;
    LedgerSnapshot usage;  // requests issued for this claim, cache hits included
    std::chrono::milliseconds elapsed{0};
};

struct FactCheckReport {
    std::string source_text;
    InputMode mode = InputMode::FreeText;
    RetrievalConfig retrieval;
    std::string model_id;
    std::vector<ClaimResult> claims;
    LedgerSnapshot ledger;
    std::chrono::milliseconds extraction_time{0};
    std::chrono::milliseconds total_time{0};
};

inline constexpr int kReportSchemaVersion = 1;

// Timings are wall-clock and therefore left out when a byte-stable report is
// needed.
nlohmann::json to_json(const FactCheckReport& report, bool include_timings = true);
nlohmann::json to_json(const ClaimResult& result, bool include_timings = true);

struct PipelineOptions {
    ModelSettings model;
    RetrievalConfig retrieval;
    int workers = kDefaultWorkers;
    // Estimated-token budget for evidence in the verification prompt. When it
    // is exceeded, snippets are kept in rank order and the worst-ranked ones
    // are dropped.
    std::size_t evidence_token_budget = kDefaultEvidenceTokenBudget;
};

class FactChecker {
public:
    FactChecker(LlmClient llm, SearchClient search, PipelineOptions options);

    const PipelineOptions& options() const { return options_; }

    // Decomposes free text into atomic claims. An empty list is valid.
    // Throws PipelineError when the reply stays unparseable after one re-prompt.
    std::vector<AtomicClaim> process_claims(const std::string& text) const;

    // Throws PipelineError unless the model yields exactly two distinct
    // queries, allowing one re-prompt.
    QueryPair generate_queries(const AtomicClaim& claim) const;

    EvidenceSet retrieve_monolingual(const QueryPair& pair) const;
    // `exclude_urls` are normalized URLs already held as Urdu evidence; English
    // hits pointing at them are neither translated nor returned.
    EvidenceSet retrieve_translated(const QueryPair& pair, const std::vector<std::string>& exclude_urls = {}) const;
    EvidenceSet retrieve_thresholded(const QueryPair& pair, int tau) const;
    EvidenceSet retrieve(const QueryPair& pair) const;

    // Throws ParseError when the judgment stays unparseable after one re-prompt.
    Verdict verify(const AtomicClaim& claim, const EvidenceSet& evidence) const;

    // Runs query generation, retrieval and verification for one claim. Never
    // throws; failures are reported through the status.
    ClaimResult check_claim(const AtomicClaim& claim) const;

    // Checks claims on up to options().workers threads. Output order follows
    // the input order.
    std::vector<ClaimResult> check_claims(const std::vector<AtomicClaim>& claims) const;

    FactCheckReport run(const std::string& text, InputMode mode = InputMode::FreeText) const;
    FactCheckReport run_claims(const std::vector<AtomicClaim>& claims) const;

private:
    FactChecker charging(std::shared_ptr<CostLedger> ledger) const;
    ChatRequest make_request(const PromptTemplate& tmpl, const Bindings& bindings, const std::string& key) const;
    std::vector<std::string> list_with_reprompt(const PromptTemplate& tmpl, const Bindings& bindings,
                                                const std::string& key,
                                                const std::function<bool(const std::vector<std::string>&)>& ok,
                                                const char* what) const;

    LlmClient llm_;
    SearchClient search_;
    Translator translator_;
    PipelineOptions options_;
};

// Code-point offsets of `needle` inside `haystack`, if present verbatim.
std::optional<std::pair<std::size_t, std::size_t>> find_span(std::string_view haystack, std::string_view needle);

}  // namespace factcheck
