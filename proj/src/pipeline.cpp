#include "factcheck/pipeline.hpp"

#include "factcheck/error.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/structured.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>
#include <unordered_set>

namespace factcheck {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::Monolingual: return "monolingual";
        case Strategy::Translated: return "translated";
        case Strategy::Thresholded: return "thresholded";
    }
    return "thresholded";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    const auto s = text::ascii_lower(text::trim(text));
    if (s == "monolingual") return Strategy::Monolingual;
    if (s == "translated") return Strategy::Translated;
    if (s == "thresholded") return Strategy::Thresholded;
    return std::nullopt;
}

std::string_view to_string(InputMode mode) {
    return mode == InputMode::FreeText ? "free-text" : "benchmark";
}

std::string_view to_string(ClaimStatus status) {
    switch (status) {
        case ClaimStatus::Verified: return "verified";
        case ClaimStatus::Unverifiable: return "unverifiable";
        case ClaimStatus::Failed: return "failed";
    }
    return "failed";
}

void validate(const RetrievalConfig& config) {
    if (config.strategy == Strategy::Thresholded && config.tau < 1) {
        throw ConfigError(fmt::format("tau must be >= 1 for the thresholded strategy, got {}", config.tau));
    }
    if (config.requested_results < 1 || config.requested_results > kMaxRequestedResults) {
        throw ConfigError(fmt::format("requested_results must be in [1, {}], got {}", kMaxRequestedResults,
                                      config.requested_results));
    }
}

std::optional<std::pair<std::size_t, std::size_t>> find_span(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return std::nullopt;
    const auto at = haystack.find(needle);
    if (at == std::string_view::npos) return std::nullopt;
    const auto begin = text::utf8_decode(haystack.substr(0, at)).size();
    return std::make_pair(begin, begin + text::utf8_decode(needle).size());
}

// ---------------------------------------------------------------------------

FactChecker::FactChecker(LlmClient llm, SearchClient search, PipelineOptions options)
    : llm_(std::move(llm)), search_(std::move(search)), translator_(llm_, options.model),
      options_(std::move(options)) {
    validate(options_.retrieval);
    if (options_.workers < 1) throw ConfigError("workers must be >= 1");
}

FactChecker FactChecker::charging(std::shared_ptr<CostLedger> ledger) const {
    return FactChecker(llm_.charging(ledger), search_.charging(ledger), options_);
}

ChatRequest FactChecker::make_request(const PromptTemplate& tmpl, const Bindings& bindings,
                                      const std::string& key) const {
    ChatRequest req;
    req.model_id = options_.model.model_id;
    req.temperature = options_.model.temperature;
    req.max_output_tokens = options_.model.max_output_tokens;
    req.prompt_name = tmpl.name;
    req.fingerprint_key = key;
    req.user_text = render(tmpl, bindings);
    return req;
}

std::vector<std::string> FactChecker::list_with_reprompt(
    const PromptTemplate& tmpl, const Bindings& bindings, const std::string& key,
    const std::function<bool(const std::vector<std::string>&)>& ok, const char* what) const {
    auto req = make_request(tmpl, bindings, key);
    std::string last_problem;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) {
            req.reprompt = true;
            req.user_text += prompts::format_reminder(OutputShape::ItemizedList);
        }
        const auto reply = llm_.complete(req);
        try {
            auto items = parse_itemized_list(reply.text);
            if (ok(items)) return items;
            last_problem = fmt::format("unexpected {} reply: {} item(s)", what, items.size());
        } catch (const ParseError& e) {
            last_problem = e.what();
        }
    }
    throw PipelineError(fmt::format("{} failed after re-prompt: {}", what, last_problem));
}

std::vector<AtomicClaim> FactChecker::process_claims(const std::string& input) const {
    if (text::trim(input).empty()) throw PipelineError("cannot extract claims from empty text");
    const auto items = list_with_reprompt(
        prompts::claim_extraction(), {{"input", input}}, input, [](const auto&) { return true; },
        "claim extraction");
    std::vector<AtomicClaim> claims;
    for (const auto& item : items) {
        claims.push_back(AtomicClaim{item, find_span(input, item), claims.size()});
    }
    return claims;
}

QueryPair FactChecker::generate_queries(const AtomicClaim& claim) const {
    const auto items = list_with_reprompt(
        prompts::query_generation(), {{"input", claim.text}}, claim.text,
        [](const std::vector<std::string>& v) {
            return v.size() == 2 && text::collapse_whitespace(v[0]) != text::collapse_whitespace(v[1]);
        },
        "query generation");
    return QueryPair{items[0], items[1], claim.index};
}

namespace {

std::string query_id(std::size_t claim_index, int which, Language language) {
    return fmt::format("{}:{}:{}", claim_index, which == 0 ? "question" : "claim", to_string(language));
}

bool propagates(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const MockMissError&) {
        return true;
    } catch (const AuthError&) {
        return true;
    } catch (...) {
        return false;
    }
}

// Searches both queries and returns their URL-deduplicated union. One failing
// query is tolerated with a warning; both failing raises RetrievalError.
std::vector<EvidenceSnippet> search_pair(const SearchClient& search, const std::array<std::string, 2>& queries,
                                         Language language, int requested, const std::optional<std::string>& locale,
                                         std::size_t claim_index, std::unordered_set<std::string>& seen,
                                         std::vector<std::string>& warnings) {
    std::vector<EvidenceSnippet> out;
    int failures = 0;
    std::string last_error;
    for (int which = 0; which < 2; ++which) {
        if (queries[which].empty()) {
            ++failures;
            continue;
        }
        std::vector<EvidenceSnippet> hits;
        try {
            hits = search.search(SearchQuery{queries[which], language, requested, locale});
        } catch (const Error& e) {
            if (propagates(std::current_exception())) throw;
            ++failures;
            last_error = e.what();
            warnings.push_back(fmt::format("{} search failed: {}", query_id(claim_index, which, language), e.what()));
            continue;
        }
        for (auto& s : hits) {
            if (!seen.insert(normalize_url(s.url)).second) continue;
            s.query_id = query_id(claim_index, which, language);
            out.push_back(std::move(s));
        }
    }
    if (failures == 2) {
        throw RetrievalError(fmt::format("both {} searches failed: {}", to_string(language), last_error));
    }
    return out;
}

}  // namespace

EvidenceSet FactChecker::retrieve_monolingual(const QueryPair& pair) const {
    EvidenceSet set;
    std::unordered_set<std::string> seen;
    set.snippets = search_pair(search_, {pair.question_query, pair.claim_query}, Language::Ur,
                               options_.retrieval.requested_results, options_.retrieval.urdu_locale, pair.claim_index,
                               seen, set.warnings);
    set.urdu_count = set.snippets.size();
    return set;
}

EvidenceSet FactChecker::retrieve_translated(const QueryPair& pair, const std::vector<std::string>& exclude_urls) const {
    EvidenceSet set;
    std::array<std::string, 2> english;
    const std::array<const std::string*, 2> urdu{&pair.question_query, &pair.claim_query};
    int failures = 0;
    for (int which = 0; which < 2; ++which) {
        try {
            english[which] = translator_.translate({*urdu[which], Direction::UrduToEnglish});
        } catch (const Error& e) {
            if (propagates(std::current_exception())) throw;
            ++failures;
            set.warnings.push_back(fmt::format("query translation failed for {}: {}",
                                               query_id(pair.claim_index, which, Language::Ur), e.what()));
        }
    }
    if (failures == 2) throw RetrievalError("translation of both queries failed");

    std::unordered_set<std::string> seen(exclude_urls.begin(), exclude_urls.end());
    auto hits = search_pair(search_, english, Language::En, options_.retrieval.requested_results,
                            options_.retrieval.english_locale, pair.claim_index, seen, set.warnings);
    auto translated = translator_.translate_snippets(hits);
    set.snippets = std::move(translated.snippets);
    set.warnings.insert(set.warnings.end(), translated.warnings.begin(), translated.warnings.end());
    set.translated_count = set.snippets.size();
    return set;
}

EvidenceSet FactChecker::retrieve_thresholded(const QueryPair& pair, int tau) const {
    if (tau < 1) throw ConfigError("tau must be >= 1");
    auto set = retrieve_monolingual(pair);
    if (static_cast<long long>(set.urdu_count) >= tau) return set;

    set.fallback_used = true;
    std::vector<std::string> held;
    for (const auto& s : set.snippets) held.push_back(normalize_url(s.url));
    try {
        auto extra = retrieve_translated(pair, held);
        set.translated_count = extra.snippets.size();
        std::move(extra.snippets.begin(), extra.snippets.end(), std::back_inserter(set.snippets));
        set.warnings.insert(set.warnings.end(), extra.warnings.begin(), extra.warnings.end());
    } catch (const RetrievalError& e) {
        // Keep whatever Urdu evidence exists rather than losing the claim.
        set.warnings.push_back(fmt::format("translated fallback failed: {}", e.what()));
    }
    return set;
}

EvidenceSet FactChecker::retrieve(const QueryPair& pair) const {
    switch (options_.retrieval.strategy) {
        case Strategy::Monolingual: return retrieve_monolingual(pair);
        case Strategy::Translated: return retrieve_translated(pair);
        case Strategy::Thresholded: return retrieve_thresholded(pair, options_.retrieval.tau);
    }
    return retrieve_monolingual(pair);
}

Verdict FactChecker::verify(const AtomicClaim& claim, const EvidenceSet& evidence) const {
    // Rank order decides what survives the budget; presentation keeps set order.
    std::vector<std::size_t> order(evidence.snippets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return evidence.snippets[a].rank < evidence.snippets[b].rank;
    });
    std::vector<std::size_t> used;
    std::size_t spent = 0;
    for (const auto i : order) {
        const auto& s = evidence.snippets[i];
        const auto cost = static_cast<std::size_t>(text::estimate_tokens(s.title) + text::estimate_tokens(s.snippet_text));
        if (spent + cost > options_.evidence_token_budget) break;
        spent += cost;
        used.push_back(i);
    }
    std::sort(used.begin(), used.end());

    std::string block;
    for (std::size_t n = 0; n < used.size(); ++n) {
        const auto& s = evidence.snippets[used[n]];
        block += fmt::format("[{}] {}: {}\n", n + 1, s.title, s.snippet_text);
    }
    if (block.empty()) {
        block = "No evidence was retrieved.";
    } else {
        block.pop_back();
    }

    auto req = make_request(prompts::verification(), {{"claim", claim.text}, {"evidence", block}}, claim.text);
    std::optional<ParseError> last;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt == 1) {
            req.reprompt = true;
            req.user_text += prompts::format_reminder(OutputShape::LabeledJudgment);
        }
        const auto reply = llm_.complete(req);
        try {
            auto j = parse_judgment(reply.text);
            return Verdict{j.label, std::move(j.reasoning), std::move(j.error), std::move(j.correction), used};
        } catch (const ParseError& e) {
            last = e;
        }
    }
    throw *last;
}

ClaimResult FactChecker::check_claim(const AtomicClaim& claim) const {
    const auto start = Clock::now();
    auto ledger = std::make_shared<CostLedger>();
    const auto scoped = charging(ledger);

    ClaimResult result;
    result.claim = claim;
    try {
        result.queries = scoped.generate_queries(claim);
        result.evidence = scoped.retrieve(*result.queries);
        try {
            result.verdict = scoped.verify(claim, *result.evidence);
            result.status = ClaimStatus::Verified;
        } catch (const ParseError& e) {
            result.status = ClaimStatus::Unverifiable;
            result.error = e.what();
            spdlog::warn("claim {} unverifiable: {} (raw: {})", claim.index, e.what(), e.raw_text().substr(0, 200));
        }
    } catch (const std::exception& e) {
        result.status = ClaimStatus::Failed;
        result.error = e.what();
        spdlog::warn("claim {} failed: {}", claim.index, e.what());
    }
    result.usage = ledger->snapshot();
    result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    return result;
}

std::vector<ClaimResult> FactChecker::check_claims(const std::vector<AtomicClaim>& claims) const {
    std::vector<ClaimResult> results(claims.size());
    const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(options_.workers), claims.size());
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < claims.size(); ++i) results[i] = check_claim(claims[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < claims.size(); i = next.fetch_add(1)) {
                    results[i] = check_claim(claims[i]);
                }
            });
        }
    }
    return results;
}

FactCheckReport FactChecker::run(const std::string& input, InputMode mode) const {
    const auto start = Clock::now();
    auto ledger = std::make_shared<CostLedger>();
    const auto scoped = charging(ledger);

    FactCheckReport report;
    report.source_text = input;
    report.mode = mode;
    report.retrieval = options_.retrieval;
    report.model_id = options_.model.model_id;

    std::vector<AtomicClaim> claims;
    if (mode == InputMode::Benchmark) {
        if (text::trim(input).empty()) throw PipelineError("empty claim");
        claims.push_back(AtomicClaim{std::string(text::trim(input)), find_span(input, text::trim(input)), 0});
    } else {
        claims = scoped.process_claims(input);
    }
    report.extraction_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    report.claims = scoped.check_claims(claims);
    report.ledger = ledger->snapshot();
    report.total_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    return report;
}

FactCheckReport FactChecker::run_claims(const std::vector<AtomicClaim>& claims) const {
    const auto start = Clock::now();
    auto ledger = std::make_shared<CostLedger>();
    const auto scoped = charging(ledger);
    FactCheckReport report;
    report.mode = InputMode::Benchmark;
    report.retrieval = options_.retrieval;
    report.model_id = options_.model.model_id;
    report.claims = scoped.check_claims(claims);
    report.ledger = ledger->snapshot();
    report.total_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    return report;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json optional_text(const std::optional<std::string>& s) {
    return s ? json(*s) : json(nullptr);
}

json usage_json(const LedgerSnapshot& u) {
    return {{"llm_calls", u.llm_calls_by_prompt}, {"search_requests", u.search_requests_by_language}};
}

}  // namespace

json to_json(const ClaimResult& r, bool include_timings) {
    json j = {{"index", r.claim.index}, {"text", r.claim.text}, {"status", std::string(to_string(r.status))}};
    j["origin_span"] = r.claim.origin_span ? json::array({r.claim.origin_span->first, r.claim.origin_span->second})
                                           : json(nullptr);
    j["queries"] = r.queries ? json{{"question", r.queries->question_query}, {"claim", r.queries->claim_query}}
                             : json(nullptr);
    if (r.evidence) {
        json snippets = json::array();
        for (const auto& s : r.evidence->snippets) snippets.push_back(to_json(s));
        j["evidence"] = {{"urdu_count", r.evidence->urdu_count},
                         {"translated_count", r.evidence->translated_count},
                         {"fallback_used", r.evidence->fallback_used},
                         {"snippets", snippets},
                         {"warnings", r.evidence->warnings}};
    } else {
        j["evidence"] = nullptr;
    }
    if (r.verdict) {
        j["verdict"] = {{"label", std::string(to_string(r.verdict->label))},
                        {"reasoning", r.verdict->reasoning},
                        {"error", optional_text(r.verdict->error)},
                        {"correction", optional_text(r.verdict->correction)},
                        {"evidence_used", r.verdict->evidence_used}};
    } else {
        j["verdict"] = nullptr;
    }
    j["error"] = r.error.empty() ? json(nullptr) : json(r.error);
    j["usage"] = usage_json(r.usage);
    if (include_timings) j["elapsed_ms"] = r.elapsed.count();
    return j;
}

json to_json(const FactCheckReport& report, bool include_timings) {
    json claims = json::array();
    for (const auto& c : report.claims) claims.push_back(to_json(c, include_timings));
    json j = {{"schema_version", kReportSchemaVersion},
              {"source_text", report.source_text},
              {"mode", std::string(to_string(report.mode))},
              {"strategy", std::string(to_string(report.retrieval.strategy))},
              {"tau", report.retrieval.strategy == Strategy::Thresholded ? json(report.retrieval.tau) : json(nullptr)},
              {"requested_results", report.retrieval.requested_results},
              {"model_id", report.model_id},
              {"claims", claims},
              {"ledger", to_json(report.ledger)}};
    if (include_timings) {
        j["timings"] = {{"extraction_ms", report.extraction_time.count()}, {"total_ms", report.total_time.count()}};
    }
    return j;
}

}  // namespace factcheck
