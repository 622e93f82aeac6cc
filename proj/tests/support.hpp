#pragma once

#include "factcheck/llm.hpp"
#include "factcheck/pipeline.hpp"
#include "factcheck/search.hpp"

#include <json.hpp>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <unistd.h>
#include <string>
#include <vector>

namespace support {

namespace fs = std::filesystem;

inline fs::path fixtures_dir() { return fs::path(FACTCHECK_FIXTURES_DIR); }

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("factcheck-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_jsonl(const fs::path& path, const std::vector<nlohmann::json>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& r : rows) out << r.dump() << '\n';
}

inline std::shared_ptr<factcheck::Backoff> no_sleep(int attempts = 3) {
    factcheck::RetryPolicy p;
    p.max_attempts = attempts;
    return std::make_shared<factcheck::Backoff>(p, [](std::chrono::milliseconds) {});
}

inline std::shared_ptr<factcheck::PricingTable> test_pricing() {
    auto p = std::make_shared<factcheck::PricingTable>();
    p->set({"test-model", 1e-6, 2e-6});
    return p;
}

// A synthetic retrieval world: each claim has a known number of Urdu and
// English hits per query, with controlled URL overlap, so tests can predict
// evidence counts without running the pipeline.
struct ClaimWorld {
    int ur_question = 0;
    int ur_claim = 0;
    int ur_overlap = 0;  // hits shared between the two Urdu queries
    int en_question = 0;
    int en_claim = 0;
    int en_overlap = 0;
    int en_repeats_ur = 0;  // English hits whose URL is already an Urdu hit

    int distinct_ur() const { return ur_question + ur_claim - ur_overlap; }
};

class SyntheticWorld {
public:
    std::string add_claim(const ClaimWorld& w) {
        const auto id = claims_.size();
        const auto text = "claim-" + std::to_string(id);
        claims_.push_back(w);
        texts_[text] = id;
        return text;
    }

    static std::string question_query(const std::string& claim) { return claim + " q"; }
    static std::string claim_query(const std::string& claim) { return claim + " c"; }

    factcheck::ChatResponse chat(const factcheck::ChatRequest& r) const {
        factcheck::ChatResponse out;
        out.input_tokens = 100;
        out.output_tokens = 10;
        if (r.prompt_name == "query_generation") {
            out.text = nlohmann::json::array({question_query(r.fingerprint_key), claim_query(r.fingerprint_key)}).dump();
        } else if (r.prompt_name == "translate_ur_en") {
            out.text = "en " + r.fingerprint_key;
        } else if (r.prompt_name == "translate_en_ur") {
            out.text = "ur " + r.fingerprint_key;
        } else if (r.prompt_name == "verification") {
            const auto id = texts_.at(r.fingerprint_key);
            out.text = nlohmann::json{{"reasoning", "checked"}, {"factuality", id % 3 != 0}}.dump();
        } else {
            throw factcheck::MockMissError("synthetic world has no " + r.prompt_name);
        }
        return out;
    }

    std::vector<factcheck::SearchHit> search(const factcheck::SearchQuery& q) const {
        std::string text = q.text;
        const bool en = q.language == factcheck::Language::En;
        if (en) text = text.substr(3);  // "en " prefix
        const bool is_question = text.ends_with(" q");
        const auto claim = text.substr(0, text.size() - 2);
        const auto id = texts_.at(claim);
        const auto& w = claims_[id];
        std::vector<factcheck::SearchHit> hits;
        const auto url = [&](const char* lang, int i) {
            return "https://s.example/" + std::to_string(id) + "/" + lang + "/" + std::to_string(i);
        };
        if (!en) {
            const int begin = is_question ? 0 : w.ur_question - w.ur_overlap;
            const int n = is_question ? w.ur_question : w.ur_claim;
            for (int i = begin; i < begin + n; ++i) hits.push_back({"t" + std::to_string(i), "s", url("ur", i)});
        } else {
            const int begin = is_question ? 0 : w.en_question - w.en_overlap;
            const int n = is_question ? w.en_question : w.en_claim;
            for (int i = begin; i < begin + n; ++i) {
                // The first en_repeats_ur English hits point at Urdu URLs.
                const auto u = i < w.en_repeats_ur ? url("ur", i) : url("en", i);
                hits.push_back({"title " + std::to_string(i), "snippet " + std::to_string(i), u});
            }
        }
        return hits;
    }

    factcheck::LlmClient llm(std::shared_ptr<factcheck::CostLedger> ledger = nullptr,
                             std::shared_ptr<const factcheck::PricingTable> pricing = nullptr) const {
        if (!pricing) pricing = test_pricing();
        auto backend = std::make_shared<factcheck::FunctionChatBackend>(
            [this](const factcheck::ChatRequest& r) { return chat(r); }, "synthetic");
        return {backend, pricing, std::move(ledger), no_sleep()};
    }

    factcheck::SearchClient search_client(std::shared_ptr<factcheck::CostLedger> ledger = nullptr,
                                          factcheck::Money unit = factcheck::Money::from_dollars(0.00105)) const {
        auto backend = std::make_shared<factcheck::FunctionSearchBackend>(
            [this](const factcheck::SearchQuery& q) { return search(q); }, "synthetic");
        return {backend, std::make_shared<factcheck::SearchCache>(), unit, std::move(ledger), no_sleep()};
    }

    factcheck::FactChecker checker(const factcheck::RetrievalConfig& retrieval, int workers = 1,
                                   std::shared_ptr<factcheck::CostLedger> ledger = nullptr) const {
        factcheck::PipelineOptions o;
        o.model.model_id = "test-model";
        o.retrieval = retrieval;
        o.workers = workers;
        return {llm(ledger), search_client(ledger), o};
    }

    const ClaimWorld& world(std::size_t id) const { return claims_.at(id); }
    std::size_t size() const { return claims_.size(); }

private:
    std::vector<ClaimWorld> claims_;
    std::map<std::string, std::size_t> texts_;
};

// Checker over a synthetic world whose chat and search replies can be
// overridden per request.
struct Harness {
    SyntheticWorld world;
    std::function<std::optional<std::string>(const factcheck::ChatRequest&)> chat_override;
    std::function<bool(const factcheck::SearchQuery&)> search_fails;
    std::atomic<int> translate_calls{0};
    std::shared_ptr<factcheck::CostLedger> ledger = std::make_shared<factcheck::CostLedger>();

    factcheck::FactChecker checker(factcheck::RetrievalConfig retrieval, int workers = 1,
                                   std::size_t budget = factcheck::kDefaultEvidenceTokenBudget) {
        auto chat = std::make_shared<factcheck::FunctionChatBackend>([this](const factcheck::ChatRequest& r) {
            if (r.prompt_name.starts_with("translate")) ++translate_calls;
            if (chat_override) {
                if (auto text = chat_override(r)) {
                    factcheck::ChatResponse out;
                    out.text = *text;
                    return out;
                }
            }
            return world.chat(r);
        });
        auto search = std::make_shared<factcheck::FunctionSearchBackend>([this](const factcheck::SearchQuery& q) {
            if (search_fails && search_fails(q)) throw factcheck::TransportError("search down", false, 400);
            return world.search(q);
        });
        factcheck::PipelineOptions o;
        o.model.model_id = "test-model";
        o.retrieval = retrieval;
        o.workers = workers;
        o.evidence_token_budget = budget;
        return {factcheck::LlmClient(chat, test_pricing(), ledger, no_sleep()),
                factcheck::SearchClient(search, std::make_shared<factcheck::SearchCache>(),
                                        factcheck::Money::from_dollars(0.00105), ledger, no_sleep()),
                o};
    }
};

// Draws a claim whose counts respect the world's invariants.
inline ClaimWorld random_claim_world(std::mt19937_64& rng, int max_hits = 10) {
    std::uniform_int_distribution<int> hits(0, max_hits);
    ClaimWorld w;
    w.ur_question = hits(rng);
    w.ur_claim = hits(rng);
    w.ur_overlap = std::uniform_int_distribution<int>(0, std::min(w.ur_question, w.ur_claim))(rng);
    w.en_question = hits(rng);
    w.en_claim = hits(rng);
    w.en_overlap = std::uniform_int_distribution<int>(0, std::min(w.en_question, w.en_claim))(rng);
    w.en_repeats_ur = std::uniform_int_distribution<int>(0, std::min(w.en_question, w.distinct_ur()))(rng);
    return w;
}

}  // namespace support
