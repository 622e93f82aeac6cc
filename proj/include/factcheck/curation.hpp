#pragma once

#include "factcheck/llm.hpp"
#include "factcheck/translation.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck {

struct Exemplar {
    std::string source_text;  // English
    std::string target_text;  // Urdu
    std::string source_dataset;
};

using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

inline constexpr std::string_view kTrigramCosine = "char-trigram-cosine";

// Cosine between character-trigram count vectors (over code points, after
// whitespace collapsing and ASCII lowercasing). Texts shorter than three code
// points count as a single gram. Returns 0 when either side is empty.
double trigram_cosine(std::string_view a, std::string_view b);

// Throws ConfigError for unknown names.
SimilarityFn similarity_by_name(std::string_view name);

struct ExemplarPool {
    std::vector<Exemplar> exemplars;
    std::string similarity{kTrigramCosine};

    // JSON lines of {"source": ..., "target": ..., "dataset": ...}.
    static ExemplarPool load(const std::filesystem::path& path);
};

inline constexpr double kDefaultMmrLambda = 0.5;
inline constexpr std::size_t kDefaultExemplarCount = 5;

// Greedy maximal marginal relevance over `candidates`. Each step picks the
// highest lambda*sim(c, query) - (1-lambda)*max_{s selected} sim(c, s); the
// earliest candidate wins ties. Returns indices in selection order.
std::vector<std::size_t> mmr_select_indices(const std::vector<std::string>& candidates, std::string_view query,
                                            std::size_t k, double lambda, const SimilarityFn& similarity);

// Throws ConfigError for an empty pool, k > pool size or lambda outside [0, 1].
std::vector<Exemplar> mmr_select(const ExemplarPool& pool, std::string_view query,
                                 std::size_t k = kDefaultExemplarCount, double lambda = kDefaultMmrLambda);

// English record layout fed to the translator: claims render as
// "Claim: ...\nLabel: ...", QA items as "Question: ...\nAnswer: ...".
// Missing fields raise TemplateError.
std::string record_text(const nlohmann::json& record);

std::string format_exemplars(const std::vector<Exemplar>& exemplars);

// Returns the trimmed draft. Empty output raises TranslationError.
std::string translate_record(const LlmClient& llm, const ModelSettings& settings, const std::string& record,
                             const std::vector<Exemplar>& exemplars);

struct CurationOptions {
    std::size_t k = kDefaultExemplarCount;
    double lambda = kDefaultMmrLambda;
    ModelSettings model;
};

struct Draft {
    std::string id;
    nlohmann::json source;
    std::string draft_text;
    std::vector<std::string> exemplar_sources;
    std::string status;  // "pending-review" or "failed"
    std::string error;
};

// Drafts are for human review and are never written over the dataset itself.
std::vector<Draft> curate(const ExemplarPool& pool, const std::vector<nlohmann::json>& records,
                          const LlmClient& llm, const CurationOptions& options);

inline constexpr int kDraftSchemaVersion = 1;

nlohmann::json to_json(const Draft& draft);
void write_drafts(const std::filesystem::path& path, const std::vector<Draft>& drafts);

}  // namespace factcheck
