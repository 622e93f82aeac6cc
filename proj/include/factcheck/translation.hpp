#pragma once

#include "factcheck/llm.hpp"
#include "factcheck/search.hpp"

#include <string>
#include <vector>

namespace factcheck {

enum class Direction { UrduToEnglish, EnglishToUrdu };

struct TranslationRequest {
    std::string text;
    Direction direction = Direction::UrduToEnglish;
};

struct ModelSettings {
    std::string model_id = "gpt-4o-mini";
    double temperature = kDefaultTemperature;
    std::int64_t max_output_tokens = kDefaultMaxOutputTokens;
};

struct TranslatedSnippets {
    std::vector<EvidenceSnippet> snippets;
    std::vector<std::string> warnings;  // one per dropped snippet
};

class Translator {
public:
    Translator(LlmClient llm, ModelSettings settings) : llm_(std::move(llm)), settings_(std::move(settings)) {}

    // Returns the trimmed model reply. Empty replies and refusals raise
    // TranslationError; transport errors propagate.
    std::string translate(const TranslationRequest& request) const;

    // Back-translates English snippets to Urdu, one call per title and per
    // body. A snippet whose translation fails is dropped with a warning;
    // survivors keep url, rank and query_id and are tagged en-ur.
    TranslatedSnippets translate_snippets(const std::vector<EvidenceSnippet>& snippets) const;

private:
    LlmClient llm_;
    ModelSettings settings_;
};

// Heuristic check for a model declining to translate.
bool looks_like_refusal(std::string_view reply);

}  // namespace factcheck
