#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck {

enum class OutputShape { FreeText, ItemizedList, LabeledJudgment };

// A named prompt with `{placeholder}` slots. `{{` and `}}` render as literal
// braces so templates can show JSON examples.
struct PromptTemplate {
    std::string name;
    std::string text;
    OutputShape expected_output = OutputShape::FreeText;
};

using Bindings = std::map<std::string, std::string, std::less<>>;

// Substitutes every placeholder; throws TemplateError naming the first
// unbound one. Bound values are inserted verbatim and never re-scanned.
std::string render(const PromptTemplate& tmpl, const Bindings& bindings);

// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(const PromptTemplate& tmpl);

namespace prompts {

inline constexpr std::string_view kAssetVersion = "1";

inline constexpr std::string_view kPreTranslation = "pre_translation";
inline constexpr std::string_view kClaimExtraction = "claim_extraction";
inline constexpr std::string_view kQueryGeneration = "query_generation";
inline constexpr std::string_view kVerification = "verification";
inline constexpr std::string_view kTranslateUrEn = "translate_ur_en";
inline constexpr std::string_view kTranslateEnUr = "translate_en_ur";

const PromptTemplate& pre_translation();
const PromptTemplate& claim_extraction();
const PromptTemplate& query_generation();
const PromptTemplate& verification();
const PromptTemplate& translate_ur_en();
const PromptTemplate& translate_en_ur();

const std::vector<const PromptTemplate*>& all();

// Appended to the user message when a structured reply failed to parse and the
// model is asked once more.
std::string_view format_reminder(OutputShape shape);

// name -> sha256 of template text, for run manifests.
std::map<std::string, std::string> asset_hashes();

}  // namespace prompts
}  // namespace factcheck
