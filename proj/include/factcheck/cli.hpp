#pragma once

#include "factcheck/pipeline.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace factcheck::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

inline constexpr std::string_view kDefaultLlmEndpoint = "https://api.openai.com/v1/chat/completions";

struct RunConfig {
    std::optional<std::filesystem::path> mock_dir;  // set means the mock backend
    std::string model_id = "gpt-4o-mini";
    Strategy strategy = Strategy::Thresholded;
    int tau = kDefaultTau;
    int workers = kDefaultWorkers;
    int requested_results = kDefaultRequestedResults;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> cache_path;
    std::optional<std::filesystem::path> pricing_path;
    bool bypass_cache = false;
    double temperature = kDefaultTemperature;
    std::int64_t max_output_tokens = kDefaultMaxOutputTokens;
    std::size_t evidence_token_budget = kDefaultEvidenceTokenBudget;
    int max_attempts = 3;
    std::optional<std::string> urdu_locale;
    std::optional<std::string> english_locale;
    std::string llm_endpoint{kDefaultLlmEndpoint};
    std::string llm_api_key;
    std::string search_endpoint;
    std::string search_api_key;

    bool is_mock() const { return mock_dir.has_value(); }
};

// Configuration keys and the environment variables that feed them.
struct EnvBinding {
    const char* variable;
    const char* key;
};
const std::vector<EnvBinding>& env_bindings();

using EnvLookup = std::function<const char*(const char*)>;

// Layers are flat JSON objects merged left to right, later keys winning. The
// CLI passes defaults, environment, config files, then flags.
nlohmann::json env_layer(const EnvLookup& lookup);
RunConfig resolve_config(const std::vector<nlohmann::json>& layers);

// Throws ConfigError. Mock runs must carry a seed; live runs need API keys.
void validate(const RunConfig& config);

// API keys are redacted.
nlohmann::json to_json(const RunConfig& config);

// Entry point for the `factcheck` tool. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env);
int run(int argc, const char* const* argv);

}  // namespace factcheck::cli
