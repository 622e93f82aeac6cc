#include "factcheck/cli.hpp"

#include "factcheck/curation.hpp"
#include "factcheck/datasets.hpp"
#include "factcheck/error.hpp"
#include "factcheck/evaluation.hpp"
#include "factcheck/http.hpp"
#include "factcheck/llm.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/search.hpp"
#include "factcheck/text.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace factcheck::cli {

using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

const std::vector<EnvBinding>& env_bindings() {
    static const std::vector<EnvBinding> v{
        {"FACTCHECK_MOCK_DIR", "mock_dir"},
        {"FACTCHECK_MODEL", "model_id"},
        {"FACTCHECK_STRATEGY", "strategy"},
        {"FACTCHECK_TAU", "tau"},
        {"FACTCHECK_WORKERS", "workers"},
        {"FACTCHECK_SEED", "seed"},
        {"FACTCHECK_CACHE", "cache_path"},
        {"FACTCHECK_PRICING", "pricing_path"},
        {"FACTCHECK_LLM_URL", "llm_endpoint"},
        {"FACTCHECK_LLM_API_KEY", "llm_api_key"},
        {"FACTCHECK_SEARCH_URL", "search_endpoint"},
        {"FACTCHECK_SEARCH_API_KEY", "search_api_key"},
    };
    return v;
}

json env_layer(const EnvLookup& lookup) {
    json layer = json::object();
    for (const auto& b : env_bindings()) {
        if (const char* v = lookup(b.variable); v != nullptr && *v != '\0') layer[b.key] = std::string(v);
    }
    return layer;
}

namespace {

// Values from the environment arrive as strings; accept those for numbers.
template <typename T>
T number_at(const json& merged, const char* key, T fallback) {
    if (!merged.contains(key) || merged[key].is_null()) return fallback;
    const auto& v = merged[key];
    if (v.is_number()) return v.get<T>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        try {
            std::size_t used = 0;
            T out;
            if constexpr (std::is_floating_point_v<T>) {
                out = static_cast<T>(std::stod(s, &used));
            } else if constexpr (std::is_unsigned_v<T>) {
                if (!s.empty() && s.front() == '-') throw std::invalid_argument(s);
                out = static_cast<T>(std::stoull(s, &used));
            } else {
                out = static_cast<T>(std::stoll(s, &used));
            }
            if (used == s.size()) return out;
        } catch (const std::exception&) {
        }
    }
    throw ConfigError(fmt::format("config '{}' must be a number, got {}", key, v.dump()));
}

std::optional<std::string> string_at(const json& merged, const char* key) {
    if (!merged.contains(key) || merged[key].is_null()) return std::nullopt;
    const auto& v = merged[key];
    if (!v.is_string()) throw ConfigError(fmt::format("config '{}' must be a string, got {}", key, v.dump()));
    return v.get<std::string>();
}

bool bool_at(const json& merged, const char* key, bool fallback) {
    if (!merged.contains(key) || merged[key].is_null()) return fallback;
    const auto& v = merged[key];
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        const auto s = text::ascii_lower(v.get<std::string>());
        if (s == "1" || s == "true" || s == "yes") return true;
        if (s == "0" || s == "false" || s == "no") return false;
    }
    throw ConfigError(fmt::format("config '{}' must be a boolean, got {}", key, v.dump()));
}

}  // namespace

RunConfig resolve_config(const std::vector<json>& layers) {
    json merged = json::object();
    for (const auto& layer : layers) {
        if (!layer.is_object()) throw ConfigError("config layer is not a JSON object");
        for (const auto& [k, v] : layer.items()) {
            if (!v.is_null()) merged[k] = v;
        }
    }

    RunConfig c;
    if (auto v = string_at(merged, "mock_dir")) c.mock_dir = fs::path(*v);
    if (auto v = string_at(merged, "model_id")) c.model_id = *v;
    if (auto v = string_at(merged, "strategy")) {
        const auto s = parse_strategy(*v);
        if (!s) throw ConfigError(fmt::format("unknown strategy '{}' (monolingual, translated, thresholded)", *v));
        c.strategy = *s;
    }
    c.tau = number_at<int>(merged, "tau", c.tau);
    c.workers = number_at<int>(merged, "workers", c.workers);
    c.requested_results = number_at<int>(merged, "requested_results", c.requested_results);
    if (merged.contains("seed") && !merged["seed"].is_null()) c.seed = number_at<std::uint64_t>(merged, "seed", 0);
    if (auto v = string_at(merged, "cache_path")) c.cache_path = fs::path(*v);
    if (auto v = string_at(merged, "pricing_path")) c.pricing_path = fs::path(*v);
    c.bypass_cache = bool_at(merged, "bypass_cache", c.bypass_cache);
    c.temperature = number_at<double>(merged, "temperature", c.temperature);
    c.max_output_tokens = number_at<std::int64_t>(merged, "max_output_tokens", c.max_output_tokens);
    c.evidence_token_budget = number_at<std::size_t>(merged, "evidence_token_budget", c.evidence_token_budget);
    c.max_attempts = number_at<int>(merged, "max_attempts", c.max_attempts);
    c.urdu_locale = string_at(merged, "urdu_locale");
    c.english_locale = string_at(merged, "english_locale");
    if (auto v = string_at(merged, "llm_endpoint")) c.llm_endpoint = *v;
    if (auto v = string_at(merged, "llm_api_key")) c.llm_api_key = *v;
    if (auto v = string_at(merged, "search_endpoint")) c.search_endpoint = *v;
    if (auto v = string_at(merged, "search_api_key")) c.search_api_key = *v;
    return c;
}

void validate(const RunConfig& c) {
    if (c.model_id.empty()) throw ConfigError("model id is empty");
    if (c.tau < 1) throw ConfigError(fmt::format("tau must be >= 1, got {}", c.tau));
    if (c.workers < 1) throw ConfigError(fmt::format("workers must be >= 1, got {}", c.workers));
    if (c.requested_results < 1 || c.requested_results > kMaxRequestedResults) {
        throw ConfigError(fmt::format("requested_results must be in [1, {}]", kMaxRequestedResults));
    }
    if (c.temperature < 0) throw ConfigError("temperature must be >= 0");
    if (c.max_output_tokens <= 0) throw ConfigError("max_output_tokens must be > 0");
    if (c.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
    if (c.is_mock()) {
        if (!c.seed) throw ConfigError("mock runs need a seed (--seed, FACTCHECK_SEED or the mock config)");
        if (!fs::is_directory(*c.mock_dir)) throw ConfigError("mock directory not found: " + c.mock_dir->string());
    } else {
        if (c.llm_api_key.empty()) throw ConfigError("live runs need FACTCHECK_LLM_API_KEY (or --mock DIR)");
        if (c.search_api_key.empty()) throw ConfigError("live runs need FACTCHECK_SEARCH_API_KEY (or --mock DIR)");
    }
}

json to_json(const RunConfig& c) {
    const auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); };
    const auto opt_str = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
    return {{"backend", c.is_mock() ? "mock" : "live"},
            {"mock_dir", opt_path(c.mock_dir)},
            {"model_id", c.model_id},
            {"strategy", std::string(to_string(c.strategy))},
            {"tau", c.tau},
            {"workers", c.workers},
            {"requested_results", c.requested_results},
            {"seed", c.seed ? json(*c.seed) : json(nullptr)},
            {"cache_path", opt_path(c.cache_path)},
            {"pricing_path", opt_path(c.pricing_path)},
            {"bypass_cache", c.bypass_cache},
            {"temperature", c.temperature},
            {"max_output_tokens", c.max_output_tokens},
            {"evidence_token_budget", c.evidence_token_budget},
            {"max_attempts", c.max_attempts},
            {"urdu_locale", opt_str(c.urdu_locale)},
            {"english_locale", opt_str(c.english_locale)},
            {"llm_endpoint", c.is_mock() ? json(nullptr) : json(c.llm_endpoint)},
            {"llm_api_key", c.llm_api_key.empty() ? json(nullptr) : json("<redacted>")},
            {"search_endpoint", c.is_mock() ? json(nullptr) : json(c.search_endpoint)},
            {"search_api_key", c.search_api_key.empty() ? json(nullptr) : json("<redacted>")}};
}

// ---------------------------------------------------------------------------

namespace {

json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError(path.string() + " is not a JSON object");
    return j;
}

void write_text(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write output", path.string());
    out << content;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path sibling(const fs::path& out, const std::string& suffix) {
    auto p = out;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

// Option values gathered from the command line; unset ones are omitted so
// lower layers show through.
struct Flags {
    std::optional<std::string> mock_dir;
    std::optional<std::string> config_file;
    std::optional<std::string> model_id;
    std::optional<std::string> strategy;
    std::optional<int> tau;
    std::optional<int> workers;
    std::optional<int> requested_results;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> cache_path;
    std::optional<std::string> pricing_path;
    bool bypass_cache = false;
    std::optional<double> temperature;
    std::optional<std::int64_t> max_output_tokens;
    std::optional<std::size_t> evidence_token_budget;

    json layer() const {
        json j = json::object();
        const auto put = [&](const char* key, const auto& v) {
            if (v) j[key] = *v;
        };
        put("mock_dir", mock_dir);
        put("model_id", model_id);
        put("strategy", strategy);
        put("tau", tau);
        put("workers", workers);
        put("requested_results", requested_results);
        put("seed", seed);
        put("cache_path", cache_path);
        put("pricing_path", pricing_path);
        if (bypass_cache) j["bypass_cache"] = true;
        put("temperature", temperature);
        put("max_output_tokens", max_output_tokens);
        put("evidence_token_budget", evidence_token_budget);
        return j;
    }
};

void add_backend_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--mock", f.mock_dir, "Directory with llm.json and search.json; no network is used");
    cmd->add_option("--config", f.config_file, "JSON config file");
    cmd->add_option("--model", f.model_id, "Verifier model id");
    cmd->add_option("--seed", f.seed, "Seed (required with --mock)");
    cmd->add_option("--pricing", f.pricing_path, "Pricing table JSON");
    cmd->add_option("--temperature", f.temperature);
    cmd->add_option("--max-output-tokens", f.max_output_tokens);
}

void add_pipeline_flags(CLI::App* cmd, Flags& f, bool with_strategy = true) {
    add_backend_flags(cmd, f);
    if (with_strategy) {
        cmd->add_option("--strategy", f.strategy, "monolingual | translated | thresholded")
            ->check(CLI::IsMember({"monolingual", "translated", "thresholded"}));
        cmd->add_option("--tau", f.tau, "Minimum Urdu snippets before the English fallback")
            ->check(CLI::PositiveNumber);
    }
    cmd->add_option("--workers", f.workers)->check(CLI::PositiveNumber);
    cmd->add_option("--results", f.requested_results, "Results requested per search")->check(CLI::Range(1, 20));
    cmd->add_option("--cache", f.cache_path, "Persistent search cache (JSON lines)");
    cmd->add_flag("--no-cache-read", f.bypass_cache, "Fetch even when a cached result exists");
    cmd->add_option("--evidence-budget", f.evidence_token_budget, "Evidence token budget for verification");
}

RunConfig load_config(const Flags& flags, const EnvLookup& env, const json& command_defaults) {
    std::vector<json> layers{command_defaults, env_layer(env)};
    // The mock directory may itself come from any layer, so find it before
    // slotting its config.json in at config-file level.
    json explicit_config = json::object();
    if (flags.config_file) explicit_config = read_json_file(*flags.config_file);
    const auto probe = resolve_config({command_defaults, env_layer(env), explicit_config, flags.layer()});
    if (probe.mock_dir && fs::exists(*probe.mock_dir / "config.json")) {
        layers.push_back(read_json_file(*probe.mock_dir / "config.json"));
    }
    layers.push_back(explicit_config);
    layers.push_back(flags.layer());
    auto config = resolve_config(layers);
    if (config.is_mock() && !config.pricing_path && fs::exists(*config.mock_dir / "pricing.json")) {
        config.pricing_path = *config.mock_dir / "pricing.json";
    }
    validate(config);
    return config;
}

struct Services {
    LlmClient llm;
    SearchClient search;
    std::shared_ptr<CostLedger> ledger;
    std::shared_ptr<const PricingTable> pricing;
};

std::shared_ptr<const PricingTable> load_pricing(const RunConfig& c) {
    return std::make_shared<const PricingTable>(c.pricing_path ? PricingTable::load(*c.pricing_path) : PricingTable{});
}

LlmClient make_llm(const RunConfig& c, std::shared_ptr<const PricingTable> pricing, std::shared_ptr<CostLedger> ledger) {
    RetryPolicy policy;
    policy.max_attempts = c.max_attempts;
    auto backoff = std::make_shared<Backoff>(policy, real_sleeper(), c.seed.value_or(0));
    std::shared_ptr<ChatBackend> backend;
    if (c.is_mock()) {
        backend = MockChatBackend::load(*c.mock_dir / "llm.json");
    } else {
        backend = std::make_shared<HttpChatBackend>(make_curl_transport(), c.llm_endpoint, c.llm_api_key);
    }
    return LlmClient(std::move(backend), std::move(pricing), std::move(ledger), std::move(backoff));
}

Services make_services(const RunConfig& c, std::shared_ptr<SearchCache> cache) {
    auto ledger = std::make_shared<CostLedger>();
    auto pricing = load_pricing(c);
    auto llm = make_llm(c, pricing, ledger);
    RetryPolicy policy;
    policy.max_attempts = c.max_attempts;
    auto backoff = std::make_shared<Backoff>(policy, real_sleeper(), c.seed.value_or(0));
    std::shared_ptr<SearchBackend> backend;
    if (c.is_mock()) {
        backend = MockSearchBackend::load(*c.mock_dir / "search.json");
    } else {
        backend = std::make_shared<HttpSearchBackend>(make_curl_transport(), c.search_endpoint, c.search_api_key);
    }
    SearchClient search(std::move(backend), std::move(cache), pricing->search_unit_cost(), ledger, std::move(backoff),
                        c.bypass_cache);
    return Services{std::move(llm), std::move(search), ledger, pricing};
}

PipelineOptions pipeline_options(const RunConfig& c) {
    PipelineOptions o;
    o.model.model_id = c.model_id;
    o.model.temperature = c.temperature;
    o.model.max_output_tokens = c.max_output_tokens;
    o.retrieval.strategy = c.strategy;
    o.retrieval.tau = c.tau;
    o.retrieval.requested_results = c.requested_results;
    o.retrieval.urdu_locale = c.urdu_locale;
    o.retrieval.english_locale = c.english_locale;
    o.workers = c.workers;
    o.evidence_token_budget = c.evidence_token_budget;
    return o;
}

std::shared_ptr<SearchCache> make_cache(const RunConfig& c) {
    return c.cache_path ? std::make_shared<SearchCache>(*c.cache_path) : std::make_shared<SearchCache>();
}

void write_manifest(const fs::path& path, const std::string& command, const std::vector<std::string>& args,
                    const RunConfig& config, const Services& services, const json& outputs,
                    std::chrono::milliseconds elapsed) {
    json hashes = json::object();
    for (const auto& [name, hash] : prompts::asset_hashes()) hashes[name] = hash;
    const json manifest = {{"schema_version", 1},
                           {"command", command},
                           {"arguments", args},
                           {"config", to_json(config)},
                           {"seed", config.seed ? json(*config.seed) : json(nullptr)},
                           {"prompt_assets", {{"version", std::string(prompts::kAssetVersion)}, {"sha256", hashes}}},
                           {"backends",
                            {{"llm", services.llm.backend_identity()}, {"search", services.search.backend_identity()}}},
                           {"pricing", services.pricing->to_json()},
                           {"ledger", to_json(services.ledger->snapshot())},
                           {"outputs", outputs},
                           {"wall_time_ms", elapsed.count()}};
    write_json(path, manifest);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_ledger(std::ostream& out, const LedgerSnapshot& s) {
    out << fmt::format("cost: llm ${:.6f} + search ${:.6f} = ${:.6f} ({} llm calls, {} billed searches, {} cached)\n",
                       s.llm_cost.dollars(), s.search_cost.dollars(), s.total().dollars(), s.llm_calls,
                       s.search_calls, s.search_requests - s.search_calls);
}

// ---------------------------------------------------------------------------
// Commands

struct CheckArgs {
    std::optional<std::string> text;
    std::optional<std::string> file;
    std::string mode = "free-text";
    std::string out = "report.json";
};

int cmd_check(const CheckArgs& a, const Flags& flags, const EnvLookup& env, const std::vector<std::string>& argv,
              std::ostream& out) {
    const auto start = Clock::now();
    if (a.text.has_value() == a.file.has_value()) throw ConfigError("give either TEXT or --file");
    const auto input = a.file ? read_file(*a.file) : *a.text;
    const auto config = load_config(flags, env, json::object());
    const auto services = make_services(config, make_cache(config));
    const FactChecker checker(services.llm, services.search, pipeline_options(config));

    const auto report = checker.run(input, a.mode == "benchmark" ? InputMode::Benchmark : InputMode::FreeText);
    write_json(a.out, to_json(report, !config.is_mock()));

    for (const auto& c : report.claims) {
        const auto label = c.verdict ? std::string(to_string(c.verdict->label)) : std::string("-");
        const auto ev = c.evidence ? fmt::format("ur={} en-ur={}{}", c.evidence->urdu_count,
                                                 c.evidence->translated_count,
                                                 c.evidence->fallback_used ? " fallback" : "")
                                   : std::string("no evidence");
        out << fmt::format("[{}] {:<12} {:<5} {:<24} {}\n", c.claim.index, to_string(c.status), label, ev,
                           c.claim.text);
        if (!c.error.empty()) out << "    error: " << c.error << '\n';
    }
    print_ledger(out, report.ledger);
    out << "report: " << a.out << '\n';
    const auto manifest = sibling(a.out, ".manifest.json");
    write_manifest(manifest, "check", argv, config, services, {{"report", a.out}},
                   std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start));
    const bool any_failed = std::any_of(report.claims.begin(), report.claims.end(),
                                        [](const ClaimResult& c) { return c.status == ClaimStatus::Failed; });
    return any_failed ? kExitFailure : kExitOk;
}

struct BenchmarkArgs {
    std::string dataset;
    bool with_baselines = false;
    std::string out = "metrics.json";
};

int cmd_benchmark(const BenchmarkArgs& a, const Flags& flags, const EnvLookup& env,
                  const std::vector<std::string>& argv, std::ostream& out) {
    const auto start = Clock::now();
    const auto records = load_claims(a.dataset);
    const auto config = load_config(flags, env, json::object());
    const auto services = make_services(config, make_cache(config));
    const FactChecker checker(services.llm, services.search, pipeline_options(config));

    const auto name = fmt::format("{} {}", to_string(config.strategy), config.model_id);
    const auto result = run_benchmark(checker, records, name);
    std::vector<MetricsReport> extra;
    if (a.with_baselines) {
        std::vector<BinaryLabel> gold;
        for (const auto& r : records) gold.push_back(r.label);
        extra = baselines(gold, *config.seed);
    }
    write_json(a.out, to_json(result, extra, !config.is_mock()));

    auto rows = extra;
    rows.push_back(result.metrics);
    out << format_metrics_table(rows);
    out << fmt::format("fallback rate {:.3f}, wall time {} ms\n", result.metrics.fallback_rate,
                       result.metrics.wall_time.count());
    print_ledger(out, *result.metrics.ledger);
    out << "metrics: " << a.out << '\n';
    write_manifest(sibling(a.out, ".manifest.json"), "benchmark", argv, config, services, {{"metrics", a.out}},
                   std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start));
    return kExitOk;
}

struct SweepArgs {
    std::string dataset;
    std::vector<int> taus = kDefaultSweepTaus;
    std::string out = "sweep.json";
};

int cmd_sweep(const SweepArgs& a, const Flags& flags, const EnvLookup& env, const std::vector<std::string>& argv,
              std::ostream& out) {
    const auto start = Clock::now();
    const auto records = load_claims(a.dataset);
    auto config = load_config(flags, env, json::object());
    if (config.cache_path) {
        spdlog::warn("sweep ignores --cache so that every threshold pays for its own searches");
        config.cache_path.reset();
    }
    auto taus = a.taus;
    std::sort(taus.begin(), taus.end());

    // The first service set only backs the manifest; each point gets its own.
    const auto manifest_services = make_services(config, make_cache(config));
    const auto factory = [&](const RetrievalConfig& retrieval) {
        auto services = make_services(config, std::make_shared<SearchCache>());
        auto options = pipeline_options(config);
        options.retrieval = retrieval;
        return FactChecker(services.llm, services.search, options);
    };
    const auto points = sweep_threshold(records, taus, pipeline_options(config).retrieval, factory);

    const bool timings = !config.is_mock();
    write_json(a.out, to_json(points, timings));
    const auto csv = sibling(a.out, ".csv");
    const auto svg = sibling(a.out, ".svg");
    write_text(csv, sweep_csv(points));
    write_text(svg, sweep_svg(points));
    out << format_sweep_table(points);
    out << "sweep: " << a.out << "\nchart: " << svg.string() << '\n';

    LedgerSnapshot sum;
    for (const auto& p : points) sum += *p.metrics.ledger;
    print_ledger(out, sum);
    write_manifest(sibling(a.out, ".manifest.json"), "sweep", argv, config, manifest_services,
                   {{"sweep", a.out}, {"csv", csv.string()}, {"chart", svg.string()}, {"taus", taus},
                    {"sweep_ledger", to_json(sum)}},
                   std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start));
    return kExitOk;
}

struct EvalQaArgs {
    std::string qa;
    std::string responses;
    std::string model_id;
    std::string out = "factuality.json";
};

int cmd_eval_qa(const EvalQaArgs& a, const Flags& flags, const EnvLookup& env, const std::vector<std::string>& argv,
                std::ostream& out) {
    const auto start = Clock::now();
    const auto qa = load_qa(a.qa);
    const auto responses = load_responses(a.responses);
    const auto config = load_config(flags, env, json{{"strategy", "translated"}});
    const auto services = make_services(config, make_cache(config));
    const FactChecker checker(services.llm, services.search, pipeline_options(config));

    const auto report = evaluate_llm_factuality(checker, qa, responses, a.model_id);
    write_json(a.out, to_json(report));
    out << format_factuality(report);
    out << "report: " << a.out << '\n';
    write_manifest(sibling(a.out, ".manifest.json"), "eval-qa", argv, config, services, {{"report", a.out}},
                   std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start));
    return kExitOk;
}

int cmd_summarize(const std::vector<std::string>& files, const std::optional<std::string>& json_out,
                  std::ostream& out) {
    std::vector<fs::path> paths(files.begin(), files.end());
    const auto summary = summarize(paths);
    out << format_table(summary);
    if (json_out) write_json(*json_out, to_json(summary));
    return kExitOk;
}

int cmd_standardize(const std::string& in, const std::string& dest, std::ostream& out) {
    const auto source = load_source_claims(in);
    const auto records = standardize(source);
    write_claims(dest, records);
    out << fmt::format("{} records in, {} kept, {} not-supported dropped -> {}\n", source.size(), records.size(),
                       source.size() - records.size(), dest);
    return kExitOk;
}

int cmd_balance(const std::string& in, const std::string& dest, std::size_t cap, std::uint64_t seed,
                const std::string& majority_name, std::ostream& out) {
    const auto records = load_claims(in);
    const auto n_true = std::count_if(records.begin(), records.end(),
                                      [](const ClaimRecord& r) { return r.label == BinaryLabel::True; });
    BinaryLabel majority = n_true * 2 >= static_cast<std::ptrdiff_t>(records.size()) ? BinaryLabel::True
                                                                                     : BinaryLabel::False;
    if (majority_name != "auto") {
        const auto parsed = parse_binary_label(majority_name);
        if (!parsed) throw ConfigError("--majority must be true, false or auto");
        majority = *parsed;
    }
    const auto sampled = balance_sample(records, majority, cap, seed);
    write_claims(dest, sampled);
    const auto kept_true = std::count_if(sampled.begin(), sampled.end(),
                                         [](const ClaimRecord& r) { return r.label == BinaryLabel::True; });
    out << fmt::format("{} records in, {} out ({} true, {} false) -> {}\n", records.size(), sampled.size(), kept_true,
                       static_cast<std::ptrdiff_t>(sampled.size()) - kept_true, dest);
    return kExitOk;
}

struct CurateArgs {
    std::string records;
    std::string pool;
    std::string out = "drafts.jsonl";
    std::size_t k = kDefaultExemplarCount;
    double lambda = kDefaultMmrLambda;
};

int cmd_curate(const CurateArgs& a, const Flags& flags, const EnvLookup& env, const std::vector<std::string>& argv,
               std::ostream& out) {
    const auto start = Clock::now();
    const auto pool = ExemplarPool::load(a.pool);
    std::vector<json> records;
    for_each_record(a.records, [&](const json& j, std::size_t) { records.push_back(j); });
    auto config = load_config(flags, env, json::object());
    const auto services = make_services(config, std::make_shared<SearchCache>());

    CurationOptions options;
    options.k = a.k;
    options.lambda = a.lambda;
    options.model = pipeline_options(config).model;
    const auto drafts = curate(pool, records, services.llm, options);
    write_drafts(a.out, drafts);
    const auto failed = std::count_if(drafts.begin(), drafts.end(), [](const Draft& d) { return d.status == "failed"; });
    out << fmt::format("{} drafts pending review, {} failed -> {}\n", drafts.size() - failed, failed, a.out);
    print_ledger(out, services.ledger->snapshot());
    write_manifest(sibling(a.out, ".manifest.json"), "data curate", argv, config, services, {{"drafts", a.out}},
                   std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start));
    return failed == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Urdu fact-checking pipeline and benchmark harness", "factcheck"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "factcheck 0.1.0");
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    Flags flags;

    CheckArgs check;
    auto* c_check = app.add_subcommand("check", "Fact-check Urdu text");
    c_check->add_option("text", check.text, "Text to check");
    c_check->add_option("--file", check.file, "Read the text from a file");
    c_check->add_option("--mode", check.mode, "free-text | benchmark")
        ->check(CLI::IsMember({"free-text", "benchmark"}));
    c_check->add_option("-o,--out", check.out, "Report path")->capture_default_str();
    add_pipeline_flags(c_check, flags);

    BenchmarkArgs bench;
    auto* c_bench = app.add_subcommand("benchmark", "Score the fact-checker on a labeled claim file");
    c_bench->add_option("dataset", bench.dataset, "Claims (JSON lines)")->required();
    c_bench->add_flag("--baselines", bench.with_baselines, "Add Random / Always True / Always False rows");
    c_bench->add_option("-o,--out", bench.out, "Metrics path")->capture_default_str();
    add_pipeline_flags(c_bench, flags);

    SweepArgs sweep;
    auto* c_sweep = app.add_subcommand("sweep", "Benchmark the thresholded strategy across several tau values");
    c_sweep->add_option("dataset", sweep.dataset, "Claims (JSON lines)")->required();
    c_sweep->add_option("--taus", sweep.taus, "Comma-separated thresholds")
        ->delimiter(',')
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_sweep->add_option("-o,--out", sweep.out, "Sweep report path; .csv and .svg are written beside it")
        ->capture_default_str();
    add_pipeline_flags(c_sweep, flags, false);

    EvalQaArgs eval;
    auto* c_eval = app.add_subcommand("eval-qa", "Measure the factuality of model answers to QA items");
    c_eval->add_option("qa", eval.qa, "QA items (JSON lines)")->required();
    c_eval->add_option("responses", eval.responses, "Answers: {\"id\", \"response\"} per line")->required();
    c_eval->add_option("--model-id", eval.model_id, "Model that wrote the answers")->required();
    c_eval->add_option("-o,--out", eval.out, "Report path")->capture_default_str();
    add_pipeline_flags(c_eval, flags);

    auto* c_data = app.add_subcommand("data", "Dataset utilities");
    c_data->require_subcommand(1);

    std::vector<std::string> summarize_files;
    std::optional<std::string> summarize_json;
    auto* c_sum = c_data->add_subcommand("summarize", "Per-source label counts");
    c_sum->add_option("files", summarize_files, "Dataset files")->required()->check(CLI::ExistingFile);
    c_sum->add_option("--json", summarize_json, "Also write the summary as JSON");

    std::string std_in, std_out;
    auto* c_std = c_data->add_subcommand("standardize", "Collapse four-way source labels to true/false");
    c_std->add_option("input", std_in)->required()->check(CLI::ExistingFile);
    c_std->add_option("-o,--out", std_out)->required();

    std::string bal_in, bal_out, bal_majority = "auto";
    std::size_t bal_cap = 100;
    std::uint64_t bal_seed = 0;
    auto* c_bal = c_data->add_subcommand("balance", "Down-sample the majority label");
    c_bal->add_option("input", bal_in)->required()->check(CLI::ExistingFile);
    c_bal->add_option("-o,--out", bal_out)->required();
    c_bal->add_option("--cap", bal_cap, "Majority records to keep")->capture_default_str();
    c_bal->add_option("--seed", bal_seed)->required();
    c_bal->add_option("--majority", bal_majority, "true | false | auto")->capture_default_str();

    CurateArgs curate_args;
    auto* c_cur = c_data->add_subcommand("curate", "Draft Urdu translations with MMR-selected exemplars");
    c_cur->add_option("records", curate_args.records, "English records (JSON lines)")->required();
    c_cur->add_option("--pool", curate_args.pool, "Exemplar pool (JSON lines)")->required();
    c_cur->add_option("-o,--out", curate_args.out, "Draft file for review")->capture_default_str();
    c_cur->add_option("-k", curate_args.k, "Exemplars per prompt")->capture_default_str();
    c_cur->add_option("--lambda", curate_args.lambda, "MMR trade-off")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    add_backend_flags(c_cur, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (verbose) spdlog::set_level(spdlog::level::debug);

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        if (c_check->parsed()) return cmd_check(check, flags, env, args, out);
        if (c_bench->parsed()) return cmd_benchmark(bench, flags, env, args, out);
        if (c_sweep->parsed()) return cmd_sweep(sweep, flags, env, args, out);
        if (c_eval->parsed()) return cmd_eval_qa(eval, flags, env, args, out);
        if (c_sum->parsed()) return cmd_summarize(summarize_files, summarize_json, out);
        if (c_std->parsed()) return cmd_standardize(std_in, std_out, out);
        if (c_bal->parsed()) return cmd_balance(bal_in, bal_out, bal_cap, bal_seed, bal_majority, out);
        if (c_cur->parsed()) return cmd_curate(curate_args, flags, env, args, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    return run(argc, argv, std::cout, std::cerr, [](const char* name) { return std::getenv(name); });
}

}  // namespace factcheck::cli
