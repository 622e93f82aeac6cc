#include "factcheck/curation.hpp"

#include "factcheck/datasets.hpp"
#include "factcheck/error.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace factcheck {

using nlohmann::json;

namespace {

std::map<std::u32string, double> trigram_profile(std::string_view s) {
    const auto cps = text::utf8_decode(text::ascii_lower(text::collapse_whitespace(s)));
    std::map<std::u32string, double> profile;
    if (cps.empty()) return profile;
    if (cps.size() < 3) {
        profile[std::u32string(cps.begin(), cps.end())] = 1.0;
        return profile;
    }
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) profile[std::u32string(cps.begin() + i, cps.begin() + i + 3)] += 1.0;
    return profile;
}

}  // namespace

double trigram_cosine(std::string_view a, std::string_view b) {
    const auto pa = trigram_profile(a);
    const auto pb = trigram_profile(b);
    if (pa.empty() || pb.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [g, v] : pa) {
        na += v * v;
        if (const auto it = pb.find(g); it != pb.end()) dot += v * it->second;
    }
    for (const auto& [g, v] : pb) nb += v * v;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimilarityFn similarity_by_name(std::string_view name) {
    if (name == kTrigramCosine) return trigram_cosine;
    throw ConfigError(fmt::format("unknown similarity function '{}'", name));
}

ExemplarPool ExemplarPool::load(const std::filesystem::path& path) {
    ExemplarPool pool;
    for_each_record(path, [&](const json& j, std::size_t line) {
        Exemplar e;
        e.source_text = j.value("source", std::string());
        e.target_text = j.value("target", std::string());
        e.source_dataset = j.value("dataset", std::string());
        if (text::trim(e.source_text).empty() || text::trim(e.target_text).empty()) {
            throw DataError("exemplar needs non-empty 'source' and 'target'", path.string(), line);
        }
        pool.exemplars.push_back(std::move(e));
    });
    return pool;
}

std::vector<std::size_t> mmr_select_indices(const std::vector<std::string>& candidates, std::string_view query,
                                            std::size_t k, double lambda, const SimilarityFn& similarity) {
    const auto n = candidates.size();
    std::vector<double> relevance(n);
    for (std::size_t i = 0; i < n; ++i) relevance[i] = similarity(candidates[i], query);

    std::vector<double> redundancy(n, -std::numeric_limits<double>::infinity());
    std::vector<bool> taken(n, false);
    std::vector<std::size_t> picked;
    while (picked.size() < std::min(k, n)) {
        std::size_t best = n;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double penalty = picked.empty() ? 0.0 : redundancy[i];
            const double s = lambda * relevance[i] - (1.0 - lambda) * penalty;
            if (best == n || s > best_score) {
                best = i;
                best_score = s;
            }
        }
        taken[best] = true;
        picked.push_back(best);
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) redundancy[i] = std::max(redundancy[i], similarity(candidates[i], candidates[best]));
        }
    }
    return picked;
}

std::vector<Exemplar> mmr_select(const ExemplarPool& pool, std::string_view query, std::size_t k, double lambda) {
    if (pool.exemplars.empty()) throw ConfigError("exemplar pool is empty");
    if (k > pool.exemplars.size()) {
        throw ConfigError(fmt::format("cannot select {} exemplars from a pool of {}", k, pool.exemplars.size()));
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError(fmt::format("lambda must be in [0, 1], got {}", lambda));

    std::vector<std::string> sources;
    sources.reserve(pool.exemplars.size());
    for (const auto& e : pool.exemplars) sources.push_back(e.source_text);
    std::vector<Exemplar> out;
    for (const auto i : mmr_select_indices(sources, query, k, lambda, similarity_by_name(pool.similarity))) {
        out.push_back(pool.exemplars[i]);
    }
    return out;
}

std::string record_text(const json& record) {
    if (!record.is_object()) throw DataError("record is not a JSON object");
    Bindings b;
    for (const auto& [key, value] : record.items()) {
        if (value.is_string()) b[key] = value.get<std::string>();
        else if (value.is_boolean()) b[key] = value.get<bool>() ? "true" : "false";
        else if (value.is_number()) b[key] = value.dump();
    }
    static const PromptTemplate claim_layout{"record_claim", "Claim: {claim}\nLabel: {label}", OutputShape::FreeText};
    static const PromptTemplate qa_layout{"record_qa", "Question: {question}\nAnswer: {answer}", OutputShape::FreeText};
    return render(record.contains("question") ? qa_layout : claim_layout, b);
}

std::string format_exemplars(const std::vector<Exemplar>& exemplars) {
    std::string out;
    for (const auto& e : exemplars) {
        out += fmt::format("Record:\n{}\nTranslation:\n{}\n\n", e.source_text, e.target_text);
    }
    return out;
}

std::string translate_record(const LlmClient& llm, const ModelSettings& settings, const std::string& record,
                             const std::vector<Exemplar>& exemplars) {
    const auto& tmpl = prompts::pre_translation();
    ChatRequest req;
    req.model_id = settings.model_id;
    req.temperature = settings.temperature;
    req.max_output_tokens = settings.max_output_tokens;
    req.prompt_name = tmpl.name;
    req.fingerprint_key = record;
    req.user_text = render(tmpl, {{"examples", format_exemplars(exemplars)}, {"record", record}});
    const auto out = text::trim(llm.complete(req).text);
    if (out.empty()) throw TranslationError("empty translation draft");
    return std::string(out);
}

std::vector<Draft> curate(const ExemplarPool& pool, const std::vector<json>& records, const LlmClient& llm,
                          const CurationOptions& options) {
    std::vector<Draft> drafts;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        Draft d;
        d.id = r.contains("id") ? (r["id"].is_string() ? r["id"].get<std::string>() : r["id"].dump())
                                : std::to_string(i);
        d.source = r;
        const auto english = record_text(r);
        const auto chosen = mmr_select(pool, english, options.k, options.lambda);
        for (const auto& e : chosen) d.exemplar_sources.push_back(e.source_text);
        try {
            d.draft_text = translate_record(llm, options.model, english, chosen);
            d.status = "pending-review";
        } catch (const TranslationError& e) {
            d.status = "failed";
            d.error = e.what();
            spdlog::warn("record {}: {}", d.id, e.what());
        }
        drafts.push_back(std::move(d));
    }
    return drafts;
}

json to_json(const Draft& d) {
    json j = {{"schema_version", kDraftSchemaVersion},
              {"id", d.id},
              {"source", d.source},
              {"draft", d.draft_text},
              {"exemplars", d.exemplar_sources},
              {"status", d.status}};
    if (!d.error.empty()) j["error"] = d.error;
    return j;
}

void write_drafts(const std::filesystem::path& path, const std::vector<Draft>& drafts) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write drafts", path.string());
    for (const auto& d : drafts) out << to_json(d).dump() << '\n';
}

}  // namespace factcheck
