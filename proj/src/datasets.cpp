#include "factcheck/datasets.hpp"

#include "factcheck/error.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace factcheck {

using nlohmann::json;

ClaimSource parse_claim_source(std::string_view name) {
    const auto s = text::ascii_lower(text::trim(name));
    if (s == "factcheck-bench" || s == "factcheckbench") return ClaimSource::FactcheckBench;
    if (s == "factool-qa" || s == "factoolqa") return ClaimSource::FactoolQa;
    if (s == "bingcheck") return ClaimSource::BingCheck;
    return ClaimSource::Other;
}

QaSource parse_qa_source(std::string_view name) {
    const auto s = text::ascii_lower(text::trim(name));
    if (s == "simpleqa") return QaSource::SimpleQa;
    if (s == "freshqa") return QaSource::FreshQa;
    return QaSource::Other;
}

std::string_view to_string(ClaimSource source) {
    switch (source) {
        case ClaimSource::FactcheckBench: return "factcheck-bench";
        case ClaimSource::FactoolQa: return "factool-qa";
        case ClaimSource::BingCheck: return "bingcheck";
        case ClaimSource::Other: return "other";
    }
    return "other";
}

std::string_view to_string(QaSource source) {
    switch (source) {
        case QaSource::SimpleQa: return "simpleqa";
        case QaSource::FreshQa: return "freshqa";
        case QaSource::Other: return "other";
    }
    return "other";
}

std::string_view display_name(ClaimSource source) {
    switch (source) {
        case ClaimSource::FactcheckBench: return "Factcheck-Bench";
        case ClaimSource::FactoolQa: return "FacTool-QA";
        case ClaimSource::BingCheck: return "BingCheck";
        case ClaimSource::Other: return "Other";
    }
    return "Other";
}

std::string_view display_name(QaSource source) {
    switch (source) {
        case QaSource::SimpleQa: return "SimpleQA";
        case QaSource::FreshQa: return "FreshQA";
        case QaSource::Other: return "Other";
    }
    return "Other";
}

std::optional<BinaryLabel> standardize_label(SourceLabel original) {
    switch (original) {
        case SourceLabel::Supported:
        case SourceLabel::PartiallySupported: return BinaryLabel::True;
        case SourceLabel::Refuted: return BinaryLabel::False;
        case SourceLabel::NotSupported: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<ClaimRecord> standardize(const std::vector<SourceClaimRecord>& records) {
    std::vector<ClaimRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        if (auto label = standardize_label(r.label)) {
            out.push_back(ClaimRecord{r.id, r.claim_text, *label, r.source, r.label});
        }
    }
    return out;
}

std::vector<ClaimRecord> balance_sample(const std::vector<ClaimRecord>& records,
                                        BinaryLabel majority, std::size_t cap,
                                        std::uint64_t seed) {
    std::vector<std::size_t> majority_positions;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].label == majority) majority_positions.push_back(i);
    }
    PortableRng rng(seed);
    const auto picked = rng.sample_indices(majority_positions.size(), cap);

    std::vector<bool> keep(records.size(), false);
    for (std::size_t i = 0; i < records.size(); ++i) keep[i] = records[i].label != majority;
    for (auto p : picked) keep[majority_positions[p]] = true;

    std::vector<ClaimRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i]) out.push_back(records[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Record parsing

namespace {

std::string required_string(const json& j, const char* field, const std::string& file, std::size_t line) {
    const auto it = j.find(field);
    if (it == j.end() || it->is_null()) {
        throw DataError(fmt::format("missing field '{}'", field), file, line);
    }
    if (!it->is_string()) {
        throw DataError(fmt::format("field '{}' must be a string", field), file, line);
    }
    return it->get<std::string>();
}

std::string record_id(const json& j, const std::string& file, std::size_t line) {
    const auto it = j.find("id");
    if (it == j.end() || it->is_null()) throw DataError("missing field 'id'", file, line);
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    if (!it->is_string() || it->get<std::string>().empty()) {
        throw DataError("field 'id' must be a non-empty string", file, line);
    }
    return it->get<std::string>();
}

std::string optional_string(const json& j, const char* field) {
    const auto it = j.find(field);
    if (it == j.end() || !it->is_string()) return {};
    return it->get<std::string>();
}

void require_object(const json& j, const std::string& file, std::size_t line) {
    if (!j.is_object()) throw DataError("record is not a JSON object", file, line);
}

}  // namespace

ClaimRecord parse_claim_record(const json& j, const std::string& file, std::size_t line) {
    require_object(j, file, line);
    ClaimRecord r;
    r.id = record_id(j, file, line);
    r.claim_text = required_string(j, "claim", file, line);
    if (text::trim(r.claim_text).empty()) throw DataError("field 'claim' is empty", file, line);

    const auto label_it = j.find("label");
    if (label_it == j.end() || label_it->is_null()) throw DataError("missing field 'label'", file, line);
    std::optional<BinaryLabel> label;
    if (label_it->is_boolean()) {
        label = label_it->get<bool>() ? BinaryLabel::True : BinaryLabel::False;
    } else if (label_it->is_string()) {
        label = parse_binary_label(label_it->get<std::string>());
    }
    if (!label) {
        throw DataError(fmt::format("field 'label' must be \"true\" or \"false\", got {}", label_it->dump()),
                        file, line);
    }
    r.label = *label;
    r.source = parse_claim_source(optional_string(j, "source"));
    if (const auto orig = optional_string(j, "original_label"); !orig.empty()) {
        r.original_label = parse_source_label(orig);
        if (!r.original_label) throw DataError("unknown original_label '" + orig + "'", file, line);
    }
    return r;
}

SourceClaimRecord parse_source_claim_record(const json& j, const std::string& file, std::size_t line) {
    require_object(j, file, line);
    SourceClaimRecord r;
    r.id = record_id(j, file, line);
    r.claim_text = required_string(j, "claim", file, line);
    if (text::trim(r.claim_text).empty()) throw DataError("field 'claim' is empty", file, line);
    const auto label = required_string(j, "label", file, line);
    const auto parsed = parse_source_label(label);
    if (!parsed) throw DataError("unknown source label '" + label + "'", file, line);
    r.label = *parsed;
    r.source = parse_claim_source(optional_string(j, "source"));
    return r;
}

QaRecord parse_qa_record(const json& j, const std::string& file, std::size_t line) {
    require_object(j, file, line);
    QaRecord r;
    r.id = record_id(j, file, line);
    r.question = required_string(j, "question", file, line);
    if (text::trim(r.question).empty()) throw DataError("field 'question' is empty", file, line);
    if (auto answer = optional_string(j, "answer"); !answer.empty()) r.reference_answer = std::move(answer);
    r.source = parse_qa_source(optional_string(j, "source"));
    return r;
}

json to_json(const ClaimRecord& record) {
    json j = {{"id", record.id},
              {"claim", record.claim_text},
              {"label", std::string(to_string(record.label))},
              {"source", std::string(to_string(record.source))}};
    if (record.original_label) j["original_label"] = std::string(to_string(*record.original_label));
    return j;
}

json to_json(const QaRecord& record) {
    json j = {{"id", record.id}, {"question", record.question}, {"source", std::string(to_string(record.source))}};
    if (record.reference_answer) j["answer"] = *record.reference_answer;
    return j;
}

void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file", path.string());
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(std::string("invalid JSON: ") + e.what(), path.string(), number);
        }
        if (!j.is_object()) throw DataError("record is not a JSON object", path.string(), number);
        fn(j, number);
    }
}

namespace {

template <typename Record>
void check_unique(std::unordered_set<std::string>& seen, const Record& r, const std::string& file,
                  std::size_t line) {
    if (!seen.insert(r.id).second) throw DataError("duplicate id '" + r.id + "'", file, line);
}

}  // namespace

std::vector<ClaimRecord> load_claims(const std::filesystem::path& path) {
    std::vector<ClaimRecord> out;
    std::unordered_set<std::string> seen;
    const auto file = path.string();
    for_each_record(path, [&](const json& j, std::size_t line) {
        out.push_back(parse_claim_record(j, file, line));
        check_unique(seen, out.back(), file, line);
    });
    return out;
}

std::vector<SourceClaimRecord> load_source_claims(const std::filesystem::path& path) {
    std::vector<SourceClaimRecord> out;
    std::unordered_set<std::string> seen;
    const auto file = path.string();
    for_each_record(path, [&](const json& j, std::size_t line) {
        out.push_back(parse_source_claim_record(j, file, line));
        check_unique(seen, out.back(), file, line);
    });
    return out;
}

std::vector<QaRecord> load_qa(const std::filesystem::path& path) {
    std::vector<QaRecord> out;
    std::unordered_set<std::string> seen;
    const auto file = path.string();
    for_each_record(path, [&](const json& j, std::size_t line) {
        out.push_back(parse_qa_record(j, file, line));
        check_unique(seen, out.back(), file, line);
    });
    return out;
}

void write_claims(const std::filesystem::path& path, const std::vector<ClaimRecord>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file", path.string());
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Summary

DatasetSummary summarize(const std::vector<std::filesystem::path>& files) {
    DatasetSummary summary;
    for (const auto& path : files) {
        const auto file = path.string();
        std::unordered_set<std::string> seen;
        for_each_record(path, [&](const json& j, std::size_t line) {
            if (j.contains("claim")) {
                const auto r = parse_claim_record(j, file, line);
                check_unique(seen, r, file, line);
                auto& counts = summary.claims[r.source];
                (r.label == BinaryLabel::True ? counts.true_count : counts.false_count) += 1;
                counts.total += 1;
            } else if (j.contains("question")) {
                const auto r = parse_qa_record(j, file, line);
                check_unique(seen, r, file, line);
                summary.qa[r.source] += 1;
            } else {
                throw DataError("record has neither 'claim' nor 'question'", file, line);
            }
        });
    }
    for (const auto& [source, counts] : summary.claims) {
        summary.claim_totals.true_count += counts.true_count;
        summary.claim_totals.false_count += counts.false_count;
        summary.claim_totals.total += counts.total;
    }
    for (const auto& [source, n] : summary.qa) summary.qa_total += n;
    return summary;
}

json to_json(const DatasetSummary& summary) {
    json claims = json::array();
    for (const auto& [source, c] : summary.claims) {
        claims.push_back({{"source", std::string(to_string(source))},
                          {"true", c.true_count},
                          {"false", c.false_count},
                          {"total", c.total}});
    }
    json qa = json::array();
    for (const auto& [source, n] : summary.qa) {
        qa.push_back({{"source", std::string(to_string(source))}, {"size", n}});
    }
    return {{"schema_version", 1},
            {"claims", {{"per_source", claims},
                        {"totals",
                         {{"true", summary.claim_totals.true_count},
                          {"false", summary.claim_totals.false_count},
                          {"total", summary.claim_totals.total}}}}},
            {"qa", {{"per_source", qa}, {"total", summary.qa_total}}}};
}

std::string format_table(const DatasetSummary& summary) {
    std::ostringstream out;
    if (!summary.claims.empty() || summary.qa.empty()) {
        out << fmt::format("{:<20}|{:>8}{:>8}{:>8}\n", "Dataset", "#True", "#False", "Total");
        out << std::string(44, '-') << '\n';
        for (const auto& [source, c] : summary.claims) {
            out << fmt::format("{:<20}|{:>8}{:>8}{:>8}\n", display_name(source), c.true_count, c.false_count,
                               c.total);
        }
        out << std::string(44, '-') << '\n';
        const auto& t = summary.claim_totals;
        out << fmt::format("{:<20}|{:>8}{:>8}{:>8}\n", "All claims", t.true_count, t.false_count, t.total);
    }
    if (!summary.qa.empty()) {
        if (!summary.claims.empty()) out << '\n';
        out << fmt::format("{:<20}|{:>8}\n", "Dataset", "Size");
        out << std::string(28, '-') << '\n';
        for (const auto& [source, n] : summary.qa) out << fmt::format("{:<20}|{:>8}\n", display_name(source), n);
        out << std::string(28, '-') << '\n';
        out << fmt::format("{:<20}|{:>8}\n", "All QA", summary.qa_total);
    }
    return out.str();
}

}  // namespace factcheck
