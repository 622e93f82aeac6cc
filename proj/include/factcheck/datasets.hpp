#pragma once

#include "factcheck/labels.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace factcheck {

enum class ClaimSource { FactcheckBench, FactoolQa, BingCheck, Other };
enum class QaSource { SimpleQa, FreshQa, Other };

// Unknown names map to Other.
ClaimSource parse_claim_source(std::string_view name);
QaSource parse_qa_source(std::string_view name);
std::string_view to_string(ClaimSource source);
std::string_view to_string(QaSource source);
std::string_view display_name(ClaimSource source);
std::string_view display_name(QaSource source);

struct ClaimRecord {
    std::string id;
    std::string claim_text;
    BinaryLabel label = BinaryLabel::True;
    ClaimSource source = ClaimSource::Other;
    std::optional<SourceLabel> original_label;

    friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;
};

// A claim as it appears in a source dataset, before the four-way label is
// collapsed to a binary one.
struct SourceClaimRecord {
    std::string id;
    std::string claim_text;
    SourceLabel label = SourceLabel::Supported;
    ClaimSource source = ClaimSource::Other;
};

struct QaRecord {
    std::string id;
    std::string question;
    std::optional<std::string> reference_answer;
    QaSource source = QaSource::Other;
};

// supported and partially-supported become True, refuted becomes False,
// not-supported has no binary counterpart and is dropped.
std::optional<BinaryLabel> standardize_label(SourceLabel original);

std::vector<ClaimRecord> standardize(const std::vector<SourceClaimRecord>& records);

// Keeps every record of the minority label and min(cap, available) records of
// `majority`, chosen uniformly without replacement by PortableRng(seed).
// Survivors keep their input order.
std::vector<ClaimRecord> balance_sample(const std::vector<ClaimRecord>& records,
                                        BinaryLabel majority, std::size_t cap,
                                        std::uint64_t seed);

struct ClaimCounts {
    std::size_t true_count = 0;
    std::size_t false_count = 0;
    std::size_t total = 0;

    friend bool operator==(const ClaimCounts&, const ClaimCounts&) = default;
};

struct DatasetSummary {
    std::map<ClaimSource, ClaimCounts> claims;
    ClaimCounts claim_totals;
    std::map<QaSource, std::size_t> qa;
    std::size_t qa_total = 0;
};

// Files may hold claim records, QA records, or both; the kind of each line is
// decided by whether it carries "claim" or "question".
DatasetSummary summarize(const std::vector<std::filesystem::path>& files);
nlohmann::json to_json(const DatasetSummary& summary);
std::string format_table(const DatasetSummary& summary);

// Record parsing. `file` and `line` only feed error messages.
ClaimRecord parse_claim_record(const nlohmann::json& j, const std::string& file = {}, std::size_t line = 0);
SourceClaimRecord parse_source_claim_record(const nlohmann::json& j, const std::string& file = {},
                                            std::size_t line = 0);
QaRecord parse_qa_record(const nlohmann::json& j, const std::string& file = {}, std::size_t line = 0);

nlohmann::json to_json(const ClaimRecord& record);
nlohmann::json to_json(const QaRecord& record);

std::vector<ClaimRecord> load_claims(const std::filesystem::path& path);
std::vector<SourceClaimRecord> load_source_claims(const std::filesystem::path& path);
std::vector<QaRecord> load_qa(const std::filesystem::path& path);

void write_claims(const std::filesystem::path& path, const std::vector<ClaimRecord>& records);

// Calls `fn(json, line_number)` for every non-blank line of a JSON-lines file.
// Lines that are not valid JSON objects raise DataError with the location.
void for_each_record(const std::filesystem::path& path,
                     const std::function<void(const nlohmann::json&, std::size_t)>& fn);

}  // namespace factcheck
