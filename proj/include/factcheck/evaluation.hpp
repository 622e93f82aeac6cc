#pragma once

#include "factcheck/datasets.hpp"
#include "factcheck/labels.hpp"
#include "factcheck/ledger.hpp"
#include "factcheck/money.hpp"
#include "factcheck/pipeline.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace factcheck {

// nullopt marks an unverifiable prediction.
using Prediction = std::optional<BinaryLabel>;

struct ConfusionCounts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct LabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Zero denominators give 0.
LabelMetrics metrics_from(const ConfusionCounts& counts);
double f1_score(double precision, double recall);

struct ScoreResult {
    ConfusionCounts counts;
    LabelMetrics metrics;
    std::size_t unverifiable = 0;
};

// Throws DataError on a length mismatch.
ScoreResult score(const std::vector<Prediction>& predictions, const std::vector<BinaryLabel>& gold,
                  BinaryLabel positive);

// Id-aligned variant: every gold id needs exactly one prediction and vice
// versa; otherwise DataError names the offending ids.
ScoreResult score(const std::map<std::string, Prediction>& predictions,
                  const std::map<std::string, BinaryLabel>& gold, BinaryLabel positive);

struct MetricsReport {
    std::string name;
    std::size_t total = 0;
    std::size_t scored = 0;
    std::size_t unverifiable = 0;
    ConfusionCounts true_counts;   // True as the positive class
    ConfusionCounts false_counts;  // False as the positive class
    LabelMetrics true_label;
    LabelMetrics false_label;
    // Metrics are closed-form expectations rather than counts.
    bool expected_value = false;
    std::optional<LedgerSnapshot> ledger;
    double fallback_rate = 0.0;
    std::chrono::milliseconds wall_time{0};
};

MetricsReport make_metrics(const std::string& name, const std::vector<Prediction>& predictions,
                           const std::vector<BinaryLabel>& gold);

struct BenchmarkItem {
    std::string id;
    BinaryLabel gold = BinaryLabel::True;
    Prediction predicted;
    ClaimStatus status = ClaimStatus::Failed;
    bool fallback_used = false;
};

struct BenchmarkResult {
    MetricsReport metrics;
    std::vector<BenchmarkItem> items;
    FactCheckReport report;
};

// Fact-checks every record as a single claim. Claims that fail or cannot be
// parsed are unverifiable. Throws DataError("empty dataset") on no records.
BenchmarkResult run_benchmark(const FactChecker& checker, const std::vector<ClaimRecord>& records,
                              const std::string& name = {});

inline constexpr std::uint64_t kDefaultBaselineSeed = 0;

// Rows: Random (expected), Random (seeded draw), Always True, Always False.
// The random predictor says True with the gold True frequency.
std::vector<MetricsReport> baselines(const std::vector<BinaryLabel>& gold, std::uint64_t seed = kDefaultBaselineSeed);

struct SweepPoint {
    int tau = 0;
    double f1_true = 0.0;
    Money total_cost;
    Money search_cost;
    Money translation_cost;
    double fallback_rate = 0.0;
    MetricsReport metrics;
};

inline const std::vector<int> kDefaultSweepTaus{1, 3, 5, 7, 9};

// Builds a fresh checker for one threshold. Fresh services per point keep a
// search cache from leaking savings between points.
using CheckerFactory = std::function<FactChecker(const RetrievalConfig&)>;

// Taus are sorted and deduplicated first. Any exception aborts the sweep.
std::vector<SweepPoint> sweep_threshold(const std::vector<ClaimRecord>& records, std::vector<int> taus,
                                        const RetrievalConfig& base, const CheckerFactory& factory);

struct FactualityReport {
    std::string model_id;
    std::size_t responses = 0;
    std::size_t empty_responses = 0;   // yielded no claims
    std::size_t failed_responses = 0;  // claim extraction failed
    std::size_t total_claims = 0;
    std::size_t true_claims = 0;
    std::size_t false_claim_count = 0;
    std::size_t unverifiable_claims = 0;
    double percent_true_claims = 0.0;
    double percent_false_claims = 0.0;
    double unverifiable_fraction = 0.0;
    LedgerSnapshot ledger;
};

// Responses are keyed by QA id. Throws DataError listing ids without one.
FactualityReport evaluate_llm_factuality(const FactChecker& checker, const std::vector<QaRecord>& qa,
                                         const std::map<std::string, std::string>& responses,
                                         const std::string& model_id);

// {"id": ..., "response": ...} per line.
std::map<std::string, std::string> load_responses(const std::filesystem::path& path);

inline constexpr int kMetricsSchemaVersion = 1;

// Wall-clock times are only written when include_timings is set, so mock
// outputs stay byte-stable.
nlohmann::json to_json(const MetricsReport& report, bool include_timings = true);
nlohmann::json to_json(const BenchmarkResult& result, const std::vector<MetricsReport>& extra_rows = {},
                       bool include_timings = true);
nlohmann::json to_json(const std::vector<SweepPoint>& points, bool include_timings = true);
nlohmann::json to_json(const FactualityReport& report);

std::string format_metrics_table(const std::vector<MetricsReport>& rows);
std::string format_sweep_table(const std::vector<SweepPoint>& points);
std::string format_factuality(const FactualityReport& report);

std::string sweep_csv(const std::vector<SweepPoint>& points);
// Static two-axis line chart: F1(True) on the left axis, cost on the right.
std::string sweep_svg(const std::vector<SweepPoint>& points);

}  // namespace factcheck
