#include "factcheck/error.hpp"
#include "factcheck/evaluation.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace factcheck;
using nlohmann::json;

namespace {

constexpr auto T = BinaryLabel::True;
constexpr auto F = BinaryLabel::False;

RetrievalConfig thresholded(int tau = kDefaultTau) {
    RetrievalConfig c;
    c.tau = tau;
    return c;
}

}  // namespace

TEST(Score, AllCorrectIsPerfect) {
    const std::vector<BinaryLabel> gold{T, F, T, F};
    const std::vector<Prediction> preds(gold.begin(), gold.end());
    for (auto positive : {T, F}) {
        const auto r = score(preds, gold, positive);
        EXPECT_DOUBLE_EQ(r.metrics.precision, 1.0);
        EXPECT_DOUBLE_EQ(r.metrics.recall, 1.0);
        EXPECT_DOUBLE_EQ(r.metrics.f1, 1.0);
    }
}

TEST(Score, HandCountedTwoThirds) {
    const auto r = score({T, T, T, F}, {T, T, F, T}, T);
    EXPECT_EQ(r.counts, (ConfusionCounts{2, 1, 1, 0}));
    EXPECT_NEAR(r.metrics.precision, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.metrics.recall, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.metrics.f1, 2.0 / 3.0, 1e-12);
}

TEST(Score, F1FromPrecisionRecall) {
    EXPECT_NEAR(f1_score(0.92, 0.56), 2 * 0.92 * 0.56 / 1.48, 1e-12);
    EXPECT_NEAR(f1_score(0.92, 0.56), 0.70, 0.005);
    EXPECT_EQ(f1_score(0, 0), 0.0);
}

TEST(Score, UnverifiableCountedSeparately) {
    const auto r = score({T, std::nullopt, F}, {T, F, F}, T);
    EXPECT_EQ(r.unverifiable, 1u);
    EXPECT_EQ(r.counts.total(), 2);
}

TEST(Score, MismatchesRaise) {
    EXPECT_THROW(score({T}, {T, F}, T), DataError);
    try {
        score(std::map<std::string, Prediction>{{"a", T}, {"z", F}}, std::map<std::string, BinaryLabel>{{"a", T}, {"b", F}}, T);
        FAIL();
    } catch (const DataError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("b"), std::string::npos);
        EXPECT_NE(what.find("z"), std::string::npos);
    }
}

TEST(Baselines, SeventySixPercentTrue) {
    std::vector<BinaryLabel> gold(76, T);
    gold.insert(gold.end(), 24, F);
    const auto rows = baselines(gold);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_TRUE(rows[0].expected_value);
    EXPECT_NEAR(rows[0].true_label.f1, 0.76, 1e-12);
    EXPECT_NEAR(rows[0].false_label.f1, 0.24, 1e-12);

    const auto& always_true = rows[2];
    EXPECT_EQ(always_true.name, "Always True");
    EXPECT_DOUBLE_EQ(always_true.true_label.precision, 0.76);
    EXPECT_DOUBLE_EQ(always_true.true_label.recall, 1.0);
    EXPECT_NEAR(always_true.true_label.f1, 0.86, 0.005);
    EXPECT_EQ(always_true.false_label.precision, 0.0);
    EXPECT_EQ(always_true.false_label.recall, 0.0);
    EXPECT_EQ(always_true.false_label.f1, 0.0);

    EXPECT_NEAR(rows[3].false_label.f1, 0.39, 0.005);
    EXPECT_EQ(rows[3].true_label.f1, 0.0);
}

TEST(Baselines, SeededRowIsReproducible) {
    std::vector<BinaryLabel> gold(30, T);
    gold.insert(gold.end(), 10, F);
    EXPECT_EQ(to_json(baselines(gold, 3)[1]).dump(), to_json(baselines(gold, 3)[1]).dump());
    EXPECT_EQ(baselines(gold, 3)[1].name, "Random (seed 3)");
}

TEST(Benchmark, SixClaimFixtureMatchesHandCounts) {
    support::Harness h;
    std::vector<ClaimRecord> records;
    const std::vector<BinaryLabel> gold{T, T, F, F, T, F};
    for (int i = 0; i < 6; ++i) {
        const auto text = h.world.add_claim({.ur_question = i});
        records.push_back({"r" + std::to_string(i), text, gold[i], ClaimSource::Other, std::nullopt});
    }
    const auto result = run_benchmark(h.checker(thresholded(3), 2), records, "six");

    // Verdicts in the synthetic world: claim i is True unless i % 3 == 0,
    // so predictions are F T T F T T against gold T T F F T F.
    EXPECT_EQ(result.metrics.true_counts, (ConfusionCounts{2, 2, 1, 1}));
    EXPECT_EQ(result.metrics.false_counts, (ConfusionCounts{1, 1, 2, 2}));
    EXPECT_NEAR(result.metrics.true_label.precision, 0.5, 1e-12);
    EXPECT_NEAR(result.metrics.true_label.recall, 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(result.metrics.false_label.f1, 2 * 0.5 * (1.0 / 3.0) / (0.5 + 1.0 / 3.0), 1e-12);
    // claims with fewer than 3 Urdu hits fall back: i = 0, 1, 2
    EXPECT_NEAR(result.metrics.fallback_rate, 0.5, 1e-12);
    ASSERT_EQ(result.items.size(), 6u);
    EXPECT_EQ(result.items[3].id, "r3");
    EXPECT_EQ(to_json(result, {}, false)["metrics"]["name"], "six");
}

TEST(Benchmark, EmptyDatasetRaises) {
    support::Harness h;
    try {
        run_benchmark(h.checker(thresholded()), {});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(std::string(e.what()), "empty dataset");
    }
}

TEST(Benchmark, UnverifiableClaimsAreNotFalse) {
    support::Harness h;
    const auto text = h.world.add_claim({.ur_question = 6});
    h.chat_override = [](const ChatRequest& r) -> std::optional<std::string> {
        if (r.prompt_name == "verification") return "garbled";
        return std::nullopt;
    };
    const auto result = run_benchmark(h.checker(thresholded()), {{"x", text, F, ClaimSource::Other, std::nullopt}});
    EXPECT_EQ(result.metrics.unverifiable, 1u);
    EXPECT_EQ(result.metrics.false_counts.tp, 0);
    EXPECT_FALSE(result.items[0].predicted);
}

TEST(Sweep, SortsTausAndCostIsMonotone) {
    std::mt19937_64 rng(23);
    support::SyntheticWorld world;
    std::vector<ClaimRecord> records;
    for (int i = 0; i < 20; ++i) {
        records.push_back({std::to_string(i), world.add_claim(support::random_claim_world(rng)), i % 4 ? T : F,
                           ClaimSource::Other, std::nullopt});
    }
    const auto points = sweep_threshold(records, {9, 1, 5, 3, 5}, thresholded(),
                                        [&](const RetrievalConfig& c) { return world.checker(c, 2); });
    ASSERT_EQ(points.size(), 4u);
    for (std::size_t i = 1; i < points.size(); ++i) {
        EXPECT_LT(points[i - 1].tau, points[i].tau);
        EXPECT_LE(points[i - 1].search_cost + points[i - 1].translation_cost,
                  points[i].search_cost + points[i].translation_cost);
        EXPECT_LE(points[i - 1].fallback_rate, points[i].fallback_rate);
    }
    EXPECT_GT(points.back().translation_cost, Money{});

    const auto csv = sweep_csv(points);
    EXPECT_EQ(csv.substr(0, csv.find('\n')).find("tau"), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_NE(sweep_svg(points).find("<svg"), std::string::npos);
    EXPECT_EQ(to_json(points, false)["points"].size(), 4u);
}

TEST(Sweep, SingleTauAndBadInput) {
    support::SyntheticWorld world;
    std::vector<ClaimRecord> records{{"a", world.add_claim({.ur_question = 2}), T, ClaimSource::Other, std::nullopt}};
    const auto factory = [&](const RetrievalConfig& c) { return world.checker(c); };
    EXPECT_EQ(sweep_threshold(records, {5}, thresholded(), factory).size(), 1u);
    EXPECT_THROW(sweep_threshold(records, {}, thresholded(), factory), ConfigError);
    EXPECT_THROW(sweep_threshold(records, {0, 3}, thresholded(), factory), ConfigError);
}

TEST(Factuality, TenClaimsFourTrue) {
    support::Harness h;
    std::vector<std::string> texts;
    for (int i = 0; i < 10; ++i) texts.push_back(h.world.add_claim({.ur_question = 5}));
    const std::map<std::string, std::vector<std::string>> claims_by_response{
        {"answer a", {texts[0], texts[1], texts[2], texts[3]}},
        {"answer b", {texts[4], texts[5], texts[6]}},
        {"answer c", {texts[7], texts[8], texts[9]}},
        {"answer d", {}}};
    h.chat_override = [&](const ChatRequest& r) -> std::optional<std::string> {
        if (r.prompt_name == "claim_extraction") return json(claims_by_response.at(r.fingerprint_key)).dump();
        if (r.prompt_name == "verification") {
            const bool truthful = r.fingerprint_key == texts[0] || r.fingerprint_key == texts[4] ||
                                  r.fingerprint_key == texts[7] || r.fingerprint_key == texts[9];
            return json{{"reasoning", "r"}, {"factuality", truthful}}.dump();
        }
        return std::nullopt;
    };
    std::vector<QaRecord> qa;
    std::map<std::string, std::string> responses;
    for (const auto* id : {"a", "b", "c", "d"}) {
        qa.push_back({id, "question", std::nullopt, QaSource::Other});
        responses[id] = std::string("answer ") + id;
    }
    const auto report = evaluate_llm_factuality(h.checker(thresholded(), 3), qa, responses, "model-x");
    EXPECT_EQ(report.total_claims, 10u);
    EXPECT_EQ(report.true_claims, 4u);
    EXPECT_EQ(report.false_claim_count, 6u);
    EXPECT_NEAR(report.percent_true_claims, 0.40, 1e-12);
    EXPECT_EQ(report.empty_responses, 1u);
    EXPECT_NEAR(report.percent_true_claims + report.percent_false_claims + report.unverifiable_fraction, 1.0, 1e-12);
    EXPECT_EQ(report.ledger.llm_calls_by_prompt.at("claim_extraction"), 4);
    EXPECT_NE(format_factuality(report).find("model-x"), std::string::npos);
}

TEST(Factuality, MissingResponsesListed) {
    support::Harness h;
    std::vector<QaRecord> qa{{"q1", "?", std::nullopt, QaSource::Other}, {"q2", "?", std::nullopt, QaSource::Other},
                             {"q3", "?", std::nullopt, QaSource::Other}};
    try {
        evaluate_llm_factuality(h.checker(thresholded()), qa, {{"q2", "x"}}, "m");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("q1, q3"), std::string::npos) << e.what();
    }
}

TEST(Factuality, LoadResponses) {
    support::TempDir dir;
    support::write_jsonl(dir / "r.jsonl", {{{"id", "q1"}, {"response", "a"}}, {{"id", 2}, {"response", "b"}}});
    const auto r = load_responses(dir / "r.jsonl");
    EXPECT_EQ(r.at("q1"), "a");
    EXPECT_EQ(r.at("2"), "b");
}

TEST(MetricsTable, HasRowPerReport) {
    std::vector<BinaryLabel> gold{T, T, F};
    const auto table = format_metrics_table(baselines(gold));
    EXPECT_NE(table.find("Always False"), std::string::npos);
    EXPECT_NE(table.find("Random (expected)"), std::string::npos);
}
