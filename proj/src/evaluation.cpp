#include "factcheck/evaluation.hpp"

#include "factcheck/error.hpp"
#include "factcheck/prompts.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>

namespace factcheck {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double f1_score(double precision, double recall) {
    const double sum = precision + recall;
    return sum > 0.0 ? 2.0 * precision * recall / sum : 0.0;
}

LabelMetrics metrics_from(const ConfusionCounts& c) {
    LabelMetrics m;
    if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    m.f1 = f1_score(m.precision, m.recall);
    return m;
}

ScoreResult score(const std::vector<Prediction>& predictions, const std::vector<BinaryLabel>& gold,
                  BinaryLabel positive) {
    if (predictions.size() != gold.size()) {
        throw DataError(fmt::format("{} predictions for {} gold labels", predictions.size(), gold.size()));
    }
    ScoreResult r;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (!predictions[i]) {
            ++r.unverifiable;
            continue;
        }
        const bool said = *predictions[i] == positive;
        const bool is = gold[i] == positive;
        if (said && is) ++r.counts.tp;
        else if (said) ++r.counts.fp;
        else if (is) ++r.counts.fn;
        else ++r.counts.tn;
    }
    r.metrics = metrics_from(r.counts);
    return r;
}

ScoreResult score(const std::map<std::string, Prediction>& predictions,
                  const std::map<std::string, BinaryLabel>& gold, BinaryLabel positive) {
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    for (const auto& [id, _] : gold) {
        if (!predictions.contains(id)) missing.push_back(id);
    }
    for (const auto& [id, _] : predictions) {
        if (!gold.contains(id)) extra.push_back(id);
    }
    if (!missing.empty() || !extra.empty()) {
        throw DataError(fmt::format("prediction ids do not match gold ids; missing: [{}], unknown: [{}]",
                                    fmt::join(missing, ", "), fmt::join(extra, ", ")));
    }
    std::vector<Prediction> p;
    std::vector<BinaryLabel> g;
    for (const auto& [id, label] : gold) {
        g.push_back(label);
        p.push_back(predictions.at(id));
    }
    return score(p, g, positive);
}

MetricsReport make_metrics(const std::string& name, const std::vector<Prediction>& predictions,
                           const std::vector<BinaryLabel>& gold) {
    const auto t = score(predictions, gold, BinaryLabel::True);
    const auto f = score(predictions, gold, BinaryLabel::False);
    MetricsReport m;
    m.name = name;
    m.total = gold.size();
    m.unverifiable = t.unverifiable;
    m.scored = m.total - m.unverifiable;
    m.true_counts = t.counts;
    m.false_counts = f.counts;
    m.true_label = t.metrics;
    m.false_label = f.metrics;
    return m;
}

BenchmarkResult run_benchmark(const FactChecker& checker, const std::vector<ClaimRecord>& records,
                              const std::string& name) {
    if (records.empty()) throw DataError("empty dataset");
    const auto start = Clock::now();

    std::vector<AtomicClaim> claims;
    claims.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& text = records[i].claim_text;
        claims.push_back(AtomicClaim{text, find_span(text, text), i});
    }

    BenchmarkResult result;
    result.report = checker.run_claims(claims);

    std::vector<Prediction> predictions;
    std::vector<BinaryLabel> gold;
    std::size_t fallbacks = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& c = result.report.claims[i];
        BenchmarkItem item;
        item.id = records[i].id;
        item.gold = records[i].label;
        item.status = c.status;
        if (c.status == ClaimStatus::Verified) item.predicted = c.verdict->label;
        item.fallback_used = c.evidence && c.evidence->fallback_used;
        fallbacks += item.fallback_used ? 1 : 0;
        predictions.push_back(item.predicted);
        gold.push_back(item.gold);
        result.items.push_back(std::move(item));
    }
    result.metrics = make_metrics(name, predictions, gold);
    result.metrics.ledger = result.report.ledger;
    result.metrics.fallback_rate = static_cast<double>(fallbacks) / static_cast<double>(records.size());
    result.metrics.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
    return result;
}

std::vector<MetricsReport> baselines(const std::vector<BinaryLabel>& gold, std::uint64_t seed) {
    const auto n = gold.size();
    const auto n_true = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), BinaryLabel::True));
    const double p = n == 0 ? 0.0 : static_cast<double>(n_true) / static_cast<double>(n);

    // Guessing True with probability p: E[tp] = p*nT, E[fp] = p*nF, so
    // precision and recall for True both come out to p, and likewise 1-p for False.
    MetricsReport expected;
    expected.name = "Random (expected)";
    expected.total = expected.scored = n;
    expected.expected_value = true;
    expected.true_label = {p, p, f1_score(p, p)};
    const double q = n == 0 ? 0.0 : 1.0 - p;
    expected.false_label = {q, q, f1_score(q, q)};

    PortableRng rng(seed);
    std::vector<Prediction> drawn;
    drawn.reserve(n);
    for (std::size_t i = 0; i < n; ++i) drawn.emplace_back(rng.unit() < p ? BinaryLabel::True : BinaryLabel::False);

    return {expected, make_metrics(fmt::format("Random (seed {})", seed), drawn, gold),
            make_metrics("Always True", std::vector<Prediction>(n, BinaryLabel::True), gold),
            make_metrics("Always False", std::vector<Prediction>(n, BinaryLabel::False), gold)};
}

std::vector<SweepPoint> sweep_threshold(const std::vector<ClaimRecord>& records, std::vector<int> taus,
                                        const RetrievalConfig& base, const CheckerFactory& factory) {
    if (taus.empty()) throw ConfigError("sweep needs at least one tau");
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
    if (taus.front() < 1) throw ConfigError(fmt::format("tau must be >= 1, got {}", taus.front()));
    if (records.empty()) throw DataError("empty dataset");

    std::vector<SweepPoint> points;
    for (const int tau : taus) {
        auto config = base;
        config.strategy = Strategy::Thresholded;
        config.tau = tau;
        const auto checker = factory(config);
        auto result = run_benchmark(checker, records, fmt::format("tau={}", tau));

        SweepPoint point;
        point.tau = tau;
        point.f1_true = result.metrics.true_label.f1;
        point.fallback_rate = result.metrics.fallback_rate;
        const auto& ledger = *result.metrics.ledger;
        point.total_cost = ledger.total();
        point.search_cost = ledger.search_cost;
        for (const auto name : {prompts::kTranslateUrEn, prompts::kTranslateEnUr}) {
            if (const auto it = ledger.llm_cost_by_prompt.find(std::string(name)); it != ledger.llm_cost_by_prompt.end()) {
                point.translation_cost += it->second;
            }
        }
        point.metrics = std::move(result.metrics);
        spdlog::info("tau={} f1_true={:.4f} cost=${:.6f} fallback_rate={:.3f}", tau, point.f1_true,
                     point.total_cost.dollars(), point.fallback_rate);
        points.push_back(std::move(point));
    }
    return points;
}

FactualityReport evaluate_llm_factuality(const FactChecker& checker, const std::vector<QaRecord>& qa,
                                         const std::map<std::string, std::string>& responses,
                                         const std::string& model_id) {
    std::vector<std::string> missing;
    for (const auto& q : qa) {
        if (!responses.contains(q.id)) missing.push_back(q.id);
    }
    if (!missing.empty()) {
        throw DataError(fmt::format("no response for {} question id(s): {}", missing.size(), fmt::join(missing, ", ")));
    }

    FactualityReport report;
    report.model_id = model_id;
    for (const auto& q : qa) {
        ++report.responses;
        const auto& answer = responses.at(q.id);
        if (text::trim(answer).empty()) {
            ++report.empty_responses;
            spdlog::info("response {} is empty", q.id);
            continue;
        }
        FactCheckReport run;
        try {
            run = checker.run(answer, InputMode::FreeText);
        } catch (const PipelineError& e) {
            ++report.failed_responses;
            spdlog::warn("response {}: {}", q.id, e.what());
            continue;
        }
        report.ledger += run.ledger;
        if (run.claims.empty()) {
            ++report.empty_responses;
            spdlog::info("response {} yielded no claims", q.id);
            continue;
        }
        for (const auto& c : run.claims) {
            ++report.total_claims;
            if (c.status != ClaimStatus::Verified) {
                ++report.unverifiable_claims;
            } else if (c.verdict->label == BinaryLabel::True) {
                ++report.true_claims;
            } else {
                ++report.false_claim_count;
            }
        }
    }
    if (report.total_claims > 0) {
        const auto n = static_cast<double>(report.total_claims);
        report.percent_true_claims = static_cast<double>(report.true_claims) / n;
        report.percent_false_claims = static_cast<double>(report.false_claim_count) / n;
        report.unverifiable_fraction = static_cast<double>(report.unverifiable_claims) / n;
    }
    return report;
}

std::map<std::string, std::string> load_responses(const std::filesystem::path& path) {
    std::map<std::string, std::string> out;
    for_each_record(path, [&](const json& j, std::size_t line) {
        if (!j.contains("id")) throw DataError("missing field 'id'", path.string(), line);
        const auto id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
        if (!j.contains("response") || !j["response"].is_string()) {
            throw DataError("missing field 'response'", path.string(), line);
        }
        if (!out.emplace(id, j["response"].get<std::string>()).second) {
            throw DataError(fmt::format("duplicate id '{}'", id), path.string(), line);
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

json label_json(const LabelMetrics& m, const ConfusionCounts& c, bool with_counts) {
    json j = {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
    if (with_counts) j["counts"] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
    return j;
}

}  // namespace

json to_json(const MetricsReport& m, bool include_timings) {
    json j = {{"name", m.name},
              {"total", m.total},
              {"scored", m.scored},
              {"unverifiable", m.unverifiable},
              {"expected_value", m.expected_value},
              {"true", label_json(m.true_label, m.true_counts, !m.expected_value)},
              {"false", label_json(m.false_label, m.false_counts, !m.expected_value)}};
    if (m.ledger) {
        j["fallback_rate"] = m.fallback_rate;
        j["ledger"] = to_json(*m.ledger);
    }
    if (include_timings && m.ledger) j["wall_time_ms"] = m.wall_time.count();
    return j;
}

json to_json(const BenchmarkResult& result, const std::vector<MetricsReport>& extra_rows, bool include_timings) {
    json items = json::array();
    for (const auto& item : result.items) {
        items.push_back({{"id", item.id},
                         {"gold", std::string(to_string(item.gold))},
                         {"predicted", item.predicted ? json(std::string(to_string(*item.predicted))) : json(nullptr)},
                         {"status", std::string(to_string(item.status))},
                         {"fallback_used", item.fallback_used}});
    }
    json baseline_rows = json::array();
    for (const auto& row : extra_rows) baseline_rows.push_back(to_json(row, include_timings));
    return {{"schema_version", kMetricsSchemaVersion},
            {"strategy", std::string(to_string(result.report.retrieval.strategy))},
            {"tau", result.report.retrieval.strategy == Strategy::Thresholded ? json(result.report.retrieval.tau)
                                                                              : json(nullptr)},
            {"model_id", result.report.model_id},
            {"metrics", to_json(result.metrics, include_timings)},
            {"baselines", baseline_rows},
            {"items", items}};
}

json to_json(const std::vector<SweepPoint>& points, bool include_timings) {
    json arr = json::array();
    for (const auto& p : points) {
        arr.push_back({{"tau", p.tau},
                       {"f1_true", p.f1_true},
                       {"total_cost", p.total_cost.dollars()},
                       {"search_cost", p.search_cost.dollars()},
                       {"translation_cost", p.translation_cost.dollars()},
                       {"fallback_rate", p.fallback_rate},
                       {"metrics", to_json(p.metrics, include_timings)}});
    }
    return {{"schema_version", kMetricsSchemaVersion}, {"points", arr}};
}

json to_json(const FactualityReport& r) {
    return {{"schema_version", kMetricsSchemaVersion},
            {"model_id", r.model_id},
            {"responses", r.responses},
            {"empty_responses", r.empty_responses},
            {"failed_responses", r.failed_responses},
            {"total_claims", r.total_claims},
            {"true_claims", r.true_claims},
            {"false_claim_count", r.false_claim_count},
            {"unverifiable_claims", r.unverifiable_claims},
            {"percent_true_claims", r.percent_true_claims},
            {"percent_false_claims", r.percent_false_claims},
            {"unverifiable_fraction", r.unverifiable_fraction},
            {"cost", r.ledger.total().dollars()},
            {"ledger", to_json(r.ledger)}};
}

std::string format_metrics_table(const std::vector<MetricsReport>& rows) {
    std::string out = fmt::format("{:<22} {:>16} | {:^20} | {:^20} | {:>6}\n", "", "LLM + Search", "Label = True",
                                  "Label = False", "");
    out += fmt::format("{:<22} {:>16} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6} | {:>6}\n", "Name", "Cost ($)", "Prec",
                       "Recall", "F1", "Prec", "Recall", "F1", "Unver.");
    out += std::string(96, '-') + '\n';
    for (const auto& r : rows) {
        const auto cost = r.ledger ? fmt::format("{:.4f}+{:.4f}", r.ledger->llm_cost.dollars(),
                                                 r.ledger->search_cost.dollars())
                                   : std::string("-");
        out += fmt::format("{:<22} {:>16} | {:>6.2f} {:>6.2f} {:>6.2f} | {:>6.2f} {:>6.2f} {:>6.2f} | {:>6}\n", r.name,
                           cost, r.true_label.precision, r.true_label.recall, r.true_label.f1, r.false_label.precision,
                           r.false_label.recall, r.false_label.f1, r.unverifiable);
    }
    return out;
}

std::string format_sweep_table(const std::vector<SweepPoint>& points) {
    std::string out = fmt::format("{:>5} {:>9} {:>12} {:>12} {:>12} {:>9}\n", "tau", "F1(True)", "cost ($)",
                                  "search ($)", "transl. ($)", "fallback");
    for (const auto& p : points) {
        out += fmt::format("{:>5} {:>9.4f} {:>12.6f} {:>12.6f} {:>12.6f} {:>9.3f}\n", p.tau, p.f1_true,
                           p.total_cost.dollars(), p.search_cost.dollars(), p.translation_cost.dollars(),
                           p.fallback_rate);
    }
    return out;
}

std::string format_factuality(const FactualityReport& r) {
    return fmt::format(
        "model {}: {} responses, {} claims\n"
        "  true claims      {:6.2f}% ({})\n"
        "  false claims     {:6.2f}% ({})\n"
        "  unverifiable     {:6.2f}% ({})\n"
        "  empty/failed responses {}/{}\n"
        "  cost             ${:.6f}\n",
        r.model_id, r.responses, r.total_claims, 100.0 * r.percent_true_claims, r.true_claims,
        100.0 * r.percent_false_claims, r.false_claim_count, 100.0 * r.unverifiable_fraction, r.unverifiable_claims,
        r.empty_responses, r.failed_responses, r.ledger.total().dollars());
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "tau,f1_true,total_cost,search_cost,translation_cost,fallback_rate\n";
    for (const auto& p : points) {
        out += fmt::format("{},{:.6f},{:.9f},{:.9f},{:.9f},{:.6f}\n", p.tau, p.f1_true, p.total_cost.dollars(),
                           p.search_cost.dollars(), p.translation_cost.dollars(), p.fallback_rate);
    }
    return out;
}

std::string sweep_svg(const std::vector<SweepPoint>& points) {
    constexpr double width = 640, height = 400;
    constexpr double left = 70, right = 80, top = 40, bottom = 60;
    constexpr double plot_w = width - left - right, plot_h = height - top - bottom;

    int tau_min = points.empty() ? 0 : points.front().tau;
    int tau_max = points.empty() ? 1 : points.back().tau;
    for (const auto& p : points) {
        tau_min = std::min(tau_min, p.tau);
        tau_max = std::max(tau_max, p.tau);
    }
    double cost_max = 0.0;
    for (const auto& p : points) cost_max = std::max(cost_max, p.total_cost.dollars());
    if (cost_max <= 0.0) cost_max = 1.0;

    const auto x_of = [&](int tau) {
        return tau_max == tau_min ? left + plot_w / 2 : left + plot_w * (tau - tau_min) / double(tau_max - tau_min);
    };
    const auto y_f1 = [&](double f1) { return top + plot_h * (1.0 - f1); };
    const auto y_cost = [&](double c) { return top + plot_h * (1.0 - c / cost_max); };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
        "font-family=\"sans-serif\" font-size=\"12\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">F1 (True) and cost by threshold</text>\n",
        width, height, width / 2);
    svg += fmt::format(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n"
        "<line x1=\"{3}\" y1=\"{1}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n"
        "<line x1=\"{0}\" y1=\"{2}\" x2=\"{3}\" y2=\"{2}\" stroke=\"black\"/>\n",
        left, top, top + plot_h, left + plot_w);

    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0;
        const double y = y_f1(f);
        svg += fmt::format(
            "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>"
            "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\" fill=\"#1f77b4\">{5:.1f}</text>"
            "<text x=\"{6}\" y=\"{4:.2f}\" fill=\"#d62728\">{7:.4f}</text>\n",
            left, y, left + plot_w, left - 6, y + 4, f, left + plot_w + 6, f * cost_max);
    }
    for (const auto& p : points) {
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x_of(p.tau),
                           top + plot_h + 18, p.tau);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">tau</text>\n", left + plot_w / 2,
                       height - 18);
    svg += fmt::format(
        "<text transform=\"translate(18,{0}) rotate(-90)\" text-anchor=\"middle\" fill=\"#1f77b4\">F1 (True)</text>\n"
        "<text transform=\"translate({1},{0}) rotate(90)\" text-anchor=\"middle\" fill=\"#d62728\">cost ($)</text>\n",
        top + plot_h / 2, width - 14);

    const auto series = [&](auto y_of, const char* color) {
        std::string pts;
        std::string dots;
        for (const auto& p : points) {
            const double x = x_of(p.tau);
            const double y = y_of(p);
            pts += fmt::format("{:.2f},{:.2f} ", x, y);
            dots += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", x, y, color);
        }
        if (!pts.empty()) pts.pop_back();
        return fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", pts, color) +
               dots;
    };
    svg += series([&](const SweepPoint& p) { return y_f1(p.f1_true); }, "#1f77b4");
    svg += series([&](const SweepPoint& p) { return y_cost(p.total_cost.dollars()); }, "#d62728");
    svg += "</svg>\n";
    return svg;
}

}  // namespace factcheck
