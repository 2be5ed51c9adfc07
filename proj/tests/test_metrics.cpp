#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"
#include "resttsl/metrics.hpp"

#include "testutil.hpp"

using resttsl::Error;
using resttsl::ErrorCode;
using resttsl::Json;
namespace metrics = resttsl::metrics;
using metrics::FailureCategory;
using metrics::Locale;
using metrics::RunMetrics;
using metrics::ScoreRow;
using metrics::Weights;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ZeroTests;
}

struct ReferenceModel {
    std::string model_id;
    double s, sr, c, m, t, tc;
    std::uint64_t total_tests, failed_tests;
    double failed_pct;
};

std::vector<ReferenceModel> reference_models() {
    Json doc = Json::parse(testutil::read_file(testutil::fixture("reference/model_metrics.json")));
    std::vector<ReferenceModel> out;
    for (const Json& row : doc["models"]) {
        out.push_back({row["model_id"], row["s"], row["sr"], row["c"], row["m"], row["t"],
                       row["tc"], row["total_tests"], row["failed_tests"], row["failed_pct"]});
    }
    return out;
}

std::vector<ScoreRow> reference_rows() {
    std::vector<ScoreRow> rows;
    for (const ReferenceModel& model : reference_models()) {
        rows.push_back({model.model_id, model.s, model.sr, model.c, model.m, model.t, model.tc});
    }
    return rows;
}

RunMetrics make_run(double sr, double c, double m, std::uint64_t total = 100,
                    double cost = 0.0) {
    RunMetrics run;
    run.model_id = "m";
    run.project_id = "p";
    run.total_tests = total;
    run.failed_tests = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(total) * (100.0 - sr) / 100.0));
    run.success_rate = sr;
    run.branch_coverage = c;
    run.mutation_score = m;
    run.total_cost = cost;
    return run;
}

void write_reports(const std::filesystem::path& dir, const Json& tests, const Json& coverage,
                   const Json& mutation) {
    resttsl::fsutil::write_text_atomic(dir / "tests.json", tests.dump(2) + "\n");
    resttsl::fsutil::write_text_atomic(dir / "coverage.json", coverage.dump(2) + "\n");
    resttsl::fsutil::write_text_atomic(dir / "mutation.json", mutation.dump(2) + "\n");
}

} // namespace

TEST_CASE("success rate and failure percentage") {
    CHECK(metrics::success_rate(230, 0) == 100.0);
    CHECK(metrics::success_rate(200, 200) == 0.0);
    CHECK(metrics::success_rate(200, 1) == doctest::Approx(99.5).epsilon(1e-12));
    CHECK(metrics::failed_pct(217, 7) == doctest::Approx(100.0 * 7 / 217).epsilon(1e-12));
    CHECK(metrics::format_fixed(metrics::failed_pct(217, 7), 1) == "3.2");
    CHECK(metrics::format_fixed(metrics::failed_pct(208, 8), 1) == "3.8");

    CHECK(code_of([] { metrics::success_rate(0, 0); }) == ErrorCode::ZeroTests);
    CHECK(code_of([] { metrics::failed_pct(0, 0); }) == ErrorCode::ZeroTests);
    CHECK(code_of([] { metrics::failed_pct(10, 11); }) == ErrorCode::ZeroTests);
}

TEST_CASE("per-model failure percentages reproduce the reference table") {
    for (const ReferenceModel& model : reference_models()) {
        CAPTURE(model.model_id);
        double pct = metrics::failed_pct(model.total_tests, model.failed_tests);
        CHECK(metrics::format_fixed(pct, 1) == metrics::format_fixed(model.failed_pct, 1));
    }
}

TEST_CASE("the pooled failure percentage is close to its published rounding") {
    std::uint64_t total = 0;
    std::uint64_t failed = 0;
    for (const ReferenceModel& model : reference_models()) {
        total += model.total_tests;
        failed += model.failed_tests;
    }
    CHECK(total == 1635);
    CHECK(failed == 39);
    double pooled = metrics::failed_pct(total, failed);
    CHECK(pooled == doctest::Approx(2.3853211).epsilon(1e-6));
    // The published two-decimal figure truncates; the exact value stays
    // within a cent of it.
    CHECK(std::fabs(pooled - 2.38) <= 0.01);
}

TEST_CASE("calculated scores reproduce the reference rows") {
    CHECK(metrics::calculated_score(98.0, 59.3, 32.9) == doctest::Approx(63.4).epsilon(1e-9));
    CHECK(metrics::calculated_score(98.0, 63.0, 25.5) ==
          doctest::Approx(186.5 / 3.0).epsilon(1e-12));
    CHECK(metrics::format_fixed(metrics::calculated_score(98.0, 63.0, 25.5), 1) == "62.2");
    for (const ReferenceModel& model : reference_models()) {
        CAPTURE(model.model_id);
        CHECK(std::fabs(metrics::calculated_score(model.sr, model.c, model.m) - model.s) <= 0.1);
    }
}

TEST_CASE("score bounds and monotonicity") {
    CHECK(metrics::calculated_score(0, 0, 0) == 0.0);
    CHECK(metrics::calculated_score(100, 100, 100) == doctest::Approx(100.0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pct(0.0, 100.0);
    for (int trial = 0; trial < 500; ++trial) {
        double sr = pct(rng), c = pct(rng), m = pct(rng);
        double base = metrics::calculated_score(sr, c, m);
        CHECK(base >= 0.0);
        CHECK(base <= 100.0);
        // Raising any input never lowers the score.
        double bump = std::min(100.0 - sr, 5.0);
        CHECK(metrics::calculated_score(sr + bump, c, m) >= base - 1e-12);
        bump = std::min(100.0 - c, 5.0);
        CHECK(metrics::calculated_score(sr, c + bump, m) >= base - 1e-12);
        bump = std::min(100.0 - m, 5.0);
        CHECK(metrics::calculated_score(sr, c, m + bump) >= base - 1e-12);
        // The score stays within the min/max of its inputs.
        CHECK(base >= std::min({sr, c, m}) - 1e-12);
        CHECK(base <= std::max({sr, c, m}) + 1e-12);
    }
}

TEST_CASE("weights are validated and renormalizable") {
    Weights equal;
    equal.validate();

    Weights custom{0.5, 0.25, 0.25};
    custom.validate();
    CHECK(metrics::calculated_score(80.0, 60.0, 40.0, custom) == doctest::Approx(65.0));

    Weights bad_sum{0.5, 0.5, 0.5};
    CHECK(code_of([&] { bad_sum.validate(); }) == ErrorCode::InvalidWeights);
    Weights negative{1.5, -0.25, -0.25};
    CHECK(code_of([&] { negative.validate(); }) == ErrorCode::InvalidWeights);

    // Scaling all weights by a constant and renormalizing leaves scores
    // unchanged.
    Weights scaled{1.5, 0.75, 0.75};
    Weights normalized = scaled.normalized();
    normalized.validate();
    CHECK(metrics::calculated_score(80.0, 60.0, 40.0, normalized) ==
          doctest::Approx(metrics::calculated_score(80.0, 60.0, 40.0, custom)));
    Weights zero{0, 0, 0};
    CHECK(code_of([&] { zero.normalized(); }) == ErrorCode::InvalidWeights);
}

TEST_CASE("aggregation averages rates and sums costs") {
    SUBCASE("single run is the identity") {
        RunMetrics run = make_run(97.0, 64.0, 31.0, 200, 0.42);
        ScoreRow row = metrics::aggregate_projects({run});
        CHECK(row.sr == 97.0);
        CHECK(row.c == 64.0);
        CHECK(row.m == 31.0);
        CHECK(row.t == 200.0);
        CHECK(row.tc == 0.42);
        CHECK(row.s == doctest::Approx(metrics::calculated_score(97.0, 64.0, 31.0)));
    }
    SUBCASE("success rates average per the reference example") {
        ScoreRow row = metrics::aggregate_projects({make_run(100.0, 50, 50),
                                                    make_run(95.0, 70, 30)});
        CHECK(row.sr == doctest::Approx(97.5));
        CHECK(row.c == doctest::Approx(60.0));
        CHECK(row.m == doctest::Approx(40.0));
    }
    SUBCASE("identical runs aggregate to themselves") {
        std::vector<RunMetrics> runs(6, make_run(90.0, 55.5, 22.25, 80, 0.05));
        ScoreRow row = metrics::aggregate_projects(runs);
        CHECK(row.sr == doctest::Approx(90.0));
        CHECK(row.c == doctest::Approx(55.5));
        CHECK(row.m == doctest::Approx(22.25));
        CHECK(row.t == doctest::Approx(80.0));
        CHECK(row.tc == doctest::Approx(0.30));
    }
    SUBCASE("empty input is an error") {
        CHECK(code_of([] { metrics::aggregate_projects({}); }) == ErrorCode::EmptyInput);
    }
    SUBCASE("the score comes from the averaged inputs") {
        std::vector<RunMetrics> runs = {make_run(100.0, 80.0, 60.0),
                                        make_run(90.0, 60.0, 20.0)};
        ScoreRow row = metrics::aggregate_projects(runs);
        CHECK(row.s == doctest::Approx(metrics::calculated_score(95.0, 70.0, 40.0)));
    }
}

TEST_CASE("rankings reproduce the reference orders and deltas") {
    metrics::RankingTable table = metrics::rank_models(reference_rows());
    Json expected =
        Json::parse(testutil::read_file(testutil::fixture("reference/rank_expected.json")));

    for (const std::string metric : {"S", "SR", "C", "M"}) {
        CAPTURE(metric);
        const metrics::RankedColumn& column = table.column(metric);
        const Json& want = expected[metric];
        REQUIRE(column.entries.size() == want["order"].size());

        for (size_t i = 0; i < column.entries.size(); ++i) {
            CHECK(column.entries[i].model_id == want["order"][i].get<std::string>());
        }
        CHECK_FALSE(column.entries[0].delta.has_value());
        for (size_t i = 1; i < column.entries.size(); ++i) {
            REQUIRE(column.entries[i].delta.has_value());
            CHECK(std::fabs(*column.entries[i].delta -
                            want["deltas"][i - 1].get<double>()) <= 0.1);
        }
        // Values are nonincreasing and deltas are exactly value - first.
        for (size_t i = 1; i < column.entries.size(); ++i) {
            CHECK(column.entries[i].value <= column.entries[i - 1].value + 1e-12);
            CHECK(column.entries[0].value + *column.entries[i].delta ==
                  column.entries[i].value);
        }
    }
}

TEST_CASE("ranking a single row yields no delta") {
    metrics::RankingTable table = metrics::rank_models({{"only", 50, 60, 70, 80, 10, 0.1}});
    for (const metrics::RankedColumn& column : table.columns) {
        REQUIRE(column.entries.size() == 1);
        CHECK_FALSE(column.entries[0].delta.has_value());
    }
}

TEST_CASE("rank ties are broken by model id, later ids first") {
    std::vector<ScoreRow> rows = {{"alpha", 50, 98, 1, 1, 0, 0},
                                  {"omega", 50, 98, 2, 2, 0, 0},
                                  {"mid", 40, 95, 3, 3, 0, 0}};
    metrics::RankingTable table = metrics::rank_models(rows);
    const metrics::RankedColumn& s = table.column("S");
    CHECK(s.entries[0].model_id == "omega");
    CHECK(s.entries[1].model_id == "alpha");
    CHECK(s.entries[2].model_id == "mid");
}

TEST_CASE("scores are invariant under weight renormalization") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pct(0.0, 100.0);
    std::uniform_real_distribution<double> factor(0.1, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        double sr = pct(rng), c = pct(rng), m = pct(rng);
        double k = factor(rng);
        Weights base{0.5, 0.3, 0.2};
        Weights scaled{0.5 * k, 0.3 * k, 0.2 * k};
        CHECK(metrics::calculated_score(sr, c, m, base) ==
              doctest::Approx(metrics::calculated_score(sr, c, m, scaled.normalized()))
                  .epsilon(1e-9));
    }
}

TEST_CASE("the failure taxonomy tallies every category") {
    std::vector<metrics::FailureRecord> records =
        metrics::load_failures_json(testutil::fixture("reference/failures.json"));
    metrics::FailureTaxonomy taxonomy = metrics::tally_failures(records);
    CHECK(taxonomy.total == 39);
    CHECK(taxonomy.counts.at(FailureCategory::PropertyLength) == 15);
    CHECK(taxonomy.counts.at(FailureCategory::Misinterpretation) == 7);
    CHECK(taxonomy.counts.at(FailureCategory::Authentication) == 5);
    CHECK(taxonomy.counts.at(FailureCategory::PropertyRequirement) == 5);
    CHECK(taxonomy.counts.at(FailureCategory::RequiredCharacters) == 4);
    CHECK(taxonomy.counts.at(FailureCategory::JsonDeserialization) == 3);

    // Conservation: category counts always sum to the total.
    std::uint64_t sum = 0;
    for (const auto& [category, count] : taxonomy.counts) sum += count;
    CHECK(sum == taxonomy.total);

    metrics::FailureTaxonomy empty = metrics::tally_failures({});
    CHECK(empty.total == 0);
    CHECK(empty.counts.size() == 6);
    for (const auto& [category, count] : empty.counts) CHECK(count == 0);
}

TEST_CASE("failure categories round-trip through their names") {
    using FC = FailureCategory;
    for (FC category : {FC::PropertyLength, FC::Misinterpretation, FC::Authentication,
                        FC::PropertyRequirement, FC::RequiredCharacters,
                        FC::JsonDeserialization}) {
        CHECK(metrics::failure_category_from_string(
                  std::string(metrics::to_string(category))) == category);
    }
    CHECK(code_of([] { metrics::failure_category_from_string("Gremlins"); }) ==
          ErrorCode::MalformedReport);
}

TEST_CASE("report ingestion computes metrics and cross-checks rates") {
    testutil::TempDir tmp;

    SUBCASE("the reference trio") {
        write_reports(tmp.path,
                      Json{{"total", 10}, {"failed", 1}, {"total_cost_usd", 0.12}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        metrics::IngestResult result = metrics::ingest_run_report(
            tmp.path / "tests.json", tmp.path / "coverage.json", tmp.path / "mutation.json");
        CHECK(result.metrics.total_tests == 10);
        CHECK(result.metrics.failed_tests == 1);
        CHECK(result.metrics.success_rate == doctest::Approx(90.0));
        CHECK(result.metrics.branch_coverage == 62.5);
        CHECK(result.metrics.mutation_score == 40.0);
        CHECK(result.metrics.total_cost == 0.12);
        CHECK(result.warnings.empty());
    }
    SUBCASE("a stated success rate outside tolerance warns") {
        write_reports(tmp.path,
                      Json{{"total", 10}, {"failed", 1}, {"success_rate", 95.0}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        metrics::IngestResult result = metrics::ingest_run_report(
            tmp.path / "tests.json", tmp.path / "coverage.json", tmp.path / "mutation.json");
        CHECK(result.metrics.success_rate == doctest::Approx(90.0));
        REQUIRE(result.warnings.size() == 1);
        CHECK(result.warnings[0].find("success") != std::string::npos);
    }
    SUBCASE("a consistent stated success rate passes silently") {
        write_reports(tmp.path,
                      Json{{"total", 10}, {"failed", 1}, {"success_rate", 90.0}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        metrics::IngestResult result = metrics::ingest_run_report(
            tmp.path / "tests.json", tmp.path / "coverage.json", tmp.path / "mutation.json");
        CHECK(result.warnings.empty());
    }
    SUBCASE("out-of-range coverage is malformed") {
        write_reports(tmp.path, Json{{"total", 10}, {"failed", 1}},
                      Json{{"branch_coverage_pct", 101.0}},
                      Json{{"mutation_score_pct", 40.0}});
        try {
            metrics::ingest_run_report(tmp.path / "tests.json", tmp.path / "coverage.json",
                                       tmp.path / "mutation.json");
            FAIL("expected MalformedReport");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedReport);
            CHECK(std::string(e.what()).find("coverage") != std::string::npos);
        }
    }
    SUBCASE("a missing report names the absent file") {
        write_reports(tmp.path, Json{{"total", 10}, {"failed", 1}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        std::filesystem::remove(tmp.path / "mutation.json");
        try {
            metrics::ingest_run_report(tmp.path / "tests.json", tmp.path / "coverage.json",
                                       tmp.path / "mutation.json");
            FAIL("expected MalformedReport");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::MalformedReport);
            CHECK(std::string(e.what()).find("mutation") != std::string::npos);
        }
    }
    SUBCASE("more failures than tests is malformed") {
        write_reports(tmp.path, Json{{"total", 5}, {"failed", 9}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        CHECK(code_of([&] {
                  metrics::ingest_run_report(tmp.path / "tests.json",
                                             tmp.path / "coverage.json",
                                             tmp.path / "mutation.json");
              }) == ErrorCode::MalformedReport);
    }
    SUBCASE("unparsable json is malformed") {
        write_reports(tmp.path, Json{{"total", 10}, {"failed", 1}},
                      Json{{"branch_coverage_pct", 62.5}},
                      Json{{"mutation_score_pct", 40.0}});
        resttsl::fsutil::write_text_atomic(tmp.path / "tests.json", "{broken");
        CHECK(code_of([&] {
                  metrics::ingest_run_report(tmp.path / "tests.json",
                                             tmp.path / "coverage.json",
                                             tmp.path / "mutation.json");
              }) == ErrorCode::MalformedReport);
    }
}

TEST_CASE("metrics files round-trip") {
    testutil::TempDir tmp;
    RunMetrics metrics_row = make_run(92.5, 61.0, 44.0, 40, 0.07);
    metrics_row.model_id = "model-x";
    metrics_row.project_id = "proj-y";
    resttsl::fsutil::write_text_atomic(tmp.path / "metrics.json",
                                       metrics::metrics_to_json(metrics_row).dump(2) + "\n");
    RunMetrics loaded = metrics::load_metrics_json(tmp.path / "metrics.json");
    CHECK(loaded.total_tests == 40);
    CHECK(loaded.failed_tests == 3);
    CHECK(loaded.branch_coverage == 61.0);
    CHECK(loaded.mutation_score == 44.0);
    CHECK(loaded.total_cost == 0.07);
    CHECK(loaded.success_rate == doctest::Approx(92.5));

    resttsl::fsutil::write_text_atomic(tmp.path / "bad.json", "{\"total_tests\": -4}");
    CHECK(code_of([&] { metrics::load_metrics_json(tmp.path / "bad.json"); }) ==
          ErrorCode::MalformedReport);
}

TEST_CASE("fixed-point formatting rounds half up per locale") {
    CHECK(metrics::format_fixed(2.25, 1) == "2.3");
    CHECK(metrics::format_fixed(2.35, 1) == "2.4");
    CHECK(metrics::format_fixed(-2.25, 1) == "-2.3");
    CHECK(metrics::format_fixed(2.0, 1) == "2.0");
    CHECK(metrics::format_fixed(2.0, 0) == "2");
    CHECK(metrics::format_fixed(97.5, 2) == "97.50");
    CHECK(metrics::format_fixed(2.3853211, 2) == "2.39");
    CHECK(metrics::format_fixed(3.2258, 1, Locale::Pt) == "3,2");
    CHECK(metrics::format_fixed(0.005, 2) == "0.01");
}

TEST_CASE("rank rendering carries locale separators") {
    std::vector<ScoreRow> rows = reference_rows();
    metrics::RankingTable table = metrics::rank_models(rows);

    std::string markdown = metrics::render_rank_markdown(rows, table);
    CHECK(markdown.find("claude-3.5-sonnet") != std::string::npos);
    CHECK(markdown.find("| -- |") != std::string::npos);
    CHECK(markdown.find("70.9") != std::string::npos);

    std::string csv_en = metrics::render_rank_csv(rows, table, Locale::En);
    CHECK(csv_en.find("Model,S,SR,C,M,T,TC") == 0);
    CHECK(csv_en.find("70.9") != std::string::npos);

    std::string csv_pt = metrics::render_rank_csv(rows, table, Locale::Pt);
    CHECK(csv_pt.find(';') != std::string::npos);
    CHECK(csv_pt.find("70,9") != std::string::npos);
}
