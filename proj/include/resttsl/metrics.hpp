#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "resttsl/json.hpp"

namespace resttsl::metrics {

enum class Locale { En, Pt };

Locale locale_from_string(const std::string& text);

/// Fixed-point decimal formatting with half-up rounding. The pt locale uses a
/// comma as the decimal separator.
std::string format_fixed(double value, int decimals, Locale locale = Locale::En);

/// Per-run measurements for one model on one project.
struct RunMetrics {
    std::string model_id;
    std::string project_id;
    std::uint64_t total_tests = 0;
    std::uint64_t failed_tests = 0;
    double success_rate = 0.0;
    double branch_coverage = 0.0;
    double mutation_score = 0.0;
    double total_cost = 0.0;

    bool operator==(const RunMetrics&) const = default;
};

struct Weights {
    double w_sr = 1.0 / 3.0;
    double w_c = 1.0 / 3.0;
    double w_m = 1.0 / 3.0;

    /// Throws InvalidWeights unless all weights are nonnegative and they sum
    /// to 1 within 1e-9.
    void validate() const;

    /// Scales the weights so they sum to 1. Throws InvalidWeights when the
    /// sum is not positive.
    Weights normalized() const;
};

double success_rate(std::uint64_t total, std::uint64_t failed);
double failed_pct(std::uint64_t total, std::uint64_t failed);
double calculated_score(double sr, double c, double m, const Weights& weights = {});

/// Per-model aggregate over projects: SR/C/M and the test count are
/// unweighted means, cost is summed, and S is computed from the averaged
/// inputs.
struct ScoreRow {
    std::string model_id;
    double s = 0.0;
    double sr = 0.0;
    double c = 0.0;
    double m = 0.0;
    double t = 0.0;
    double tc = 0.0;

    bool operator==(const ScoreRow&) const = default;
};

ScoreRow aggregate_projects(const std::vector<RunMetrics>& runs,
                            const Weights& weights = {});

struct RankedEntry {
    std::string model_id;
    double value = 0.0;
    std::optional<double> delta;

    bool operator==(const RankedEntry&) const = default;
};

struct RankedColumn {
    std::string metric;
    std::vector<RankedEntry> entries;
};

struct RankingTable {
    std::vector<RankedColumn> columns;

    const RankedColumn& column(const std::string& metric) const;
};

/// Ranks the rows per metric (S, SR, C, M), nonincreasing by value. The first
/// entry carries no delta; every other delta is value - first. Ties are
/// broken by model id, later ids first.
RankingTable rank_models(const std::vector<ScoreRow>& rows);

enum class FailureCategory {
    PropertyLength,
    Misinterpretation,
    Authentication,
    PropertyRequirement,
    RequiredCharacters,
    JsonDeserialization,
};

std::string_view to_string(FailureCategory category);
FailureCategory failure_category_from_string(const std::string& text);

struct FailureRecord {
    std::string model_id;
    std::string project_id;
    std::string case_id;
    FailureCategory category = FailureCategory::PropertyLength;
    std::string note;

    bool operator==(const FailureRecord&) const = default;
};

struct FailureTaxonomy {
    std::map<FailureCategory, std::uint64_t> counts;
    std::uint64_t total = 0;
};

/// Counts records per category. Every category appears in the result, zero
/// when absent from the input.
FailureTaxonomy tally_failures(const std::vector<FailureRecord>& records);

struct IngestResult {
    RunMetrics metrics;
    std::vector<std::string> warnings;
};

/// Reads the three ingestion files for one run. The test report supplies
/// total/failed (and optionally a stated success rate, cross-checked against
/// the recomputed one), the coverage report supplies branch_coverage_pct, and
/// the mutation report supplies mutation_score_pct. Missing files, parse
/// failures, or out-of-range values raise MalformedReport naming the input.
IngestResult ingest_run_report(const std::filesystem::path& test_report_file,
                               const std::filesystem::path& coverage_report_file,
                               const std::filesystem::path& mutation_report_file);

RunMetrics load_metrics_json(const std::filesystem::path& path);
Json metrics_to_json(const RunMetrics& metrics);

std::vector<FailureRecord> load_failures_json(const std::filesystem::path& path);
Json failures_to_json(const std::vector<FailureRecord>& records);

std::string render_rank_markdown(const std::vector<ScoreRow>& rows,
                                 const RankingTable& table,
                                 Locale locale = Locale::En);
std::string render_rank_csv(const std::vector<ScoreRow>& rows,
                            const RankingTable& table,
                            Locale locale = Locale::En);

} // namespace resttsl::metrics
