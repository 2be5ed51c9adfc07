#include <algorithm>
#include <cmath>
#include <fstream>

#include "resttsl/errors.hpp"
#include "resttsl/metrics.hpp"

namespace resttsl::metrics {

namespace {

constexpr double kWeightTolerance = 1e-9;

const std::vector<FailureCategory>& all_categories() {
    static const std::vector<FailureCategory> categories = {
        FailureCategory::PropertyLength,      FailureCategory::Misinterpretation,
        FailureCategory::Authentication,      FailureCategory::PropertyRequirement,
        FailureCategory::RequiredCharacters,  FailureCategory::JsonDeserialization,
    };
    return categories;
}

Json parse_json_file(const std::filesystem::path& path, const char* label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::MalformedReport,
             std::string(label) + " report missing: " + path.string());
    }
    Json parsed = Json::parse(in, nullptr, false);
    if (parsed.is_discarded()) {
        fail(ErrorCode::MalformedReport,
             std::string(label) + " report is not valid JSON: " + path.string());
    }
    return parsed;
}

double require_pct(const Json& doc, const char* field, const char* label,
                   const std::filesystem::path& path) {
    if (!doc.contains(field) || !doc[field].is_number()) {
        fail(ErrorCode::MalformedReport, std::string(label) + " report lacks numeric '" +
                                             field + "': " + path.string());
    }
    double value = doc[field].get<double>();
    if (!(value >= 0.0 && value <= 100.0)) {
        fail(ErrorCode::MalformedReport, std::string(label) + " report '" + field +
                                             "' out of [0,100]: " + path.string());
    }
    return value;
}

std::uint64_t require_count(const Json& doc, const char* field, const char* label,
                            const std::filesystem::path& path) {
    if (!doc.contains(field) || !doc[field].is_number_integer() ||
        doc[field].get<std::int64_t>() < 0) {
        fail(ErrorCode::MalformedReport,
             std::string(label) + " report lacks nonnegative integer '" + field +
                 "': " + path.string());
    }
    return doc[field].get<std::uint64_t>();
}

} // namespace

Locale locale_from_string(const std::string& text) {
    if (text == "en") return Locale::En;
    if (text == "pt") return Locale::Pt;
    fail(ErrorCode::BadConfig, "unknown locale '" + text + "' (expected en or pt)");
}

std::string format_fixed(double value, int decimals, Locale locale) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    long long scaled = std::llround(value * scale);
    bool negative = scaled < 0;
    unsigned long long magnitude =
        negative ? -static_cast<unsigned long long>(scaled) : scaled;
    unsigned long long unit = 1;
    for (int i = 0; i < decimals; ++i) unit *= 10;
    std::string out = negative ? "-" : "";
    out += std::to_string(magnitude / unit);
    if (decimals > 0) {
        std::string fraction = std::to_string(magnitude % unit);
        out += locale == Locale::Pt ? ',' : '.';
        out += std::string(decimals - fraction.size(), '0') + fraction;
    }
    return out;
}

void Weights::validate() const {
    if (w_sr < 0.0 || w_c < 0.0 || w_m < 0.0) {
        fail(ErrorCode::InvalidWeights, "weights must be nonnegative");
    }
    double sum = w_sr + w_c + w_m;
    if (std::fabs(sum - 1.0) > kWeightTolerance) {
        fail(ErrorCode::InvalidWeights,
             "weights must sum to 1, got " + std::to_string(sum));
    }
}

Weights Weights::normalized() const {
    double sum = w_sr + w_c + w_m;
    if (!(sum > 0.0)) {
        fail(ErrorCode::InvalidWeights, "weight sum must be positive");
    }
    return {w_sr / sum, w_c / sum, w_m / sum};
}

double success_rate(std::uint64_t total, std::uint64_t failed) {
    if (total == 0) fail(ErrorCode::ZeroTests, "success rate needs at least one test");
    if (failed > total) {
        fail(ErrorCode::ZeroTests, "failed tests exceed total tests");
    }
    return 100.0 * static_cast<double>(total - failed) / static_cast<double>(total);
}

double failed_pct(std::uint64_t total, std::uint64_t failed) {
    if (total == 0) fail(ErrorCode::ZeroTests, "failure rate needs at least one test");
    if (failed > total) {
        fail(ErrorCode::ZeroTests, "failed tests exceed total tests");
    }
    return 100.0 * static_cast<double>(failed) / static_cast<double>(total);
}

double calculated_score(double sr, double c, double m, const Weights& weights) {
    weights.validate();
    return weights.w_sr * sr + weights.w_c * c + weights.w_m * m;
}

ScoreRow aggregate_projects(const std::vector<RunMetrics>& runs,
                            const Weights& weights) {
    if (runs.empty()) {
        fail(ErrorCode::EmptyInput, "aggregation needs at least one run");
    }
    ScoreRow row;
    row.model_id = runs.front().model_id;
    for (const RunMetrics& run : runs) {
        row.sr += run.success_rate;
        row.c += run.branch_coverage;
        row.m += run.mutation_score;
        row.t += static_cast<double>(run.total_tests);
        row.tc += run.total_cost;
    }
    double n = static_cast<double>(runs.size());
    row.sr /= n;
    row.c /= n;
    row.m /= n;
    row.t /= n;
    row.s = calculated_score(row.sr, row.c, row.m, weights);
    return row;
}

const RankedColumn& RankingTable::column(const std::string& metric) const {
    for (const RankedColumn& col : columns) {
        if (col.metric == metric) return col;
    }
    fail(ErrorCode::EmptyInput, "no ranking column named " + metric);
}

RankingTable rank_models(const std::vector<ScoreRow>& rows) {
    if (rows.empty()) {
        fail(ErrorCode::EmptyInput, "ranking needs at least one row");
    }
    struct Metric {
        const char* name;
        double ScoreRow::* field;
    };
    static const Metric metrics[] = {{"S", &ScoreRow::s},
                                     {"SR", &ScoreRow::sr},
                                     {"C", &ScoreRow::c},
                                     {"M", &ScoreRow::m}};
    RankingTable table;
    for (const Metric& metric : metrics) {
        std::vector<const ScoreRow*> order;
        order.reserve(rows.size());
        for (const ScoreRow& row : rows) order.push_back(&row);
        std::sort(order.begin(), order.end(),
                  [&](const ScoreRow* a, const ScoreRow* b) {
                      if (a->*(metric.field) != b->*(metric.field)) {
                          return a->*(metric.field) > b->*(metric.field);
                      }
                      return a->model_id > b->model_id;
                  });
        RankedColumn column;
        column.metric = metric.name;
        for (const ScoreRow* row : order) {
            RankedEntry entry;
            entry.model_id = row->model_id;
            entry.value = row->*(metric.field);
            if (!column.entries.empty()) {
                entry.delta = entry.value - column.entries.front().value;
            }
            column.entries.push_back(std::move(entry));
        }
        table.columns.push_back(std::move(column));
    }
    return table;
}

std::string_view to_string(FailureCategory category) {
    switch (category) {
    case FailureCategory::PropertyLength: return "PropertyLength";
    case FailureCategory::Misinterpretation: return "Misinterpretation";
    case FailureCategory::Authentication: return "Authentication";
    case FailureCategory::PropertyRequirement: return "PropertyRequirement";
    case FailureCategory::RequiredCharacters: return "RequiredCharacters";
    case FailureCategory::JsonDeserialization: return "JsonDeserialization";
    }
    return "PropertyLength";
}

FailureCategory failure_category_from_string(const std::string& text) {
    for (FailureCategory category : all_categories()) {
        if (text == to_string(category)) return category;
    }
    fail(ErrorCode::MalformedReport, "unknown failure category '" + text + "'");
}

FailureTaxonomy tally_failures(const std::vector<FailureRecord>& records) {
    FailureTaxonomy taxonomy;
    for (FailureCategory category : all_categories()) {
        taxonomy.counts[category] = 0;
    }
    for (const FailureRecord& record : records) {
        ++taxonomy.counts[record.category];
        ++taxonomy.total;
    }
    return taxonomy;
}

IngestResult ingest_run_report(const std::filesystem::path& test_report_file,
                               const std::filesystem::path& coverage_report_file,
                               const std::filesystem::path& mutation_report_file) {
    Json tests = parse_json_file(test_report_file, "test");
    Json coverage = parse_json_file(coverage_report_file, "coverage");
    Json mutation = parse_json_file(mutation_report_file, "mutation");

    IngestResult result;
    RunMetrics& metrics = result.metrics;
    metrics.total_tests = require_count(tests, "total", "test", test_report_file);
    metrics.failed_tests = require_count(tests, "failed", "test", test_report_file);
    if (metrics.failed_tests > metrics.total_tests) {
        fail(ErrorCode::MalformedReport,
             "test report failed count exceeds total: " + test_report_file.string());
    }
    metrics.success_rate = success_rate(metrics.total_tests, metrics.failed_tests);
    if (tests.contains("success_rate")) {
        if (!tests["success_rate"].is_number()) {
            fail(ErrorCode::MalformedReport, "test report 'success_rate' is not numeric: " +
                                                 test_report_file.string());
        }
        double stated = tests["success_rate"].get<double>();
        if (std::fabs(stated - metrics.success_rate) > 0.05) {
            result.warnings.push_back(
                "stated success rate " + format_fixed(stated, 1) +
                " disagrees with recomputed " + format_fixed(metrics.success_rate, 1));
        }
    }
    metrics.branch_coverage =
        require_pct(coverage, "branch_coverage_pct", "coverage", coverage_report_file);
    metrics.mutation_score =
        require_pct(mutation, "mutation_score_pct", "mutation", mutation_report_file);
    if (tests.contains("total_cost_usd") && tests["total_cost_usd"].is_number()) {
        metrics.total_cost = tests["total_cost_usd"].get<double>();
    }
    return result;
}

RunMetrics load_metrics_json(const std::filesystem::path& path) {
    Json doc = parse_json_file(path, "metrics");
    RunMetrics metrics;
    metrics.total_tests = require_count(doc, "total_tests", "metrics", path);
    metrics.failed_tests = require_count(doc, "failed_tests", "metrics", path);
    if (metrics.failed_tests > metrics.total_tests) {
        fail(ErrorCode::MalformedReport,
             "metrics failed_tests exceeds total_tests: " + path.string());
    }
    metrics.branch_coverage = require_pct(doc, "branch_coverage_pct", "metrics", path);
    metrics.mutation_score = require_pct(doc, "mutation_score_pct", "metrics", path);
    if (!doc.contains("total_cost_usd") || !doc["total_cost_usd"].is_number()) {
        fail(ErrorCode::MalformedReport,
             "metrics report lacks numeric 'total_cost_usd': " + path.string());
    }
    metrics.total_cost = doc["total_cost_usd"].get<double>();
    metrics.success_rate =
        metrics.total_tests == 0
            ? 0.0
            : success_rate(metrics.total_tests, metrics.failed_tests);
    return metrics;
}

Json metrics_to_json(const RunMetrics& metrics) {
    Json doc = Json::object();
    doc["total_tests"] = metrics.total_tests;
    doc["failed_tests"] = metrics.failed_tests;
    doc["branch_coverage_pct"] = metrics.branch_coverage;
    doc["mutation_score_pct"] = metrics.mutation_score;
    doc["total_cost_usd"] = metrics.total_cost;
    return doc;
}

std::vector<FailureRecord> load_failures_json(const std::filesystem::path& path) {
    Json doc = parse_json_file(path, "failures");
    if (!doc.is_array()) {
        fail(ErrorCode::MalformedReport,
             "failures report must be a JSON array: " + path.string());
    }
    std::vector<FailureRecord> records;
    for (const Json& item : doc) {
        if (!item.is_object() || !item.contains("category") ||
            !item["category"].is_string()) {
            fail(ErrorCode::MalformedReport,
                 "failure record lacks a category: " + path.string());
        }
        FailureRecord record;
        record.category =
            failure_category_from_string(item["category"].get<std::string>());
        record.model_id = item.value("model_id", std::string());
        record.project_id = item.value("project_id", std::string());
        record.case_id = item.value("case_id", std::string());
        record.note = item.value("note", std::string());
        records.push_back(std::move(record));
    }
    return records;
}

Json failures_to_json(const std::vector<FailureRecord>& records) {
    Json doc = Json::array();
    for (const FailureRecord& record : records) {
        Json item = Json::object();
        item["model_id"] = record.model_id;
        item["project_id"] = record.project_id;
        item["case_id"] = record.case_id;
        item["category"] = std::string(to_string(record.category));
        item["note"] = record.note;
        doc.push_back(std::move(item));
    }
    return doc;
}

namespace {

std::vector<const ScoreRow*> rows_by_score(const std::vector<ScoreRow>& rows) {
    std::vector<const ScoreRow*> order;
    order.reserve(rows.size());
    for (const ScoreRow& row : rows) order.push_back(&row);
    std::sort(order.begin(), order.end(), [](const ScoreRow* a, const ScoreRow* b) {
        if (a->s != b->s) return a->s > b->s;
        return a->model_id > b->model_id;
    });
    return order;
}

std::string delta_text(const std::optional<double>& delta, Locale locale) {
    return delta ? format_fixed(*delta, 1, locale) : "--";
}

} // namespace

std::string render_rank_markdown(const std::vector<ScoreRow>& rows,
                                 const RankingTable& table, Locale locale) {
    std::string out = "# Model Ranking\n\n## Scores\n\n";
    out += "| Model | S | SR | C | M | T | TC |\n";
    out += "| --- | --- | --- | --- | --- | --- | --- |\n";
    for (const ScoreRow* row : rows_by_score(rows)) {
        out += "| " + row->model_id + " | " + format_fixed(row->s, 1, locale) + " | " +
               format_fixed(row->sr, 1, locale) + " | " +
               format_fixed(row->c, 1, locale) + " | " +
               format_fixed(row->m, 1, locale) + " | " +
               format_fixed(row->t, 1, locale) + " | $" +
               format_fixed(row->tc, 2, locale) + " |\n";
    }
    for (const RankedColumn& column : table.columns) {
        out += "\n## Ranking by " + column.metric + "\n\n";
        out += "| Position | Model | " + column.metric + " | Δ |\n";
        out += "| --- | --- | --- | --- |\n";
        for (size_t i = 0; i < column.entries.size(); ++i) {
            const RankedEntry& entry = column.entries[i];
            out += "| " + std::to_string(i + 1) + " | " + entry.model_id + " | " +
                   format_fixed(entry.value, 1, locale) + " | " +
                   delta_text(entry.delta, locale) + " |\n";
        }
    }
    return out;
}

std::string render_rank_csv(const std::vector<ScoreRow>& rows,
                            const RankingTable& table, Locale locale) {
    const char sep = locale == Locale::Pt ? ';' : ',';
    std::string out = "Model";
    for (const char* column : {"S", "SR", "C", "M", "T", "TC"}) {
        out += sep;
        out += column;
    }
    out += '\n';
    for (const ScoreRow* row : rows_by_score(rows)) {
        out += row->model_id;
        out += sep + format_fixed(row->s, 1, locale);
        out += sep + format_fixed(row->sr, 1, locale);
        out += sep + format_fixed(row->c, 1, locale);
        out += sep + format_fixed(row->m, 1, locale);
        out += sep + format_fixed(row->t, 1, locale);
        out += sep + format_fixed(row->tc, 2, locale);
        out += '\n';
    }
    out += '\n';
    out += std::string("Position") + sep + "Metric" + sep + "Model" + sep + "Value" +
           sep + "Delta\n";
    for (const RankedColumn& column : table.columns) {
        for (size_t i = 0; i < column.entries.size(); ++i) {
            const RankedEntry& entry = column.entries[i];
            out += std::to_string(i + 1);
            out += sep + column.metric;
            out += sep + entry.model_id;
            out += sep + format_fixed(entry.value, 1, locale);
            out += sep + delta_text(entry.delta, locale);
            out += '\n';
        }
    }
    return out;
}

} // namespace resttsl::metrics
