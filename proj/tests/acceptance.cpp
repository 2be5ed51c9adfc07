// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is independent and keeps running after a failure
// so the report is complete.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "resttsl/codegen.hpp"
#include "resttsl/config.hpp"
#include "resttsl/derive.hpp"
#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"
#include "resttsl/gateway.hpp"
#include "resttsl/metrics.hpp"
#include "resttsl/openapi.hpp"
#include "resttsl/pipeline.hpp"
#include "resttsl/prompt.hpp"
#include "resttsl/tsl.hpp"

#include "gen_random.hpp"
#include "golden_render.hpp"
#include "testutil.hpp"

using resttsl::Json;
namespace codegen = resttsl::codegen;
namespace config = resttsl::config;
namespace derive = resttsl::derive;
namespace fsutil = resttsl::fsutil;
namespace gateway = resttsl::gateway;
namespace metrics = resttsl::metrics;
namespace openapi = resttsl::openapi;
namespace pipeline = resttsl::pipeline;
namespace prompt = resttsl::prompt;
namespace tsl = resttsl::tsl;

namespace {

int failures = 0;

void criterion(const std::string& name, const std::function<void()>& body) {
    try {
        body();
        std::cout << "PASS: " << name << "\n";
    } catch (const std::exception& e) {
        ++failures;
        std::cout << "FAIL: " << name << " (" << e.what() << ")\n";
    }
}

void expect(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
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

std::vector<metrics::ScoreRow> reference_rows() {
    std::vector<metrics::ScoreRow> rows;
    for (const ReferenceModel& model : reference_models()) {
        rows.push_back({model.model_id, model.s, model.sr, model.c, model.m, model.t,
                        model.tc});
    }
    return rows;
}

void check_scores() {
    std::vector<ReferenceModel> models = reference_models();
    expect(models.size() == 8, "expected 8 reference models");
    for (const ReferenceModel& model : models) {
        double recomputed = metrics::calculated_score(model.sr, model.c, model.m);
        expect(std::fabs(recomputed - model.s) <= 0.1,
               model.model_id + " score off by more than 0.1");
    }
    expect(metrics::format_fixed(metrics::calculated_score(98.0, 59.3, 32.9), 1) == "63.4",
           "(98.0, 59.3, 32.9) must print as 63.4");
}

void check_ranking() {
    metrics::RankingTable table = metrics::rank_models(reference_rows());
    Json expected =
        Json::parse(testutil::read_file(testutil::fixture("reference/rank_expected.json")));
    for (const std::string metric : {"S", "SR", "C", "M"}) {
        const metrics::RankedColumn& column = table.column(metric);
        const Json& want = expected[metric];
        expect(column.entries.size() == want["order"].size(),
               metric + ": unexpected row count");
        for (size_t i = 0; i < column.entries.size(); ++i) {
            expect(column.entries[i].model_id == want["order"][i].get<std::string>(),
                   metric + ": order mismatch at position " + std::to_string(i + 1));
        }
        expect(!column.entries[0].delta.has_value(), metric + ": leader must have no delta");
        for (size_t i = 1; i < column.entries.size(); ++i) {
            expect(column.entries[i].delta.has_value(),
                   metric + ": missing delta at position " + std::to_string(i + 1));
            double printed = want["deltas"][i - 1].get<double>();
            expect(std::fabs(*column.entries[i].delta - printed) <= 0.1,
                   metric + ": delta off by more than 0.1 at position " +
                       std::to_string(i + 1));
        }
    }
}

void check_failure_rates() {
    std::uint64_t pooled_total = 0;
    std::uint64_t pooled_failed = 0;
    for (const ReferenceModel& model : reference_models()) {
        std::string got =
            metrics::format_fixed(metrics::failed_pct(model.total_tests, model.failed_tests), 1);
        std::string want = metrics::format_fixed(model.failed_pct, 1);
        expect(got == want, model.model_id + " failure rate prints " + got + ", wants " + want);
        pooled_total += model.total_tests;
        pooled_failed += model.failed_tests;
    }
    expect(pooled_total == 1635 && pooled_failed == 39, "pooled totals must be 39/1635");
    double pooled = metrics::failed_pct(pooled_total, pooled_failed);
    expect(std::fabs(pooled - 2.38) <= 0.01, "pooled rate must be 2.38 within 0.01");

    metrics::FailureTaxonomy taxonomy = metrics::tally_failures(
        metrics::load_failures_json(testutil::fixture("reference/failures.json")));
    expect(taxonomy.total == 39, "failure taxonomy must total 39");
    const std::map<metrics::FailureCategory, std::uint64_t> expected = {
        {metrics::FailureCategory::PropertyLength, 15},
        {metrics::FailureCategory::Misinterpretation, 7},
        {metrics::FailureCategory::Authentication, 5},
        {metrics::FailureCategory::PropertyRequirement, 5},
        {metrics::FailureCategory::RequiredCharacters, 4},
        {metrics::FailureCategory::JsonDeserialization, 3},
    };
    for (const auto& [category, count] : expected) {
        expect(taxonomy.counts.at(category) == count,
               std::string(metrics::to_string(category)) + " count mismatch");
    }
}

void check_round_trip() {
    std::string fixture_bytes =
        testutil::read_file(testutil::templates_dir() / "example_pack" / "accounts.tsl.yaml");
    tsl::TslDocument fixture_doc = tsl::parse_tsl(fixture_bytes);
    expect(tsl::serialize_tsl(fixture_doc) == fixture_bytes,
           "example document must reserialize byte-identically");
    expect(tsl::parse_tsl(tsl::serialize_tsl(fixture_doc)) == fixture_doc,
           "example document must round-trip");
    expect(tsl::serialize_tsl(fixture_doc).find("token: is string not empty") !=
               std::string::npos,
           "'is string not empty' must survive verbatim");

    testgen::RandomTsl gen(0xacce97edULL);
    for (int trial = 0; trial < 1000; ++trial) {
        tsl::TslDocument doc = gen.document();
        std::string once = tsl::serialize_tsl(doc);
        tsl::TslDocument reparsed = tsl::parse_tsl(once);
        if (!(reparsed == doc)) {
            throw std::runtime_error("random document " + std::to_string(trial) +
                                     " failed the typed round trip");
        }
        expect(tsl::serialize_tsl(reparsed) == once,
               "random document " + std::to_string(trial) + " is not byte-stable");
    }
}

std::string quoted(const std::filesystem::path& path) {
    return "\"" + path.string() + "\"";
}

void check_pipeline_offline() {
    auto started = std::chrono::steady_clock::now();

    testutil::TempDir tmp;
    std::filesystem::path pack = testutil::templates_dir() / "example_pack";
    std::string text =
        "mode: mock\n"
        "run_root: runs\n"
        "templates_dir: " + quoted(testutil::templates_dir()) + "\n"
        "example_pack:\n"
        "  openapi: " + quoted(pack / "accounts_api.json") + "\n"
        "  tsl: " + quoted(pack / "accounts.tsl.yaml") + "\n"
        "  tests: " + quoted(pack / "accounts_tests.cs") + "\n"
        "models:\n"
        "  - provider_key: mock\n"
        "    model_id: mock-model\n"
        "projects:\n"
        "  - project_id: accounts\n"
        "    openapi: " + quoted(pack / "accounts_api.json") + "\n"
        "mock_responses:\n"
        "  - stage: generate_tsl\n"
        "    content_file: " + quoted(testutil::fixture("mock/tsl_completion.txt")) + "\n"
        "  - stage: generate_tests\n"
        "    content_file: " + quoted(testutil::fixture("mock/tests_completion.txt")) + "\n";
    std::filesystem::path config_path = tmp.path / "config.yaml";
    fsutil::write_text_atomic(config_path, text);

    auto failing = std::make_shared<gateway::FailingTransport>();
    std::ostringstream log;
    pipeline::PipelineOptions options;
    options.transport_override = failing;
    options.log = &log;
    pipeline::Pipeline pipe(config::load_config(config_path), options);
    pipe.gen_tsl("mock-model", "accounts");
    pipe.gen_tests("mock-model", "accounts");

    pipeline::RunPaths paths = pipe.paths_for("mock-model", "accounts");
    tsl::TslDocument doc = tsl::parse_tsl(testutil::read_file(paths.tsl_file()));
    Json manifest = Json::parse(testutil::read_file(paths.manifest_file()));
    expect(manifest.size() == doc.cases.size(), "manifest must have one entry per case");
    std::map<std::string, int> tests_per_file;
    for (const tsl::TslCase& c : doc.cases) {
        expect(manifest.contains(c.id), "manifest lacks case " + c.id);
        std::string name = manifest[c.id]["test_name"].get<std::string>();
        expect(name.rfind(c.id, 0) == 0, "test name for " + c.id + " lacks its id prefix");
        ++tests_per_file[manifest[c.id]["file"].get<std::string>()];
    }
    for (const auto& [file_name, test_count] : tests_per_file) {
        std::string content = testutil::read_file(paths.tests_dir() / file_name);
        for (const char* marker : {"// Arrange", "// Act", "// Assert"}) {
            int seen = 0;
            for (size_t pos = content.find(marker); pos != std::string::npos;
                 pos = content.find(marker, pos + 1)) {
                ++seen;
            }
            expect(seen == test_count, file_name + ": marker " + marker + " appears " +
                                           std::to_string(seen) + " time(s), wants " +
                                           std::to_string(test_count));
        }
    }
    expect(failing->calls() == 0, "offline run must not open network connections");

    auto elapsed = std::chrono::steady_clock::now() - started;
    expect(elapsed < std::chrono::seconds(5), "offline pipeline must finish within 5 s");
}

std::vector<std::string> oracle_segment_order(const tsl::TslDocument& doc) {
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::string>> ids_by_group;
    for (const tsl::TslCase& c : doc.cases) {
        if (ids_by_group.find(c.group) == ids_by_group.end()) group_order.push_back(c.group);
        ids_by_group[c.group].push_back(c.id);
    }
    std::vector<std::string> order;
    for (const std::string& group : group_order) {
        for (const std::string& id : ids_by_group[group]) order.push_back(id);
    }
    return order;
}

void check_segmentation() {
    prompt::TemplateSet templates = prompt::TemplateSet::load(testutil::templates_dir(), "en");
    prompt::PromptBuilder builder(templates, "xUnit (.NET)");

    testgen::RandomTsl gen(0x5e97e9a1ULL);
    std::mt19937_64 rng(0x5e97e9a2ULL);
    for (int trial = 0; trial < 1000; ++trial) {
        tsl::TslDocument doc = gen.document(200, 10);
        if (doc.cases.empty()) continue;
        int cap = static_cast<int>(rng() % 20) + 1;
        prompt::SegmentPlan plan = prompt::plan_segments(doc, cap);

        std::vector<std::string> flattened;
        for (const prompt::Segment& segment : plan.segments) {
            expect(!segment.case_ids.empty() &&
                       segment.case_ids.size() <= static_cast<size_t>(cap),
                   "segment size out of bounds in trial " + std::to_string(trial));
            flattened.insert(flattened.end(), segment.case_ids.begin(),
                             segment.case_ids.end());
        }
        expect(flattened == oracle_segment_order(doc),
               "segments do not partition the document in trial " + std::to_string(trial));

        std::set<std::string> doc_ids;
        for (const tsl::TslCase& c : doc.cases) doc_ids.insert(c.id);
        std::vector<prompt::ChatMessage> prompts = builder.build_action_tests_prompts(doc, plan);
        expect(prompts.size() == plan.segments.size(),
               "one action prompt per segment in trial " + std::to_string(trial));
        for (size_t i = 0; i < prompts.size(); ++i) {
            std::set<std::string> mentioned;
            for (const std::string& id : codegen::case_ids_in_text(prompts[i].content)) {
                if (doc_ids.count(id) != 0) mentioned.insert(id);
            }
            std::set<std::string> segment_ids(plan.segments[i].case_ids.begin(),
                                              plan.segments[i].case_ids.end());
            expect(mentioned == segment_ids,
                   "prompt ids differ from segment ids in trial " + std::to_string(trial));
        }
    }
}

void check_deriver() {
    std::filesystem::path fixture = testutil::fixture("openapi/secured_boundary.json");

    // Brute-force enumeration straight from the raw JSON constraints: one
    // nominal frame, one frame per declared constraint, one auth frame.
    Json raw = Json::parse(testutil::read_file(fixture));
    const Json& field = raw["components"]["schemas"]["Item"]["properties"]["name"];
    const int min_length = field["minLength"].get<int>();
    const int max_length = field["maxLength"].get<int>();
    const bool required =
        raw["components"]["schemas"]["Item"]["required"] == Json::array({"name"});
    const bool secured = raw["paths"]["/api/items"]["post"].contains("security");
    const size_t expected_cases = 1 + 1 + 1 + (required ? 1 : 0) + (secured ? 1 : 0);

    openapi::ApiDocument api = openapi::parse_openapi_file(fixture);
    tsl::TslDocument doc = derive::derive_cases_cp(api);
    expect(doc.cases.size() == expected_cases,
           "deriver must emit exactly one case per enumerated frame");

    auto body_name_length = [](const tsl::TslCase& c) -> int {
        if (!c.request_body || !c.request_body->contains("name")) return -1;
        if (!(*c.request_body)["name"].is_string()) return -1;
        return static_cast<int>((*c.request_body)["name"].get<std::string>().size());
    };
    bool saw_nominal = false, saw_below = false, saw_above = false;
    bool saw_missing = false, saw_unauthenticated = false;
    for (const tsl::TslCase& c : doc.cases) {
        int length = body_name_length(c);
        if (c.expected_response.status_code == 401) {
            saw_unauthenticated = true;
            bool no_credentials = false;
            for (const std::string& p : c.preconditions) {
                if (p.find("without authentication") != std::string::npos) {
                    no_credentials = true;
                }
            }
            expect(no_credentials, "401 case must state the missing credentials");
        } else if (c.request_body && !c.request_body->contains("name")) {
            saw_missing = true;
            expect(c.expected_response.status_code / 100 == 4,
                   "missing-required case must expect a client error");
        } else if (length == min_length - 1) {
            saw_below = true;
            expect(c.expected_response.status_code / 100 == 4,
                   "below-minimum case must expect a client error");
        } else if (length == max_length + 1) {
            saw_above = true;
        } else if (length >= min_length && length <= max_length) {
            saw_nominal = true;
            expect(c.expected_response.status_code == 201,
                   "nominal case must expect the declared success status");
        }
    }
    expect(saw_below, "no case with length " + std::to_string(min_length - 1));
    expect(saw_above, "no case with length " + std::to_string(max_length + 1));
    expect(saw_missing == required, "missing-required case mismatch");
    expect(saw_unauthenticated == secured, "unauthenticated case mismatch");
    expect(saw_nominal, "no nominal case within bounds");

    std::string first = tsl::serialize_tsl(doc);
    std::string second =
        tsl::serialize_tsl(derive::derive_cases_cp(openapi::parse_openapi_file(fixture)));
    expect(first == second, "deriver output must be byte-identical across runs");
}

void check_goldens() {
    for (const std::string language : {"en", "pt"}) {
        std::filesystem::path golden =
            testutil::source_root() / "tests" / "goldens" / ("prompts_" + language + ".txt");
        expect(std::filesystem::exists(golden), golden.string() + " is missing");
        expect(testgolden::golden_text(language) == testutil::read_file(golden),
               language + " prompt assembly differs from the checked-in golden");
    }
}

} // namespace

int main() {
    criterion("score reproduction", check_scores);
    criterion("ranking reproduction", check_ranking);
    criterion("failure-rate reproduction", check_failure_rates);
    criterion("tsl round-trip", check_round_trip);
    criterion("offline pipeline end-to-end", check_pipeline_offline);
    criterion("segmentation properties", check_segmentation);
    criterion("category-partition deriver oracle", check_deriver);
    criterion("prompt determinism goldens", check_goldens);

    if (failures != 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 8 criteria passed\n";
    return 0;
}
