#include <atomic>
#include <cctype>
#include <iostream>
#include <mutex>
#include <thread>

#include "resttsl/derive.hpp"
#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"
#include "resttsl/openapi.hpp"
#include "resttsl/pipeline.hpp"

namespace resttsl::pipeline {

namespace {

std::mutex g_log_mutex;

bool is_provider_error(ErrorCode code) {
    switch (code) {
    case ErrorCode::AuthError:
    case ErrorCode::RateLimited:
    case ErrorCode::ProviderError:
    case ErrorCode::Timeout:
    case ErrorCode::Truncated:
    case ErrorCode::CassetteMiss:
    case ErrorCode::NoRuleMatched:
        return true;
    default:
        return false;
    }
}

Json script_to_json(const prompt::ConversationScript& script) {
    Json doc = Json::array();
    for (const prompt::ChatMessage& message : script.messages) {
        doc.push_back(gateway::message_to_json(message));
    }
    return doc;
}

prompt::PromptStage stage_from_config(const std::string& name) {
    return name == "generate_tsl" ? prompt::PromptStage::ActionGenerateTsl
                                  : prompt::PromptStage::ActionGenerateTests;
}

/// Models often wrap the requested document in a fenced code block; when the
/// first non-blank line opens a fence, the fenced body is the document.
std::string strip_leading_fence(const std::string& content) {
    size_t pos = 0;
    while (pos < content.size()) {
        size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        std::string_view line(content.data() + pos, eol - pos);
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) {
            pos = eol + 1;
            continue;
        }
        if (line.substr(first, 3) != "```") return content;
        size_t body = eol + 1;
        size_t scan = body;
        while (scan < content.size()) {
            size_t end = content.find('\n', scan);
            if (end == std::string::npos) end = content.size();
            std::string_view candidate(content.data() + scan, end - scan);
            size_t lead = candidate.find_first_not_of(" \t");
            if (lead != std::string_view::npos && candidate.substr(lead, 3) == "```") {
                return content.substr(body, scan - body);
            }
            scan = end + 1;
        }
        return content.substr(body);
    }
    return content;
}

} // namespace

bool provider_exit(const Error& error) { return is_provider_error(error.code()); }

std::string sanitize_path_component(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
            c == '.') {
            out += c;
        } else {
            out += '_';
        }
    }
    return out.empty() ? "_" : out;
}

RunPaths RunPaths::for_run(const std::filesystem::path& run_root,
                           const std::string& model_id, const std::string& project_id) {
    return RunPaths{run_root / sanitize_path_component(model_id) /
                    sanitize_path_component(project_id)};
}

Json issues_to_json(const std::vector<tsl::ValidationIssue>& issues) {
    Json doc = Json::array();
    for (const tsl::ValidationIssue& issue : issues) {
        Json row = Json::object();
        row["case_id"] = issue.case_id;
        row["severity"] = std::string(to_string(issue.severity));
        row["code"] = std::string(to_string(issue.code));
        row["message"] = issue.message;
        doc.push_back(std::move(row));
    }
    return doc;
}

Pipeline::Pipeline(config::PipelineConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(std::move(options)) {
    if (options_.parallel < 1) options_.parallel = 1;
}

config::RunMode Pipeline::effective_mode() const {
    return options_.mode_override.value_or(config_.mode);
}

RunPaths Pipeline::paths_for(const std::string& model_id,
                             const std::string& project_id) const {
    return RunPaths::for_run(config_.run_root, model_id, project_id);
}

void Pipeline::log_line(const std::string& text) const {
    std::ostream* out = options_.log != nullptr ? options_.log : &std::cerr;
    std::lock_guard<std::mutex> lock(g_log_mutex);
    *out << text << '\n';
}

std::shared_ptr<gateway::Provider> Pipeline::make_provider(
    const gateway::ProviderConfig& model, const RunPaths& paths,
    std::unique_ptr<gateway::Cassette>& recorder) const {
    switch (effective_mode()) {
    case config::RunMode::Mock: {
        std::vector<gateway::MockProvider::Rule> rules;
        for (const config::MockResponseConfig& mock : config_.mock_responses) {
            gateway::MockProvider::Rule rule;
            rule.stage = stage_from_config(mock.stage);
            rule.fingerprint = mock.fingerprint;
            rule.content = mock.content;
            rule.truncated = mock.truncated;
            rules.push_back(std::move(rule));
        }
        if (rules.empty()) {
            fail(ErrorCode::BadConfig, "mock mode needs mock_responses in the config");
        }
        return std::make_shared<gateway::MockProvider>(std::move(rules));
    }
    case config::RunMode::Replay: {
        if (!std::filesystem::exists(paths.cassette_file())) {
            fail(ErrorCode::BadConfig,
                 "replay mode requires a cassette at " + paths.cassette_file().string());
        }
        return std::make_shared<gateway::ReplayProvider>(
            gateway::Cassette::open(paths.cassette_file()));
    }
    case config::RunMode::Record:
    case config::RunMode::Live: {
        std::optional<std::string> key = gateway::api_key_from_env(model);
        if (!key) {
            fail(ErrorCode::AuthError,
                 "no API key: set " + gateway::api_key_variable(model));
        }
        if (effective_mode() == config::RunMode::Record) {
            recorder = std::make_unique<gateway::Cassette>(
                gateway::Cassette::open(paths.cassette_file()));
        }
        std::shared_ptr<gateway::Transport> transport =
            options_.transport_override != nullptr ? options_.transport_override
                                                   : gateway::make_http_transport();
        return std::make_shared<gateway::OpenAiChatProvider>(std::move(transport), *key);
    }
    }
    fail(ErrorCode::BadConfig, "unreachable mode");
}

void Pipeline::append_costs(const RunPaths& paths,
                            const gateway::CostLedger& ledger) const {
    std::vector<gateway::CostLedger::Entry> entries = ledger.entries();
    if (entries.empty()) return;
    Json doc = Json::object();
    doc["entries"] = Json::array();
    if (std::filesystem::exists(paths.costs_file())) {
        Json previous = Json::parse(fsutil::read_text(paths.costs_file()), nullptr, false);
        if (previous.is_object() && previous.contains("entries") &&
            previous["entries"].is_array()) {
            doc["entries"] = previous["entries"];
        }
    }
    std::int64_t total = 0;
    for (const Json& row : doc["entries"]) {
        total += row.value("cost_pico_usd", std::int64_t{0});
    }
    for (const gateway::CostLedger::Entry& entry : entries) {
        Json row = Json::object();
        row["model_id"] = entry.model_id;
        row["project_id"] = entry.project_id;
        row["stage"] = entry.stage;
        row["input_tokens"] = entry.input_tokens;
        row["output_tokens"] = entry.output_tokens;
        row["cost_pico_usd"] = entry.cost_pico_usd;
        total += entry.cost_pico_usd;
        doc["entries"].push_back(std::move(row));
    }
    doc["total_pico_usd"] = total;
    doc["total_usd"] = static_cast<double>(total) / 1e12;
    fsutil::write_text_atomic(paths.costs_file(), doc.dump(2) + "\n");
}

StageResult Pipeline::gen_tsl(const std::string& model_id, const std::string& project_id) {
    const gateway::ProviderConfig& model = config_.model(model_id);
    const config::ProjectConfig& project = config_.project(project_id);
    RunPaths paths = paths_for(model_id, project_id);

    StageResult result;
    if (!options_.force && std::filesystem::exists(paths.tsl_file())) {
        log_line("gen-tsl " + model_id + "/" + project_id + ": exists, skipping");
        result.skipped = true;
        return result;
    }
    if (config_.example_pack.openapi.empty()) {
        fail(ErrorCode::BadConfig, "config lacks an example_pack section");
    }

    openapi::ApiDocument api = openapi::parse_openapi_file(project.openapi_path);
    prompt::TemplateSet templates =
        prompt::TemplateSet::load(config_.templates_dir, config_.prompt_language);
    codegen::FrameworkTemplates framework =
        codegen::FrameworkTemplates::load(config_.templates_dir, config_.framework_key);
    prompt::ExamplePack pack =
        prompt::ExamplePack::load(config_.example_pack.openapi, config_.example_pack.tsl,
                                  config_.example_pack.tests);
    prompt::PromptBuilder builder(templates, framework.label);
    prompt::ConversationScript script = builder.assemble_generate_tsl(pack, api);
    fsutil::write_text_atomic(paths.prompts_dir() / "generate_tsl.json",
                              script_to_json(script).dump(2) + "\n");

    std::unique_ptr<gateway::Cassette> recorder;
    std::shared_ptr<gateway::Provider> provider = make_provider(model, paths, recorder);
    gateway::CostLedger ledger;
    gateway::Gateway gw(provider, model, options_.retry, &ledger, recorder.get());
    gateway::Completion completion = gw.send(script, project_id);

    fsutil::write_text_atomic(paths.responses_dir() / "generate_tsl.txt",
                              completion.content);
    tsl::TslDocument doc = tsl::parse_tsl(strip_leading_fence(completion.content));
    result.issues = tsl::validate_against_spec(doc, api);
    fsutil::write_text_atomic(paths.issues_file(),
                              issues_to_json(result.issues).dump(2) + "\n");
    fsutil::write_text_atomic(paths.tsl_file(), tsl::serialize_tsl(doc));
    append_costs(paths, ledger);
    log_line("gen-tsl " + model_id + "/" + project_id + ": " +
             std::to_string(doc.cases.size()) + " case(s), " +
             std::to_string(result.issues.size()) + " issue(s)");
    return result;
}

StageResult Pipeline::gen_tests(const std::string& model_id,
                                const std::string& project_id) {
    if (!options_.scaffold) config_.model(model_id);
    config_.project(project_id);
    RunPaths paths = paths_for(model_id, project_id);

    StageResult result;
    if (!options_.force && std::filesystem::exists(paths.manifest_file())) {
        log_line("gen-tests " + model_id + "/" + project_id + ": exists, skipping");
        result.skipped = true;
        return result;
    }
    if (!std::filesystem::exists(paths.tsl_file())) {
        fail(ErrorCode::IoError, "no TSL artifact at " + paths.tsl_file().string() +
                                     "; run gen-tsl first");
    }
    tsl::TslDocument doc = tsl::parse_tsl(fsutil::read_text(paths.tsl_file()));
    codegen::FrameworkTemplates framework =
        codegen::FrameworkTemplates::load(config_.templates_dir, config_.framework_key);

    codegen::TestSuite suite;
    if (options_.scaffold) {
        suite = codegen::scaffold_fallback_tests(doc, framework);
    } else {
        const gateway::ProviderConfig& model = config_.model(model_id);
        prompt::TemplateSet templates =
            prompt::TemplateSet::load(config_.templates_dir, config_.prompt_language);
        prompt::ExamplePack pack = prompt::ExamplePack::load(config_.example_pack.openapi,
                                                             config_.example_pack.tsl,
                                                             config_.example_pack.tests);
        prompt::PromptBuilder builder(templates, framework.label);
        prompt::SegmentPlan plan =
            prompt::plan_segments(doc, config_.max_cases_per_segment);

        std::unique_ptr<gateway::Cassette> recorder;
        std::shared_ptr<gateway::Provider> provider = make_provider(model, paths, recorder);
        gateway::CostLedger ledger;
        gateway::Gateway gw(provider, model, options_.retry, &ledger, recorder.get());

        std::vector<std::vector<codegen::TestFile>> extracted;
        for (size_t i = 0; i < plan.segments.size(); ++i) {
            const prompt::Segment& segment = plan.segments[i];
            prompt::ConversationScript script =
                builder.assemble_tests_segment(pack, doc, segment);
            std::string tag = "generate_tests_" + std::to_string(i + 1);
            fsutil::write_text_atomic(paths.prompts_dir() / (tag + ".json"),
                                      script_to_json(script).dump(2) + "\n");
            gateway::Completion completion = gw.send(script, project_id);
            fsutil::write_text_atomic(paths.responses_dir() / (tag + ".txt"),
                                      completion.content);
            extracted.push_back(codegen::extract_test_code(completion, segment).files);
        }
        suite = codegen::merge_segments(extracted, doc, framework.key);
        append_costs(paths, ledger);
    }

    for (const codegen::TestFile& file : suite.files) {
        fsutil::write_text_atomic(paths.tests_dir() / file.file_name, file.content);
    }
    fsutil::write_text_atomic(paths.manifest_file(),
                              codegen::manifest_to_json(suite).dump(2) + "\n");
    log_line("gen-tests " + model_id + "/" + project_id + ": " +
             std::to_string(suite.files.size()) + " file(s), " +
             std::to_string(suite.manifest.size()) + " test(s)");
    return result;
}

void Pipeline::derive(const std::string& project_id) {
    const config::ProjectConfig& project = config_.project(project_id);
    openapi::ApiDocument api = openapi::parse_openapi_file(project.openapi_path);
    if (api.endpoints.empty()) {
        fail(ErrorCode::EmptyDocument,
             "spec declares no operations: " + project.openapi_path.string());
    }
    tsl::TslDocument doc = derive::derive_cases_cp(api);
    RunPaths paths = RunPaths::for_run(config_.run_root, "derived", project_id);
    fsutil::write_text_atomic(paths.tsl_file(), tsl::serialize_tsl(doc));
    Json marker = Json::object();
    marker["origin"] = "category-partition";
    marker["llm"] = false;
    marker["cases"] = doc.cases.size();
    fsutil::write_text_atomic(paths.provenance_file(), marker.dump(2) + "\n");
    log_line("derive " + project_id + ": " + std::to_string(doc.cases.size()) +
             " case(s)");
}

std::vector<tsl::ValidationIssue> Pipeline::validate(const std::string& model_id,
                                                     const std::string& project_id) {
    const config::ProjectConfig& project = config_.project(project_id);
    RunPaths paths = paths_for(model_id, project_id);
    if (!std::filesystem::exists(paths.tsl_file())) {
        fail(ErrorCode::IoError, "no TSL artifact at " + paths.tsl_file().string());
    }
    tsl::TslDocument doc = tsl::parse_tsl(fsutil::read_text(paths.tsl_file()));
    openapi::ApiDocument api = openapi::parse_openapi_file(project.openapi_path);
    std::vector<tsl::ValidationIssue> issues = tsl::validate_against_spec(doc, api);
    fsutil::write_text_atomic(paths.issues_file(), issues_to_json(issues).dump(2) + "\n");
    return issues;
}

std::vector<metrics::RunMetrics> Pipeline::collect_runs() {
    std::vector<metrics::RunMetrics> runs;
    for (const gateway::ProviderConfig& model : config_.models) {
        for (const config::ProjectConfig& project : config_.projects) {
            RunPaths paths = paths_for(model.model_id, project.project_id);
            metrics::RunMetrics run;
            if (!options_.force && std::filesystem::exists(paths.metrics_file())) {
                run = metrics::load_metrics_json(paths.metrics_file());
            } else {
                metrics::IngestResult ingested = metrics::ingest_run_report(
                    paths.reports_dir() / "tests.json",
                    paths.reports_dir() / "coverage.json",
                    paths.reports_dir() / "mutation.json");
                run = ingested.metrics;
                for (const std::string& warning : ingested.warnings) {
                    log_line("score " + model.model_id + "/" + project.project_id +
                             ": " + warning);
                }
                if (run.total_cost == 0.0 &&
                    std::filesystem::exists(paths.costs_file())) {
                    Json costs =
                        Json::parse(fsutil::read_text(paths.costs_file()), nullptr, false);
                    if (costs.is_object()) {
                        run.total_cost = costs.value("total_usd", 0.0);
                    }
                }
                fsutil::write_text_atomic(paths.metrics_file(),
                                          metrics::metrics_to_json(run).dump(2) + "\n");
            }
            run.model_id = model.model_id;
            run.project_id = project.project_id;
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

std::vector<metrics::ScoreRow> Pipeline::score() {
    std::vector<metrics::RunMetrics> runs = collect_runs();
    std::vector<metrics::ScoreRow> rows;
    for (const gateway::ProviderConfig& model : config_.models) {
        std::vector<metrics::RunMetrics> own;
        for (const metrics::RunMetrics& run : runs) {
            if (run.model_id == model.model_id) own.push_back(run);
        }
        rows.push_back(metrics::aggregate_projects(own, config_.weights));
    }
    return rows;
}

metrics::RankingTable Pipeline::rank() {
    std::vector<metrics::ScoreRow> rows = score();
    metrics::RankingTable table = metrics::rank_models(rows);
    std::string markdown = metrics::render_rank_markdown(rows, table, options_.locale);
    std::filesystem::path failures_file = config_.run_root / "failures.json";
    if (std::filesystem::exists(failures_file)) {
        metrics::FailureTaxonomy taxonomy =
            metrics::tally_failures(metrics::load_failures_json(failures_file));
        markdown += "\n## Failure Taxonomy\n\n| Category | Count |\n| --- | --- |\n";
        for (const auto& [category, count] : taxonomy.counts) {
            markdown += "| " + std::string(to_string(category)) + " | " +
                        std::to_string(count) + " |\n";
        }
        markdown += "| Total | " + std::to_string(taxonomy.total) + " |\n";
    }
    fsutil::write_text_atomic(config_.run_root / "rank.md", markdown);
    fsutil::write_text_atomic(config_.run_root / "rank.csv",
                              metrics::render_rank_csv(rows, table, options_.locale));
    log_line("rank: wrote " + (config_.run_root / "rank.md").string() + " and rank.csv");
    return table;
}

bool Pipeline::run_generation(bool tests_stage,
                              const std::optional<std::string>& model_filter,
                              const std::optional<std::string>& project_filter) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::string> model_ids;
    bool free_model = tests_stage && options_.scaffold && model_filter.has_value();
    if (free_model) {
        model_ids.push_back(*model_filter);
    } else {
        for (const gateway::ProviderConfig& model : config_.models) {
            if (model_filter && model.model_id != *model_filter) continue;
            model_ids.push_back(model.model_id);
        }
    }
    for (const std::string& model_id : model_ids) {
        for (const config::ProjectConfig& project : config_.projects) {
            if (project_filter && project.project_id != *project_filter) continue;
            pairs.emplace_back(model_id, project.project_id);
        }
    }
    if (pairs.empty()) {
        fail(ErrorCode::BadConfig, "no (model, project) pair matches the filters");
    }

    std::atomic<size_t> next{0};
    std::atomic<bool> strict_failure{false};
    std::vector<std::exception_ptr> errors(pairs.size());
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < pairs.size(); i = next.fetch_add(1)) {
            try {
                StageResult result = tests_stage
                                         ? gen_tests(pairs[i].first, pairs[i].second)
                                         : gen_tsl(pairs[i].first, pairs[i].second);
                if (!tests_stage && options_.strict && tsl::has_errors(result.issues)) {
                    strict_failure = true;
                    log_line("gen-tsl " + pairs[i].first + "/" + pairs[i].second +
                             ": error-severity validation issues");
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    int workers = std::min<int>(options_.parallel, static_cast<int>(pairs.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
        for (std::thread& thread : threads) thread.join();
    }

    std::exception_ptr first;
    for (const std::exception_ptr& error : errors) {
        if (!error) continue;
        if (!first) first = error;
        try {
            std::rethrow_exception(error);
        } catch (const Error& e) {
            if (is_provider_error(e.code())) first = error;
        } catch (...) {
        }
    }
    if (first) std::rethrow_exception(first);
    return strict_failure.load();
}

} // namespace resttsl::pipeline
