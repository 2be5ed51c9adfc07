#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "resttsl/config.hpp"
#include "resttsl/errors.hpp"
#include "resttsl/metrics.hpp"
#include "resttsl/pipeline.hpp"

namespace {

using namespace resttsl;

std::optional<std::string> opt_text(const std::string& text) {
    if (text.empty()) return std::nullopt;
    return text;
}

void print_issues(const std::vector<tsl::ValidationIssue>& issues,
                  const std::string& context) {
    for (const tsl::ValidationIssue& issue : issues) {
        std::cout << context << ": " << to_string(issue.severity) << " "
                  << to_string(issue.code);
        if (!issue.case_id.empty()) std::cout << " [" << issue.case_id << "]";
        std::cout << ": " << issue.message << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"REST API test generation pipeline and model evaluation"};
    app.require_subcommand(1);

    std::string config_path = "resttsl.yaml";
    std::string mode_text;
    std::string locale_text = "en";
    bool strict = false;
    bool force = false;
    int parallel = 1;
    app.add_option("--config", config_path, "Pipeline configuration file")
        ->capture_default_str();
    app.add_option("--mode", mode_text, "Override the run mode (live|record|replay|mock)");
    app.add_flag("--strict", strict, "Fail on error-severity validation issues");
    app.add_flag("--force", force, "Recompute artifacts even when they exist");
    app.add_option("--parallel", parallel, "Concurrent (model, project) pipelines")
        ->check(CLI::PositiveNumber);
    app.add_option("--locale", locale_text, "Report locale (en|pt)")
        ->capture_default_str();

    std::string model_id;
    std::string project_id;
    bool scaffold = false;

    CLI::App* cmd_gen_tsl =
        app.add_subcommand("gen-tsl", "Generate TSL documents from API specs");
    cmd_gen_tsl->add_option("--model", model_id, "Only this model id");
    cmd_gen_tsl->add_option("--project", project_id, "Only this project id");

    CLI::App* cmd_gen_tests =
        app.add_subcommand("gen-tests", "Generate test suites from TSL artifacts");
    cmd_gen_tests->add_option("--model", model_id, "Only this model id");
    cmd_gen_tests->add_option("--project", project_id, "Only this project id");
    cmd_gen_tests->add_flag("--scaffold", scaffold,
                            "Emit the deterministic scaffold instead of calling a model");

    CLI::App* cmd_derive = app.add_subcommand(
        "derive", "Derive a baseline TSL document with the category-partition method");
    cmd_derive->add_option("--project", project_id, "Only this project id");

    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Validate TSL artifacts against their API specs");
    cmd_validate->add_option("--model", model_id, "Only this model id");
    cmd_validate->add_option("--project", project_id, "Only this project id");

    CLI::App* cmd_score =
        app.add_subcommand("score", "Aggregate per-run metrics into model scores");
    CLI::App* cmd_rank =
        app.add_subcommand("rank", "Rank models and emit rank.md / rank.csv");
    CLI::App* cmd_replay =
        app.add_subcommand("replay", "Re-run generation from recorded cassettes");
    cmd_replay->add_option("--model", model_id, "Only this model id");
    cmd_replay->add_option("--project", project_id, "Only this project id");

    CLI11_PARSE(app, argc, argv);

    try {
        config::PipelineConfig config = config::load_config(config_path);
        pipeline::PipelineOptions options;
        options.strict = strict;
        options.force = force;
        options.parallel = parallel;
        options.scaffold = scaffold;
        options.locale = metrics::locale_from_string(locale_text);
        if (!mode_text.empty()) {
            options.mode_override = config::mode_from_string(mode_text);
        }
        if (cmd_replay->parsed()) options.mode_override = config::RunMode::Replay;
        pipeline::Pipeline pipeline(std::move(config), options);

        if (cmd_gen_tsl->parsed()) {
            bool strict_failure = pipeline.run_generation(false, opt_text(model_id),
                                                          opt_text(project_id));
            return strict_failure ? 2 : 0;
        }
        if (cmd_gen_tests->parsed()) {
            pipeline.run_generation(true, opt_text(model_id), opt_text(project_id));
            return 0;
        }
        if (cmd_replay->parsed()) {
            bool strict_failure = pipeline.run_generation(false, opt_text(model_id),
                                                          opt_text(project_id));
            pipeline.run_generation(true, opt_text(model_id), opt_text(project_id));
            return strict_failure ? 2 : 0;
        }
        if (cmd_derive->parsed()) {
            for (const config::ProjectConfig& project : pipeline.config().projects) {
                if (!project_id.empty() && project.project_id != project_id) continue;
                pipeline.derive(project.project_id);
            }
            return 0;
        }
        if (cmd_validate->parsed()) {
            bool any_errors = false;
            for (const gateway::ProviderConfig& model : pipeline.config().models) {
                if (!model_id.empty() && model.model_id != model_id) continue;
                for (const config::ProjectConfig& project : pipeline.config().projects) {
                    if (!project_id.empty() && project.project_id != project_id) continue;
                    std::vector<tsl::ValidationIssue> issues =
                        pipeline.validate(model.model_id, project.project_id);
                    print_issues(issues, model.model_id + "/" + project.project_id);
                    any_errors = any_errors || tsl::has_errors(issues);
                }
            }
            return any_errors ? 2 : 0;
        }
        if (cmd_score->parsed()) {
            for (const metrics::ScoreRow& row : pipeline.score()) {
                std::cout << row.model_id << ": S=" << metrics::format_fixed(row.s, 1)
                          << " SR=" << metrics::format_fixed(row.sr, 1)
                          << " C=" << metrics::format_fixed(row.c, 1)
                          << " M=" << metrics::format_fixed(row.m, 1)
                          << " T=" << metrics::format_fixed(row.t, 1)
                          << " TC=$" << metrics::format_fixed(row.tc, 2) << "\n";
            }
            return 0;
        }
        if (cmd_rank->parsed()) {
            pipeline.rank();
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pipeline::provider_exit(e) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
