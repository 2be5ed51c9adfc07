#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "resttsl/codegen.hpp"
#include "resttsl/config.hpp"
#include "resttsl/errors.hpp"
#include "resttsl/gateway.hpp"
#include "resttsl/metrics.hpp"
#include "resttsl/tsl.hpp"

namespace resttsl::pipeline {

/// Artifact layout for one (model, project) run under the configured run
/// root: runs/<model>/<project>/.
struct RunPaths {
    std::filesystem::path root;

    static RunPaths for_run(const std::filesystem::path& run_root,
                            const std::string& model_id, const std::string& project_id);

    std::filesystem::path prompts_dir() const { return root / "prompts"; }
    std::filesystem::path responses_dir() const { return root / "responses"; }
    std::filesystem::path cassette_file() const {
        return root / "cassettes" / "session.jsonl";
    }
    std::filesystem::path tsl_file() const { return root / "tsl.tsl.yaml"; }
    std::filesystem::path tests_dir() const { return root / "tests"; }
    std::filesystem::path manifest_file() const { return tests_dir() / "manifest.json"; }
    std::filesystem::path metrics_file() const { return root / "metrics.json"; }
    std::filesystem::path issues_file() const { return root / "issues.json"; }
    std::filesystem::path costs_file() const { return root / "costs.json"; }
    std::filesystem::path provenance_file() const { return root / "provenance.json"; }
    std::filesystem::path reports_dir() const { return root / "reports"; }
};

std::string sanitize_path_component(const std::string& text);

struct PipelineOptions {
    bool strict = false;
    bool force = false;
    int parallel = 1;
    bool scaffold = false;
    metrics::Locale locale = metrics::Locale::En;
    std::optional<config::RunMode> mode_override;
    /// Used by live/record providers instead of a real HTTP transport;
    /// offline tests inject a FailingTransport and assert zero calls.
    std::shared_ptr<gateway::Transport> transport_override;
    gateway::RetryPolicy retry;
    std::ostream* log = nullptr;
};

struct StageResult {
    bool skipped = false;
    std::vector<tsl::ValidationIssue> issues;
};

class Pipeline {
public:
    Pipeline(config::PipelineConfig config, PipelineOptions options = {});

    StageResult gen_tsl(const std::string& model_id, const std::string& project_id);
    StageResult gen_tests(const std::string& model_id, const std::string& project_id);
    void derive(const std::string& project_id);
    std::vector<tsl::ValidationIssue> validate(const std::string& model_id,
                                               const std::string& project_id);
    std::vector<metrics::RunMetrics> collect_runs();
    std::vector<metrics::ScoreRow> score();
    metrics::RankingTable rank();

    /// Runs a stage over every configured (model, project) pair matching the
    /// filters, honoring the parallel option. Returns true when any pair had
    /// error-severity validation issues (gen-tsl under --strict).
    bool run_generation(bool tests_stage, const std::optional<std::string>& model_filter,
                        const std::optional<std::string>& project_filter);

    config::RunMode effective_mode() const;
    const config::PipelineConfig& config() const { return config_; }
    RunPaths paths_for(const std::string& model_id, const std::string& project_id) const;

private:
    struct SendContext;

    std::shared_ptr<gateway::Provider> make_provider(
        const gateway::ProviderConfig& model, const RunPaths& paths,
        std::unique_ptr<gateway::Cassette>& recorder) const;
    void append_costs(const RunPaths& paths, const gateway::CostLedger& ledger) const;
    void log_line(const std::string& text) const;

    config::PipelineConfig config_;
    PipelineOptions options_;
};

Json issues_to_json(const std::vector<tsl::ValidationIssue>& issues);

/// True when the error should map to the provider-outage exit code (3)
/// rather than the validation exit code (2).
bool provider_exit(const Error& error);

} // namespace resttsl::pipeline
