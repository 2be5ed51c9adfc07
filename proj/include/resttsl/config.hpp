#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resttsl/gateway.hpp"
#include "resttsl/metrics.hpp"

namespace resttsl::config {

enum class RunMode { Live, Record, Replay, Mock };

RunMode mode_from_string(const std::string& text);
std::string_view to_string(RunMode mode);

struct ProjectConfig {
    std::string project_id;
    std::filesystem::path openapi_path;
};

struct ExamplePackPaths {
    std::filesystem::path openapi;
    std::filesystem::path tsl;
    std::filesystem::path tests;
};

/// Canned completion for mock mode. Exactly one of content/content_file is
/// set; stage selects the action prompt it answers, and fingerprint (when
/// set) pins the rule to one exact request.
struct MockResponseConfig {
    std::string stage;
    std::optional<std::string> fingerprint;
    std::string content;
    bool truncated = false;
};

struct PipelineConfig {
    std::vector<gateway::ProviderConfig> models;
    std::vector<ProjectConfig> projects;
    ExamplePackPaths example_pack;
    std::filesystem::path templates_dir;
    std::string prompt_language = "en";
    std::string framework_key = "xunit";
    metrics::Weights weights;
    int max_cases_per_segment = 15;
    RunMode mode = RunMode::Mock;
    std::filesystem::path run_root;
    std::vector<MockResponseConfig> mock_responses;

    const gateway::ProviderConfig& model(const std::string& model_id) const;
    const ProjectConfig& project(const std::string& project_id) const;
};

/// Loads the YAML pipeline configuration. Every relative path in the file is
/// resolved against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

} // namespace resttsl::config
