#include <yaml-cpp/yaml.h>

#include "resttsl/config.hpp"
#include "resttsl/errors.hpp"
#include "resttsl/fsutil.hpp"

namespace resttsl::config {

namespace {

std::string require_string(const YAML::Node& node, const char* field,
                           const char* context) {
    const YAML::Node value = node[field];
    if (!value || !value.IsScalar()) {
        fail(ErrorCode::BadConfig,
             std::string(context) + " is missing scalar field '" + field + "'");
    }
    return value.as<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& relative) {
    std::filesystem::path p(relative);
    return p.is_absolute() ? p : base / p;
}

gateway::ProviderConfig parse_model(const YAML::Node& node) {
    gateway::ProviderConfig model;
    model.provider_key = require_string(node, "provider_key", "model entry");
    model.model_id = require_string(node, "model_id", "model entry");
    if (node["endpoint_url"]) model.endpoint_url = node["endpoint_url"].as<std::string>();
    if (node["temperature"]) model.temperature = node["temperature"].as<double>();
    if (node["seed"]) model.seed = node["seed"].as<std::int64_t>();
    if (node["max_output_tokens"]) {
        model.max_output_tokens = node["max_output_tokens"].as<int>();
    }
    if (node["price_input_per_million"]) {
        model.price_input_per_million = node["price_input_per_million"].as<double>();
    }
    if (node["price_output_per_million"]) {
        model.price_output_per_million = node["price_output_per_million"].as<double>();
    }
    if (node["timeout_seconds"]) model.timeout_seconds = node["timeout_seconds"].as<double>();
    if (node["max_retries"]) model.max_retries = node["max_retries"].as<int>();
    return model;
}

MockResponseConfig parse_mock_response(const YAML::Node& node,
                                       const std::filesystem::path& base) {
    MockResponseConfig mock;
    mock.stage = require_string(node, "stage", "mock_responses entry");
    if (mock.stage != "generate_tsl" && mock.stage != "generate_tests") {
        fail(ErrorCode::BadConfig, "mock_responses stage must be generate_tsl or "
                                   "generate_tests, got '" +
                                       mock.stage + "'");
    }
    if (node["fingerprint"]) mock.fingerprint = node["fingerprint"].as<std::string>();
    if (node["truncated"]) mock.truncated = node["truncated"].as<bool>();
    const bool has_inline = static_cast<bool>(node["content"]);
    const bool has_file = static_cast<bool>(node["content_file"]);
    if (has_inline == has_file) {
        fail(ErrorCode::BadConfig,
             "mock_responses entry needs exactly one of content/content_file");
    }
    mock.content = has_inline
                       ? node["content"].as<std::string>()
                       : fsutil::read_text(resolve(base, node["content_file"].as<std::string>()));
    return mock;
}

} // namespace

RunMode mode_from_string(const std::string& text) {
    if (text == "live") return RunMode::Live;
    if (text == "record") return RunMode::Record;
    if (text == "replay") return RunMode::Replay;
    if (text == "mock") return RunMode::Mock;
    fail(ErrorCode::BadConfig,
         "unknown mode '" + text + "' (expected live, record, replay, or mock)");
}

std::string_view to_string(RunMode mode) {
    switch (mode) {
    case RunMode::Live: return "live";
    case RunMode::Record: return "record";
    case RunMode::Replay: return "replay";
    case RunMode::Mock: return "mock";
    }
    return "mock";
}

const gateway::ProviderConfig& PipelineConfig::model(const std::string& model_id) const {
    for (const gateway::ProviderConfig& m : models) {
        if (m.model_id == model_id) return m;
    }
    fail(ErrorCode::BadConfig, "no configured model with id '" + model_id + "'");
}

const ProjectConfig& PipelineConfig::project(const std::string& project_id) const {
    for (const ProjectConfig& p : projects) {
        if (p.project_id == project_id) return p;
    }
    fail(ErrorCode::BadConfig, "no configured project with id '" + project_id + "'");
}

PipelineConfig load_config(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        fail(ErrorCode::BadConfig,
             "cannot load config " + path.string() + ": " + e.what());
    }
    if (!root.IsMap()) {
        fail(ErrorCode::BadConfig, "config root must be a mapping: " + path.string());
    }
    const std::filesystem::path base = path.parent_path();

    PipelineConfig config;
    if (root["mode"]) config.mode = mode_from_string(root["mode"].as<std::string>());
    config.run_root = resolve(base, root["run_root"] ? root["run_root"].as<std::string>()
                                                     : std::string("runs"));
    config.templates_dir =
        resolve(base, root["templates_dir"] ? root["templates_dir"].as<std::string>()
                                            : std::string("templates"));
    if (root["prompt_language"]) {
        config.prompt_language = root["prompt_language"].as<std::string>();
    }
    if (root["framework"]) config.framework_key = root["framework"].as<std::string>();
    if (root["max_cases_per_segment"]) {
        config.max_cases_per_segment = root["max_cases_per_segment"].as<int>();
        if (config.max_cases_per_segment < 1) {
            fail(ErrorCode::BadConfig, "max_cases_per_segment must be at least 1");
        }
    }
    if (root["weights"]) {
        const YAML::Node weights = root["weights"];
        if (!weights.IsMap()) fail(ErrorCode::BadConfig, "weights must be a mapping");
        if (weights["success"]) config.weights.w_sr = weights["success"].as<double>();
        if (weights["coverage"]) config.weights.w_c = weights["coverage"].as<double>();
        if (weights["mutation"]) config.weights.w_m = weights["mutation"].as<double>();
        config.weights.validate();
    }
    if (root["example_pack"]) {
        const YAML::Node pack = root["example_pack"];
        config.example_pack.openapi =
            resolve(base, require_string(pack, "openapi", "example_pack"));
        config.example_pack.tsl = resolve(base, require_string(pack, "tsl", "example_pack"));
        config.example_pack.tests =
            resolve(base, require_string(pack, "tests", "example_pack"));
    }

    const YAML::Node models = root["models"];
    if (!models || !models.IsSequence() || models.size() == 0) {
        fail(ErrorCode::BadConfig, "config needs at least one entry under 'models'");
    }
    for (const YAML::Node& node : models) {
        config.models.push_back(parse_model(node));
    }
    const YAML::Node projects = root["projects"];
    if (!projects || !projects.IsSequence() || projects.size() == 0) {
        fail(ErrorCode::BadConfig, "config needs at least one entry under 'projects'");
    }
    for (const YAML::Node& node : projects) {
        ProjectConfig project;
        project.project_id = require_string(node, "project_id", "project entry");
        project.openapi_path = resolve(base, require_string(node, "openapi", "project entry"));
        config.projects.push_back(std::move(project));
    }
    if (root["mock_responses"]) {
        const YAML::Node mocks = root["mock_responses"];
        if (!mocks.IsSequence()) {
            fail(ErrorCode::BadConfig, "mock_responses must be a sequence");
        }
        for (const YAML::Node& node : mocks) {
            config.mock_responses.push_back(parse_mock_response(node, base));
        }
    }
    return config;
}

} // namespace resttsl::config
