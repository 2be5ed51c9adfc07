#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "resttsl/gateway.hpp"
#include "resttsl/prompt.hpp"
#include "resttsl/tsl.hpp"

namespace resttsl::codegen {

struct TestFile {
    std::string file_name;
    std::string group;
    std::string content;
    std::vector<std::string> case_ids;
};

struct ManifestEntry {
    std::string file_name;
    std::string test_name;

    bool operator==(const ManifestEntry&) const = default;
};

struct TestSuite {
    std::string framework_key;
    std::vector<TestFile> files;
    std::map<std::string, ManifestEntry> manifest;
};

struct ExtractionReport {
    int blocks_found = 0;
    int blocks_used = 0;
    std::vector<std::string> discarded_reasons;
};

struct ExtractResult {
    std::vector<TestFile> files;
    ExtractionReport report;
};

/// Pulls code out of a completion for one segment: fenced blocks first; with
/// no fences, the whole content (or its largest prose-delimited chunk)
/// qualifies when it mentions a segment case id.
ExtractResult extract_test_code(const gateway::Completion& completion,
                                const prompt::Segment& segment);

/// Folds per-segment files into one suite with a complete manifest.
TestSuite merge_segments(const std::vector<std::vector<TestFile>>& per_segment,
                         const tsl::TslDocument& doc, const std::string& framework_key);

/// Framework templates loaded from templates/frameworks/<key>/: a file
/// stencil, a test stencil, and named line patterns for the arrange, act,
/// and assert fragments.
struct FrameworkTemplates {
    std::string key;
    std::string label;
    std::string file_template;
    std::string test_template;
    std::map<std::string, std::string> lines;

    const std::string& line(const std::string& name) const;

    static FrameworkTemplates load(const std::filesystem::path& templates_dir,
                                   const std::string& framework_key);
};

/// Deterministic AAA-structured suite derived directly from the TSL document.
TestSuite scaffold_fallback_tests(const tsl::TslDocument& doc,
                                  const FrameworkTemplates& templates);

Json manifest_to_json(const TestSuite& suite);

/// Case ids referenced by identifier-like tokens (TC<number>) in `text`.
std::vector<std::string> case_ids_in_text(const std::string& text);

std::string sanitize_identifier(const std::string& text);

} // namespace resttsl::codegen
