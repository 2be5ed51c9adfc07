#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "resttsl/openapi.hpp"
#include "resttsl/tsl.hpp"

namespace resttsl::prompt {

enum class PromptStage {
    Behavior,
    ExampleOpenApiToTsl,
    ExampleTslToTests,
    ActionGenerateTsl,
    ActionGenerateTests,
};

std::string_view to_string(PromptStage stage);

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// Fully assembled conversation; stages[i] labels messages[i].
struct ConversationScript {
    std::vector<ChatMessage> messages;
    std::vector<PromptStage> stages;

    PromptStage action_stage() const;
};

/// The worked example shown to the model before the action prompt: an API
/// document, its TSL cases, and the resulting test code.
struct ExamplePack {
    std::string example_openapi;
    std::string example_tsl;
    std::string example_tests;

    static ExamplePack load(const std::filesystem::path& openapi_path,
                            const std::filesystem::path& tsl_path,
                            const std::filesystem::path& tests_path);
};

struct Segment {
    std::string group;
    int part = 1;
    int parts_total = 1;
    std::vector<std::string> case_ids;

    std::string label() const;
};

struct SegmentPlan {
    std::vector<Segment> segments;
};

/// Prompt templates for one language. Files live under
/// <templates_dir>/prompts/<language>/.
struct TemplateSet {
    std::string behavior;
    std::string example_tsl;
    std::string example_tests;
    std::string action_tsl;
    std::string action_tests;

    static TemplateSet load(const std::filesystem::path& templates_dir,
                            const std::string& language);
};

/// Replaces {{name}} placeholders. A placeholder left unresolved is an error.
std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values);

/// Splits a document's cases into group-homogeneous segments of at most
/// `max_cases_per_segment` ids, preserving document order.
SegmentPlan plan_segments(const tsl::TslDocument& doc, int max_cases_per_segment);

class PromptBuilder {
public:
    PromptBuilder(TemplateSet templates, std::string framework_label);

    ChatMessage build_behavior_prompt() const;
    std::vector<ChatMessage> build_example_messages(const ExamplePack& pack) const;
    ChatMessage build_action_tsl_prompt(const openapi::ApiDocument& slice) const;
    std::vector<ChatMessage> build_action_tests_prompts(const tsl::TslDocument& doc,
                                                        const SegmentPlan& plan) const;

    /// System + example pair + TSL action prompt (six messages).
    ConversationScript assemble_generate_tsl(const ExamplePack& pack,
                                             const openapi::ApiDocument& slice) const;

    /// System + example pair + one action prompt per segment.
    ConversationScript assemble_generate_tests(const ExamplePack& pack,
                                               const tsl::TslDocument& doc,
                                               const SegmentPlan& plan) const;

    /// Conversation for a single test segment (used for per-segment sends).
    ConversationScript assemble_tests_segment(const ExamplePack& pack,
                                              const tsl::TslDocument& doc,
                                              const Segment& segment) const;

private:
    TemplateSet templates_;
    std::string framework_label_;
};

} // namespace resttsl::prompt
