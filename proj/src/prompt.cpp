#include "resttsl/prompt.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "resttsl/errors.hpp"

namespace resttsl::prompt {

namespace {

std::string read_file(const std::filesystem::path& path, ErrorCode code,
                      const std::string& what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(code, what + " not readable: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

tsl::TslDocument segment_document(const tsl::TslDocument& doc, const Segment& segment) {
    tsl::TslDocument out;
    for (const std::string& id : segment.case_ids) {
        auto it = std::find_if(doc.cases.begin(), doc.cases.end(),
                               [&](const tsl::TslCase& c) { return c.id == id; });
        if (it == doc.cases.end()) {
            fail(ErrorCode::PlanMismatch,
                 "segment for group '" + segment.group + "' cites unknown case id '" + id + "'");
        }
        out.cases.push_back(*it);
    }
    return out;
}

} // namespace

std::string_view to_string(PromptStage stage) {
    switch (stage) {
    case PromptStage::Behavior: return "behavior";
    case PromptStage::ExampleOpenApiToTsl: return "example-openapi-to-tsl";
    case PromptStage::ExampleTslToTests: return "example-tsl-to-tests";
    case PromptStage::ActionGenerateTsl: return "action-generate-tsl";
    case PromptStage::ActionGenerateTests: return "action-generate-tests";
    }
    return "behavior";
}

std::string_view to_string(Role role) {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view text) {
    if (text == "system") return Role::System;
    if (text == "assistant") return Role::Assistant;
    return Role::User;
}

PromptStage ConversationScript::action_stage() const {
    return stages.empty() ? PromptStage::Behavior : stages.back();
}

std::string Segment::label() const {
    if (parts_total <= 1) return group;
    return group + " (part " + std::to_string(part) + " of " + std::to_string(parts_total) + ")";
}

ExamplePack ExamplePack::load(const std::filesystem::path& openapi_path,
                              const std::filesystem::path& tsl_path,
                              const std::filesystem::path& tests_path) {
    ExamplePack pack;
    pack.example_openapi = read_file(openapi_path, ErrorCode::InvalidExamplePack, "example OpenAPI");
    pack.example_tsl = read_file(tsl_path, ErrorCode::InvalidExamplePack, "example TSL");
    pack.example_tests = read_file(tests_path, ErrorCode::InvalidExamplePack, "example tests");
    if (pack.example_tests.empty()) {
        fail(ErrorCode::InvalidExamplePack, "example tests empty: " + tests_path.string());
    }
    try {
        openapi::parse_openapi(pack.example_openapi);
        if (tsl::parse_tsl(pack.example_tsl).cases.empty()) {
            fail(ErrorCode::InvalidExamplePack, "example TSL has no cases: " + tsl_path.string());
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidExamplePack) throw;
        fail(ErrorCode::InvalidExamplePack, e.what());
    }
    return pack;
}

TemplateSet TemplateSet::load(const std::filesystem::path& templates_dir,
                              const std::string& language) {
    std::filesystem::path dir = templates_dir / "prompts" / language;
    if (!std::filesystem::is_directory(dir)) {
        fail(ErrorCode::UnknownLanguage, "no prompt templates for language '" + language + "'");
    }
    TemplateSet set;
    set.behavior = read_file(dir / "behavior.txt", ErrorCode::UnknownLanguage, "behavior template");
    set.example_tsl =
        read_file(dir / "example_tsl.txt", ErrorCode::UnknownLanguage, "example TSL template");
    set.example_tests =
        read_file(dir / "example_tests.txt", ErrorCode::UnknownLanguage, "example tests template");
    set.action_tsl =
        read_file(dir / "action_tsl.txt", ErrorCode::UnknownLanguage, "action TSL template");
    set.action_tests =
        read_file(dir / "action_tests.txt", ErrorCode::UnknownLanguage, "action tests template");
    return set;
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(text.size());
    size_t pos = 0;
    while (pos < text.size()) {
        size_t open = text.find("{{", pos);
        if (open == std::string::npos) {
            out.append(text, pos, std::string::npos);
            break;
        }
        out.append(text, pos, open - pos);
        size_t close = text.find("}}", open + 2);
        if (close == std::string::npos) {
            fail(ErrorCode::UnknownPlaceholder, "unterminated placeholder in template");
        }
        std::string name = text.substr(open + 2, close - open - 2);
        auto it = values.find(name);
        if (it == values.end()) {
            fail(ErrorCode::UnknownPlaceholder, "placeholder '{{" + name + "}}' has no value");
        }
        out += it->second;
        pos = close + 2;
    }
    return out;
}

SegmentPlan plan_segments(const tsl::TslDocument& doc, int max_cases_per_segment) {
    if (doc.cases.empty()) {
        fail(ErrorCode::EmptyDocument, "cannot plan segments for an empty document");
    }
    if (max_cases_per_segment < 1) {
        fail(ErrorCode::BadConfig, "max_cases_per_segment must be positive");
    }
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::string>> by_group;
    for (const tsl::TslCase& c : doc.cases) {
        if (by_group.find(c.group) == by_group.end()) group_order.push_back(c.group);
        by_group[c.group].push_back(c.id);
    }
    SegmentPlan plan;
    for (const std::string& group : group_order) {
        const std::vector<std::string>& ids = by_group[group];
        int parts_total =
            static_cast<int>((ids.size() + max_cases_per_segment - 1) / max_cases_per_segment);
        for (int part = 0; part < parts_total; ++part) {
            Segment segment;
            segment.group = group;
            segment.part = part + 1;
            segment.parts_total = parts_total;
            size_t begin = static_cast<size_t>(part) * max_cases_per_segment;
            size_t end = std::min(ids.size(), begin + max_cases_per_segment);
            segment.case_ids.assign(ids.begin() + begin, ids.begin() + end);
            plan.segments.push_back(std::move(segment));
        }
    }
    return plan;
}

PromptBuilder::PromptBuilder(TemplateSet templates, std::string framework_label)
    : templates_(std::move(templates)), framework_label_(std::move(framework_label)) {}

ChatMessage PromptBuilder::build_behavior_prompt() const {
    return {Role::System, render_template(templates_.behavior, {{"framework", framework_label_}})};
}

std::vector<ChatMessage> PromptBuilder::build_example_messages(const ExamplePack& pack) const {
    if (pack.example_openapi.empty() || pack.example_tsl.empty() || pack.example_tests.empty()) {
        fail(ErrorCode::InvalidExamplePack, "example pack has an empty member");
    }
    try {
        tsl::TslDocument parsed = tsl::parse_tsl(pack.example_tsl);
        if (parsed.cases.empty()) {
            fail(ErrorCode::InvalidExamplePack, "example TSL contains no cases");
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidExamplePack) throw;
        fail(ErrorCode::InvalidExamplePack,
             std::string("example TSL does not parse: ") + e.what());
    }
    std::vector<ChatMessage> messages;
    messages.push_back(
        {Role::User, render_template(templates_.example_tsl, {{"openapi", pack.example_openapi}})});
    messages.push_back({Role::Assistant, pack.example_tsl});
    messages.push_back({Role::User, render_template(templates_.example_tests,
                                                    {{"tsl", pack.example_tsl},
                                                     {"framework", framework_label_}})});
    messages.push_back({Role::Assistant, pack.example_tests});
    return messages;
}

ChatMessage PromptBuilder::build_action_tsl_prompt(const openapi::ApiDocument& slice) const {
    if (slice.endpoints.empty()) {
        fail(ErrorCode::EmptyDocument, "action prompt needs at least one endpoint");
    }
    return {Role::User, render_template(templates_.action_tsl,
                                        {{"openapi", openapi::serialize_document(slice)}})};
}

std::vector<ChatMessage> PromptBuilder::build_action_tests_prompts(const tsl::TslDocument& doc,
                                                                   const SegmentPlan& plan) const {
    if (plan.segments.empty()) {
        fail(ErrorCode::PlanMismatch, "segment plan is empty");
    }
    std::vector<ChatMessage> messages;
    for (const Segment& segment : plan.segments) {
        tsl::TslDocument part = segment_document(doc, segment);
        messages.push_back(
            {Role::User, render_template(templates_.action_tests,
                                         {{"tsl", tsl::serialize_tsl(part)},
                                          {"group", segment.label()},
                                          {"framework", framework_label_}})});
    }
    return messages;
}

ConversationScript PromptBuilder::assemble_generate_tsl(const ExamplePack& pack,
                                                        const openapi::ApiDocument& slice) const {
    ConversationScript script;
    script.messages.push_back(build_behavior_prompt());
    script.stages.push_back(PromptStage::Behavior);
    std::vector<ChatMessage> example = build_example_messages(pack);
    script.messages.insert(script.messages.end(), example.begin(), example.end());
    script.stages.push_back(PromptStage::ExampleOpenApiToTsl);
    script.stages.push_back(PromptStage::ExampleOpenApiToTsl);
    script.stages.push_back(PromptStage::ExampleTslToTests);
    script.stages.push_back(PromptStage::ExampleTslToTests);
    script.messages.push_back(build_action_tsl_prompt(slice));
    script.stages.push_back(PromptStage::ActionGenerateTsl);
    return script;
}

ConversationScript PromptBuilder::assemble_generate_tests(const ExamplePack& pack,
                                                          const tsl::TslDocument& doc,
                                                          const SegmentPlan& plan) const {
    ConversationScript script;
    script.messages.push_back(build_behavior_prompt());
    script.stages.push_back(PromptStage::Behavior);
    std::vector<ChatMessage> example = build_example_messages(pack);
    script.messages.insert(script.messages.end(), example.begin(), example.end());
    script.stages.push_back(PromptStage::ExampleOpenApiToTsl);
    script.stages.push_back(PromptStage::ExampleOpenApiToTsl);
    script.stages.push_back(PromptStage::ExampleTslToTests);
    script.stages.push_back(PromptStage::ExampleTslToTests);
    for (ChatMessage& message : build_action_tests_prompts(doc, plan)) {
        script.messages.push_back(std::move(message));
        script.stages.push_back(PromptStage::ActionGenerateTests);
    }
    return script;
}

ConversationScript PromptBuilder::assemble_tests_segment(const ExamplePack& pack,
                                                         const tsl::TslDocument& doc,
                                                         const Segment& segment) const {
    SegmentPlan single;
    single.segments.push_back(segment);
    return assemble_generate_tests(pack, doc, single);
}

} // namespace resttsl::prompt
