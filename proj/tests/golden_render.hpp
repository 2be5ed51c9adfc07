#pragma once

// Canonical text rendering of assembled prompt conversations, shared by the
// prompt tests and the acceptance checks. Golden files under tests/goldens/
// hold this rendering byte for byte.

#include <string>

#include "resttsl/codegen.hpp"
#include "resttsl/openapi.hpp"
#include "resttsl/prompt.hpp"
#include "resttsl/tsl.hpp"

#include "testutil.hpp"

namespace testgolden {

namespace rprompt = resttsl::prompt;

inline std::string render_script(const rprompt::ConversationScript& script) {
    std::string out;
    for (size_t i = 0; i < script.messages.size(); ++i) {
        out += "=== ";
        out += std::string(rprompt::to_string(script.stages[i]));
        out += " / ";
        out += std::string(rprompt::to_string(script.messages[i].role));
        out += " ===\n";
        out += script.messages[i].content;
        if (out.empty() || out.back() != '\n') out += '\n';
        out += '\n';
    }
    return out;
}

/// Both full conversations (TSL generation, then test generation over the
/// example TSL) for the bundled example pack, rendered canonically.
inline std::string golden_text(const std::string& language) {
    auto templates_root = testutil::templates_dir();
    rprompt::TemplateSet templates = rprompt::TemplateSet::load(templates_root, language);
    rprompt::ExamplePack pack = rprompt::ExamplePack::load(
        templates_root / "example_pack" / "accounts_api.json",
        templates_root / "example_pack" / "accounts.tsl.yaml",
        templates_root / "example_pack" / "accounts_tests.cs");
    resttsl::codegen::FrameworkTemplates framework =
        resttsl::codegen::FrameworkTemplates::load(templates_root, "xunit");
    rprompt::PromptBuilder builder(templates, framework.label);

    resttsl::openapi::ApiDocument api = resttsl::openapi::parse_openapi(pack.example_openapi);
    resttsl::tsl::TslDocument doc = resttsl::tsl::parse_tsl(pack.example_tsl);
    rprompt::SegmentPlan plan = rprompt::plan_segments(doc, 15);

    std::string out = "##### conversation: generate_tsl #####\n";
    out += render_script(builder.assemble_generate_tsl(pack, api));
    out += "##### conversation: generate_tests #####\n";
    out += render_script(builder.assemble_generate_tests(pack, doc, plan));
    return out;
}

} // namespace testgolden
