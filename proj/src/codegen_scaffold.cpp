#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>

#include "resttsl/codegen.hpp"
#include "resttsl/errors.hpp"

namespace resttsl::codegen {

namespace {

using tsl::MatcherTree;
using tsl::TslCase;

const std::regex& email_regex() {
    static const std::regex re(R"(^[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}$)");
    return re;
}

std::string escape_literal(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default: out += c;
        }
    }
    return out;
}

std::string number_text(const Json& value) {
    if (value.is_number_float()) {
        char buffer[64];
        auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer),
                                       value.get<double>());
        std::string text(buffer, ptr);
        if (text.find('.') == std::string::npos && text.find('e') == std::string::npos) {
            text += ".0";
        }
        return text;
    }
    return value.dump();
}

std::string url_component(const Json& value) {
    std::string text = value.is_string() ? value.get<std::string>() : number_text(value);
    std::string out;
    for (char c : text) {
        if (c == ' ') {
            out += "%20";
        } else if (c == '&') {
            out += "%26";
        } else {
            out += c;
        }
    }
    return out;
}

struct Scaffolder {
    const FrameworkTemplates& templates;

    std::string render(const std::string& name,
                       const std::map<std::string, std::string>& values) const {
        return prompt::render_template(templates.line(name), values);
    }

    std::string request_url(const TslCase& c) const {
        std::string url = c.endpoint;
        if (c.path_params && c.path_params->is_object()) {
            for (const auto& [name, value] : c.path_params->items()) {
                std::string placeholder = "{" + name + "}";
                size_t pos;
                while ((pos = url.find(placeholder)) != std::string::npos) {
                    url.replace(pos, placeholder.size(), url_component(value));
                }
            }
        }
        if (c.query_params && c.query_params->is_object() && !c.query_params->empty()) {
            std::string query;
            for (const auto& [name, value] : c.query_params->items()) {
                query += query.empty() ? '?' : '&';
                query += name + "=" + url_component(value);
            }
            url += query;
        }
        return url;
    }

    /// Payload JSON with unique-sensitive string fields replaced by a marker;
    /// the paths of replaced fields come back for helper reassignment.
    Json masked_payload(const Json& value, std::vector<std::vector<std::string>>& email_paths,
                        std::vector<std::string> path) const {
        if (value.is_string() &&
            std::regex_match(value.get_ref<const std::string&>(), email_regex())) {
            email_paths.push_back(path);
            return "__unique__";
        }
        if (value.is_object()) {
            Json out = Json::object();
            for (const auto& [key, child] : value.items()) {
                std::vector<std::string> next = path;
                next.push_back(key);
                out[key] = masked_payload(child, email_paths, std::move(next));
            }
            return out;
        }
        return value;
    }

    std::string accessor_path(const std::vector<std::string>& path) const {
        std::string out;
        for (const std::string& key : path) {
            out += render("index_segment", {{"key", escape_literal(key)}});
        }
        return out;
    }

    void append(std::string& block, const std::string& line) const {
        if (!block.empty()) block += '\n';
        block += line;
    }

    std::string arrange_block(const TslCase& c, bool has_payload) const {
        std::string block;
        for (const std::string& condition : c.preconditions) {
            append(block, render("precondition", {{"text", escape_literal(condition)}}));
        }
        if (c.headers && c.headers->is_object()) {
            for (const auto& [name, value] : c.headers->items()) {
                std::string text =
                    value.is_string() ? value.get<std::string>() : number_text(value);
                append(block, render("header_set", {{"name", escape_literal(name)},
                                                    {"value", escape_literal(text)}}));
            }
        }
        if (has_payload) {
            std::vector<std::vector<std::string>> email_paths;
            Json masked = masked_payload(*c.request_body, email_paths, {});
            append(block, render("payload", {{"json", escape_literal(masked.dump())}}));
            for (const std::vector<std::string>& path : email_paths) {
                append(block, render("unique_email", {{"path", accessor_path(path)}}));
            }
        }
        if (block.empty()) {
            block = render("arrange_none", {});
        }
        return block;
    }

    std::string act_block(const TslCase& c, bool has_payload) const {
        std::map<std::string, std::string> values = {
            {"method", std::string(openapi::to_string(c.method))},
            {"url", escape_literal(request_url(c))},
        };
        return render(has_payload ? "act_request_with_body" : "act_request", values);
    }

    void matcher_asserts(std::string& block, const MatcherTree& matcher,
                         const std::string& accessor) const {
        switch (matcher.kind) {
        case MatcherTree::Kind::Object:
            if (matcher.fields.empty()) {
                append(block, render("assert_type_object", {{"accessor", accessor}}));
                return;
            }
            for (const auto& [name, field] : matcher.fields) {
                matcher_asserts(block, field,
                                accessor + render("index_segment",
                                                  {{"key", escape_literal(name)}}));
            }
            return;
        case MatcherTree::Kind::Array:
            append(block, render("assert_array_length",
                                 {{"accessor", accessor},
                                  {"count", std::to_string(matcher.elements.size())}}));
            for (size_t i = 0; i < matcher.elements.size(); ++i) {
                matcher_asserts(block, matcher.elements[i],
                                accessor + render("array_segment",
                                                  {{"index", std::to_string(i)}}));
            }
            return;
        case MatcherTree::Kind::TypeIs:
            append(block,
                   render("assert_type_" + std::string(to_string(matcher.checked_type)),
                          {{"accessor", accessor}}));
            return;
        case MatcherTree::Kind::NonEmpty:
            append(block, render(matcher.checked_type == MatcherTree::ValueType::String
                                     ? "assert_non_empty_string"
                                     : "assert_non_empty_array",
                                 {{"accessor", accessor}}));
            return;
        case MatcherTree::Kind::Exact: {
            const Json& value = matcher.exact_value;
            if (value.is_null()) {
                append(block, render("assert_exact_null", {{"accessor", accessor}}));
            } else if (value.is_boolean()) {
                append(block, render("assert_exact_boolean",
                                     {{"accessor", accessor},
                                      {"value", value.get<bool>() ? "true" : "false"}}));
            } else if (value.is_number()) {
                append(block, render("assert_exact_number",
                                     {{"accessor", accessor}, {"value", number_text(value)}}));
            } else {
                append(block, render("assert_exact_string",
                                     {{"accessor", accessor},
                                      {"value", escape_literal(value.get<std::string>())}}));
            }
            return;
        }
        }
    }

    std::string assert_block(const TslCase& c) const {
        std::string block =
            render("status_assert",
                   {{"status", std::to_string(c.expected_response.status_code)}});
        if (c.expected_response.body) {
            append(block, render("parse_body", {}));
            matcher_asserts(block, *c.expected_response.body, render("body_root", {}));
        }
        return block;
    }

    std::string test_name(const TslCase& c) const {
        std::string name = c.name;
        std::replace(name.begin(), name.end(), ' ', '_');
        std::string combined = c.id;
        if (!name.empty()) combined += "_" + name;
        return sanitize_identifier(combined);
    }

    std::string build_test(const TslCase& c) const {
        bool has_payload = c.request_body.has_value();
        return prompt::render_template(templates.test_template,
                                       {{"test_name", test_name(c)},
                                        {"arrange", arrange_block(c, has_payload)},
                                        {"act", act_block(c, has_payload)},
                                        {"assert", assert_block(c)}});
    }
};

std::string sanitize_group_file(const std::string& group) {
    std::string out;
    for (char c : group) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
            out += c;
        } else {
            out += '_';
        }
    }
    return out.empty() ? "untagged" : out;
}

} // namespace

TestSuite scaffold_fallback_tests(const tsl::TslDocument& doc,
                                  const FrameworkTemplates& templates) {
    TestSuite suite;
    suite.framework_key = templates.key;
    if (doc.cases.empty()) return suite;

    Scaffolder scaffolder{templates};
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<const TslCase*>> by_group;
    for (const TslCase& c : doc.cases) {
        if (by_group.find(c.group) == by_group.end()) group_order.push_back(c.group);
        by_group[c.group].push_back(&c);
    }
    for (const std::string& group : group_order) {
        TestFile file;
        file.group = group;
        file.file_name = sanitize_group_file(group) + "1.tests";
        std::string tests;
        for (const TslCase* c : by_group[group]) {
            if (!tests.empty()) tests += "\n";
            tests += scaffolder.build_test(*c);
            file.case_ids.push_back(c->id);
            suite.manifest[c->id] = {file.file_name, scaffolder.test_name(*c)};
        }
        file.content = prompt::render_template(
            templates.file_template,
            {{"group_class", sanitize_identifier(group)}, {"tests", tests}});
        suite.files.push_back(std::move(file));
    }
    return suite;
}

} // namespace resttsl::codegen
