#include "resttsl/tsl.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "resttsl/errors.hpp"
#include "tsl_internal.hpp"
#include "yaml_compat.hpp"

namespace resttsl::tsl {

namespace {

using detail::split_tokens;

std::optional<MatcherTree::ValueType> value_type_from(const std::string& word) {
    using VT = MatcherTree::ValueType;
    if (word == "string") return VT::String;
    if (word == "number") return VT::Number;
    if (word == "integer") return VT::Integer;
    if (word == "boolean") return VT::Boolean;
    if (word == "array") return VT::Array;
    if (word == "object") return VT::Object;
    return std::nullopt;
}

/// Parses the matcher grammar: "is <type>" or "is <type> not empty".
/// Only called for strings whose first token is "is".
MatcherTree parse_matcher_text(const std::string& text, const std::string& where) {
    std::vector<std::string> tokens = split_tokens(text);
    if (tokens.size() != 2 && tokens.size() != 4) {
        fail(ErrorCode::MatcherSyntax, "unrecognized matcher '" + text + "' at " + where);
    }
    std::optional<MatcherTree::ValueType> type = value_type_from(tokens[1]);
    if (!type) {
        fail(ErrorCode::MatcherSyntax,
             "unknown matcher type '" + tokens[1] + "' at " + where);
    }
    if (tokens.size() == 2) return MatcherTree::type_is(*type);
    if (tokens[2] != "not" || tokens[3] != "empty") {
        fail(ErrorCode::MatcherSyntax, "unrecognized matcher '" + text + "' at " + where);
    }
    if (*type != MatcherTree::ValueType::String && *type != MatcherTree::ValueType::Array) {
        fail(ErrorCode::MatcherSyntax,
             "'not empty' applies to string and array matchers only, at " + where);
    }
    return MatcherTree::non_empty(*type);
}

bool scalar_is_matcher(const Json& value) {
    return value.is_string() && detail::looks_like_matcher_text(value.get_ref<const std::string&>());
}

MatcherTree build_matcher(const Json& value, const std::string& where) {
    if (value.is_object()) {
        std::vector<std::pair<std::string, MatcherTree>> fields;
        for (const auto& [key, child] : value.items()) {
            fields.emplace_back(key, build_matcher(child, where + "." + key));
        }
        return MatcherTree::object(std::move(fields));
    }
    if (value.is_array()) {
        std::vector<MatcherTree> elements;
        int index = 0;
        for (const Json& child : value) {
            elements.push_back(build_matcher(child, where + "[" + std::to_string(index++) + "]"));
        }
        return MatcherTree::array(std::move(elements));
    }
    if (scalar_is_matcher(value)) {
        return parse_matcher_text(value.get_ref<const std::string&>(), where);
    }
    return MatcherTree::exact(value);
}

bool numeric_equal(const Json& a, const Json& b) {
    bool a_integral = a.is_number_integer() || a.is_number_unsigned();
    bool b_integral = b.is_number_integer() || b.is_number_unsigned();
    if (a_integral && b_integral) {
        if (a.is_number_unsigned() != b.is_number_unsigned()) {
            if (a.is_number_integer() && a.get<std::int64_t>() < 0) return false;
            if (b.is_number_integer() && b.get<std::int64_t>() < 0) return false;
            return a.get<std::uint64_t>() == b.get<std::uint64_t>();
        }
        return a.is_number_unsigned() ? a.get<std::uint64_t>() == b.get<std::uint64_t>()
                                      : a.get<std::int64_t>() == b.get<std::int64_t>();
    }
    return a.get<double>() == b.get<double>();
}

bool json_equal(const Json& a, const Json& b) {
    if (a.is_number() && b.is_number()) return numeric_equal(a, b);
    if (a.type() != b.type()) return false;
    if (a.is_object()) {
        if (a.size() != b.size()) return false;
        for (const auto& [key, value] : a.items()) {
            if (!b.contains(key) || !json_equal(value, b[key])) return false;
        }
        return true;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i) {
            if (!json_equal(a[i], b[i])) return false;
        }
        return true;
    }
    return a == b;
}

bool type_check(MatcherTree::ValueType type, const Json& value) {
    using VT = MatcherTree::ValueType;
    switch (type) {
    case VT::String: return value.is_string();
    case VT::Number: return value.is_number();
    case VT::Integer:
        if (value.is_number_integer() || value.is_number_unsigned()) return true;
        if (value.is_number_float()) {
            double d = value.get<double>();
            return std::trunc(d) == d;
        }
        return false;
    case VT::Boolean: return value.is_boolean();
    case VT::Array: return value.is_array();
    case VT::Object: return value.is_object();
    }
    return false;
}

struct CaseReader {
    const YAML::Node& node;
    const std::string where;

    const YAML::Node field(const char* name) const { return node[name]; }

    std::string required_scalar(const char* name) const {
        YAML::Node value = node[name];
        if (!value || value.IsNull()) {
            fail(ErrorCode::MissingField, std::string(name) + " missing at " + where);
        }
        if (!value.IsScalar()) {
            fail(ErrorCode::TslSyntax, std::string(name) + " is not a scalar at " + where);
        }
        std::string text = value.Scalar();
        if (text.empty()) {
            fail(ErrorCode::MissingField, std::string(name) + " empty at " + where);
        }
        return text;
    }

    std::string optional_scalar(const char* name, const std::string& fallback) const {
        YAML::Node value = node[name];
        if (!value || value.IsNull()) return fallback;
        if (!value.IsScalar()) {
            fail(ErrorCode::TslSyntax, std::string(name) + " is not a scalar at " + where);
        }
        return value.Scalar();
    }

    std::optional<Json> param_map(const char* name) const {
        YAML::Node value = node[name];
        if (!value || value.IsNull()) return std::nullopt;
        if (!value.IsMap()) {
            fail(ErrorCode::TslSyntax, std::string(name) + " is not a mapping at " + where);
        }
        return yamlc::to_json(value);
    }
};

} // namespace

MatcherTree MatcherTree::exact(Json value) {
    MatcherTree m;
    m.kind = Kind::Exact;
    m.exact_value = std::move(value);
    return m;
}

MatcherTree MatcherTree::type_is(ValueType type) {
    MatcherTree m;
    m.kind = Kind::TypeIs;
    m.checked_type = type;
    return m;
}

MatcherTree MatcherTree::non_empty(ValueType type) {
    MatcherTree m;
    m.kind = Kind::NonEmpty;
    m.checked_type = type;
    return m;
}

MatcherTree MatcherTree::object(std::vector<std::pair<std::string, MatcherTree>> fields) {
    MatcherTree m;
    m.kind = Kind::Object;
    m.fields = std::move(fields);
    return m;
}

MatcherTree MatcherTree::array(std::vector<MatcherTree> elements) {
    MatcherTree m;
    m.kind = Kind::Array;
    m.elements = std::move(elements);
    return m;
}

bool MatcherTree::operator==(const MatcherTree& other) const {
    if (kind != other.kind) return false;
    switch (kind) {
    case Kind::Exact: return exact_value == other.exact_value;
    case Kind::TypeIs:
    case Kind::NonEmpty: return checked_type == other.checked_type;
    case Kind::Object: return fields == other.fields;
    case Kind::Array: return elements == other.elements;
    }
    return false;
}

std::string_view to_string(MatcherTree::ValueType type) {
    using VT = MatcherTree::ValueType;
    switch (type) {
    case VT::String: return "string";
    case VT::Number: return "number";
    case VT::Integer: return "integer";
    case VT::Boolean: return "boolean";
    case VT::Array: return "array";
    case VT::Object: return "object";
    }
    return "string";
}

TslDocument parse_tsl(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        fail(ErrorCode::TslSyntax, e.what());
    }
    TslDocument doc;
    if (!root || root.IsNull()) return doc;
    if (!root.IsSequence()) {
        fail(ErrorCode::TslSyntax, "document root must be a sequence of cases");
    }
    std::set<std::string> seen_ids;
    int index = 0;
    for (const YAML::Node& item : root) {
        const std::string where = "case[" + std::to_string(index++) + "]";
        if (!item.IsMap()) {
            fail(ErrorCode::TslSyntax, where + " is not a mapping");
        }
        CaseReader reader{item, where};
        TslCase c;
        c.id = reader.required_scalar("id");
        if (!seen_ids.insert(c.id).second) {
            fail(ErrorCode::DuplicateId, "case id '" + c.id + "' appears more than once");
        }
        c.group = reader.optional_scalar("group", "untagged");
        c.name = reader.optional_scalar("name", "");
        c.endpoint = reader.required_scalar("endpoint");
        std::string method_text = reader.required_scalar("method");
        std::optional<HttpMethod> method = openapi::method_from_string(method_text);
        if (!method) {
            fail(ErrorCode::TslSyntax, "unknown method '" + method_text + "' at " + where);
        }
        c.method = *method;
        if (YAML::Node pre = item["preconditions"]; pre && !pre.IsNull()) {
            if (!pre.IsSequence()) {
                fail(ErrorCode::TslSyntax, "preconditions is not a sequence at " + where);
            }
            for (const YAML::Node& entry : pre) {
                if (!entry.IsScalar()) {
                    fail(ErrorCode::TslSyntax, "precondition is not a scalar at " + where);
                }
                c.preconditions.push_back(entry.Scalar());
            }
        }
        c.path_params = reader.param_map("path_params");
        c.query_params = reader.param_map("query_params");
        c.headers = reader.param_map("headers");
        if (YAML::Node body = item["request_body"]; body && !body.IsNull()) {
            c.request_body = yamlc::to_json(body);
        }
        YAML::Node expected = item["expected_response"];
        if (!expected || expected.IsNull()) {
            fail(ErrorCode::MissingField, "expected_response missing at " + where);
        }
        if (!expected.IsMap()) {
            fail(ErrorCode::TslSyntax, "expected_response is not a mapping at " + where);
        }
        YAML::Node status = expected["status_code"];
        if (!status || status.IsNull()) {
            fail(ErrorCode::MissingField, "expected_response.status_code missing at " + where);
        }
        Json status_value = yamlc::to_json(status);
        if (!status_value.is_number_integer() && !status_value.is_number_unsigned()) {
            fail(ErrorCode::TslSyntax, "status_code is not an integer at " + where);
        }
        long long status_code = status_value.get<long long>();
        if (status_code < 100 || status_code > 599) {
            fail(ErrorCode::TslSyntax,
                 "status_code " + std::to_string(status_code) + " out of range at " + where);
        }
        c.expected_response.status_code = static_cast<int>(status_code);
        if (YAML::Node body = expected["body"]; body && !body.IsNull()) {
            Json body_value = yamlc::to_json(body);
            c.expected_response.body =
                build_matcher(body_value, where + ".expected_response.body");
        }
        doc.cases.push_back(std::move(c));
    }
    return doc;
}

bool match_value(const MatcherTree& matcher, const Json& value) {
    switch (matcher.kind) {
    case MatcherTree::Kind::Exact:
        return json_equal(matcher.exact_value, value);
    case MatcherTree::Kind::TypeIs:
        return type_check(matcher.checked_type, value);
    case MatcherTree::Kind::NonEmpty:
        if (!type_check(matcher.checked_type, value)) return false;
        if (matcher.checked_type == MatcherTree::ValueType::String) {
            return !value.get_ref<const std::string&>().empty();
        }
        if (matcher.checked_type == MatcherTree::ValueType::Array) {
            return !value.empty();
        }
        return false;
    case MatcherTree::Kind::Object: {
        if (!value.is_object()) return false;
        for (const auto& [name, field_matcher] : matcher.fields) {
            if (!value.contains(name)) return false;
            if (!match_value(field_matcher, value.at(name))) return false;
        }
        return true;
    }
    case MatcherTree::Kind::Array: {
        if (!value.is_array()) return false;
        if (value.size() != matcher.elements.size()) return false;
        for (size_t i = 0; i < matcher.elements.size(); ++i) {
            if (!match_value(matcher.elements[i], value[i])) return false;
        }
        return true;
    }
    }
    return false;
}

std::string_view to_string(IssueSeverity severity) {
    return severity == IssueSeverity::Error ? "error" : "warning";
}

std::string_view to_string(IssueCode code) {
    switch (code) {
    case IssueCode::DuplicateId: return "duplicate-id";
    case IssueCode::UnknownEndpoint: return "unknown-endpoint";
    case IssueCode::MethodMismatch: return "method-mismatch";
    case IssueCode::UndeclaredStatus: return "undeclared-status";
    case IssueCode::UnknownBodyField: return "unknown-body-field";
    case IssueCode::MissingRequiredField: return "missing-required-field";
    case IssueCode::MatcherSyntax: return "matcher-syntax";
    case IssueCode::MissingResponseSchema: return "missing-response-schema";
    }
    return "unknown";
}

bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(), [](const ValidationIssue& issue) {
        return issue.severity == IssueSeverity::Error;
    });
}

} // namespace resttsl::tsl
