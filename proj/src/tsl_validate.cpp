#include <algorithm>
#include <map>
#include <set>

#include "resttsl/tsl.hpp"

namespace resttsl::tsl {

namespace {

struct Validator {
    const openapi::ApiDocument& api;
    std::vector<ValidationIssue> issues;

    void add(const std::string& case_id, IssueSeverity severity, IssueCode code,
             std::string message) {
        issues.push_back({case_id, severity, code, std::move(message)});
    }

    void check_matcher_shape(const TslCase& c, const MatcherTree& matcher,
                             const std::string& where) {
        switch (matcher.kind) {
        case MatcherTree::Kind::NonEmpty:
            if (matcher.checked_type != MatcherTree::ValueType::String &&
                matcher.checked_type != MatcherTree::ValueType::Array) {
                add(c.id, IssueSeverity::Error, IssueCode::MatcherSyntax,
                    "'not empty' applies to string and array matchers only, at " + where);
            }
            break;
        case MatcherTree::Kind::Object:
            for (const auto& [name, field] : matcher.fields) {
                check_matcher_shape(c, field, where + "." + name);
            }
            break;
        case MatcherTree::Kind::Array:
            for (size_t i = 0; i < matcher.elements.size(); ++i) {
                check_matcher_shape(c, matcher.elements[i],
                                    where + "[" + std::to_string(i) + "]");
            }
            break;
        default:
            break;
        }
    }

    void check_body_fields(const TslCase& c, const MatcherTree& matcher,
                           const openapi::SchemaNode& schema, const std::string& where) {
        const openapi::SchemaNode* resolved = api.resolve(schema);
        if (resolved == nullptr) return;
        if (matcher.kind == MatcherTree::Kind::Object) {
            if (resolved->kind != openapi::SchemaKind::Object) return;
            if (resolved->properties.empty()) return;
            for (const auto& [name, field] : matcher.fields) {
                auto it = std::find_if(resolved->properties.begin(), resolved->properties.end(),
                                       [&](const auto& p) { return p.first == name; });
                if (it == resolved->properties.end()) {
                    add(c.id, IssueSeverity::Error, IssueCode::UnknownBodyField,
                        "body field '" + where + name + "' is not declared in the response schema");
                } else {
                    check_body_fields(c, field, it->second, where + name + ".");
                }
            }
        } else if (matcher.kind == MatcherTree::Kind::Array) {
            if (resolved->kind != openapi::SchemaKind::Array || !resolved->items) return;
            for (size_t i = 0; i < matcher.elements.size(); ++i) {
                check_body_fields(c, matcher.elements[i], *resolved->items, where);
            }
        }
    }

    void check_required_request_fields(const TslCase& c, const openapi::EndpointDef& ep) {
        if (c.expected_response.status_code < 200 || c.expected_response.status_code > 299) {
            return;
        }
        if (!ep.request_schema) return;
        const openapi::SchemaNode* schema = api.resolve(*ep.request_schema);
        if (schema == nullptr || schema->constraints.required_fields.empty()) return;
        for (const std::string& field : schema->constraints.required_fields) {
            bool present = c.request_body && c.request_body->is_object() &&
                           c.request_body->contains(field);
            if (!present) {
                add(c.id, IssueSeverity::Warning, IssueCode::MissingRequiredField,
                    "required request field '" + field + "' is absent from a success case");
            }
        }
    }

    void check_case(const TslCase& c) {
        std::vector<const openapi::EndpointDef*> same_path;
        for (const openapi::EndpointDef& ep : api.endpoints) {
            if (ep.path == c.endpoint) same_path.push_back(&ep);
        }
        if (c.expected_response.body) {
            check_matcher_shape(c, *c.expected_response.body, "body");
        }
        if (same_path.empty()) {
            add(c.id, IssueSeverity::Error, IssueCode::UnknownEndpoint,
                "endpoint '" + c.endpoint + "' is not declared");
            return;
        }
        auto it = std::find_if(same_path.begin(), same_path.end(),
                               [&](const openapi::EndpointDef* ep) { return ep->method == c.method; });
        if (it == same_path.end()) {
            add(c.id, IssueSeverity::Error, IssueCode::MethodMismatch,
                std::string(openapi::to_string(c.method)) + " is not declared for '" + c.endpoint + "'");
            return;
        }
        const openapi::EndpointDef& ep = **it;
        auto response = ep.responses.find(c.expected_response.status_code);
        if (response == ep.responses.end()) {
            add(c.id, IssueSeverity::Error, IssueCode::UndeclaredStatus,
                "status " + std::to_string(c.expected_response.status_code) +
                    " is not declared for '" + c.endpoint + "'");
        } else if (c.expected_response.body) {
            if (!response->second.has_value()) {
                add(c.id, IssueSeverity::Warning, IssueCode::MissingResponseSchema,
                    "response " + std::to_string(c.expected_response.status_code) +
                        " declares no schema; body matchers are unchecked");
            } else {
                check_body_fields(c, *c.expected_response.body, *response->second, "");
            }
        }
        check_required_request_fields(c, ep);
    }

    void run(const TslDocument& doc) {
        std::set<std::string> seen;
        for (const TslCase& c : doc.cases) {
            if (!seen.insert(c.id).second) {
                add(c.id, IssueSeverity::Error, IssueCode::DuplicateId,
                    "case id '" + c.id + "' appears more than once");
            }
        }
        for (const TslCase& c : doc.cases) check_case(c);
    }
};

} // namespace

std::vector<ValidationIssue> validate_against_spec(const TslDocument& doc,
                                                   const openapi::ApiDocument& api) {
    Validator v{api, {}};
    v.run(doc);
    return std::move(v.issues);
}

} // namespace resttsl::tsl
