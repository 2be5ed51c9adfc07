#include "resttsl/derive.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>

#include "pattern_sample.hpp"

namespace resttsl::derive {

namespace {

using openapi::ApiDocument;
using openapi::ConstraintSet;
using openapi::EndpointDef;
using openapi::ParamDef;
using openapi::ParamLocation;
using openapi::SchemaKind;
using openapi::SchemaNode;
using tsl::MatcherTree;
using tsl::TslCase;

std::string title_word(const std::string& word) {
    if (word.empty()) return word;
    std::string out = word;
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
}

/// "createUserToken" or "create_user-token" becomes "Create User Token".
std::string humanize(const std::string& text) {
    std::vector<std::string> words;
    std::string current;
    for (char c : text) {
        if (c == '_' || c == '-' || c == ' ' || c == '/') {
            if (!current.empty()) words.push_back(current);
            current.clear();
        } else if (std::isupper(static_cast<unsigned char>(c)) && !current.empty() &&
                   !std::isupper(static_cast<unsigned char>(current.back()))) {
            words.push_back(current);
            current = std::string(1, c);
        } else {
            current += c;
        }
    }
    if (!current.empty()) words.push_back(current);
    std::string out;
    for (std::string& word : words) {
        std::transform(word.begin(), word.end(), word.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (!out.empty()) out += ' ';
        out += title_word(word);
    }
    return out;
}

std::string operation_label(const EndpointDef& ep) {
    if (ep.operation_id && !ep.operation_id->empty()) return humanize(*ep.operation_id);
    std::string method(openapi::to_string(ep.method));
    std::transform(method.begin(), method.end(), method.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    std::string label = title_word(method);
    std::string segment;
    std::vector<std::string> segments;
    for (char c : ep.path) {
        if (c == '/') {
            if (!segment.empty()) segments.push_back(segment);
            segment.clear();
        } else {
            segment += c;
        }
    }
    if (!segment.empty()) segments.push_back(segment);
    for (const std::string& part : segments) {
        if (part.front() == '{') continue;
        label += ' ' + humanize(part);
    }
    return label;
}

struct Deriver {
    const ApiDocument& api;
    const DeriveOptions& options;
    tsl::TslDocument out;
    int next_id = 1;

    std::string fresh_id() { return "TC" + std::to_string(next_id++); }

    Json sample_string(const ConstraintSet& cs) const {
        if (cs.enum_values && !cs.enum_values->empty()) return cs.enum_values->front();
        if (cs.format) {
            const std::string& format = *cs.format;
            if (format == "email") return "unique-token@example.com";
            if (format == "uuid") return "00000000-0000-4000-8000-000000000001";
            if (format == "date") return "2024-01-01";
            if (format == "date-time") return "2024-01-01T00:00:00Z";
            if (format == "uri" || format == "url") return "https://example.com/resource";
        }
        if (cs.pattern) {
            if (std::optional<std::string> witness = detail::sample_matching(*cs.pattern)) {
                return *witness;
            }
        }
        std::uint64_t length = std::max<std::uint64_t>(cs.min_length.value_or(1), 1);
        if (cs.max_length) length = std::min(length, *cs.max_length);
        return std::string(static_cast<size_t>(length), 'a');
    }

    Json sample_value(const SchemaNode& raw, int depth = 0) const {
        if (depth > 16) return nullptr;
        const SchemaNode* node = api.resolve(raw);
        if (node == nullptr) return nullptr;
        const ConstraintSet& cs = node->constraints;
        switch (node->kind) {
        case SchemaKind::String:
            return sample_string(cs);
        case SchemaKind::Integer: {
            if (cs.enum_values && !cs.enum_values->empty()) return cs.enum_values->front();
            if (cs.minimum && cs.maximum) {
                return static_cast<std::int64_t>(std::floor((*cs.minimum + *cs.maximum) / 2.0));
            }
            if (cs.minimum) return static_cast<std::int64_t>(std::ceil(*cs.minimum));
            if (cs.maximum) return static_cast<std::int64_t>(std::floor(*cs.maximum));
            return std::int64_t{1};
        }
        case SchemaKind::Number: {
            if (cs.enum_values && !cs.enum_values->empty()) return cs.enum_values->front();
            if (cs.minimum && cs.maximum) return (*cs.minimum + *cs.maximum) / 2.0;
            if (cs.minimum) return *cs.minimum;
            if (cs.maximum) return *cs.maximum;
            return 1.0;
        }
        case SchemaKind::Boolean:
            return true;
        case SchemaKind::Array: {
            Json array = Json::array();
            if (node->items) array.push_back(sample_value(*node->items, depth + 1));
            return array;
        }
        case SchemaKind::Object: {
            Json object = Json::object();
            for (const auto& [name, prop] : node->properties) {
                object[name] = sample_value(prop, depth + 1);
            }
            return object;
        }
        case SchemaKind::Ref:
            return nullptr;
        }
        return nullptr;
    }

    Json scalarize(const Json& value) const {
        if (value.is_structured()) return value.dump();
        return value;
    }

    int error_status_for(const EndpointDef& ep) const {
        if (ep.responses.count(422) != 0) return 422;
        return options.error_status;
    }

    int success_status_for(const EndpointDef& ep) const {
        for (const auto& [status, schema] : ep.responses) {
            (void)schema;
            if (status >= 200 && status <= 299) return status;
        }
        return ep.responses.begin()->first;
    }

    std::string group_for(const EndpointDef& ep) const {
        return ep.tags.empty() ? "untagged" : ep.tags.front();
    }

    std::optional<MatcherTree> response_matcher(const EndpointDef& ep, int status) const {
        auto it = ep.responses.find(status);
        if (it == ep.responses.end() || !it->second.has_value()) return std::nullopt;
        const SchemaNode* schema = api.resolve(*it->second);
        if (schema == nullptr) return std::nullopt;
        auto type_of = [&](const SchemaNode& prop) -> std::optional<MatcherTree::ValueType> {
            const SchemaNode* resolved = api.resolve(prop);
            if (resolved == nullptr) return std::nullopt;
            switch (resolved->kind) {
            case SchemaKind::String: return MatcherTree::ValueType::String;
            case SchemaKind::Number: return MatcherTree::ValueType::Number;
            case SchemaKind::Integer: return MatcherTree::ValueType::Integer;
            case SchemaKind::Boolean: return MatcherTree::ValueType::Boolean;
            case SchemaKind::Array: return MatcherTree::ValueType::Array;
            case SchemaKind::Object: return MatcherTree::ValueType::Object;
            case SchemaKind::Ref: return std::nullopt;
            }
            return std::nullopt;
        };
        if (schema->kind == SchemaKind::Object && !schema->properties.empty()) {
            std::vector<std::pair<std::string, MatcherTree>> fields;
            for (const auto& [name, prop] : schema->properties) {
                std::optional<MatcherTree::ValueType> type = type_of(prop);
                if (!type) continue;
                bool required = schema->constraints.required_fields.count(name) != 0;
                if (required && *type == MatcherTree::ValueType::String) {
                    fields.emplace_back(name, MatcherTree::non_empty(*type));
                } else {
                    fields.emplace_back(name, MatcherTree::type_is(*type));
                }
            }
            if (fields.empty()) return std::nullopt;
            return MatcherTree::object(std::move(fields));
        }
        if (std::optional<MatcherTree::ValueType> type = type_of(*schema)) {
            return MatcherTree::type_is(*type);
        }
        return std::nullopt;
    }

    struct ValidParts {
        std::optional<Json> body;
        std::optional<Json> path_params;
        std::optional<Json> query_params;
        std::optional<Json> headers;
    };

    ValidParts valid_parts(const EndpointDef& ep) const {
        ValidParts parts;
        if (ep.request_schema) parts.body = sample_value(*ep.request_schema);
        Json path = Json::object(), query = Json::object(), headers = Json::object();
        for (const ParamDef& param : ep.parameters) {
            if (param.location != ParamLocation::Path && !param.required) continue;
            Json value = scalarize(sample_value(param.schema));
            switch (param.location) {
            case ParamLocation::Path: path[param.name] = value; break;
            case ParamLocation::Query: query[param.name] = value; break;
            case ParamLocation::Header: headers[param.name] = value; break;
            }
        }
        if (!path.empty()) parts.path_params = std::move(path);
        if (!query.empty()) parts.query_params = std::move(query);
        if (!headers.empty()) parts.headers = std::move(headers);
        return parts;
    }

    TslCase base_case(const EndpointDef& ep, const ValidParts& parts) const {
        TslCase c;
        c.group = group_for(ep);
        c.endpoint = ep.path;
        c.method = ep.method;
        c.path_params = parts.path_params;
        c.query_params = parts.query_params;
        c.headers = parts.headers;
        c.request_body = parts.body;
        if (!ep.security.empty()) {
            c.preconditions.push_back("Valid authentication credentials are configured");
        }
        return c;
    }

    void push_case(TslCase c, const EndpointDef& ep, const std::string& suffix, int status) {
        c.id = fresh_id();
        c.name = operation_label(ep) + " " + suffix + " Returns " + std::to_string(status);
        c.expected_response.status_code = status;
        out.cases.push_back(std::move(c));
    }

    void add_nominal(const EndpointDef& ep, const ValidParts& parts) {
        int status = success_status_for(ep);
        TslCase c = base_case(ep, parts);
        c.expected_response.body = response_matcher(ep, status);
        push_case(std::move(c), ep, "Valid Request", status);
    }

    /// One error case per constraint choice on one body field.
    void add_field_violations(const EndpointDef& ep, const ValidParts& parts,
                              const std::string& field, const SchemaNode& raw_schema) {
        const SchemaNode* schema = api.resolve(raw_schema);
        if (schema == nullptr) return;
        const ConstraintSet& cs = schema->constraints;
        const int status = error_status_for(ep);
        auto with_value = [&](const Json& value) {
            TslCase c = base_case(ep, parts);
            if (!c.request_body || !c.request_body->is_object()) c.request_body = Json::object();
            (*c.request_body)[field] = value;
            return c;
        };
        const std::string label = humanize(field);
        if (schema->kind == SchemaKind::String) {
            if (cs.min_length && *cs.min_length >= 1) {
                std::string below(static_cast<size_t>(*cs.min_length - 1), 'a');
                push_case(with_value(below), ep, label + " Below Minimum Length", status);
            }
            if (cs.max_length) {
                std::string above(static_cast<size_t>(*cs.max_length + 1), 'a');
                push_case(with_value(above), ep, label + " Above Maximum Length", status);
            }
            if (cs.pattern) {
                if (std::optional<std::string> bad =
                        detail::sample_violating(*cs.pattern, cs.min_length, cs.max_length)) {
                    push_case(with_value(*bad), ep, label + " Violates Pattern", status);
                }
            }
            if (cs.enum_values && !cs.enum_values->empty()) {
                std::string bad = "__invalid__";
                auto in_enum = [&](const std::string& candidate) {
                    return std::any_of(cs.enum_values->begin(), cs.enum_values->end(),
                                       [&](const Json& v) {
                                           return v.is_string() && v.get<std::string>() == candidate;
                                       });
                };
                while (in_enum(bad)) bad += 'x';
                push_case(with_value(bad), ep, label + " Outside Enum", status);
            }
        } else if (schema->kind == SchemaKind::Integer || schema->kind == SchemaKind::Number) {
            if (cs.minimum) {
                Json below = schema->kind == SchemaKind::Integer
                                 ? Json(static_cast<std::int64_t>(std::ceil(*cs.minimum)) - 1)
                                 : Json(*cs.minimum - 1.0);
                push_case(with_value(below), ep, label + " Below Minimum", status);
            }
            if (cs.maximum) {
                Json above = schema->kind == SchemaKind::Integer
                                 ? Json(static_cast<std::int64_t>(std::floor(*cs.maximum)) + 1)
                                 : Json(*cs.maximum + 1.0);
                push_case(with_value(above), ep, label + " Above Maximum", status);
            }
            if (cs.enum_values && !cs.enum_values->empty()) {
                std::int64_t bad = 999999;
                auto in_enum = [&](std::int64_t candidate) {
                    return std::any_of(cs.enum_values->begin(), cs.enum_values->end(),
                                       [&](const Json& v) {
                                           return v.is_number() && v.get<double>() ==
                                                                       static_cast<double>(candidate);
                                       });
                };
                while (in_enum(bad)) ++bad;
                push_case(with_value(Json(bad)), ep, label + " Outside Enum", status);
            }
        }
    }

    void add_param_violations(const EndpointDef& ep, const ValidParts& parts,
                              const ParamDef& param) {
        const SchemaNode* schema = api.resolve(param.schema);
        if (schema == nullptr) return;
        const ConstraintSet& cs = schema->constraints;
        const int status = error_status_for(ep);
        const std::string label = "Parameter " + humanize(param.name);
        auto map_slot = [&](TslCase& c) -> std::optional<Json>& {
            switch (param.location) {
            case ParamLocation::Path: return c.path_params;
            case ParamLocation::Query: return c.query_params;
            case ParamLocation::Header: return c.headers;
            }
            return c.query_params;
        };
        auto with_value = [&](const Json& value) {
            TslCase c = base_case(ep, parts);
            std::optional<Json>& slot = map_slot(c);
            if (!slot) slot = Json::object();
            (*slot)[param.name] = value;
            return c;
        };
        if (param.required && param.location != ParamLocation::Path) {
            TslCase c = base_case(ep, parts);
            std::optional<Json>& slot = map_slot(c);
            if (slot) {
                slot->erase(param.name);
                if (slot->empty()) slot.reset();
            }
            push_case(std::move(c), ep, "Missing Required " + label, status);
        }
        if (schema->kind == SchemaKind::String) {
            if (cs.min_length && *cs.min_length >= 1) {
                std::string below(static_cast<size_t>(*cs.min_length - 1), 'a');
                push_case(with_value(below), ep, label + " Below Minimum Length", status);
            }
            if (cs.max_length) {
                std::string above(static_cast<size_t>(*cs.max_length + 1), 'a');
                push_case(with_value(above), ep, label + " Above Maximum Length", status);
            }
            if (cs.pattern) {
                if (std::optional<std::string> bad =
                        detail::sample_violating(*cs.pattern, cs.min_length, cs.max_length)) {
                    push_case(with_value(*bad), ep, label + " Violates Pattern", status);
                }
            }
        } else if (schema->kind == SchemaKind::Integer || schema->kind == SchemaKind::Number) {
            if (cs.minimum) {
                Json below = schema->kind == SchemaKind::Integer
                                 ? Json(static_cast<std::int64_t>(std::ceil(*cs.minimum)) - 1)
                                 : Json(*cs.minimum - 1.0);
                push_case(with_value(below), ep, label + " Below Minimum", status);
            }
            if (cs.maximum) {
                Json above = schema->kind == SchemaKind::Integer
                                 ? Json(static_cast<std::int64_t>(std::floor(*cs.maximum)) + 1)
                                 : Json(*cs.maximum + 1.0);
                push_case(with_value(above), ep, label + " Above Maximum", status);
            }
        }
    }

    void add_unauthenticated(const EndpointDef& ep, const ValidParts& parts) {
        TslCase c = base_case(ep, parts);
        c.preconditions.clear();
        c.preconditions.push_back("Request is sent without authentication credentials");
        push_case(std::move(c), ep, "Missing Authentication", options.unauthenticated_status);
    }

    void run() {
        for (const EndpointDef& ep : api.endpoints) {
            ValidParts parts = valid_parts(ep);
            add_nominal(ep, parts);
            if (ep.request_schema) {
                const SchemaNode* schema = api.resolve(*ep.request_schema);
                if (schema != nullptr && schema->kind == SchemaKind::Object) {
                    const int status = error_status_for(ep);
                    for (const std::string& field : schema->constraints.required_fields) {
                        TslCase c = base_case(ep, parts);
                        if (c.request_body && c.request_body->is_object()) {
                            c.request_body->erase(field);
                        }
                        push_case(std::move(c), ep, "Missing Required " + humanize(field), status);
                    }
                    for (const auto& [name, prop] : schema->properties) {
                        add_field_violations(ep, parts, name, prop);
                    }
                }
            }
            for (const ParamDef& param : ep.parameters) {
                add_param_violations(ep, parts, param);
            }
            if (!ep.security.empty()) add_unauthenticated(ep, parts);
        }
    }
};

} // namespace

tsl::TslDocument derive_cases_cp(const openapi::ApiDocument& api, const DeriveOptions& options) {
    Deriver deriver{api, options};
    deriver.run();
    return std::move(deriver.out);
}

} // namespace resttsl::derive
