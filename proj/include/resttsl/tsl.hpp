#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "resttsl/json.hpp"
#include "resttsl/openapi.hpp"

namespace resttsl::tsl {

using openapi::HttpMethod;

/// Expectation over one JSON value. Leaves are exact values, type checks
/// ("is string") or non-empty type checks ("is string not empty"); interior
/// nodes mirror JSON objects and arrays.
struct MatcherTree {
    enum class Kind { Exact, TypeIs, NonEmpty, Object, Array };
    enum class ValueType { String, Number, Integer, Boolean, Array, Object };

    Kind kind = Kind::Exact;
    Json exact_value;
    ValueType checked_type = ValueType::String;
    std::vector<std::pair<std::string, MatcherTree>> fields;
    std::vector<MatcherTree> elements;

    static MatcherTree exact(Json value);
    static MatcherTree type_is(ValueType type);
    static MatcherTree non_empty(ValueType type);
    static MatcherTree object(std::vector<std::pair<std::string, MatcherTree>> fields);
    static MatcherTree array(std::vector<MatcherTree> elements);

    bool operator==(const MatcherTree& other) const;
};

std::string_view to_string(MatcherTree::ValueType type);

struct ExpectedResponse {
    int status_code = 0;
    std::optional<MatcherTree> body;

    bool operator==(const ExpectedResponse&) const = default;
};

struct TslCase {
    std::string id;
    std::string group;
    std::string name;
    std::string endpoint;
    HttpMethod method = HttpMethod::Get;
    std::vector<std::string> preconditions;
    std::optional<Json> path_params;
    std::optional<Json> query_params;
    std::optional<Json> headers;
    std::optional<Json> request_body;
    ExpectedResponse expected_response;

    bool operator==(const TslCase&) const = default;
};

struct TslDocument {
    std::vector<TslCase> cases;

    bool operator==(const TslDocument&) const = default;
};

/// Parses a TSL document (YAML list of cases).
TslDocument parse_tsl(const std::string& text);

/// Canonical emitter: two-space indent, fixed field order, deterministic
/// scalar quoting. parse_tsl(serialize_tsl(doc)) == doc for valid documents.
std::string serialize_tsl(const TslDocument& doc);

/// True when `value` satisfies the matcher. Objects tolerate extra fields;
/// arrays require equal length.
bool match_value(const MatcherTree& matcher, const Json& value);

enum class IssueSeverity { Error, Warning };

enum class IssueCode {
    DuplicateId,
    UnknownEndpoint,
    MethodMismatch,
    UndeclaredStatus,
    UnknownBodyField,
    MissingRequiredField,
    MatcherSyntax,
    MissingResponseSchema,
};

std::string_view to_string(IssueSeverity severity);
std::string_view to_string(IssueCode code);

struct ValidationIssue {
    std::string case_id;
    IssueSeverity severity = IssueSeverity::Error;
    IssueCode code = IssueCode::UnknownEndpoint;
    std::string message;
};

/// Mechanized consistency checks of a TSL document against an API document.
std::vector<ValidationIssue> validate_against_spec(const TslDocument& doc,
                                                   const openapi::ApiDocument& api);

bool has_errors(const std::vector<ValidationIssue>& issues);

} // namespace resttsl::tsl
