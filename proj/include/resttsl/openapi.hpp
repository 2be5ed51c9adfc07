#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resttsl/json.hpp"

namespace resttsl::openapi {

enum class HttpMethod { Get, Post, Put, Patch, Delete, Head, Options };

std::string_view to_string(HttpMethod method);
std::optional<HttpMethod> method_from_string(std::string_view text);

enum class SchemaKind { String, Number, Integer, Boolean, Array, Object, Ref };

std::string_view to_string(SchemaKind kind);

/// Validation keywords lifted off a schema node.
struct ConstraintSet {
    std::set<std::string> required_fields;
    std::optional<std::uint64_t> min_length;
    std::optional<std::uint64_t> max_length;
    std::optional<std::string> pattern;
    std::optional<double> minimum;
    std::optional<double> maximum;
    std::optional<std::vector<Json>> enum_values;
    std::optional<std::string> format;

    bool empty() const;
    bool operator==(const ConstraintSet&) const = default;
};

struct SchemaNode {
    SchemaKind kind = SchemaKind::Object;
    ConstraintSet constraints;
    /// Object properties in declaration order.
    std::vector<std::pair<std::string, SchemaNode>> properties;
    /// Element schema for arrays; shared because the type is recursive.
    std::shared_ptr<const SchemaNode> items;
    /// Target name for kind == Ref ("#/components/schemas/<name>").
    std::string ref_name;
};

enum class ParamLocation { Path, Query, Header };

std::string_view to_string(ParamLocation location);

struct ParamDef {
    std::string name;
    ParamLocation location = ParamLocation::Query;
    bool required = false;
    SchemaNode schema;
};

enum class SecurityKind { Bearer, ApiKey, Basic, OAuth2, Other };

struct SecurityScheme {
    SecurityKind kind = SecurityKind::Other;
    /// Header or query parameter name for apiKey schemes.
    std::string key_name;
};

struct EndpointDef {
    std::string path;
    HttpMethod method = HttpMethod::Get;
    std::optional<std::string> operation_id;
    std::vector<std::string> tags;
    std::vector<ParamDef> parameters;
    std::optional<SchemaNode> request_schema;
    /// Declared statuses; value absent when the response declares no JSON schema.
    std::map<int, std::optional<SchemaNode>> responses;
    /// Names of security schemes required by this operation.
    std::vector<std::string> security;
};

struct ApiDocument {
    std::string title;
    std::string version;
    std::vector<std::string> servers;
    std::vector<EndpointDef> endpoints;
    std::map<std::string, SecurityScheme> security_schemes;
    /// Shared component schemas in declaration order.
    std::vector<std::pair<std::string, SchemaNode>> shared_schemas;
    /// Non-fatal notes gathered while parsing (ignored constructs and the like).
    std::vector<std::string> warnings;

    const SchemaNode* find_shared(const std::string& name) const;
    /// Follows Ref nodes until a concrete schema or a missing target (nullptr).
    const SchemaNode* resolve(const SchemaNode& node) const;
};

/// Parses an OpenAPI 3.x document from JSON or YAML text.
ApiDocument parse_openapi(const std::string& document_text);
ApiDocument parse_openapi_file(const std::filesystem::path& path);

/// Distinct tags in first-appearance order; untagged endpoints appear as "untagged".
std::vector<std::string> list_tags(const ApiDocument& api);

/// Sub-document containing exactly the endpoints carrying `tag`, the shared
/// schemas they transitively reference, and the security schemes they use.
ApiDocument slice_by_tag(const ApiDocument& api, const std::string& tag);

/// Constraint keywords present on one node (object `required` included).
ConstraintSet extract_constraints(const SchemaNode& node);

/// Canonical JSON rendering used when embedding a document in prompts.
Json to_json(const ApiDocument& api);
std::string serialize_document(const ApiDocument& api);

} // namespace resttsl::openapi
