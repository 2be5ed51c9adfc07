#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "resttsl/errors.hpp"
#include "resttsl/json.hpp"
#include "resttsl/openapi.hpp"

#include "testutil.hpp"

using resttsl::Error;
using resttsl::ErrorCode;
using resttsl::Json;
namespace openapi = resttsl::openapi;
using openapi::HttpMethod;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::MalformedDocument;
}

const openapi::EndpointDef& find_endpoint(const openapi::ApiDocument& api,
                                          const std::string& path, HttpMethod method) {
    for (const openapi::EndpointDef& ep : api.endpoints) {
        if (ep.path == path && ep.method == method) return ep;
    }
    FAIL("endpoint not found: ", path);
    return api.endpoints.front();
}

/// Independent oracle for tag order: walk the raw document in declaration
/// order and collect the first appearance of every tag.
std::vector<std::string> raw_tag_order(const std::string& json_text) {
    Json doc = Json::parse(json_text);
    std::vector<std::string> order;
    auto push = [&](const std::string& tag) {
        if (std::find(order.begin(), order.end(), tag) == order.end()) order.push_back(tag);
    };
    static const char* verbs[] = {"get", "post", "put", "patch", "delete", "head", "options"};
    for (const auto& [path, item] : doc["paths"].items()) {
        (void)path;
        if (!item.is_object()) continue;
        for (const auto& [key, op] : item.items()) {
            bool is_verb = std::find_if(std::begin(verbs), std::end(verbs), [&](const char* v) {
                               return key == v;
                           }) != std::end(verbs);
            if (!is_verb) continue;
            if (op.contains("tags") && op["tags"].is_array() && !op["tags"].empty()) {
                for (const Json& tag : op["tags"]) push(tag.get<std::string>());
            } else {
                push("untagged");
            }
        }
    }
    return order;
}

/// Independent oracle for schema reachability: names transitively referenced
/// from the endpoints carrying `tag`.
std::set<std::string> reachable_refs(const openapi::ApiDocument& api, const std::string& tag) {
    std::set<std::string> seen;
    std::function<void(const openapi::SchemaNode&)> walk = [&](const openapi::SchemaNode& node) {
        if (node.kind == openapi::SchemaKind::Ref) {
            if (!seen.insert(node.ref_name).second) return;
            if (const openapi::SchemaNode* target = api.find_shared(node.ref_name)) walk(*target);
            return;
        }
        for (const auto& [name, prop] : node.properties) {
            (void)name;
            walk(prop);
        }
        if (node.items) walk(*node.items);
    };
    for (const openapi::EndpointDef& ep : api.endpoints) {
        bool tagged = ep.tags.empty() ? tag == "untagged"
                                      : std::find(ep.tags.begin(), ep.tags.end(), tag) !=
                                            ep.tags.end();
        if (!tagged) continue;
        for (const openapi::ParamDef& param : ep.parameters) walk(param.schema);
        if (ep.request_schema) walk(*ep.request_schema);
        for (const auto& [status, schema] : ep.responses) {
            (void)status;
            if (schema) walk(*schema);
        }
    }
    return seen;
}

std::string wrap_paths(const std::string& paths_json) {
    return R"({"openapi": "3.0.0", "info": {"title": "T", "version": "1"}, "paths": )" +
           paths_json + "}";
}

} // namespace

TEST_CASE("parses the example document") {
    openapi::ApiDocument api = openapi::parse_openapi(
        testutil::read_file(testutil::templates_dir() / "example_pack" / "accounts_api.json"));
    CHECK(api.title == "Accounts API");
    CHECK(api.version == "1.0.0");
    REQUIRE(api.endpoints.size() == 2);
    CHECK(api.warnings.empty());

    const openapi::EndpointDef& login = find_endpoint(api, "/api/accounts/tokens",
                                                      HttpMethod::Post);
    CHECK(login.operation_id == "loginAccount");
    CHECK(login.tags == std::vector<std::string>{"Account"});
    REQUIRE(login.request_schema.has_value());
    const openapi::SchemaNode* request = api.resolve(*login.request_schema);
    REQUIRE(request != nullptr);
    CHECK(request->constraints.required_fields == std::set<std::string>{"email", "password"});
    auto password = std::find_if(request->properties.begin(), request->properties.end(),
                                 [](const auto& p) { return p.first == "password"; });
    REQUIRE(password != request->properties.end());
    CHECK(password->second.constraints.min_length == 8);
    CHECK(password->second.constraints.max_length == 128);
    CHECK(login.responses.count(200) == 1);
    CHECK(login.responses.count(400) == 1);
    CHECK(login.responses.count(401) == 1);

    std::vector<std::string> shared_names;
    for (const auto& [name, schema] : api.shared_schemas) {
        (void)schema;
        shared_names.push_back(name);
    }
    CHECK(shared_names == std::vector<std::string>{"RegisterRequest", "LoginRequest",
                                                   "AccountResponse", "TokenResponse"});
}

TEST_CASE("endpoints and tags keep document order") {
    std::string text = testutil::read_file(testutil::fixture("openapi/todo_api.json"));
    openapi::ApiDocument api = openapi::parse_openapi(text);
    CHECK(api.endpoints.size() == 7);
    CHECK(openapi::list_tags(api) == raw_tag_order(text));
    CHECK(openapi::list_tags(api) == std::vector<std::string>{"Todo", "Health"});
}

TEST_CASE("path-level parameters are inherited by operations") {
    openapi::ApiDocument api =
        openapi::parse_openapi_file(testutil::fixture("openapi/todo_api.json"));
    for (HttpMethod method : {HttpMethod::Get, HttpMethod::Put, HttpMethod::Delete}) {
        const openapi::EndpointDef& ep = find_endpoint(api, "/api/todos/{id}", method);
        auto id = std::find_if(ep.parameters.begin(), ep.parameters.end(),
                               [](const openapi::ParamDef& p) { return p.name == "id"; });
        REQUIRE(id != ep.parameters.end());
        CHECK(id->location == openapi::ParamLocation::Path);
        CHECK(id->required);
        CHECK(id->schema.kind == openapi::SchemaKind::Integer);
    }
}

TEST_CASE("yaml documents parse the same as json") {
    openapi::ApiDocument api =
        openapi::parse_openapi_file(testutil::fixture("openapi/multi_tag.yaml"));
    CHECK(api.title == "Storefront API");
    CHECK(api.version == "2.1.0");
    CHECK(api.endpoints.size() == 5);
    CHECK(openapi::list_tags(api) == std::vector<std::string>{"Users", "Orders", "Reports"});
    const openapi::EndpointDef& report = find_endpoint(api, "/api/reports/monthly",
                                                       HttpMethod::Get);
    REQUIRE(report.parameters.size() == 1);
    CHECK(report.parameters[0].required);
    CHECK(report.parameters[0].schema.constraints.pattern == "^[0-9]{4}-[0-9]{2}$");
}

TEST_CASE("slice_by_tag keeps exactly the reachable schemas") {
    openapi::ApiDocument api =
        openapi::parse_openapi_file(testutil::fixture("openapi/multi_tag.yaml"));

    openapi::ApiDocument orders = openapi::slice_by_tag(api, "Orders");
    CHECK(orders.endpoints.size() == 2);
    for (const openapi::EndpointDef& ep : orders.endpoints) {
        CHECK(ep.tags == std::vector<std::string>{"Orders"});
    }
    std::set<std::string> kept;
    for (const auto& [name, schema] : orders.shared_schemas) {
        (void)schema;
        kept.insert(name);
    }
    CHECK(kept == reachable_refs(api, "Orders"));
    CHECK(kept.count("Order") == 1);
    CHECK(kept.count("User") == 0);
    CHECK(kept.count("Report") == 0);

    CHECK(code_of([&] { openapi::slice_by_tag(api, "Payments"); }) == ErrorCode::UnknownTag);
}

TEST_CASE("slice_by_tag keeps the security schemes in use") {
    openapi::ApiDocument api =
        openapi::parse_openapi_file(testutil::fixture("openapi/todo_api.json"));
    openapi::ApiDocument todos = openapi::slice_by_tag(api, "Todo");
    CHECK(todos.security_schemes.count("bearerAuth") == 1);
    openapi::ApiDocument health = openapi::slice_by_tag(api, "Health");
    CHECK(health.security_schemes.empty());
    CHECK(health.endpoints.size() == 1);
    CHECK(health.endpoints[0].security.empty());
}

TEST_CASE("version gate rejects non 3.x documents") {
    CHECK(code_of([] {
              openapi::parse_openapi(R"({"swagger": "2.0", "info": {"title": "T",
                  "version": "1"}, "paths": {}})");
          }) == ErrorCode::MalformedDocument);
    CHECK(code_of([] { openapi::parse_openapi("{}"); }) == ErrorCode::MalformedDocument);
    CHECK(code_of([] { openapi::parse_openapi("not json or yaml: ["); }) ==
          ErrorCode::MalformedDocument);
}

TEST_CASE("empty paths parse to a document with no endpoints") {
    openapi::ApiDocument api = openapi::parse_openapi(wrap_paths("{}"));
    CHECK(api.endpoints.empty());
}

TEST_CASE("unresolvable refs are fatal") {
    std::string text = wrap_paths(R"({"/x": {"get": {"responses": {"200": {
        "description": "ok", "content": {"application/json": {"schema":
        {"$ref": "#/components/schemas/Ghost"}}}}}}}})");
    CHECK(code_of([&] { openapi::parse_openapi(text); }) == ErrorCode::UnresolvableRef);
}

TEST_CASE("inverted length bounds are fatal") {
    std::string text = wrap_paths(R"({"/x": {"post": {
        "requestBody": {"content": {"application/json": {"schema": {"type": "object",
            "properties": {"name": {"type": "string", "minLength": 9, "maxLength": 3}}}}}},
        "responses": {"201": {"description": "ok"}}}}})");
    CHECK(code_of([&] { openapi::parse_openapi(text); }) == ErrorCode::MalformedDocument);
}

TEST_CASE("operations must declare responses") {
    std::string text = wrap_paths(R"({"/x": {"get": {}}})");
    CHECK(code_of([&] { openapi::parse_openapi(text); }) == ErrorCode::MalformedDocument);
}

TEST_CASE("allOf merges properties and required sets") {
    std::string text = wrap_paths(R"({"/x": {"post": {
        "requestBody": {"content": {"application/json": {"schema": {"allOf": [
            {"type": "object", "required": ["a"], "properties":
                {"a": {"type": "string", "minLength": 2}}},
            {"type": "object", "required": ["b"], "properties":
                {"b": {"type": "integer"}}}]}}}},
        "responses": {"201": {"description": "ok"}}}}})");
    openapi::ApiDocument api = openapi::parse_openapi(text);
    const openapi::SchemaNode& schema = *api.endpoints[0].request_schema;
    CHECK(schema.constraints.required_fields == std::set<std::string>{"a", "b"});
    REQUIRE(schema.properties.size() == 2);
    CHECK(schema.properties[0].first == "a");
    CHECK(schema.properties[0].second.constraints.min_length == 2);
    CHECK(schema.properties[1].first == "b");
    CHECK(schema.properties[1].second.kind == openapi::SchemaKind::Integer);
}

TEST_CASE("oneOf falls back to the first variant with a warning") {
    std::string text = wrap_paths(R"({"/x": {"post": {
        "requestBody": {"content": {"application/json": {"schema": {"oneOf": [
            {"type": "string", "maxLength": 4}, {"type": "integer"}]}}}},
        "responses": {"201": {"description": "ok"}}}}})");
    openapi::ApiDocument api = openapi::parse_openapi(text);
    CHECK(api.endpoints[0].request_schema->kind == openapi::SchemaKind::String);
    CHECK(api.endpoints[0].request_schema->constraints.max_length == 4);
    REQUIRE_FALSE(api.warnings.empty());
}

TEST_CASE("non-json media types are ignored with a warning") {
    std::string text = wrap_paths(R"({"/x": {"get": {"responses": {"200": {
        "description": "ok", "content": {"text/plain": {"schema": {"type": "string"}}}}}}}})");
    openapi::ApiDocument api = openapi::parse_openapi(text);
    REQUIRE(api.endpoints[0].responses.count(200) == 1);
    CHECK_FALSE(api.endpoints[0].responses.at(200).has_value());
    REQUIRE_FALSE(api.warnings.empty());
    CHECK(api.warnings[0].find("media") != std::string::npos);
}

TEST_CASE("undeclared path parameters are synthesized") {
    std::string text = wrap_paths(R"({"/w/{id}": {"get": {"responses": {"200":
        {"description": "ok"}}}}})");
    openapi::ApiDocument api = openapi::parse_openapi(text);
    REQUIRE(api.endpoints[0].parameters.size() == 1);
    CHECK(api.endpoints[0].parameters[0].name == "id");
    CHECK(api.endpoints[0].parameters[0].location == openapi::ParamLocation::Path);
    CHECK(api.endpoints[0].parameters[0].required);
    REQUIRE_FALSE(api.warnings.empty());
}

TEST_CASE("extract_constraints mirrors the node") {
    openapi::ApiDocument api = openapi::parse_openapi(
        testutil::read_file(testutil::templates_dir() / "example_pack" / "accounts_api.json"));
    const openapi::SchemaNode* login = api.find_shared("LoginRequest");
    REQUIRE(login != nullptr);
    openapi::ConstraintSet set = openapi::extract_constraints(*login);
    CHECK(set.required_fields == std::set<std::string>{"email", "password"});
    const openapi::SchemaNode* missing = api.find_shared("Nope");
    CHECK(missing == nullptr);
}

TEST_CASE("serialization is stable under reparsing") {
    openapi::ApiDocument api =
        openapi::parse_openapi_file(testutil::fixture("openapi/todo_api.json"));
    std::string once = openapi::serialize_document(api);
    openapi::ApiDocument again = openapi::parse_openapi(once);
    CHECK(openapi::serialize_document(again) == once);
    CHECK(again.endpoints.size() == api.endpoints.size());
    CHECK(openapi::list_tags(again) == openapi::list_tags(api));
    for (size_t i = 0; i < api.endpoints.size(); ++i) {
        CHECK(again.endpoints[i].path == api.endpoints[i].path);
        CHECK(again.endpoints[i].method == api.endpoints[i].method);
        CHECK(again.endpoints[i].security == api.endpoints[i].security);
    }
}

TEST_CASE("method helpers") {
    CHECK(openapi::method_from_string("get") == HttpMethod::Get);
    CHECK(openapi::method_from_string("POST") == HttpMethod::Post);
    CHECK_FALSE(openapi::method_from_string("fetch").has_value());
    CHECK(openapi::to_string(HttpMethod::Delete) == "DELETE");
}
