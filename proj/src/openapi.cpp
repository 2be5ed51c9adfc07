#include "resttsl/openapi.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "resttsl/errors.hpp"
#include "yaml_compat.hpp"

namespace resttsl::openapi {

namespace {

const char* const kMethodNames[] = {"get", "post", "put", "patch", "delete", "head", "options"};

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_json_text(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{';
    }
    return false;
}

struct Parser {
    ApiDocument doc;

    void warn(const std::string& message) { doc.warnings.push_back(message); }

    SchemaKind kind_from_type(const std::string& type, const std::string& where) {
        if (type == "string") return SchemaKind::String;
        if (type == "number") return SchemaKind::Number;
        if (type == "integer") return SchemaKind::Integer;
        if (type == "boolean") return SchemaKind::Boolean;
        if (type == "array") return SchemaKind::Array;
        if (type == "object") return SchemaKind::Object;
        warn("unknown schema type '" + type + "' at " + where + ", treating as object");
        return SchemaKind::Object;
    }

    SchemaKind infer_kind(const Json& schema) {
        if (schema.contains("properties") || schema.contains("required")) return SchemaKind::Object;
        if (schema.contains("items")) return SchemaKind::Array;
        if (schema.contains("enum") && schema["enum"].is_array() && !schema["enum"].empty()) {
            const Json& first = schema["enum"][0];
            if (first.is_string()) return SchemaKind::String;
            if (first.is_number_float()) return SchemaKind::Number;
            if (first.is_number()) return SchemaKind::Integer;
            if (first.is_boolean()) return SchemaKind::Boolean;
        }
        if (schema.contains("minLength") || schema.contains("maxLength") ||
            schema.contains("pattern") || schema.contains("format")) {
            return SchemaKind::String;
        }
        if (schema.contains("minimum") || schema.contains("maximum")) return SchemaKind::Number;
        return SchemaKind::Object;
    }

    void read_constraints(const Json& schema, SchemaNode& node, const std::string& where) {
        ConstraintSet& cs = node.constraints;
        if (schema.contains("required") && schema["required"].is_array()) {
            for (const Json& item : schema["required"]) {
                if (item.is_string()) cs.required_fields.insert(item.get<std::string>());
            }
        }
        if (schema.contains("minLength") && schema["minLength"].is_number()) {
            cs.min_length = schema["minLength"].get<std::uint64_t>();
        }
        if (schema.contains("maxLength") && schema["maxLength"].is_number()) {
            cs.max_length = schema["maxLength"].get<std::uint64_t>();
        }
        if (schema.contains("pattern") && schema["pattern"].is_string()) {
            cs.pattern = schema["pattern"].get<std::string>();
        }
        if (schema.contains("minimum") && schema["minimum"].is_number()) {
            cs.minimum = schema["minimum"].get<double>();
        }
        if (schema.contains("maximum") && schema["maximum"].is_number()) {
            cs.maximum = schema["maximum"].get<double>();
        }
        if (schema.contains("enum")) {
            if (!schema["enum"].is_array() || schema["enum"].empty()) {
                warn("ignoring empty or non-array enum at " + where);
            } else {
                cs.enum_values = std::vector<Json>(schema["enum"].begin(), schema["enum"].end());
            }
        }
        if (schema.contains("format") && schema["format"].is_string()) {
            cs.format = schema["format"].get<std::string>();
        }
        if (cs.min_length && cs.max_length && *cs.min_length > *cs.max_length) {
            fail(ErrorCode::MalformedDocument,
                 "minLength exceeds maxLength at " + where);
        }
        if (cs.minimum && cs.maximum && *cs.minimum > *cs.maximum) {
            fail(ErrorCode::MalformedDocument, "minimum exceeds maximum at " + where);
        }
    }

    /// Shallow merge for allOf: later variants win scalar slots, properties
    /// and required accumulate.
    void merge_into(SchemaNode& base, const SchemaNode& extra) {
        for (const auto& [name, prop] : extra.properties) {
            auto it = std::find_if(base.properties.begin(), base.properties.end(),
                                   [&](const auto& p) { return p.first == name; });
            if (it == base.properties.end()) {
                base.properties.emplace_back(name, prop);
            } else {
                it->second = prop;
            }
        }
        base.constraints.required_fields.insert(extra.constraints.required_fields.begin(),
                                                extra.constraints.required_fields.end());
        if (extra.constraints.min_length) base.constraints.min_length = extra.constraints.min_length;
        if (extra.constraints.max_length) base.constraints.max_length = extra.constraints.max_length;
        if (extra.constraints.pattern) base.constraints.pattern = extra.constraints.pattern;
        if (extra.constraints.minimum) base.constraints.minimum = extra.constraints.minimum;
        if (extra.constraints.maximum) base.constraints.maximum = extra.constraints.maximum;
        if (extra.constraints.enum_values) base.constraints.enum_values = extra.constraints.enum_values;
        if (extra.constraints.format) base.constraints.format = extra.constraints.format;
        if (extra.kind != SchemaKind::Object || !extra.properties.empty()) base.kind = extra.kind;
        if (extra.items) base.items = extra.items;
        if (!extra.ref_name.empty()) base.ref_name = extra.ref_name;
    }

    SchemaNode parse_schema(const Json& schema, const std::string& where) {
        SchemaNode node;
        if (!schema.is_object()) {
            warn("non-object schema at " + where + ", treating as empty object schema");
            return node;
        }
        if (schema.contains("$ref")) {
            const Json& ref = schema["$ref"];
            if (!ref.is_string()) fail(ErrorCode::MalformedDocument, "non-string $ref at " + where);
            std::string target = ref.get<std::string>();
            const std::string prefix = "#/components/schemas/";
            if (target.rfind(prefix, 0) != 0) {
                fail(ErrorCode::UnresolvableRef, "unsupported $ref '" + target + "' at " + where);
            }
            node.kind = SchemaKind::Ref;
            node.ref_name = target.substr(prefix.size());
            return node;
        }
        if (schema.contains("allOf") && schema["allOf"].is_array()) {
            SchemaNode merged;
            merged.kind = SchemaKind::Object;
            for (const Json& part : schema["allOf"]) {
                SchemaNode variant = parse_schema(part, where + "/allOf");
                if (variant.kind == SchemaKind::Ref) {
                    // Shallow merge only: the referenced schema is inlined later
                    // by the resolver, so keep the reference when it stands alone.
                    if (schema["allOf"].size() == 1) return variant;
                    warn("allOf with $ref at " + where + " merged shallowly; referenced fields not inlined");
                    continue;
                }
                merge_into(merged, variant);
            }
            read_constraints(schema, merged, where);
            return merged;
        }
        for (const char* combo : {"oneOf", "anyOf"}) {
            if (schema.contains(combo) && schema[combo].is_array() && !schema[combo].empty()) {
                warn(std::string(combo) + " at " + where + " reduced to its first variant");
                return parse_schema(schema[combo][0], where + "/" + combo + "/0");
            }
        }

        if (schema.contains("type") && schema["type"].is_string()) {
            node.kind = kind_from_type(schema["type"].get<std::string>(), where);
        } else if (schema.contains("type") && schema["type"].is_array() &&
                   !schema["type"].empty() && schema["type"][0].is_string()) {
            // 3.1 nullable unions: first entry wins.
            node.kind = kind_from_type(schema["type"][0].get<std::string>(), where);
        } else {
            node.kind = infer_kind(schema);
        }
        read_constraints(schema, node, where);
        if (node.kind == SchemaKind::Object && schema.contains("properties") &&
            schema["properties"].is_object()) {
            for (const auto& [name, prop] : schema["properties"].items()) {
                node.properties.emplace_back(name, parse_schema(prop, where + "/properties/" + name));
            }
        }
        if (node.kind == SchemaKind::Array) {
            if (schema.contains("items")) {
                node.items = std::make_shared<const SchemaNode>(
                    parse_schema(schema["items"], where + "/items"));
            }
        }
        return node;
    }

    std::optional<SchemaNode> json_body_schema(const Json& owner, const std::string& where) {
        if (!owner.contains("content") || !owner["content"].is_object()) return std::nullopt;
        const Json& content = owner["content"];
        for (const auto& [media, body] : content.items()) {
            if (lower(media).rfind("application/json", 0) == 0) {
                if (body.is_object() && body.contains("schema")) {
                    return parse_schema(body["schema"], where);
                }
                return std::nullopt;
            }
        }
        if (!content.empty()) {
            warn("no JSON media type at " + where + "; other media types ignored");
        }
        return std::nullopt;
    }

    ParamDef parse_param(const Json& param, const std::string& where) {
        ParamDef def;
        if (!param.contains("name") || !param["name"].is_string()) {
            fail(ErrorCode::MalformedDocument, "parameter without name at " + where);
        }
        def.name = param["name"].get<std::string>();
        std::string in = param.contains("in") && param["in"].is_string()
                             ? param["in"].get<std::string>()
                             : "query";
        if (in == "path") {
            def.location = ParamLocation::Path;
        } else if (in == "query") {
            def.location = ParamLocation::Query;
        } else if (in == "header") {
            def.location = ParamLocation::Header;
        } else {
            warn("parameter location '" + in + "' at " + where + " not supported; treated as query");
            def.location = ParamLocation::Query;
        }
        def.required = def.location == ParamLocation::Path;
        if (param.contains("required") && param["required"].is_boolean()) {
            def.required = param["required"].get<bool>() || def.location == ParamLocation::Path;
        }
        if (param.contains("schema")) {
            def.schema = parse_schema(param["schema"], where + "/schema");
        } else {
            def.schema.kind = SchemaKind::String;
        }
        return def;
    }

    std::vector<std::string> security_names(const Json& requirements) {
        std::vector<std::string> names;
        if (!requirements.is_array()) return names;
        for (const Json& req : requirements) {
            if (!req.is_object()) continue;
            for (const auto& [name, scopes] : req.items()) {
                (void)scopes;
                if (std::find(names.begin(), names.end(), name) == names.end()) {
                    names.push_back(name);
                }
            }
        }
        return names;
    }

    void parse_security_schemes(const Json& components) {
        if (!components.contains("securitySchemes") || !components["securitySchemes"].is_object()) {
            return;
        }
        for (const auto& [name, scheme] : components["securitySchemes"].items()) {
            SecurityScheme out;
            std::string type = scheme.contains("type") && scheme["type"].is_string()
                                   ? lower(scheme["type"].get<std::string>())
                                   : "";
            if (type == "http") {
                std::string http_scheme = scheme.contains("scheme") && scheme["scheme"].is_string()
                                              ? lower(scheme["scheme"].get<std::string>())
                                              : "";
                out.kind = http_scheme == "basic" ? SecurityKind::Basic : SecurityKind::Bearer;
            } else if (type == "apikey") {
                out.kind = SecurityKind::ApiKey;
                if (scheme.contains("name") && scheme["name"].is_string()) {
                    out.key_name = scheme["name"].get<std::string>();
                }
            } else if (type == "oauth2" || type == "openidconnect") {
                out.kind = SecurityKind::OAuth2;
            } else {
                out.kind = SecurityKind::Other;
                warn("security scheme '" + name + "' has unsupported type '" + type + "'");
            }
            doc.security_schemes.emplace(name, out);
        }
    }

    void ensure_path_params(EndpointDef& ep) {
        const std::string& path = ep.path;
        size_t pos = 0;
        while ((pos = path.find('{', pos)) != std::string::npos) {
            size_t end = path.find('}', pos);
            if (end == std::string::npos) {
                fail(ErrorCode::MalformedDocument, "unterminated path template in " + path);
            }
            std::string name = path.substr(pos + 1, end - pos - 1);
            bool declared = std::any_of(ep.parameters.begin(), ep.parameters.end(),
                                        [&](const ParamDef& p) {
                                            return p.location == ParamLocation::Path && p.name == name;
                                        });
            if (!declared) {
                ParamDef synthesized;
                synthesized.name = name;
                synthesized.location = ParamLocation::Path;
                synthesized.required = true;
                synthesized.schema.kind = SchemaKind::String;
                ep.parameters.push_back(synthesized);
                warn("path parameter '" + name + "' of " + path + " undeclared; synthesized as string");
            }
            pos = end + 1;
        }
    }

    void collect_refs(const SchemaNode& node, std::set<std::string>& out) const {
        if (node.kind == SchemaKind::Ref) {
            out.insert(node.ref_name);
            return;
        }
        for (const auto& [name, prop] : node.properties) {
            (void)name;
            collect_refs(prop, out);
        }
        if (node.items) collect_refs(*node.items, out);
    }

    void check_refs() const {
        std::set<std::string> refs;
        for (const auto& [name, schema] : doc.shared_schemas) {
            (void)name;
            collect_refs(schema, refs);
        }
        for (const EndpointDef& ep : doc.endpoints) {
            for (const ParamDef& p : ep.parameters) collect_refs(p.schema, refs);
            if (ep.request_schema) collect_refs(*ep.request_schema, refs);
            for (const auto& [status, schema] : ep.responses) {
                (void)status;
                if (schema) collect_refs(*schema, refs);
            }
        }
        for (const std::string& name : refs) {
            if (doc.find_shared(name) == nullptr) {
                fail(ErrorCode::UnresolvableRef, "schema reference '" + name + "' has no target");
            }
        }
    }

    void run(const Json& root) {
        if (!root.is_object()) fail(ErrorCode::MalformedDocument, "document root is not an object");
        if (root.contains("swagger")) {
            fail(ErrorCode::MalformedDocument, "OpenAPI 2.x (swagger) documents are not supported");
        }
        if (!root.contains("openapi") || !root["openapi"].is_string()) {
            fail(ErrorCode::MalformedDocument, "missing openapi version field");
        }
        std::string version = root["openapi"].get<std::string>();
        if (version.rfind("3.", 0) != 0) {
            fail(ErrorCode::MalformedDocument, "unsupported OpenAPI version '" + version + "'");
        }
        if (root.contains("info") && root["info"].is_object()) {
            const Json& info = root["info"];
            if (info.contains("title") && info["title"].is_string()) {
                doc.title = info["title"].get<std::string>();
            }
            if (info.contains("version") && info["version"].is_string()) {
                doc.version = info["version"].get<std::string>();
            }
        }
        if (root.contains("servers") && root["servers"].is_array()) {
            for (const Json& server : root["servers"]) {
                if (server.is_object() && server.contains("url") && server["url"].is_string()) {
                    doc.servers.push_back(server["url"].get<std::string>());
                }
            }
        }
        if (root.contains("components") && root["components"].is_object()) {
            const Json& components = root["components"];
            parse_security_schemes(components);
            if (components.contains("schemas") && components["schemas"].is_object()) {
                for (const auto& [name, schema] : components["schemas"].items()) {
                    doc.shared_schemas.emplace_back(
                        name, parse_schema(schema, "#/components/schemas/" + name));
                }
            }
        }
        std::vector<std::string> root_security =
            root.contains("security") ? security_names(root["security"]) : std::vector<std::string>{};

        if (!root.contains("paths") || !root["paths"].is_object()) {
            fail(ErrorCode::MalformedDocument, "missing paths object");
        }
        for (const auto& [path, item] : root["paths"].items()) {
            if (!item.is_object()) {
                warn("path item " + path + " is not an object; ignored");
                continue;
            }
            std::vector<ParamDef> shared_params;
            if (item.contains("parameters") && item["parameters"].is_array()) {
                for (const Json& p : item["parameters"]) {
                    shared_params.push_back(parse_param(p, path + "/parameters"));
                }
            }
            for (const char* method_name : kMethodNames) {
                if (!item.contains(method_name)) continue;
                const Json& op = item[method_name];
                if (!op.is_object()) continue;
                EndpointDef ep;
                ep.path = path;
                ep.method = *method_from_string(method_name);
                const std::string where = std::string(method_name) + " " + path;
                if (op.contains("operationId") && op["operationId"].is_string()) {
                    ep.operation_id = op["operationId"].get<std::string>();
                }
                if (op.contains("tags") && op["tags"].is_array()) {
                    for (const Json& tag : op["tags"]) {
                        if (tag.is_string()) ep.tags.push_back(tag.get<std::string>());
                    }
                }
                ep.parameters = shared_params;
                if (op.contains("parameters") && op["parameters"].is_array()) {
                    for (const Json& p : op["parameters"]) {
                        ParamDef parsed = parse_param(p, where + "/parameters");
                        auto it = std::find_if(ep.parameters.begin(), ep.parameters.end(),
                                               [&](const ParamDef& existing) {
                                                   return existing.name == parsed.name &&
                                                          existing.location == parsed.location;
                                               });
                        if (it != ep.parameters.end()) {
                            *it = parsed;
                        } else {
                            ep.parameters.push_back(parsed);
                        }
                    }
                }
                if (op.contains("requestBody") && op["requestBody"].is_object()) {
                    ep.request_schema = json_body_schema(op["requestBody"], where + "/requestBody");
                }
                if (op.contains("responses") && op["responses"].is_object()) {
                    for (const auto& [status_text, response] : op["responses"].items()) {
                        int status = 0;
                        try {
                            size_t used = 0;
                            status = std::stoi(status_text, &used);
                            if (used != status_text.size()) status = 0;
                        } catch (...) {
                            status = 0;
                        }
                        if (status < 100 || status > 599) {
                            warn("response key '" + status_text + "' at " + where + " ignored");
                            continue;
                        }
                        std::optional<SchemaNode> schema;
                        if (response.is_object()) {
                            schema = json_body_schema(response,
                                                      where + "/responses/" + status_text);
                        }
                        ep.responses[status] = std::move(schema);
                    }
                }
                if (ep.responses.empty()) {
                    fail(ErrorCode::MalformedDocument, "no declared responses for " + where);
                }
                ep.security = op.contains("security") ? security_names(op["security"]) : root_security;
                for (const std::string& name : ep.security) {
                    if (doc.security_schemes.find(name) == doc.security_schemes.end()) {
                        fail(ErrorCode::MalformedDocument,
                             "security requirement '" + name + "' at " + where +
                                 " names no declared scheme");
                    }
                }
                ensure_path_params(ep);
                bool duplicate = std::any_of(doc.endpoints.begin(), doc.endpoints.end(),
                                             [&](const EndpointDef& other) {
                                                 return other.path == ep.path &&
                                                        other.method == ep.method;
                                             });
                if (duplicate) {
                    fail(ErrorCode::DuplicateEndpoint, "duplicate operation " + where);
                }
                doc.endpoints.push_back(std::move(ep));
            }
        }
        check_refs();
    }
};

Json schema_to_json(const SchemaNode& node) {
    Json out = Json::object();
    if (node.kind == SchemaKind::Ref) {
        out["$ref"] = "#/components/schemas/" + node.ref_name;
        return out;
    }
    out["type"] = std::string(to_string(node.kind));
    const ConstraintSet& cs = node.constraints;
    if (cs.format) out["format"] = *cs.format;
    if (cs.min_length) out["minLength"] = *cs.min_length;
    if (cs.max_length) out["maxLength"] = *cs.max_length;
    if (cs.pattern) out["pattern"] = *cs.pattern;
    if (cs.minimum) out["minimum"] = *cs.minimum;
    if (cs.maximum) out["maximum"] = *cs.maximum;
    if (cs.enum_values) out["enum"] = *cs.enum_values;
    if (!node.properties.empty()) {
        Json props = Json::object();
        for (const auto& [name, prop] : node.properties) props[name] = schema_to_json(prop);
        out["properties"] = std::move(props);
    }
    if (!cs.required_fields.empty()) {
        out["required"] = Json(cs.required_fields);
    }
    if (node.kind == SchemaKind::Array && node.items) {
        out["items"] = schema_to_json(*node.items);
    }
    return out;
}

} // namespace

std::string_view to_string(HttpMethod method) {
    switch (method) {
    case HttpMethod::Get: return "GET";
    case HttpMethod::Post: return "POST";
    case HttpMethod::Put: return "PUT";
    case HttpMethod::Patch: return "PATCH";
    case HttpMethod::Delete: return "DELETE";
    case HttpMethod::Head: return "HEAD";
    case HttpMethod::Options: return "OPTIONS";
    }
    return "GET";
}

std::optional<HttpMethod> method_from_string(std::string_view text) {
    std::string name = lower(text);
    if (name == "get") return HttpMethod::Get;
    if (name == "post") return HttpMethod::Post;
    if (name == "put") return HttpMethod::Put;
    if (name == "patch") return HttpMethod::Patch;
    if (name == "delete") return HttpMethod::Delete;
    if (name == "head") return HttpMethod::Head;
    if (name == "options") return HttpMethod::Options;
    return std::nullopt;
}

std::string_view to_string(SchemaKind kind) {
    switch (kind) {
    case SchemaKind::String: return "string";
    case SchemaKind::Number: return "number";
    case SchemaKind::Integer: return "integer";
    case SchemaKind::Boolean: return "boolean";
    case SchemaKind::Array: return "array";
    case SchemaKind::Object: return "object";
    case SchemaKind::Ref: return "ref";
    }
    return "object";
}

std::string_view to_string(ParamLocation location) {
    switch (location) {
    case ParamLocation::Path: return "path";
    case ParamLocation::Query: return "query";
    case ParamLocation::Header: return "header";
    }
    return "query";
}

bool ConstraintSet::empty() const {
    return required_fields.empty() && !min_length && !max_length && !pattern && !minimum &&
           !maximum && !enum_values && !format;
}

const SchemaNode* ApiDocument::find_shared(const std::string& name) const {
    for (const auto& [candidate, schema] : shared_schemas) {
        if (candidate == name) return &schema;
    }
    return nullptr;
}

const SchemaNode* ApiDocument::resolve(const SchemaNode& node) const {
    const SchemaNode* current = &node;
    int hops = 0;
    while (current != nullptr && current->kind == SchemaKind::Ref) {
        if (++hops > 32) return nullptr;
        current = find_shared(current->ref_name);
    }
    return current;
}

ApiDocument parse_openapi(const std::string& document_text) {
    Json root;
    if (is_json_text(document_text)) {
        try {
            root = Json::parse(document_text);
        } catch (const std::exception& e) {
            fail(ErrorCode::MalformedDocument, e.what());
        }
    } else {
        try {
            root = yamlc::to_json(YAML::Load(document_text));
        } catch (const YAML::Exception& e) {
            fail(ErrorCode::MalformedDocument, e.what());
        }
    }
    Parser parser;
    parser.run(root);
    return std::move(parser.doc);
}

ApiDocument parse_openapi_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::MalformedDocument, "cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_openapi(buffer.str());
}

std::vector<std::string> list_tags(const ApiDocument& api) {
    std::vector<std::string> tags;
    auto push_unique = [&](const std::string& tag) {
        if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
    };
    for (const EndpointDef& ep : api.endpoints) {
        if (ep.tags.empty()) {
            push_unique("untagged");
        } else {
            for (const std::string& tag : ep.tags) push_unique(tag);
        }
    }
    return tags;
}

ApiDocument slice_by_tag(const ApiDocument& api, const std::string& tag) {
    std::vector<std::string> known = list_tags(api);
    if (std::find(known.begin(), known.end(), tag) == known.end()) {
        fail(ErrorCode::UnknownTag, "tag '" + tag + "' not present in document");
    }
    ApiDocument slice;
    slice.title = api.title;
    slice.version = api.version;
    slice.servers = api.servers;
    for (const EndpointDef& ep : api.endpoints) {
        bool keep = ep.tags.empty() ? tag == "untagged"
                                    : std::find(ep.tags.begin(), ep.tags.end(), tag) != ep.tags.end();
        if (keep) slice.endpoints.push_back(ep);
    }
    // Transitive closure of referenced shared schemas.
    std::set<std::string> needed;
    Parser helper;
    for (const EndpointDef& ep : slice.endpoints) {
        for (const ParamDef& p : ep.parameters) helper.collect_refs(p.schema, needed);
        if (ep.request_schema) helper.collect_refs(*ep.request_schema, needed);
        for (const auto& [status, schema] : ep.responses) {
            (void)status;
            if (schema) helper.collect_refs(*schema, needed);
        }
    }
    for (bool grew = true; grew;) {
        grew = false;
        for (const std::string& name : std::set<std::string>(needed)) {
            const SchemaNode* target = api.find_shared(name);
            if (target == nullptr) continue;
            std::set<std::string> inner;
            helper.collect_refs(*target, inner);
            for (const std::string& extra : inner) {
                if (needed.insert(extra).second) grew = true;
            }
        }
    }
    for (const auto& [name, schema] : api.shared_schemas) {
        if (needed.count(name) != 0) slice.shared_schemas.emplace_back(name, schema);
    }
    std::set<std::string> used_schemes;
    for (const EndpointDef& ep : slice.endpoints) {
        used_schemes.insert(ep.security.begin(), ep.security.end());
    }
    for (const auto& [name, scheme] : api.security_schemes) {
        if (used_schemes.count(name) != 0) slice.security_schemes.emplace(name, scheme);
    }
    return slice;
}

ConstraintSet extract_constraints(const SchemaNode& node) {
    return node.constraints;
}

Json to_json(const ApiDocument& api) {
    Json out = Json::object();
    out["openapi"] = "3.0.3";
    out["info"] = Json{{"title", api.title}, {"version", api.version}};
    if (!api.servers.empty()) {
        Json servers = Json::array();
        for (const std::string& url : api.servers) servers.push_back(Json{{"url", url}});
        out["servers"] = std::move(servers);
    }
    Json paths = Json::object();
    for (const EndpointDef& ep : api.endpoints) {
        Json op = Json::object();
        if (ep.operation_id) op["operationId"] = *ep.operation_id;
        if (!ep.tags.empty()) op["tags"] = ep.tags;
        if (!ep.parameters.empty()) {
            Json params = Json::array();
            for (const ParamDef& p : ep.parameters) {
                params.push_back(Json{{"name", p.name},
                                      {"in", std::string(to_string(p.location))},
                                      {"required", p.required},
                                      {"schema", schema_to_json(p.schema)}});
            }
            op["parameters"] = std::move(params);
        }
        if (ep.request_schema) {
            op["requestBody"] =
                Json{{"required", true},
                     {"content",
                      Json{{"application/json", Json{{"schema", schema_to_json(*ep.request_schema)}}}}}};
        }
        Json responses = Json::object();
        for (const auto& [status, schema] : ep.responses) {
            Json response = Json{{"description", std::to_string(status) + " response"}};
            if (schema) {
                response["content"] =
                    Json{{"application/json", Json{{"schema", schema_to_json(*schema)}}}};
            }
            responses[std::to_string(status)] = std::move(response);
        }
        op["responses"] = std::move(responses);
        if (!ep.security.empty()) {
            Json security = Json::array();
            for (const std::string& name : ep.security) {
                security.push_back(Json{{name, Json::array()}});
            }
            op["security"] = std::move(security);
        }
        if (!paths.contains(ep.path)) paths[ep.path] = Json::object();
        paths[ep.path][lower(to_string(ep.method))] = std::move(op);
    }
    out["paths"] = std::move(paths);
    if (!api.shared_schemas.empty() || !api.security_schemes.empty()) {
        Json components = Json::object();
        if (!api.shared_schemas.empty()) {
            Json schemas = Json::object();
            for (const auto& [name, schema] : api.shared_schemas) {
                schemas[name] = schema_to_json(schema);
            }
            components["schemas"] = std::move(schemas);
        }
        if (!api.security_schemes.empty()) {
            Json schemes = Json::object();
            for (const auto& [name, scheme] : api.security_schemes) {
                Json entry = Json::object();
                switch (scheme.kind) {
                case SecurityKind::Bearer:
                    entry = Json{{"type", "http"}, {"scheme", "bearer"}};
                    break;
                case SecurityKind::Basic:
                    entry = Json{{"type", "http"}, {"scheme", "basic"}};
                    break;
                case SecurityKind::ApiKey:
                    entry = Json{{"type", "apiKey"}, {"in", "header"}, {"name", scheme.key_name}};
                    break;
                case SecurityKind::OAuth2:
                    entry = Json{{"type", "oauth2"}, {"flows", Json::object()}};
                    break;
                case SecurityKind::Other:
                    entry = Json{{"type", "http"}, {"scheme", "bearer"}};
                    break;
                }
                schemes[name] = std::move(entry);
            }
            components["securitySchemes"] = std::move(schemes);
        }
        out["components"] = std::move(components);
    }
    return out;
}

std::string serialize_document(const ApiDocument& api) {
    return to_json(api).dump(2) + "\n";
}

} // namespace resttsl::openapi
