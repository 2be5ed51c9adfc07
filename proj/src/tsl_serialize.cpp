#include <charconv>
#include <cstdio>
#include <string>

#include <cctype>

#include "resttsl/errors.hpp"
#include "resttsl/tsl.hpp"
#include "tsl_internal.hpp"
#include "yaml_compat.hpp"

namespace resttsl::tsl {

namespace {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    std::string text(buffer, ptr);
    if (text.find('.') == std::string::npos && text.find('e') == std::string::npos &&
        text.find("inf") == std::string::npos && text.find("nan") == std::string::npos) {
        text += ".0";
    }
    return text;
}

std::string quote_string(const std::string& text) {
    std::string out = "\"";
    for (unsigned char c : text) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (c < 0x20) {
                char buffer[8];
                std::snprintf(buffer, sizeof(buffer), "\\x%02x", c);
                out += buffer;
            } else {
                out += static_cast<char>(c);
            }
        }
    }
    out += '"';
    return out;
}

bool plain_safe(const std::string& text) {
    if (text.empty()) return false;
    if (yamlc::plain_scalar_is_typed(text)) return false;
    unsigned char first = static_cast<unsigned char>(text.front());
    if (std::string("!&*?|>'\"%@`#,[]{}").find(static_cast<char>(first)) != std::string::npos) {
        return false;
    }
    if (text == "-" || text.rfind("- ", 0) == 0) return false;
    if (text == ":" || text.rfind(": ", 0) == 0) return false;
    if (text == "?" || text.rfind("? ", 0) == 0) return false;
    if (text == "---" || text.rfind("--- ", 0) == 0) return false;
    if (std::isspace(first) || std::isspace(static_cast<unsigned char>(text.back()))) return false;
    if (text.back() == ':') return false;
    for (size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (c < 0x20) return false;
        if (text[i] == ':' && i + 1 < text.size() && text[i + 1] == ' ') return false;
        if (text[i] == ' ' && i + 1 < text.size() && text[i + 1] == '#') return false;
    }
    return true;
}

/// Scalar in structural position (ids, names, endpoints, map keys): plain
/// whenever safe.
std::string structural_scalar(const std::string& text) {
    return plain_safe(text) ? text : quote_string(text);
}

/// Scalar in data position (params, bodies, preconditions): strings are
/// always double-quoted, other types use their canonical form.
std::string data_scalar(const Json& value) {
    if (value.is_null()) return "null";
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    if (value.is_number_float()) return format_double(value.get<double>());
    return quote_string(value.get_ref<const std::string&>());
}

class Writer {
public:
    std::string take() { return std::move(out_); }

    void line(int level, const std::string& text) {
        out_.append(static_cast<size_t>(level) * 2, ' ');
        out_ += text;
        out_ += '\n';
    }

    void value_entry(int level, const std::string& key, const Json& value) {
        std::string head = structural_scalar(key) + ":";
        if (value.is_object()) {
            if (value.empty()) {
                line(level, head + " {}");
            } else {
                line(level, head);
                object_entries(level + 1, value);
            }
        } else if (value.is_array()) {
            if (value.empty()) {
                line(level, head + " []");
            } else {
                line(level, head);
                sequence_entries(level + 1, value);
            }
        } else {
            line(level, head + " " + data_scalar(value));
        }
    }

    void object_entries(int level, const Json& object) {
        for (const auto& [key, value] : object.items()) {
            value_entry(level, key, value);
        }
    }

    void sequence_entries(int level, const Json& array) {
        for (const Json& element : array) {
            if (element.is_object() && !element.empty()) {
                dashed_object(level, element);
            } else if (element.is_object()) {
                line(level, "- {}");
            } else if (element.is_array() && !element.empty()) {
                line(level, "-");
                sequence_entries(level + 1, element);
            } else if (element.is_array()) {
                line(level, "- []");
            } else {
                line(level, "- " + data_scalar(element));
            }
        }
    }

    /// Emits an object as a sequence element, first key on the dash line.
    void dashed_object(int level, const Json& object) {
        bool first = true;
        for (const auto& [key, value] : object.items()) {
            if (first) {
                value_entry_dashed(level, key, value);
                first = false;
            } else {
                value_entry(level + 1, key, value);
            }
        }
    }

    void matcher_entry(int level, const std::string& key, const MatcherTree& matcher) {
        std::string head = structural_scalar(key) + ":";
        switch (matcher.kind) {
        case MatcherTree::Kind::Exact:
            if (matcher.exact_value.is_string() &&
                detail::looks_like_matcher_text(matcher.exact_value.get_ref<const std::string&>())) {
                fail(ErrorCode::MatcherSyntax,
                     "exact string '" + matcher.exact_value.get<std::string>() +
                         "' is not representable; it would read back as a matcher");
            }
            line(level, head + " " + data_scalar(matcher.exact_value));
            break;
        case MatcherTree::Kind::TypeIs:
            line(level, head + " is " + std::string(to_string(matcher.checked_type)));
            break;
        case MatcherTree::Kind::NonEmpty:
            line(level, head + " is " + std::string(to_string(matcher.checked_type)) + " not empty");
            break;
        case MatcherTree::Kind::Object:
            if (matcher.fields.empty()) {
                line(level, head + " {}");
            } else {
                line(level, head);
                for (const auto& [name, field] : matcher.fields) {
                    matcher_entry(level + 1, name, field);
                }
            }
            break;
        case MatcherTree::Kind::Array:
            if (matcher.elements.empty()) {
                line(level, head + " []");
            } else {
                line(level, head);
                for (const MatcherTree& element : matcher.elements) {
                    matcher_sequence_item(level + 1, element);
                }
            }
            break;
        }
    }

private:
    void value_entry_dashed(int level, const std::string& key, const Json& value) {
        std::string head = "- " + structural_scalar(key) + ":";
        if (value.is_object()) {
            if (value.empty()) {
                line(level, head + " {}");
            } else {
                line(level, head);
                object_entries(level + 2, value);
            }
        } else if (value.is_array()) {
            if (value.empty()) {
                line(level, head + " []");
            } else {
                line(level, head);
                sequence_entries(level + 2, value);
            }
        } else {
            line(level, head + " " + data_scalar(value));
        }
    }

    void matcher_sequence_item(int level, const MatcherTree& matcher) {
        switch (matcher.kind) {
        case MatcherTree::Kind::Exact:
            if (matcher.exact_value.is_string() &&
                detail::looks_like_matcher_text(matcher.exact_value.get_ref<const std::string&>())) {
                fail(ErrorCode::MatcherSyntax,
                     "exact string '" + matcher.exact_value.get<std::string>() +
                         "' is not representable; it would read back as a matcher");
            }
            line(level, "- " + data_scalar(matcher.exact_value));
            break;
        case MatcherTree::Kind::TypeIs:
            line(level, "- is " + std::string(to_string(matcher.checked_type)));
            break;
        case MatcherTree::Kind::NonEmpty:
            line(level, "- is " + std::string(to_string(matcher.checked_type)) + " not empty");
            break;
        case MatcherTree::Kind::Object: {
            if (matcher.fields.empty()) {
                line(level, "- {}");
                return;
            }
            bool first = true;
            for (const auto& [name, field] : matcher.fields) {
                if (first) {
                    // Reuse matcher_entry at the dash line by prefixing manually.
                    size_t mark = out_.size();
                    matcher_entry(level + 1, name, field);
                    // Replace the first line's leading spaces with "<indent>- ".
                    size_t indent = static_cast<size_t>(level + 1) * 2;
                    out_.replace(mark + indent - 2, 2, "- ");
                    first = false;
                } else {
                    matcher_entry(level + 1, name, field);
                }
            }
            break;
        }
        case MatcherTree::Kind::Array:
            if (matcher.elements.empty()) {
                line(level, "- []");
            } else {
                line(level, "-");
                for (const MatcherTree& element : matcher.elements) {
                    matcher_sequence_item(level + 1, element);
                }
            }
            break;
        }
    }

    std::string out_;
};

} // namespace

std::string serialize_tsl(const TslDocument& doc) {
    if (doc.cases.empty()) return "[]\n";
    Writer w;
    for (const TslCase& c : doc.cases) {
        w.line(0, "- id: " + structural_scalar(c.id));
        w.line(1, "group: " + structural_scalar(c.group));
        w.line(1, "name: " + structural_scalar(c.name));
        w.line(1, "endpoint: " + structural_scalar(c.endpoint));
        w.line(1, "method: " + std::string(openapi::to_string(c.method)));
        if (!c.preconditions.empty()) {
            w.line(1, "preconditions:");
            for (const std::string& condition : c.preconditions) {
                w.line(2, "- " + quote_string(condition));
            }
        }
        if (c.path_params) w.value_entry(1, "path_params", *c.path_params);
        if (c.query_params) w.value_entry(1, "query_params", *c.query_params);
        if (c.headers) w.value_entry(1, "headers", *c.headers);
        if (c.request_body) w.value_entry(1, "request_body", *c.request_body);
        w.line(1, "expected_response:");
        w.line(2, "status_code: " + std::to_string(c.expected_response.status_code));
        if (c.expected_response.body) {
            w.matcher_entry(2, "body", *c.expected_response.body);
        }
    }
    return w.take();
}

} // namespace resttsl::tsl
