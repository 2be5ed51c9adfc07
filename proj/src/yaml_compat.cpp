#include "yaml_compat.hpp"

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdlib>

#include "resttsl/errors.hpp"

namespace resttsl::yamlc {

namespace {

bool is_core_null(const std::string& s) {
    return s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL";
}

bool is_core_true(const std::string& s) {
    return s == "true" || s == "True" || s == "TRUE";
}

bool is_core_false(const std::string& s) {
    return s == "false" || s == "False" || s == "FALSE";
}

bool parse_int64(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_uint64(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s[0] == '-') return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    if (first == last) return false;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool looks_like_number(const std::string& s) {
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    bool digits = false, dot = false, exp = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            digits = true;
        } else if (c == '.' && !dot && !exp) {
            dot = true;
        } else if ((c == 'e' || c == 'E') && digits && !exp) {
            exp = true;
            if (i + 1 < s.size() && (s[i + 1] == '+' || s[i + 1] == '-')) ++i;
        } else {
            return false;
        }
    }
    return digits;
}

bool parse_double(const std::string& s, double& out) {
    if (!looks_like_number(s)) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno != ERANGE;
}

} // namespace

Json resolve_plain_scalar(const std::string& text) {
    if (is_core_null(text)) return nullptr;
    if (is_core_true(text)) return true;
    if (is_core_false(text)) return false;
    std::int64_t i = 0;
    if (parse_int64(text, i)) return i;
    std::uint64_t u = 0;
    if (parse_uint64(text, u)) return u;
    double d = 0.0;
    if (parse_double(text, d)) return d;
    return text;
}

bool plain_scalar_is_typed(const std::string& text) {
    return !resolve_plain_scalar(text).is_string();
}

Json to_json(const YAML::Node& node) {
    switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
        return nullptr;
    case YAML::NodeType::Scalar: {
        const std::string& raw = node.Scalar();
        // Quoted or otherwise tagged scalars stay strings.
        if (node.Tag() == "!") return raw;
        if (node.Tag() == "?" || node.Tag().empty()) return resolve_plain_scalar(raw);
        return raw;
    }
    case YAML::NodeType::Sequence: {
        Json out = Json::array();
        for (const auto& item : node) out.push_back(to_json(item));
        return out;
    }
    case YAML::NodeType::Map: {
        Json out = Json::object();
        for (const auto& kv : node) {
            std::string key = kv.first.IsScalar() ? kv.first.Scalar() : YAML::Dump(kv.first);
            out[key] = to_json(kv.second);
        }
        return out;
    }
    }
    return nullptr;
}

} // namespace resttsl::yamlc
