#include "pattern_sample.hpp"

#include <algorithm>
#include <regex>
#include <vector>

namespace resttsl::derive::detail {

namespace {

/// Recursive-descent walker that builds one witness string for a regex. Only
/// the first alternative of every alternation is used; quantifiers collapse
/// to their minimum (with + meaning one).
struct Walker {
    const std::string& pattern;
    size_t i = 0;
    int depth = 0;
    bool ok = true;

    char class_sample() {
        // Leading '[' consumed. Picks one member, or a char outside a negated set.
        bool negated = false;
        if (i < pattern.size() && pattern[i] == '^') {
            negated = true;
            ++i;
        }
        std::string members;
        bool first_item = true;
        while (i < pattern.size() && (pattern[i] != ']' || first_item)) {
            char c = pattern[i];
            if (c == '\\' && i + 1 < pattern.size()) {
                char esc = pattern[i + 1];
                i += 2;
                switch (esc) {
                case 'd': members += '1'; break;
                case 'w': members += 'a'; break;
                case 's': members += ' '; break;
                case 'D': members += 'x'; break;
                case 'W': members += '!'; break;
                case 'S': members += 'a'; break;
                default: members += esc; break;
                }
            } else if (i + 2 < pattern.size() && pattern[i + 1] == '-' && pattern[i + 2] != ']') {
                members += pattern[i];
                i += 3;
            } else {
                members += c;
                ++i;
            }
            first_item = false;
        }
        if (i < pattern.size() && pattern[i] == ']') {
            ++i;
        } else {
            ok = false;
        }
        if (!negated) {
            return members.empty() ? 'a' : members.front();
        }
        for (char candidate : {'a', '0', 'Z', '!', '~', ' ', '_'}) {
            if (members.find(candidate) == std::string::npos) return candidate;
        }
        ok = false;
        return 'a';
    }

    std::string escape_sample(char esc) {
        switch (esc) {
        case 'd': return "1";
        case 'w': return "a";
        case 's': return " ";
        case 'D': return "x";
        case 'W': return "!";
        case 'S': return "a";
        case 'b':
        case 'B': return "";
        case 'n': return "\n";
        case 't': return "\t";
        case 'r': return "\r";
        default: return std::string(1, esc);
        }
    }

    void skip_to_close() {
        // Consumes the remainder of the current group after a taken branch.
        int nesting = 0;
        while (i < pattern.size()) {
            char c = pattern[i];
            if (c == '\\') {
                i += 2;
                continue;
            }
            if (c == '[') {
                ++i;
                if (i < pattern.size() && pattern[i] == '^') ++i;
                bool first_item = true;
                while (i < pattern.size() && (pattern[i] != ']' || first_item)) {
                    if (pattern[i] == '\\') ++i;
                    ++i;
                    first_item = false;
                }
                if (i < pattern.size()) ++i;
                continue;
            }
            if (c == '(') ++nesting;
            if (c == ')') {
                if (nesting == 0) return;
                --nesting;
            }
            ++i;
        }
    }

    std::string alternation() {
        std::string first = concat();
        if (i < pattern.size() && pattern[i] == '|') skip_to_close();
        return first;
    }

    std::string concat() {
        std::string out;
        while (ok && i < pattern.size()) {
            char c = pattern[i];
            if (c == '|' || c == ')') break;
            std::string atom;
            if (c == '^' || c == '$') {
                ++i;
                continue;
            }
            if (c == '(') {
                ++i;
                if (++depth > 32) {
                    ok = false;
                    break;
                }
                // Non-capturing and lookahead prefixes.
                if (i + 1 < pattern.size() && pattern[i] == '?') {
                    if (pattern[i + 1] == ':') {
                        i += 2;
                    } else {
                        // Lookarounds are beyond this sampler.
                        ok = false;
                        break;
                    }
                }
                atom = alternation();
                --depth;
                if (i < pattern.size() && pattern[i] == ')') {
                    ++i;
                } else {
                    ok = false;
                    break;
                }
            } else if (c == '[') {
                ++i;
                atom = std::string(1, class_sample());
            } else if (c == '\\') {
                if (i + 1 >= pattern.size()) {
                    ok = false;
                    break;
                }
                atom = escape_sample(pattern[i + 1]);
                i += 2;
            } else if (c == '.') {
                atom = "a";
                ++i;
            } else if (c == '*' || c == '+' || c == '?' || c == '{') {
                // Quantifier without an atom.
                ok = false;
                break;
            } else {
                atom = std::string(1, c);
                ++i;
            }
            // Quantifier.
            if (i < pattern.size()) {
                char q = pattern[i];
                if (q == '*' || q == '?') {
                    atom.clear();
                    ++i;
                } else if (q == '+') {
                    ++i;
                } else if (q == '{') {
                    size_t close = pattern.find('}', i);
                    if (close == std::string::npos) {
                        ok = false;
                        break;
                    }
                    std::string spec = pattern.substr(i + 1, close - i - 1);
                    size_t comma = spec.find(',');
                    std::string low = comma == std::string::npos ? spec : spec.substr(0, comma);
                    int repeat = 0;
                    try {
                        repeat = low.empty() ? 0 : std::stoi(low);
                    } catch (...) {
                        ok = false;
                        break;
                    }
                    if (repeat < 0 || repeat > 4096) {
                        ok = false;
                        break;
                    }
                    std::string repeated;
                    for (int k = 0; k < repeat; ++k) repeated += atom;
                    atom = std::move(repeated);
                    i = close + 1;
                }
                if (i < pattern.size() && pattern[i] == '?') ++i; // lazy marker
            }
            out += atom;
        }
        return out;
    }
};

std::optional<std::regex> compile(const std::string& pattern) {
    try {
        return std::regex(pattern, std::regex::ECMAScript);
    } catch (const std::regex_error&) {
        return std::nullopt;
    }
}

bool accepts(const std::regex& re, const std::string& text) {
    try {
        return std::regex_search(text, re);
    } catch (const std::regex_error&) {
        return false;
    }
}

} // namespace

std::optional<std::string> sample_matching(const std::string& pattern) {
    std::optional<std::regex> re = compile(pattern);
    if (!re) return std::nullopt;
    Walker walker{pattern};
    std::string witness = walker.alternation();
    if (walker.ok && walker.i >= pattern.size() && accepts(*re, witness)) {
        return witness;
    }
    static const char* const candidates[] = {
        "a", "A", "0", "abc", "Abc123", "user@example.com", "2024-01-01",
        "Passw0rd!", "aaaaaaaa", "example", "https://example.com",
    };
    for (const char* candidate : candidates) {
        if (accepts(*re, candidate)) return std::string(candidate);
    }
    return std::nullopt;
}

std::optional<std::string> sample_violating(const std::string& pattern,
                                            std::optional<std::uint64_t> min_length,
                                            std::optional<std::uint64_t> max_length) {
    std::optional<std::regex> re = compile(pattern);
    if (!re) return std::nullopt;
    std::uint64_t length = std::max<std::uint64_t>(min_length.value_or(1), 1);
    if (max_length) length = std::min(length, *max_length);
    for (char fill : {'!', '~', ' ', '0', 'a', 'A', '_', '?'}) {
        std::string candidate(static_cast<size_t>(length), fill);
        if (!accepts(*re, candidate)) return candidate;
    }
    if (length == 0 || (min_length.value_or(0) == 0)) {
        std::string empty;
        if (!accepts(*re, empty)) return empty;
    }
    return std::nullopt;
}

} // namespace resttsl::derive::detail
