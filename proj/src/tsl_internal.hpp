#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace resttsl::tsl::detail {

inline std::vector<std::string> split_tokens(const std::string& text) {
    std::vector<std::string> tokens;
    std::istringstream in(text);
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
}

/// True when a string scalar would be read back as matcher syntax.
inline bool looks_like_matcher_text(const std::string& text) {
    std::istringstream in(text);
    std::string first;
    return (in >> first) && first == "is";
}

} // namespace resttsl::tsl::detail
