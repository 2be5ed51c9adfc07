#pragma once

// Seeded random TSL document generator shared by the round-trip and
// segmentation tests. Documents exercise quoting edge cases, nested matcher
// trees, parameter maps, and uneven group sizes.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "resttsl/tsl.hpp"

namespace testgen {

using resttsl::Json;
using resttsl::openapi::HttpMethod;
namespace rtsl = resttsl::tsl;

class RandomTsl {
public:
    explicit RandomTsl(std::uint64_t seed) : rng_(seed) {}

    rtsl::TslDocument document(int max_cases = 12, int max_groups = 4) {
        rtsl::TslDocument doc;
        next_id_ = 1;
        int group_count = pick(1, max_groups);
        std::vector<std::string> groups;
        groups.reserve(static_cast<size_t>(group_count));
        for (int g = 0; g < group_count; ++g) {
            groups.push_back(word() + std::to_string(g));
        }
        int cases = pick(0, max_cases);
        for (int i = 0; i < cases; ++i) {
            doc.cases.push_back(test_case(groups[static_cast<size_t>(pick(0, group_count - 1))]));
        }
        return doc;
    }

    rtsl::TslCase test_case(const std::string& group) {
        rtsl::TslCase c;
        c.id = "TC" + std::to_string(next_id_++);
        c.group = group;
        c.name = chance(85) ? structural_text() : "";
        c.endpoint = endpoint();
        c.method = static_cast<HttpMethod>(pick(0, 6));
        int preconditions = pick(0, 2);
        for (int i = 0; i < preconditions; ++i) {
            c.preconditions.push_back(data_string());
        }
        if (chance(35)) c.path_params = param_map();
        if (chance(35)) c.query_params = param_map();
        if (chance(25)) c.headers = param_map();
        if (chance(50)) c.request_body = body_value(0);
        c.expected_response.status_code = pick(100, 599);
        if (chance(70)) {
            // A bare null body reads back as an absent expectation; keep
            // root-level exact-null matchers out of generated documents.
            rtsl::MatcherTree body = matcher(0);
            while (body.kind == rtsl::MatcherTree::Kind::Exact && body.exact_value.is_null()) {
                body = matcher(0);
            }
            c.expected_response.body = body;
        }
        return c;
    }

    rtsl::MatcherTree matcher(int depth) {
        int roll = pick(0, depth >= 2 ? 59 : 99);
        if (roll < 25) return rtsl::MatcherTree::exact(matcher_scalar());
        if (roll < 45) {
            return rtsl::MatcherTree::type_is(
                static_cast<rtsl::MatcherTree::ValueType>(pick(0, 5)));
        }
        if (roll < 60) {
            return rtsl::MatcherTree::non_empty(chance(50) ? rtsl::MatcherTree::ValueType::String
                                                           : rtsl::MatcherTree::ValueType::Array);
        }
        if (roll < 85) {
            std::vector<std::pair<std::string, rtsl::MatcherTree>> fields;
            int n = pick(0, 3);
            for (int i = 0; i < n; ++i) {
                fields.emplace_back(word() + std::to_string(i), matcher(depth + 1));
            }
            return rtsl::MatcherTree::object(std::move(fields));
        }
        std::vector<rtsl::MatcherTree> elements;
        int n = pick(0, 3);
        for (int i = 0; i < n; ++i) elements.push_back(matcher(depth + 1));
        return rtsl::MatcherTree::array(std::move(elements));
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    int next_id_ = 1;

    int pick(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }

    bool chance(int percent) { return pick(1, 100) <= percent; }

    std::string word() {
        static const char letters[] = "abcdefghijklmnopqrstuvwxyz";
        int len = pick(1, 8);
        std::string out;
        for (int i = 0; i < len; ++i) out += letters[static_cast<size_t>(pick(0, 25))];
        return out;
    }

    std::string structural_text() {
        std::string out = word();
        int extra = pick(0, 3);
        static const char joiners[] = {' ', ' ', '-', '_', ':', '.'};
        for (int i = 0; i < extra; ++i) {
            out += joiners[static_cast<size_t>(pick(0, 5))];
            out += word();
        }
        return out;
    }

    std::string endpoint() {
        std::string out = "/" + word();
        if (chance(40)) out += "/{" + word() + "}";
        if (chance(50)) out += "/" + word();
        return out;
    }

    std::string data_string() {
        if (chance(5)) return "";
        std::string out;
        int pieces = pick(1, 4);
        static const char* tricky[] = {" ", "\"", "\\", ":", "#", "{", "[", ",", "'",
                                       "\n", "\t", ": ", " #", "- "};
        for (int i = 0; i < pieces; ++i) {
            out += word();
            if (i + 1 < pieces) out += tricky[static_cast<size_t>(pick(0, 13))];
        }
        return out;
    }

    /// Strings in expected-response bodies must not read back as matchers:
    /// any leading token "is" is shifted out of matcher position.
    std::string expected_safe_string() {
        std::string out = chance(8) ? "is " + word() : data_string();
        size_t start = out.find_first_not_of(" \t\n");
        if (start == std::string::npos) return out;
        size_t end = out.find_first_of(" \t\n", start);
        std::string token = out.substr(start, end == std::string::npos ? std::string::npos
                                                                       : end - start);
        if (token == "is") return "x" + out;
        return out;
    }

    Json data_scalar() {
        int roll = pick(0, 99);
        if (roll < 10) return Json(nullptr);
        if (roll < 25) return Json(chance(50));
        if (roll < 50) return Json(pick(-1000, 1000));
        if (roll < 70) return Json(static_cast<double>(pick(-64, 64)) / 4.0);
        return Json(data_string());
    }

    Json matcher_scalar() {
        Json value = data_scalar();
        if (value.is_string()) return Json(expected_safe_string());
        return value;
    }

    Json param_map() {
        Json out = Json::object();
        int n = pick(1, 3);
        for (int i = 0; i < n; ++i) {
            Json value = data_scalar();
            while (value.is_null() && chance(60)) value = data_scalar();
            out[word() + std::to_string(i)] = value;
        }
        return out;
    }

    Json body_value(int depth) {
        int roll = pick(0, depth >= 3 ? 59 : 99);
        if (roll < 60) {
            // A bare null request body reads back as an absent body; keep
            // root-level nulls out of generated documents.
            Json value = data_scalar();
            while (depth == 0 && value.is_null()) value = data_scalar();
            return value;
        }
        if (roll < 85) {
            Json out = Json::object();
            int n = pick(0, 3);
            for (int i = 0; i < n; ++i) out[word() + std::to_string(i)] = body_value(depth + 1);
            return out;
        }
        Json out = Json::array();
        int n = pick(0, 3);
        for (int i = 0; i < n; ++i) out.push_back(body_value(depth + 1));
        return out;
    }
};

} // namespace testgen
