#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace resttsl::derive::detail {

/// Deterministic string accepted by `pattern` (JSON Schema search semantics),
/// or nullopt when no sample could be produced.
std::optional<std::string> sample_matching(const std::string& pattern);

/// Deterministic string rejected by `pattern` whose length stays inside
/// [min_length, max_length] when those bounds are given. nullopt when the
/// pattern accepts every candidate.
std::optional<std::string> sample_violating(const std::string& pattern,
                                            std::optional<std::uint64_t> min_length,
                                            std::optional<std::uint64_t> max_length);

} // namespace resttsl::derive::detail
