#pragma once

#include <string>

#include <yaml-cpp/yaml.h>

#include "resttsl/json.hpp"

namespace resttsl::yamlc {

/// Converts a yaml-cpp node into an ordered JSON value.
///
/// Plain scalars are resolved with core-schema rules (null, bool, integer,
/// float, otherwise string); quoted scalars always stay strings.
Json to_json(const YAML::Node& node);

/// Resolves one plain scalar with core-schema rules.
Json resolve_plain_scalar(const std::string& text);

/// True when the scalar text would resolve to something other than a string.
bool plain_scalar_is_typed(const std::string& text);

} // namespace resttsl::yamlc
