#pragma once

#include <json.hpp>

namespace resttsl {

/// Insertion-order-preserving JSON value used across the library.
using Json = nlohmann::ordered_json;

} // namespace resttsl
