#pragma once

#include "resttsl/openapi.hpp"
#include "resttsl/tsl.hpp"

namespace resttsl::derive {

struct DeriveOptions {
    /// Status expected by constraint-violation cases when the endpoint does
    /// not declare 422.
    int error_status = 400;
    int unauthenticated_status = 401;
};

/// Deterministic category-partition derivation: one nominal case per
/// endpoint, one error case per constraint choice (missing required field,
/// length/range boundary, pattern or enum violation), plus an
/// unauthenticated case for secured endpoints. Ids are TC1, TC2, ... in
/// endpoint order; two runs over the same document are byte-identical after
/// serialization.
tsl::TslDocument derive_cases_cp(const openapi::ApiDocument& api, const DeriveOptions& options = {});

} // namespace resttsl::derive
