#pragma once

#include <cmath>
#include <cstdint>

namespace composable::detail {

// Demands and capacities are resolved to 1e-3 kind units so that sums and
// capacity checks are exact.
inline std::int64_t to_milli(double x) noexcept { return std::llround(x * 1000.0); }

} // namespace composable::detail
