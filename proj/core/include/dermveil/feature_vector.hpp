#pragma once

#include <array>

namespace dermveil {

/// Per-pixel features F1..F18 stored at indices 0..17.
inline constexpr int kFeatureCount = 18;
using FeatureVector = std::array<double, kFeatureCount>;

}  // namespace dermveil
