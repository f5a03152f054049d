#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace meetplay {

/// Quantile of an ascending, non-empty sample by linear interpolation at
/// h = (n - 1) * p.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const double lower = std::floor(h);
  const auto i = static_cast<std::size_t>(lower);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - lower) * (sorted[i + 1] - sorted[i]);
}

}  // namespace meetplay
