#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gridfill/errors.hpp"

namespace gridfill {

// Linear-interpolation empirical quantile on an already sorted sample,
// p in [0, 100]. The same convention is used for level edges, reporting
// and validation.
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw InputError("quantile: empty sample");
  if (sorted.size() == 1) return sorted.front();
  const double h = std::clamp(p, 0.0, 100.0) / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> sample, double p) {
  std::sort(sample.begin(), sample.end());
  return quantile_sorted(sample, p);
}

}  // namespace gridfill
