#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridfill/series.hpp"

namespace gridfill::validate {

struct PercentileRow {
  double percentile = 0.0;
  double actual = 0.0;    // kW
  double enriched = 0.0;  // kW
  double abs_diff = 0.0;  // kW
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count_actual = 0;
  std::size_t count_enriched = 0;
};

struct ValidationReport {
  std::optional<double> r2_max;
  std::optional<double> r2_min;
  std::string r2_note;  // set when a coefficient is undefined
  std::vector<PercentileRow> percentile_table;
  std::vector<double> wasserstein_per_hour;  // kW, one per complete interval
  std::vector<HistogramBin> histogram;
};

inline constexpr double kDefaultPercentiles[] = {0, 1, 5, 10, 25, 50, 75, 90, 95, 99, 100};

// 1 - SS_res / SS_tot. Undefined (nullopt) when the actual values are all
// equal.
std::optional<double> r_squared(std::span<const double> actual,
                                std::span<const double> predicted);

// Linear-interpolation empirical quantiles of both sets at the requested
// percentiles, with absolute differences.
std::vector<PercentileRow> percentile_compare(std::span<const double> actual,
                                              std::span<const double> enriched,
                                              std::span<const double> percentiles);

// Mean absolute difference of the sorted-sample quantile functions; sets of
// different size are resampled onto a common midpoint grid.
double wasserstein1(std::span<const double> a, std::span<const double> b);

// Full statistical comparison of an enriched series against ground truth:
// R² of per-interval max/min bounds, overall percentile table, per-interval
// Wasserstein-1 distances, and a shared-range histogram.
ValidationReport build_report(const HighResSeries& actual, const HighResSeries& enriched,
                              std::int64_t low_dt,
                              std::span<const double> percentiles = kDefaultPercentiles,
                              std::size_t histogram_bins = 50);

}  // namespace gridfill::validate
