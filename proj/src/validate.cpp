#include "gridfill/validate.hpp"

#include <algorithm>
#include <cmath>

#include "gridfill/errors.hpp"
#include "gridfill/quantile.hpp"

namespace gridfill::validate {

std::optional<double> r_squared(std::span<const double> actual,
                                std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw InputError("r_squared: length mismatch (" + std::to_string(actual.size()) + " vs " +
                     std::to_string(predicted.size()) + ")");
  }
  if (actual.size() < 2) throw InputError("r_squared: need at least 2 values");

  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

std::vector<PercentileRow> percentile_compare(std::span<const double> actual,
                                              std::span<const double> enriched,
                                              std::span<const double> percentiles) {
  if (actual.empty() || enriched.empty()) throw InputError("percentile_compare: empty sample");
  std::vector<double> a(actual.begin(), actual.end());
  std::vector<double> e(enriched.begin(), enriched.end());
  std::sort(a.begin(), a.end());
  std::sort(e.begin(), e.end());

  std::vector<PercentileRow> table;
  table.reserve(percentiles.size());
  for (double p : percentiles) {
    PercentileRow row;
    row.percentile = p;
    row.actual = quantile_sorted(a, p);
    row.enriched = quantile_sorted(e, p);
    row.abs_diff = std::abs(row.actual - row.enriched);
    table.push_back(row);
  }
  return table;
}

double wasserstein1(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw InputError("wasserstein1: empty sample");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  if (sa.size() == sb.size()) {
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
    return total / static_cast<double>(sa.size());
  }
  // unequal sizes: compare quantile functions on a common midpoint grid
  const std::size_t m = std::max(sa.size(), sb.size());
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double p = 100.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    total += std::abs(quantile_sorted(sa, p) - quantile_sorted(sb, p));
  }
  return total / static_cast<double>(m);
}

ValidationReport build_report(const HighResSeries& actual, const HighResSeries& enriched,
                              std::int64_t low_dt, std::span<const double> percentiles,
                              std::size_t histogram_bins) {
  if (actual.dt != enriched.dt || actual.t0 != enriched.t0) {
    throw InputError("build_report: series are not aligned (t0/dt mismatch)");
  }

  // compare over the common prefix; a short enrichment window against a
  // longer ground-truth file is routine
  HighResSeries a = actual;
  HighResSeries e = enriched;
  const std::size_t common = std::min(a.values.size(), e.values.size());
  if (common == 0) throw InputError("build_report: empty series");
  a.values.resize(common);
  e.values.resize(common);

  ValidationReport report;

  const auto stats_a = segment_and_aggregate(a, low_dt);
  const auto stats_e = segment_and_aggregate(e, low_dt);
  std::vector<double> max_a, max_e, min_a, min_e;
  for (std::size_t t = 0; t < stats_a.size(); ++t) {
    max_a.push_back(stats_a[t].p_max);
    max_e.push_back(stats_e[t].p_max);
    min_a.push_back(stats_a[t].p_min);
    min_e.push_back(stats_e[t].p_min);
  }
  if (stats_a.size() >= 2) {
    report.r2_max = r_squared(max_a, max_e);
    report.r2_min = r_squared(min_a, min_e);
    if (!report.r2_max || !report.r2_min) {
      report.r2_note = "undefined: actual bounds have zero variance";
    }
  } else {
    report.r2_note = "undefined: fewer than 2 complete intervals";
  }

  report.percentile_table = percentile_compare(a.values, e.values, percentiles);

  const std::size_t n_per = static_cast<std::size_t>(low_dt / a.dt);
  report.wasserstein_per_hour.reserve(stats_a.size());
  for (std::size_t t = 0; t < stats_a.size(); ++t) {
    std::span<const double> wa(a.values.data() + t * n_per, n_per);
    std::span<const double> we(e.values.data() + t * n_per, n_per);
    report.wasserstein_per_hour.push_back(wasserstein1(wa, we));
  }

  // shared-range histogram of raw samples
  double lo = a.values[0], hi = a.values[0];
  for (double v : a.values) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : e.values) lo = std::min(lo, v), hi = std::max(hi, v);
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(histogram_bins);
  report.histogram.resize(histogram_bins);
  for (std::size_t b = 0; b < histogram_bins; ++b) {
    report.histogram[b].lo = lo + width * static_cast<double>(b);
    report.histogram[b].hi = lo + width * static_cast<double>(b + 1);
  }
  auto bin_of = [&](double v) {
    const auto b = static_cast<std::size_t>((v - lo) / width);
    return std::min(b, histogram_bins - 1);
  };
  for (double v : a.values) report.histogram[bin_of(v)].count_actual++;
  for (double v : e.values) report.histogram[bin_of(v)].count_enriched++;

  return report;
}

}  // namespace gridfill::validate
