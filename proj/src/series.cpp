#include "gridfill/series.hpp"

#include <algorithm>
#include <cmath>

#include "gridfill/errors.hpp"

namespace gridfill {

std::vector<IntervalStats> segment_and_aggregate(const HighResSeries& hr, std::int64_t low_dt) {
  if (hr.values.empty()) {
    throw InputError("segment_and_aggregate: series '" + hr.transformer_id + "' is empty");
  }
  if (hr.dt <= 0 || low_dt <= 0 || low_dt % hr.dt != 0) {
    throw ConfigError("segment_and_aggregate: interval " + std::to_string(low_dt) +
                      " s is not a positive multiple of sample period " +
                      std::to_string(hr.dt) + " s");
  }
  const std::size_t n_per = static_cast<std::size_t>(low_dt / hr.dt);
  const std::size_t n_int = hr.values.size() / n_per;  // trailing partial interval dropped

  std::vector<IntervalStats> out;
  out.reserve(n_int);
  for (std::size_t t = 0; t < n_int; ++t) {
    const double* p = hr.values.data() + t * n_per;
    double sum = 0.0, mx = p[0], mn = p[0];
    for (std::size_t i = 0; i < n_per; ++i) {
      sum += p[i];
      mx = std::max(mx, p[i]);
      mn = std::min(mn, p[i]);
    }
    out.push_back(IntervalStats{t + 1, sum / static_cast<double>(n_per), mx, mn, n_per});
  }
  return out;
}

LowResSeries aggregate_customers(const std::vector<CustomerSeries>& customers,
                                 double loss_fraction) {
  if (customers.empty()) {
    throw InputError("aggregate_customers: no customer series given");
  }
  if (loss_fraction < 0.0 || loss_fraction >= 0.2) {
    throw ConfigError("aggregate_customers: loss_fraction " + std::to_string(loss_fraction) +
                      " outside [0, 0.2)");
  }
  const CustomerSeries& ref = customers.front();
  for (const CustomerSeries& c : customers) {
    if (c.t0 != ref.t0 || c.dt != ref.dt || c.values.size() != ref.values.size()) {
      throw InputError("aggregate_customers: customer '" + c.customer_id +
                       "' clock mismatch against '" + ref.customer_id + "'");
    }
    if (c.transformer_id != ref.transformer_id) {
      throw InputError("aggregate_customers: customer '" + c.customer_id + "' belongs to '" +
                       c.transformer_id + "', not '" + ref.transformer_id + "'");
    }
  }
  LowResSeries agg;
  agg.transformer_id = ref.transformer_id;
  agg.t0 = ref.t0;
  agg.dt = ref.dt;
  agg.values.assign(ref.values.size(), 0.0);
  for (const CustomerSeries& c : customers) {
    for (std::size_t i = 0; i < c.values.size(); ++i) agg.values[i] += c.values[i];
  }
  const double scale = 1.0 + loss_fraction;
  for (double& v : agg.values) v *= scale;
  return agg;
}

}  // namespace gridfill
