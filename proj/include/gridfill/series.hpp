#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridfill {

// Uniformly sampled instantaneous load (kW) for one transformer.
// Negative values only occur when PV scenarios produce net export.
struct HighResSeries {
  std::string transformer_id;
  std::int64_t t0 = 0;  // epoch seconds of first sample
  std::int64_t dt = 1;  // seconds between samples
  std::vector<double> values;
};

// Interval-average load (kW) at smart-meter resolution.
struct LowResSeries {
  std::string transformer_id;
  std::int64_t t0 = 0;
  std::int64_t dt = 3600;
  std::vector<double> values;
};

// Per-customer average power (kW) per metering interval. Energy readings
// are converted to average power at ingestion; all internal math is in kW.
struct CustomerSeries {
  std::string customer_id;
  std::string transformer_id;
  std::int64_t t0 = 0;
  std::int64_t dt = 3600;
  std::vector<double> values;
};

// Average / max / min load over one low-resolution interval.
struct IntervalStats {
  std::size_t t = 0;  // 1-based interval index
  double p_avg = 0.0;
  double p_max = 0.0;
  double p_min = 0.0;
  std::size_t n_samples = 0;
};

// Splits a high-resolution series into consecutive intervals of low_dt
// seconds and computes mean and exact extrema per interval. A trailing
// partial interval is dropped.
std::vector<IntervalStats> segment_and_aggregate(const HighResSeries& hr, std::int64_t low_dt);

// Elementwise sum of customer series scaled by (1 + loss_fraction).
// All customers must share t0, dt and length.
LowResSeries aggregate_customers(const std::vector<CustomerSeries>& customers,
                                 double loss_fraction);

}  // namespace gridfill
