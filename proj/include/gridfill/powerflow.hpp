#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gridfill/series.hpp"

namespace gridfill::pf {

struct Bus {
  std::string id;
  std::string transformer_id;  // empty when the bus carries no load
};

struct Line {
  std::string from;
  std::string to;
  double r = 0.0;  // p.u.
  double x = 0.0;  // p.u.
};

// Radial feeder, single-phase positive-sequence equivalent with
// constant-power loads.
struct FeederModel {
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::string slack_id;
  double v_slack = 1.0;      // p.u.
  double s_base_kva = 500.0;
  double v_base_kv = 12.47;
};

struct LoadPoint {
  double p_kw = 0.0;
  std::optional<double> q_kvar;  // defaults to 0.95 lagging power factor
};

struct SolveResult {
  std::map<std::string, std::complex<double>> voltages;  // p.u., by bus id
  int iterations = 0;
  double p_slack_pu = 0.0;  // real power entering at the slack bus
  double p_load_pu = 0.0;
  double p_loss_pu = 0.0;
};

struct VoltageTimeSeries {
  std::vector<std::string> bus_ids;  // feeder bus order
  std::vector<std::int64_t> timestamps;
  std::vector<std::vector<double>> v;      // [bus][step], |V| p.u.
  std::vector<std::vector<double>> ramps;  // [bus][step-1], |V| differences
};

// Backward current sweep / forward voltage drop iteration until
// max |dV| < tol. The feeder must be a tree rooted at the slack bus.
SolveResult solve_snapshot(const FeederModel& feeder,
                           const std::map<std::string, LoadPoint>& loads, double tol = 1e-6,
                           int max_iter = 50);

// One snapshot per strided timestep, with per-bus voltage magnitudes and
// step-to-step ramps. All series must share clock, period and length.
VoltageTimeSeries run_timeseries(const FeederModel& feeder,
                                 const std::map<std::string, HighResSeries>& series,
                                 std::size_t stride = 1, double tol = 1e-6, int max_iter = 50,
                                 int jobs = 1);

// Single solve at interval-average loads; a point value with no
// distributional content, kept for contrast with run_timeseries.
SolveResult snapshot_from_average(const FeederModel& feeder,
                                  const std::map<std::string, LoadPoint>& hourly_loads,
                                  double tol = 1e-6, int max_iter = 50);

// Default reactive power for a kW load at 0.95 lagging power factor.
double default_q_kvar(double p_kw);

}  // namespace gridfill::pf
