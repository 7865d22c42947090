#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridfill/series.hpp"

namespace gridfill::synth {

enum class ApplianceKind { cycling, baseload };

// Diurnal duty-cycle modulation for cycling appliances. `none` keeps the
// on/off process stationary (long-run duty = mean_on/(mean_on+mean_off));
// `afternoon` shortens off-sojourns around late afternoon the way
// thermostatic cooling load behaves, `evening` around the occupancy peak.
enum class DutyModulation { none, afternoon, evening };

struct ApplianceSpec {
  double p_on = 1.0;       // kW while on (or peak scale for baseload)
  double mean_on = 600.0;  // s
  double mean_off = 1200.0;
  ApplianceKind kind = ApplianceKind::cycling;
  DutyModulation modulation = DutyModulation::none;
};

enum class PvMode { none, teachers_only, students_only, both };

struct ScenarioSpec {
  int n_teachers = 2;
  int n_students = 1;
  int customers_per_transformer = 5;
  int days = 2;
  PvMode pv = PvMode::none;
  std::uint64_t seed = 1;
  std::int64_t dt = 1;  // s, high-resolution sample period
  double loss_fraction = 0.02;
};

// Sum of independent alternating-renewal (exponential sojourn) appliance
// processes plus slowly varying diurnal baseload contributions.
// Deterministic given the seed.
HighResSeries simulate_transformer(const std::vector<ApplianceSpec>& appliances, int days,
                                   std::int64_t dt, std::uint64_t seed,
                                   const std::string& id = "sim", std::int64_t t0 = 0);

// Subtracts capacity_kw scaled by a clear-sky daylight bell and a random
// piecewise-smooth cloud factor. Net load may go negative.
HighResSeries add_pv(const HighResSeries& hr, double capacity_kw, std::uint64_t seed);

struct GeneratedTransformer {
  HighResSeries truth;                   // transformer-level load incl. loss (and PV)
  std::vector<CustomerSeries> customers; // hourly average-kW smart-meter series
  bool is_teacher = false;
};

struct GeneratedScenario {
  ScenarioSpec spec;
  std::vector<GeneratedTransformer> teachers;
  std::vector<GeneratedTransformer> students;
};

// Builds the full closed-loop dataset: per-customer appliance processes,
// customer-level PV where the scenario asks for it, hourly smart-meter
// aggregation, and transformer-level ground truth. Transformer ids are
// T01..T<n> and S01..S<n>.
GeneratedScenario generate_scenario(const ScenarioSpec& spec, int jobs = 1);

}  // namespace gridfill::synth
