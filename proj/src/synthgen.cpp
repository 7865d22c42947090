#include "gridfill/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gridfill/errors.hpp"
#include "gridfill/parallel.hpp"
#include "gridfill/rng.hpp"

namespace gridfill::synth {

namespace {

double hour_of_day(std::int64_t t_abs) {
  std::int64_t s = t_abs % 86400;
  if (s < 0) s += 86400;
  return static_cast<double>(s) / 3600.0;
}

double bump(double h, double center, double width) {
  double d = h - center;
  // wrap so the evening bump continues smoothly past midnight
  if (d > 12.0) d -= 24.0;
  if (d < -12.0) d += 24.0;
  return std::exp(-d * d / (width * width));
}

// Evening-dominant residential shape with a small morning shoulder. The
// baseload and the duty modulations deliberately share one broad peak, so
// load composition moves along a single diurnal driver.
double diurnal_shape(double h) {
  return 0.52 + 0.06 * bump(h, 9.0, 3.0) + 0.58 * bump(h, 19.0, 3.8);
}

// Activity factors divide the mean off-sojourn, so duty rises with them.
double afternoon_activity(double h) { return 0.10 + 1.55 * bump(h, 17.5, 4.0); }
double evening_activity(double h) { return 0.18 + 1.40 * bump(h, 19.5, 3.5); }

void add_baseload(std::vector<double>& out, const ApplianceSpec& app, std::int64_t t0,
                  std::int64_t dt, Rng& rng) {
  const double phase = rng.uniform(-0.8, 0.8);
  const double amp = app.p_on * rng.uniform(0.9, 1.1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double h = hour_of_day(t0 + static_cast<std::int64_t>(i) * dt);
    out[i] += amp * diurnal_shape(h + phase);
  }
}

void add_cycling(std::vector<double>& out, const ApplianceSpec& app, std::int64_t t0,
                 std::int64_t dt, Rng& rng) {
  const double end = static_cast<double>(out.size()) * static_cast<double>(dt);
  const double duty = app.mean_on / (app.mean_on + app.mean_off);
  bool on = rng.uniform() < duty;
  double t = 0.0;
  while (t < end) {
    double mean = app.mean_on;
    if (!on) {
      mean = app.mean_off;
      const double h = hour_of_day(t0 + static_cast<std::int64_t>(t));
      if (app.modulation == DutyModulation::afternoon) {
        mean /= afternoon_activity(h);
      } else if (app.modulation == DutyModulation::evening) {
        mean /= evening_activity(h);
      }
    }
    const double sojourn = rng.exponential(mean);
    if (on) {
      const auto first = static_cast<std::size_t>(std::ceil(t / dt));
      const auto past = static_cast<std::size_t>(std::ceil(std::min(t + sojourn, end) / dt));
      for (std::size_t i = first; i < past && i < out.size(); ++i) out[i] += app.p_on;
    }
    t += sojourn;
    on = !on;
  }
}

}  // namespace

HighResSeries simulate_transformer(const std::vector<ApplianceSpec>& appliances, int days,
                                   std::int64_t dt, std::uint64_t seed, const std::string& id,
                                   std::int64_t t0) {
  if (appliances.empty()) throw InputError("simulate_transformer: empty appliance list");
  if (days < 1) throw ConfigError("simulate_transformer: days must be >= 1");
  if (dt <= 0 || dt > 60) {
    throw ConfigError("simulate_transformer: dt must be in (0, 60] s, got " + std::to_string(dt));
  }

  HighResSeries hr;
  hr.transformer_id = id;
  hr.t0 = t0;
  hr.dt = dt;
  hr.values.assign(static_cast<std::size_t>(days) * (86400 / dt), 0.0);

  for (std::size_t a = 0; a < appliances.size(); ++a) {
    Rng rng(seed, "appliance:" + std::to_string(a));
    const ApplianceSpec& app = appliances[a];
    if (!(app.p_on > 0.0) || !(app.mean_on > 0.0) || !(app.mean_off > 0.0)) {
      throw ConfigError("simulate_transformer: appliance " + std::to_string(a) +
                        " has non-positive p_on or sojourn mean");
    }
    if (app.kind == ApplianceKind::baseload) {
      add_baseload(hr.values, app, t0, dt, rng);
    } else {
      add_cycling(hr.values, app, t0, dt, rng);
    }
  }
  return hr;
}

namespace {

// Clear-sky generation bell, zero at night, peak 1.0 around 13:00.
double clear_sky(double h) {
  if (h <= 6.0 || h >= 20.0) return 0.0;
  return std::pow(std::sin(3.141592653589793 * (h - 6.0) / 14.0), 1.5);
}

}  // namespace

HighResSeries add_pv(const HighResSeries& hr, double capacity_kw, std::uint64_t seed) {
  if (capacity_kw < 0.0) throw ConfigError("add_pv: capacity must be >= 0");
  HighResSeries out = hr;
  if (capacity_kw == 0.0) return out;

  Rng rng(seed, "pv");
  // piecewise-linear cloud factor in (0, 1]; occasional deep dips
  double t_seg = 0.0;
  double c_prev = rng.uniform(0.55, 1.0);
  double seg_len = rng.uniform(300.0, 900.0);
  double c_next = rng.uniform() < 0.25 ? rng.uniform(0.15, 0.5) : rng.uniform(0.55, 1.0);

  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double t = static_cast<double>(i) * static_cast<double>(hr.dt);
    while (t >= t_seg + seg_len) {
      t_seg += seg_len;
      c_prev = c_next;
      seg_len = rng.uniform(300.0, 900.0);
      c_next = rng.uniform() < 0.25 ? rng.uniform(0.15, 0.5) : rng.uniform(0.55, 1.0);
    }
    const double cloud = c_prev + (c_next - c_prev) * (t - t_seg) / seg_len;
    const double h = hour_of_day(hr.t0 + static_cast<std::int64_t>(i) * hr.dt);
    out.values[i] -= capacity_kw * clear_sky(h) * cloud;
  }
  return out;
}

namespace {

std::string padded_id(char prefix, int index, int total) {
  const int width = total >= 100 ? 3 : 2;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, index);
  return buf;
}

std::vector<ApplianceSpec> draw_household(Rng& rng) {
  std::vector<ApplianceSpec> apps;
  // always-present diurnal baseload (lighting, electronics); sojourn means
  // are unused for this kind
  apps.push_back({rng.uniform(0.5, 0.7), 1.0, 1.0, ApplianceKind::baseload,
                  DutyModulation::none});
  // refrigeration-like cycler
  apps.push_back({rng.uniform(0.12, 0.18), rng.uniform(400.0, 700.0),
                  rng.uniform(700.0, 1100.0), ApplianceKind::cycling, DutyModulation::none});
  // cooling load as several small staged units (variable-speed compressor
  // behavior), duty follows the afternoon
  const int stages = 3 + static_cast<int>(rng.below(2));
  for (int s = 0; s < stages; ++s) {
    apps.push_back({rng.uniform(0.45, 0.60), rng.uniform(120.0, 180.0),
                    rng.uniform(250.0, 400.0), ApplianceKind::cycling,
                    DutyModulation::afternoon});
  }
  // plug/lighting cyclers busiest in the evening
  apps.push_back({rng.uniform(0.30, 0.50), rng.uniform(90.0, 200.0),
                  rng.uniform(350.0, 700.0), ApplianceKind::cycling,
                  DutyModulation::evening});
  if (rng.uniform() < 0.5) {
    apps.push_back({rng.uniform(0.2, 0.4), rng.uniform(80.0, 180.0),
                    rng.uniform(500.0, 1000.0), ApplianceKind::cycling,
                    DutyModulation::evening});
  }
  // a layer of small fast cyclers (electronics, pumps, chargers) giving the
  // dense second-scale texture of real feeder data
  const int micros = 9 + static_cast<int>(rng.below(3));
  for (int i = 0; i < micros; ++i) {
    apps.push_back({rng.uniform(0.08, 0.14), rng.uniform(15.0, 45.0),
                    rng.uniform(25.0, 75.0), ApplianceKind::cycling, DutyModulation::none});
  }
  return apps;
}

GeneratedTransformer build_transformer(const ScenarioSpec& spec, const std::string& tid,
                                        bool is_teacher) {
  const bool with_pv = spec.pv == PvMode::both ||
                       (is_teacher && spec.pv == PvMode::teachers_only) ||
                       (!is_teacher && spec.pv == PvMode::students_only);

  GeneratedTransformer tr;
  tr.is_teacher = is_teacher;
  tr.truth.transformer_id = tid;
  tr.truth.t0 = 0;
  tr.truth.dt = spec.dt;
  tr.truth.values.assign(static_cast<std::size_t>(spec.days) * (86400 / spec.dt), 0.0);

  for (int c = 1; c <= spec.customers_per_transformer; ++c) {
    const std::string cid = tid + "C" + std::to_string(c);
    const std::string label = tid + "/" + cid;
    Rng mix_rng(spec.seed, label + "/mix");
    const auto appliances = draw_household(mix_rng);
    HighResSeries customer_hr =
        simulate_transformer(appliances, spec.days, spec.dt, derive_seed(spec.seed, label), cid);
    if (with_pv && mix_rng.uniform() < 0.4) {
      customer_hr =
          add_pv(customer_hr, mix_rng.uniform(0.8, 1.8), derive_seed(spec.seed, label + "/pv"));
    }

    for (std::size_t i = 0; i < customer_hr.values.size(); ++i) {
      tr.truth.values[i] += customer_hr.values[i];
    }

    CustomerSeries sm;
    sm.customer_id = cid;
    sm.transformer_id = tid;
    sm.t0 = 0;
    sm.dt = 3600;
    for (const IntervalStats& s : segment_and_aggregate(customer_hr, 3600)) {
      sm.values.push_back(s.p_avg);
    }
    tr.customers.push_back(std::move(sm));
  }

  // the micro-PMU sees the transformer primary, i.e. customer sum plus loss
  const double scale = 1.0 + spec.loss_fraction;
  for (double& v : tr.truth.values) v *= scale;
  return tr;
}

}  // namespace

GeneratedScenario generate_scenario(const ScenarioSpec& spec, int jobs) {
  if (spec.n_teachers < 1 || spec.n_students < 0 || spec.customers_per_transformer < 1 ||
      spec.days < 1) {
    throw ConfigError("generate_scenario: teacher, customer and day counts must be >= 1");
  }
  GeneratedScenario out;
  out.spec = spec;
  out.teachers.resize(spec.n_teachers);
  out.students.resize(spec.n_students);

  const std::size_t total = static_cast<std::size_t>(spec.n_teachers) + spec.n_students;
  parallel_for(total, jobs, [&](std::size_t i) {
    if (i < static_cast<std::size_t>(spec.n_teachers)) {
      const std::string tid = padded_id('T', static_cast<int>(i) + 1, spec.n_teachers);
      out.teachers[i] = build_transformer(spec, tid, true);
    } else {
      const int s = static_cast<int>(i) - spec.n_teachers;
      const std::string tid = padded_id('S', s + 1, spec.n_students);
      out.students[s] = build_transformer(spec, tid, false);
    }
  });
  return out;
}

}  // namespace gridfill::synth
