#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "gridfill/errors.hpp"
#include "gridfill/json_io.hpp"
#include "gridfill/powerflow.hpp"
#include "gridfill/rng.hpp"

using namespace gridfill;
using namespace gridfill::pf;

namespace {

FeederModel two_bus(double r = 0.01, double x = 0.0, double s_base = 100.0) {
  FeederModel f;
  f.buses = {{"bus1", ""}, {"bus2", "T01"}};
  f.lines = {{"bus1", "bus2", r, x}};
  f.slack_id = "bus1";
  f.v_slack = 1.0;
  f.s_base_kva = s_base;
  return f;
}

FeederModel default_feeder() {
  const char* data = std::getenv("GRIDFILL_DATA");
  REQUIRE(data != nullptr);
  return load_feeder(std::filesystem::path(data) / "feeder_default.json");
}

}  // namespace

TEST_SUITE("powerflow") {

TEST_CASE("zero load leaves every bus at the slack voltage") {
  const auto feeder = default_feeder();
  const auto result = solve_snapshot(feeder, {});
  for (const auto& [bus, v] : result.voltages) {
    CHECK(std::abs(v - std::complex<double>(1.0, 0.0)) < 1e-12);
  }
  CHECK(result.p_loss_pu == doctest::Approx(0.0));
}

TEST_CASE("two-bus case matches the closed-form quadratic") {
  // V2 = 1 - r * P / V2  =>  V2^2 - V2 + r P = 0, unity power factor
  const auto feeder = two_bus(0.01, 0.0);
  std::map<std::string, LoadPoint> loads{{"bus2", LoadPoint{100.0, 0.0}}};  // 1.0 p.u.
  const auto result = solve_snapshot(feeder, loads, 1e-9);
  const double expected = (1.0 + std::sqrt(1.0 - 4.0 * 0.01)) / 2.0;
  CHECK(std::abs(result.voltages.at("bus2")) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(std::abs(result.voltages.at("bus2")) == doctest::Approx(0.98990).epsilon(1e-4));
}

TEST_CASE("doubling the power base halves the per-unit drop") {
  std::map<std::string, LoadPoint> loads{{"bus2", LoadPoint{50.0, 0.0}}};
  const auto v_small = solve_snapshot(two_bus(0.01, 0.0, 100.0), loads, 1e-10);
  const auto v_big = solve_snapshot(two_bus(0.01, 0.0, 200.0), loads, 1e-10);
  // same kW on twice the base equals half the p.u. load
  std::map<std::string, LoadPoint> half{{"bus2", LoadPoint{25.0, 0.0}}};
  const auto v_half = solve_snapshot(two_bus(0.01, 0.0, 100.0), half, 1e-10);
  CHECK(std::abs(v_big.voltages.at("bus2")) ==
        doctest::Approx(std::abs(v_half.voltages.at("bus2"))).epsilon(1e-9));
  CHECK(std::abs(v_big.voltages.at("bus2")) > std::abs(v_small.voltages.at("bus2")));
}

TEST_CASE("power balance holds at convergence") {
  const auto feeder = default_feeder();
  Rng rng(14);
  for (int round = 0; round < 20; ++round) {
    std::map<std::string, LoadPoint> loads;
    for (const char* bus : {"bus3", "bus5", "bus8"}) {
      loads[bus] = LoadPoint{rng.uniform(0.0, 40.0), std::nullopt};
    }
    const double tol = 1e-8;
    const auto r = solve_snapshot(feeder, loads, tol);
    CHECK(std::abs(r.p_slack_pu - (r.p_load_pu + r.p_loss_pu)) <= 10 * tol);
  }
}

TEST_CASE("voltage is monotone non-increasing along radial paths at unity pf") {
  const auto feeder = default_feeder();
  std::map<std::string, LoadPoint> loads{{"bus3", LoadPoint{30.0, 0.0}},
                                         {"bus5", LoadPoint{20.0, 0.0}},
                                         {"bus8", LoadPoint{25.0, 0.0}}};
  const auto r = solve_snapshot(feeder, loads, 1e-9);
  auto v = [&](const std::string& b) { return std::abs(r.voltages.at(b)); };
  // main chain and both branches
  const std::vector<std::vector<std::string>> paths{
      {"bus1", "bus2", "bus3", "bus4", "bus5", "bus6", "bus7", "bus8"},
      {"bus4", "bus9", "bus10"},
      {"bus6", "bus11", "bus12"}};
  for (const auto& path : paths) {
    for (std::size_t i = 1; i < path.size(); ++i) {
      CHECK(v(path[i]) <= v(path[i - 1]) + 1e-12);
    }
  }
}

TEST_CASE("converges quickly at moderate loading") {
  const auto feeder = default_feeder();
  std::map<std::string, LoadPoint> loads{{"bus3", LoadPoint{50.0, std::nullopt}},
                                         {"bus5", LoadPoint{50.0, std::nullopt}},
                                         {"bus8", LoadPoint{50.0, std::nullopt}}};  // 0.5 p.u. each
  const auto r = solve_snapshot(feeder, loads, 1e-6);
  CHECK(r.iterations <= 10);
}

TEST_CASE("infeasible loading reports the iteration trace") {
  const auto feeder = two_bus(0.3, 0.0);
  std::map<std::string, LoadPoint> loads{{"bus2", LoadPoint{100.0, 0.0}}};
  CHECK_THROWS_WITH_AS(solve_snapshot(feeder, loads, 1e-9, 30),
                       doctest::Contains("max |dV| per iteration"), NumericalError);
}

TEST_CASE("topology validation") {
  FeederModel loop = two_bus();
  loop.buses.push_back({"bus3", ""});
  loop.lines.push_back({"bus2", "bus3", 0.01, 0.0});
  loop.lines.push_back({"bus3", "bus1", 0.01, 0.0});
  CHECK_THROWS_AS(solve_snapshot(loop, {}), InputError);

  FeederModel disconnected = two_bus();
  disconnected.buses.push_back({"bus3", ""});
  disconnected.buses.push_back({"bus4", ""});
  disconnected.lines.push_back({"bus3", "bus4", 0.01, 0.0});
  CHECK_THROWS_AS(solve_snapshot(disconnected, {}), InputError);

  FeederModel unknown = two_bus();
  unknown.lines[0].to = "nowhere";
  CHECK_THROWS_AS(solve_snapshot(unknown, {}), InputError);

  CHECK_THROWS_AS(solve_snapshot(two_bus(), {{"ghost", LoadPoint{1.0, 0.0}}}), InputError);
}

TEST_CASE("net export raises the bus voltage above the slack") {
  const auto feeder = two_bus(0.02, 0.01);
  std::map<std::string, LoadPoint> exporting{{"bus2", LoadPoint{-50.0, 0.0}}};
  const auto r = solve_snapshot(feeder, exporting, 1e-9);
  CHECK(std::abs(r.voltages.at("bus2")) > 1.0);
}

TEST_CASE("constant loads give zero ramps and full snapshot counts") {
  const auto feeder = two_bus();
  HighResSeries s;
  s.transformer_id = "T01";
  s.dt = 1;
  s.values.assign(3600, 25.0);
  const auto vts = run_timeseries(feeder, {{"T01", s}}, 1);
  REQUIRE(vts.timestamps.size() == 3600);
  REQUIRE(vts.ramps[0].size() == 3599);
  for (const auto& per_bus : vts.ramps) {
    for (double r : per_bus) CHECK(r == 0.0);
  }
}

TEST_CASE("stride subsamples the steps") {
  const auto feeder = two_bus();
  HighResSeries s;
  s.transformer_id = "T01";
  s.dt = 1;
  s.values.assign(3600, 10.0);
  const auto vts = run_timeseries(feeder, {{"T01", s}}, 10);
  CHECK(vts.timestamps.size() == 360);
}

TEST_CASE("parallel snapshots match serial ones") {
  const auto feeder = default_feeder();
  Rng rng(44);
  std::map<std::string, HighResSeries> series;
  for (const char* tid : {"T01", "T02", "S01"}) {
    HighResSeries s;
    s.transformer_id = tid;
    s.dt = 1;
    for (int i = 0; i < 600; ++i) s.values.push_back(rng.uniform(0.0, 30.0));
    series[tid] = std::move(s);
  }
  const auto serial = run_timeseries(feeder, series, 1, 1e-6, 50, 1);
  const auto parallel = run_timeseries(feeder, series, 1, 1e-6, 50, 4);
  for (std::size_t b = 0; b < serial.v.size(); ++b) CHECK(serial.v[b] == parallel.v[b]);
}

TEST_CASE("missing series for a load bus is rejected") {
  const auto feeder = default_feeder();
  HighResSeries s;
  s.transformer_id = "T01";
  s.dt = 1;
  s.values.assign(10, 1.0);
  CHECK_THROWS_WITH_AS(run_timeseries(feeder, {{"T01", s}}, 1), doctest::Contains("T02"),
                       InputError);
}

TEST_CASE("snapshot of the mean is not the mean of snapshots") {
  const auto feeder = two_bus(0.05, 0.02);
  // two-state cycling load: 0 kW half the time, 80 kW the other half
  HighResSeries s;
  s.transformer_id = "T01";
  s.dt = 1;
  for (int i = 0; i < 100; ++i) s.values.push_back(i % 2 == 0 ? 0.0 : 80.0);
  const auto vts = run_timeseries(feeder, {{"T01", s}}, 1, 1e-10);
  double mean_v = 0.0;
  for (double v : vts.v[1]) mean_v += v;
  mean_v /= static_cast<double>(vts.v[1].size());

  const auto snap = snapshot_from_average(feeder, {{"bus2", LoadPoint{40.0, std::nullopt}}}, 1e-10);
  const double gap = std::abs(std::abs(snap.voltages.at("bus2")) - mean_v);
  CHECK(gap > 1e-5);  // the drop is nonlinear in the load
}

TEST_CASE("snapshot of a constant hour equals every timestep") {
  const auto feeder = two_bus();
  HighResSeries s;
  s.transformer_id = "T01";
  s.dt = 1;
  s.values.assign(60, 30.0);
  const auto vts = run_timeseries(feeder, {{"T01", s}}, 1, 1e-10);
  const auto snap = snapshot_from_average(feeder, {{"bus2", LoadPoint{30.0, std::nullopt}}}, 1e-10);
  for (double v : vts.v[1]) {
    CHECK(v == doctest::Approx(std::abs(snap.voltages.at("bus2"))).epsilon(1e-9));
  }
  const auto empty = snapshot_from_average(feeder, {});
  CHECK(std::abs(empty.voltages.at("bus2")) == doctest::Approx(1.0));
}

}  // TEST_SUITE
