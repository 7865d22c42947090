#include <doctest.h>

#include <cmath>
#include <vector>

#include "gridfill/errors.hpp"
#include "gridfill/rng.hpp"
#include "gridfill/validate.hpp"

using namespace gridfill;
using namespace gridfill::validate;

TEST_SUITE("validate") {

TEST_CASE("r_squared basics") {
  const std::vector<double> y{1, 2, 3};
  CHECK(*r_squared(y, y) == doctest::Approx(1.0));

  const std::vector<double> mean_pred(3, 2.0);
  CHECK(*r_squared(y, mean_pred) == doctest::Approx(0.0));

  const std::vector<double> off{1, 2, 4};
  CHECK(*r_squared(y, off) == doctest::Approx(0.5));
}

TEST_CASE("r_squared undefined for constant actuals") {
  const std::vector<double> y{2, 2, 2};
  const std::vector<double> p{1, 2, 3};
  CHECK_FALSE(r_squared(y, p).has_value());
}

TEST_CASE("r_squared input validation") {
  const std::vector<double> a{1, 2}, b{1, 2, 3};
  CHECK_THROWS_AS(r_squared(a, b), InputError);
  const std::vector<double> one{1};
  CHECK_THROWS_AS(r_squared(one, one), InputError);
}

TEST_CASE("r_squared is affine invariant") {
  Rng rng(3);
  std::vector<double> y, p;
  for (int i = 0; i < 50; ++i) {
    y.push_back(rng.uniform(0, 10));
    p.push_back(y.back() + rng.normal(0, 1));
  }
  const double base = *r_squared(y, p);
  const double c = 4.2, shift = -17.0;
  std::vector<double> ys = y, ps = p;
  for (double& v : ys) v = c * v + shift;
  for (double& v : ps) v = c * v + shift;
  CHECK(*r_squared(ys, ps) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("percentile table") {
  std::vector<double> a(100), e(100);
  for (int i = 0; i < 100; ++i) {
    a[i] = i + 1;
    e[i] = i + 2;
  }
  const std::vector<double> ps{0, 25, 50, 75, 100};
  const auto table = percentile_compare(a, e, ps);
  REQUIRE(table.size() == 5);
  CHECK(table[0].actual == 1.0);     // percentile 0 is the minimum
  CHECK(table[0].enriched == 2.0);
  CHECK(table[4].actual == 100.0);   // percentile 100 is the maximum
  for (const auto& row : table) CHECK(row.abs_diff == doctest::Approx(1.0));

  const auto same = percentile_compare(a, a, ps);
  for (const auto& row : same) CHECK(row.abs_diff == 0.0);
}

TEST_CASE("wasserstein basics") {
  const std::vector<double> a{0, 0, 1, 1};
  const std::vector<double> b{0, 1, 1, 1};
  CHECK(wasserstein1(a, a) == 0.0);
  CHECK(wasserstein1(a, b) == doctest::Approx(0.25));
  CHECK(wasserstein1(b, a) == doctest::Approx(0.25));  // symmetry
}

TEST_CASE("wasserstein translation property") {
  Rng rng(9);
  std::vector<double> a;
  for (int i = 0; i < 200; ++i) a.push_back(rng.uniform(0, 5));
  auto b = a;
  const double c = 2.5;
  for (double& v : b) v += c;
  CHECK(wasserstein1(a, b) == doctest::Approx(c).epsilon(1e-12));
}

TEST_CASE("wasserstein handles unequal sizes") {
  Rng rng(10);
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) a.push_back(rng.uniform(0, 1));
  for (int i = 0; i < 333; ++i) b.push_back(rng.uniform(0, 1));
  const double d = wasserstein1(a, b);
  CHECK(d >= 0.0);
  CHECK(d < 0.1);  // same distribution, modest sampling error
  auto shifted = b;
  for (double& v : shifted) v += 1.0;
  CHECK(wasserstein1(a, shifted) == doctest::Approx(1.0 + d).epsilon(0.05));
}

TEST_CASE("build_report compares aligned series") {
  HighResSeries actual, enriched;
  actual.transformer_id = enriched.transformer_id = "S01";
  actual.dt = enriched.dt = 1;
  Rng rng(12);
  for (int t = 0; t < 2 * 3600; ++t) {
    const double base = t < 3600 ? 5.0 : 8.0;
    actual.values.push_back(base + rng.uniform(-1.0, 1.0));
    enriched.values.push_back(base + rng.uniform(-1.0, 1.0));
  }
  const auto report = build_report(actual, enriched, 3600);
  REQUIRE(report.wasserstein_per_hour.size() == 2);
  CHECK(report.wasserstein_per_hour[0] < 0.2);
  REQUIRE(report.r2_max.has_value());
  CHECK(*report.r2_max > 0.5);  // two well-separated hour maxima
  CHECK(report.percentile_table.size() == std::size(kDefaultPercentiles));
  std::size_t count_a = 0;
  for (const auto& bin : report.histogram) count_a += bin.count_actual;
  CHECK(count_a == actual.values.size());

  HighResSeries misaligned = enriched;
  misaligned.t0 = 42;
  CHECK_THROWS_AS(build_report(actual, misaligned, 3600), InputError);
}

TEST_CASE("build_report truncates to the common window") {
  HighResSeries actual, enriched;
  actual.transformer_id = enriched.transformer_id = "S01";
  actual.dt = enriched.dt = 1;
  Rng rng(13);
  for (int t = 0; t < 3 * 3600; ++t) actual.values.push_back(5.0 + rng.uniform(-1.0, 1.0));
  for (int t = 0; t < 1 * 3600; ++t) enriched.values.push_back(5.0 + rng.uniform(-1.0, 1.0));
  const auto report = build_report(actual, enriched, 3600);
  CHECK(report.wasserstein_per_hour.size() == 1);
}

}  // TEST_SUITE
