#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "gridfill/csv.hpp"
#include "gridfill/errors.hpp"
#include "gridfill/rng.hpp"

using namespace gridfill;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "gridfill_csv_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("high-res round trip is exact") {
  HighResSeries hr;
  hr.transformer_id = "T07";
  hr.t0 = 1700000000;
  hr.dt = 1;
  Rng rng(99);
  for (int i = 0; i < 500; ++i) hr.values.push_back(rng.uniform(0.0, 37.5));

  const auto path = temp_dir() / "roundtrip.csv";
  write_high_res_csv(path, hr);
  const auto back = load_high_res_csv(path);
  CHECK(back.transformer_id == hr.transformer_id);
  CHECK(back.t0 == hr.t0);
  CHECK(back.dt == hr.dt);
  REQUIRE(back.values.size() == hr.values.size());
  for (std::size_t i = 0; i < hr.values.size(); ++i) CHECK(back.values[i] == hr.values[i]);
}

TEST_CASE("customer round trip keeps kW values") {
  std::vector<CustomerSeries> customers;
  Rng rng(5);
  for (int c = 0; c < 3; ++c) {
    CustomerSeries s;
    s.customer_id = "T01C" + std::to_string(c + 1);
    s.transformer_id = "T01";
    s.t0 = 0;
    s.dt = 3600;
    for (int i = 0; i < 48; ++i) s.values.push_back(rng.uniform(0.1, 4.0));
    customers.push_back(std::move(s));
  }
  const auto path = temp_dir() / "customers.csv";
  write_customer_csv(path, customers);
  const auto back = load_customer_csv(path);
  REQUIRE(back.size() == customers.size());
  for (std::size_t c = 0; c < customers.size(); ++c) {
    CHECK(back[c].customer_id == customers[c].customer_id);
    CHECK(back[c].transformer_id == "T01");
    for (std::size_t i = 0; i < customers[c].values.size(); ++i) {
      CHECK(back[c].values[i] == doctest::Approx(customers[c].values[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("low-res round trip") {
  LowResSeries lr;
  lr.transformer_id = "S01";
  lr.t0 = 7200;
  lr.dt = 3600;
  lr.values = {3.25, 4.5, 2.125, 5.0625};
  const auto path = temp_dir() / "lowres.csv";
  write_low_res_csv(path, lr);
  const auto back = load_low_res_csv(path);
  CHECK(back.dt == 3600);
  CHECK(back.t0 == 7200);
  CHECK(back.values == lr.values);
}

TEST_CASE("one hour of one-second rows loads with the right length") {
  HighResSeries hr;
  hr.transformer_id = "T01";
  hr.dt = 1;
  hr.values.assign(3600, 1.5);
  const auto path = temp_dir() / "hour.csv";
  write_high_res_csv(path, hr);
  CHECK(load_high_res_csv(path).values.size() == 3600);
}

TEST_CASE("gap in timestamps names the first gap") {
  const auto path = temp_dir() / "gap.csv";
  write_file(path,
             "timestamp_s,transformer_id,p_kw\n"
             "0,T01,1.0\n"
             "1,T01,1.0\n"
             "3,T01,1.0\n");
  CHECK_THROWS_WITH_AS(load_high_res_csv(path),
                       doctest::Contains("gap in timestamps between t=1 and t=3"), InputError);
}

TEST_CASE("out-of-order timestamps rejected") {
  const auto path = temp_dir() / "ooo.csv";
  write_file(path,
             "timestamp_s,transformer_id,p_kw\n"
             "5,T01,1.0\n"
             "4,T01,1.0\n");
  CHECK_THROWS_WITH_AS(load_high_res_csv(path), doctest::Contains("out of order"), InputError);
}

TEST_CASE("malformed row reports its line number") {
  const auto path = temp_dir() / "bad.csv";
  write_file(path,
             "timestamp_s,transformer_id,p_kw\n"
             "0,T01,1.0\n"
             "1,T01,oops\n");
  CHECK_THROWS_WITH_AS(load_high_res_csv(path), doctest::Contains(":3:"), InputError);
}

TEST_CASE("wrong header rejected") {
  const auto path = temp_dir() / "hdr.csv";
  write_file(path, "time,p\n0,1\n");
  CHECK_THROWS_AS(load_high_res_csv(path), InputError);
}

TEST_CASE("mixed transformer ids rejected for single-series files") {
  const auto path = temp_dir() / "mixed.csv";
  write_file(path,
             "timestamp_s,transformer_id,p_kw\n"
             "0,T01,1.0\n"
             "0,T02,1.0\n"
             "1,T01,1.0\n"
             "1,T02,1.0\n");
  CHECK_THROWS_AS(load_high_res_csv(path), InputError);
}

}  // TEST_SUITE
