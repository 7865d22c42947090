#include <doctest.h>

#include <cmath>
#include <vector>

#include "gridfill/errors.hpp"
#include "gridfill/markov.hpp"
#include "gridfill/rng.hpp"

using namespace gridfill;
using namespace gridfill::markov;

namespace {

// ground-truth tensor with random dense rows, for estimation consistency
TransitionTensor random_tensor(int n_states, Rng& rng) {
  TransitionTensor t;
  t.n_states = n_states;
  t.counts.assign(static_cast<std::size_t>(n_states) * n_states * n_states, 0.0);
  for (int x = 1; x <= n_states; ++x) {
    for (int y = 1; y <= n_states; ++y) {
      for (int z = 1; z <= n_states; ++z) t.counts[t.idx(x, y, z)] = rng.uniform(0.05, 1.0);
    }
  }
  normalize_from_counts(t);
  return t;
}

std::vector<int> simulate_chain(const TransitionTensor& t, std::size_t steps, Rng& rng) {
  std::vector<int> states{1, 1};
  states.reserve(steps);
  while (states.size() < steps) {
    const auto row = t.row(states[states.size() - 2], states.back());
    states.push_back(sample_from_row(row, rng.uniform_open()));
  }
  return states;
}

}  // namespace

TEST_SUITE("markov") {

TEST_CASE("discretize follows the bin arithmetic") {
  const double samples[] = {1.25};
  const auto seq = discretize(samples, 2.0, 1.0, 10);
  CHECK(seq.states[0] == 3);
}

TEST_CASE("discretize boundary conventions") {
  const double samples[] = {1.0, 2.0, 1.0999999999};
  const auto seq = discretize(samples, 2.0, 1.0, 10);
  CHECK(seq.states[0] == 1);   // p_min -> lowest bin
  CHECK(seq.states[1] == 10);  // p_max -> clamped top bin
  CHECK(seq.states[2] == 1);
}

TEST_CASE("discretize degenerate interval maps everything to state 1") {
  const double samples[] = {5.0, 5.0, 5.0};
  const auto seq = discretize(samples, 5.0, 5.0, 10);
  for (int s : seq.states) CHECK(s == 1);
}

TEST_CASE("discretize rejects out-of-range samples") {
  const double samples[] = {3.5};
  CHECK_THROWS_AS(discretize(samples, 2.0, 1.0, 10), InputError);
}

TEST_CASE("partition edges at linear-interpolation percentiles") {
  std::vector<double> values(100);
  for (int i = 0; i < 100; ++i) values[i] = i + 1;
  const auto part = partition_levels(values, 4);
  REQUIRE(part.edges.size() == 5);
  CHECK(part.edges[0] == doctest::Approx(1.0));
  CHECK(part.edges[1] == doctest::Approx(25.75));
  CHECK(part.edges[2] == doctest::Approx(50.5));
  CHECK(part.edges[3] == doctest::Approx(75.25));
  CHECK(part.edges[4] == doctest::Approx(100.0));
  CHECK_FALSE(part.degenerate);
}

TEST_CASE("single level holds everything") {
  std::vector<double> values{3.0, 1.0, 2.0};
  const auto part = partition_levels(values, 1);
  CHECK(level_of(part, 1.0) == 1);
  CHECK(level_of(part, 3.0) == 1);
}

TEST_CASE("interior edge value belongs to the higher level") {
  std::vector<double> values(100);
  for (int i = 0; i < 100; ++i) values[i] = i + 1;
  const auto part = partition_levels(values, 4);
  CHECK(level_of(part, part.edges[1]) == 2);
  CHECK(level_of(part, part.edges[1] - 1e-9) == 1);
}

TEST_CASE("all-equal observations flag a degenerate partition") {
  std::vector<double> values(10, 7.0);
  const auto part = partition_levels(values, 4);
  CHECK(part.degenerate);
  CHECK(level_of(part, 7.0) == 4);  // single usable level
}

TEST_CASE("decile membership") {
  std::vector<double> values(100);
  for (int i = 0; i < 100; ++i) values[i] = i + 1;
  const auto part = partition_levels(values, 10);
  CHECK(level_of(part, 55.0) == 6);
  CHECK(level_of(part, 0.0) == 1);    // below range clamps
  CHECK(level_of(part, 100.0) == 10); // max observed is in the top level
  CHECK(level_of(part, 999.0) == 10);
}

TEST_CASE("count_and_normalize on a hand-enumerated sequence") {
  StateSequence seq;
  seq.states = {1, 1, 2, 2};
  const auto t = count_and_normalize({seq}, 2);
  CHECK(t.counts[t.idx(1, 1, 2)] == 1.0);
  CHECK(t.counts[t.idx(1, 2, 2)] == 1.0);
  CHECK(t.probs[t.idx(1, 1, 2)] == 1.0);
  CHECK(t.probs[t.idx(1, 1, 1)] == 0.0);
  CHECK(t.probs[t.idx(1, 2, 2)] == 1.0);
  CHECK(t.row_defined(1, 1));
  CHECK(t.row_defined(1, 2));
  CHECK_FALSE(t.row_defined(2, 1));
  CHECK_FALSE(t.row_defined(2, 2));
}

TEST_CASE("constant sequence concentrates on the diagonal") {
  StateSequence seq;
  seq.states.assign(50, 3);
  const auto t = count_and_normalize({seq}, 5);
  CHECK(t.probs[t.idx(3, 3, 3)] == 1.0);
}

TEST_CASE("triplets never span sequence boundaries") {
  StateSequence a, b;
  a.states = {1, 1};  // too short to form a triplet
  b.states = {2, 2};
  const auto t = count_and_normalize({a, b}, 2);
  for (double c : t.counts) CHECK(c == 0.0);
}

TEST_CASE("every defined row sums to one") {
  Rng rng(3);
  std::vector<StateSequence> seqs;
  for (int k = 0; k < 20; ++k) {
    StateSequence s;
    for (int i = 0; i < 60; ++i) s.states.push_back(static_cast<int>(rng.below(6)) + 1);
    seqs.push_back(std::move(s));
  }
  const auto t = count_and_normalize(seqs, 6);
  for (int x = 1; x <= 6; ++x) {
    for (int y = 1; y <= 6; ++y) {
      if (!t.row_defined(x, y)) continue;
      double sum = 0.0;
      for (int z = 1; z <= 6; ++z) sum += t.probs[t.idx(x, y, z)];
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("inverse-CDF selection by hand") {
  const std::vector<double> row{0.2, 0.5, 0.3};
  CHECK(sample_from_row(row, 0.65) == 2);
  CHECK(sample_from_row(row, 0.1) == 1);
  CHECK(sample_from_row(row, 0.71) == 3);
}

TEST_CASE("degenerate row always returns its single state") {
  const std::vector<double> row{1.0, 0.0, 0.0};
  CHECK(sample_from_row(row, 0.001) == 1);
  CHECK(sample_from_row(row, 0.999) == 1);
}

TEST_CASE("sampled frequencies match the row") {
  const std::vector<double> row{0.2, 0.5, 0.3};
  Rng rng(17);
  int counts[3] = {0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) counts[sample_from_row(row, rng.uniform_open()) - 1]++;
  for (int z = 0; z < 3; ++z) {
    CHECK(std::abs(static_cast<double>(counts[z]) / n - row[z]) < 0.01);
  }
}

TEST_CASE("states_to_load arithmetic") {
  StateSequence seq;
  seq.states = {3, 10};
  const auto loads = states_to_load(seq, 2.0, 1.0, 10);
  CHECK(loads[0] == doctest::Approx(1.3));
  CHECK(loads[1] == doctest::Approx(2.0));  // top state maps to the upper bound

  const auto mid = states_to_load(seq, 2.0, 1.0, 10, BinMode::midpoint);
  CHECK(mid[0] == doctest::Approx(1.25));
}

TEST_CASE("degenerate interval maps to p_min") {
  StateSequence seq;
  seq.states = {1, 5, 10};
  for (double v : states_to_load(seq, 4.0, 4.0, 10)) CHECK(v == 4.0);
}

TEST_CASE("round trip stays within one bin width") {
  Rng rng(23);
  const double p_min = 2.0, p_max = 11.0;
  const int n_states = 10;
  const double width = (p_max - p_min) / n_states;
  std::vector<double> samples;
  for (int i = 0; i < 500; ++i) samples.push_back(rng.uniform(p_min, p_max));
  samples.push_back(p_min);
  samples.push_back(p_max);
  const auto seq = discretize(samples, p_max, p_min, n_states);
  const auto back = states_to_load(seq, p_max, p_min, n_states);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(std::abs(back[i] - samples[i]) <= width + 1e-12);
  }
}

TEST_CASE("fallback chain walks level, pooled, first-order, uniform") {
  const int n = 4;
  // level tensor defines only (1,1)
  StateSequence level_seq;
  level_seq.states = {1, 1, 2};
  const auto level = count_and_normalize({level_seq}, n);
  // pooled triplets: (2,1,3), (1,3,2), (3,2,1), (2,1,1)
  StateSequence pooled_seq;
  pooled_seq.states = {2, 1, 3, 2, 1, 1};
  const auto pooled = count_and_normalize({pooled_seq}, n);

  RowResolver rows(level, pooled);

  // defined at level: from the level tensor
  CHECK(rows.row(1, 1)[1] == doctest::Approx(1.0));  // level says next=2
  // (2,1) undefined at level, defined pooled: next in {1, 3}
  CHECK(rows.row(2, 1)[0] == doctest::Approx(0.5));
  CHECK(rows.row(2, 1)[2] == doctest::Approx(0.5));
  // (3,1) undefined everywhere; first-order marginal over cur=1
  const auto fo = rows.row(3, 1);
  CHECK(fo[0] == doctest::Approx(0.5));
  CHECK(fo[2] == doctest::Approx(0.5));
  // cur state never observed at all -> uniform
  const auto uni = rows.row(4, 4);
  for (double p : uni) CHECK(p == doctest::Approx(1.0 / n));
}

TEST_CASE("re-estimated tensor converges to the simulator") {
  Rng rng(2024);
  const int n_states = 5;
  const auto truth = random_tensor(n_states, rng);
  const auto chain = simulate_chain(truth, 100000, rng);

  StateSequence seq;
  seq.states = chain;
  const auto est = count_and_normalize({seq}, n_states);

  // row visit counts
  for (int x = 1; x <= n_states; ++x) {
    for (int y = 1; y <= n_states; ++y) {
      double visits = 0.0;
      for (int z = 1; z <= n_states; ++z) visits += est.counts[est.idx(x, y, z)];
      if (visits < 500) continue;
      for (int z = 1; z <= n_states; ++z) {
        CHECK(std::abs(est.probs[est.idx(x, y, z)] - truth.probs[truth.idx(x, y, z)]) < 0.05);
      }
    }
  }
}

TEST_CASE("re-simulation preserves the stationary histogram") {
  Rng rng(77);
  const int n_states = 5;
  const auto truth = random_tensor(n_states, rng);
  const auto chain_a = simulate_chain(truth, 100000, rng);

  StateSequence seq;
  seq.states = chain_a;
  const auto est = count_and_normalize({seq}, n_states);
  const auto chain_b = simulate_chain(est, 100000, rng);

  double hist_a[5] = {0}, hist_b[5] = {0};
  for (int s : chain_a) hist_a[s - 1] += 1.0 / chain_a.size();
  for (int s : chain_b) hist_b[s - 1] += 1.0 / chain_b.size();
  double tv = 0.0;
  for (int s = 0; s < n_states; ++s) tv += 0.5 * std::abs(hist_a[s] - hist_b[s]);
  CHECK(tv < 0.05);
}

}  // TEST_SUITE
