#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gridfill::markov {

// States are 1-based: S in {1, ..., n_states}.
struct StateSequence {
  std::size_t interval_index = 0;
  std::vector<int> states;
};

// Second-order transition model P(next=z | prev=x, cur=y) for one load-level
// subset. Counts are the source of truth (blending produces fractional
// counts); probs and the defined mask are derived row-normalizations.
struct TransitionTensor {
  int n_states = 0;
  int level = 0;  // 1-based level index, 0 for the pooled tensor
  std::vector<double> counts;          // n³, (x,y,z) row-major
  std::vector<double> probs;           // n³
  std::vector<std::uint8_t> defined;   // n², rows (x,y) with nonzero count

  std::size_t idx(int x, int y, int z) const {
    return (static_cast<std::size_t>(x - 1) * n_states + (y - 1)) * n_states + (z - 1);
  }
  std::size_t row_idx(int x, int y) const {
    return static_cast<std::size_t>(x - 1) * n_states + (y - 1);
  }
  bool row_defined(int x, int y) const { return defined[row_idx(x, y)] != 0; }
  std::span<const double> row(int x, int y) const {
    return {probs.data() + idx(x, y, 1), static_cast<std::size_t>(n_states)};
  }
};

// Percentile cut values of a P_a distribution; level j (1-based) covers
// [edges[j-1], edges[j]) with the last level closed on top.
struct LevelPartition {
  int n_levels = 0;
  std::vector<double> edges;  // n_levels + 1, non-decreasing
  bool degenerate = false;    // all observations equal; only one usable level
};

enum class BinMode { upper_edge, midpoint };

// Maps each sample into one of n_states equal-width bins over
// [p_min, p_max]; samples equal to p_max map to the top state. Samples
// outside the range beyond a small slack are rejected.
StateSequence discretize(std::span<const double> samples, double p_max, double p_min,
                         int n_states);

LevelPartition partition_levels(std::span<const double> p_a_values, int n_levels);

// 1-based level for a load value; values outside the edge range clamp to the
// first/last level. Interior edge values belong to the higher level.
int level_of(const LevelPartition& partition, double p_a);

// Counts (prev, cur, next) triplets within each sequence only; triplets
// never span sequence boundaries.
TransitionTensor count_and_normalize(const std::vector<StateSequence>& sequences, int n_states);

// Recomputes probs and the defined mask from counts.
void normalize_from_counts(TransitionTensor& t);

// Inverse-CDF draw from one probability row, u in (0,1): the smallest z with
// cumulative probability exceeding u.
int sample_from_row(std::span<const double> row, double u);

// Row lookup with the fallback chain for state pairs never observed at the
// requested level: level tensor -> pooled tensor -> first-order row
// (pooled counts marginalized over the previous state) -> uniform.
class RowResolver {
public:
  RowResolver(const TransitionTensor& level_tensor, const TransitionTensor& pooled_tensor);
  std::span<const double> row(int x, int y) const;

private:
  const TransitionTensor* level_;
  const TransitionTensor* pooled_;
  std::vector<double> first_order_;         // n², one row per current state y
  std::vector<std::uint8_t> first_defined_; // n
  std::vector<double> uniform_;             // n
  int n_;
};

int sample_next(const RowResolver& rows, int prev_state, int cur_state, double u);

// Inverse of discretize up to bin width: upper_edge follows
// p_min + S * (p_max - p_min) / n_states; midpoint uses (S - 0.5).
std::vector<double> states_to_load(const StateSequence& states, double p_max, double p_min,
                                   int n_states, BinMode mode = BinMode::upper_edge);

}  // namespace gridfill::markov
