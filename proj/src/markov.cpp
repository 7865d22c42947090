#include "gridfill/markov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridfill/errors.hpp"
#include "gridfill/quantile.hpp"

namespace gridfill::markov {

StateSequence discretize(std::span<const double> samples, double p_max, double p_min,
                         int n_states) {
  if (n_states < 2) throw ConfigError("discretize: n_states must be >= 2");
  if (p_max < p_min) throw InputError("discretize: p_max < p_min");

  StateSequence seq;
  seq.states.reserve(samples.size());
  const double range = p_max - p_min;
  if (range == 0.0) {
    seq.states.assign(samples.size(), 1);
    return seq;
  }
  const double slack = 1e-9 * std::max({1.0, std::abs(p_min), std::abs(p_max)});
  const double inv_width = static_cast<double>(n_states) / range;
  for (double v : samples) {
    if (v < p_min - slack || v > p_max + slack) {
      throw InputError("discretize: sample " + std::to_string(v) + " outside [" +
                       std::to_string(p_min) + ", " + std::to_string(p_max) + "]");
    }
    int s = static_cast<int>(std::floor((v - p_min) * inv_width)) + 1;
    seq.states.push_back(std::clamp(s, 1, n_states));
  }
  return seq;
}

LevelPartition partition_levels(std::span<const double> p_a_values, int n_levels) {
  if (n_levels < 1) throw ConfigError("partition_levels: n_levels must be >= 1");
  if (p_a_values.empty()) throw InputError("partition_levels: no observations");

  std::vector<double> sorted(p_a_values.begin(), p_a_values.end());
  std::sort(sorted.begin(), sorted.end());

  LevelPartition part;
  part.n_levels = n_levels;
  part.edges.reserve(n_levels + 1);
  for (int j = 0; j <= n_levels; ++j) {
    part.edges.push_back(quantile_sorted(sorted, 100.0 * j / n_levels));
  }
  part.degenerate = sorted.front() == sorted.back();
  return part;
}

int level_of(const LevelPartition& partition, double p_a) {
  for (int j = 1; j < partition.n_levels; ++j) {
    if (p_a < partition.edges[j]) return j;
  }
  return partition.n_levels;
}

void normalize_from_counts(TransitionTensor& t) {
  const int n = t.n_states;
  t.probs.assign(t.counts.size(), 0.0);
  t.defined.assign(static_cast<std::size_t>(n) * n, 0);
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) {
      const std::size_t base = t.idx(x, y, 1);
      double total = 0.0;
      for (int z = 0; z < n; ++z) total += t.counts[base + z];
      if (total > 0.0) {
        t.defined[t.row_idx(x, y)] = 1;
        for (int z = 0; z < n; ++z) t.probs[base + z] = t.counts[base + z] / total;
      }
    }
  }
}

TransitionTensor count_and_normalize(const std::vector<StateSequence>& sequences, int n_states) {
  if (n_states < 2) throw ConfigError("count_and_normalize: n_states must be >= 2");
  TransitionTensor t;
  t.n_states = n_states;
  t.counts.assign(static_cast<std::size_t>(n_states) * n_states * n_states, 0.0);
  for (const StateSequence& seq : sequences) {
    for (std::size_t i = 1; i + 1 < seq.states.size(); ++i) {
      const int x = seq.states[i - 1], y = seq.states[i], z = seq.states[i + 1];
      if (x < 1 || x > n_states || y < 1 || y > n_states || z < 1 || z > n_states) {
        throw InputError("count_and_normalize: state outside [1, " + std::to_string(n_states) +
                         "] in interval " + std::to_string(seq.interval_index));
      }
      t.counts[t.idx(x, y, z)] += 1.0;
    }
  }
  normalize_from_counts(t);
  return t;
}

int sample_from_row(std::span<const double> row, double u) {
  double cum = 0.0;
  int last_nonzero = static_cast<int>(row.size());
  for (std::size_t z = 0; z < row.size(); ++z) {
    cum += row[z];
    if (u < cum) return static_cast<int>(z) + 1;
    if (row[z] > 0.0) last_nonzero = static_cast<int>(z) + 1;
  }
  // u >= total row mass can only happen through rounding; take the last
  // state that has any mass
  return last_nonzero;
}

RowResolver::RowResolver(const TransitionTensor& level_tensor,
                         const TransitionTensor& pooled_tensor)
    : level_(&level_tensor), pooled_(&pooled_tensor), n_(level_tensor.n_states) {
  if (pooled_tensor.n_states != n_) {
    throw ConfigError("RowResolver: level and pooled tensors disagree on n_states");
  }
  // first-order rows: pooled counts marginalized over the previous state
  first_order_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  first_defined_.assign(n_, 0);
  for (int y = 1; y <= n_; ++y) {
    double total = 0.0;
    double* row = first_order_.data() + static_cast<std::size_t>(y - 1) * n_;
    for (int x = 1; x <= n_; ++x) {
      for (int z = 1; z <= n_; ++z) row[z - 1] += pooled_tensor.counts[pooled_tensor.idx(x, y, z)];
    }
    for (int z = 0; z < n_; ++z) total += row[z];
    if (total > 0.0) {
      first_defined_[y - 1] = 1;
      for (int z = 0; z < n_; ++z) row[z] /= total;
    }
  }
  uniform_.assign(n_, 1.0 / n_);
}

std::span<const double> RowResolver::row(int x, int y) const {
  if (level_->row_defined(x, y)) return level_->row(x, y);
  if (pooled_->row_defined(x, y)) return pooled_->row(x, y);
  if (first_defined_[y - 1]) {
    return {first_order_.data() + static_cast<std::size_t>(y - 1) * n_,
            static_cast<std::size_t>(n_)};
  }
  return {uniform_.data(), uniform_.size()};
}

int sample_next(const RowResolver& rows, int prev_state, int cur_state, double u) {
  return sample_from_row(rows.row(prev_state, cur_state), u);
}

std::vector<double> states_to_load(const StateSequence& states, double p_max, double p_min,
                                   int n_states, BinMode mode) {
  const double width = (p_max - p_min) / n_states;
  const double offset = mode == BinMode::midpoint ? 0.5 : 0.0;
  std::vector<double> out;
  out.reserve(states.states.size());
  for (int s : states.states) {
    out.push_back(p_min + (static_cast<double>(s) - offset) * width);
  }
  return out;
}

}  // namespace gridfill::markov
