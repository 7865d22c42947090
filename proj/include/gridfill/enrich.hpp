#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridfill/markov.hpp"
#include "gridfill/rng.hpp"
#include "gridfill/series.hpp"
#include "gridfill/teachers.hpp"

namespace gridfill::enrich {

struct EnrichmentConfig {
  int n_states = 10;
  int n_levels = 10;
  std::uint64_t seed = 1;
  std::int64_t out_dt = 1;  // s, resolution of the enriched output
  bool mean_preserve = false;
  bool allow_negative_load = false;  // PV scenarios produce net export
  markov::BinMode bin_mode = markov::BinMode::upper_edge;
  teachers::WeightMode weight_mode = teachers::WeightMode::inverse;
};

struct Bounds {
  double p_max = 0.0;
  double p_min = 0.0;
};

struct IntervalMeta {
  double p_max_star = 0.0;
  double p_min_star = 0.0;
  int level = 0;
};

struct EnrichedSeries {
  HighResSeries series;
  std::vector<IntervalMeta> intervals;
  teachers::TeacherWeights weights;
};

// Chain context carried between samples: (previous, current) state.
struct CarryState {
  int prev = 1;
  int cur = 1;
};

// Weighted average of the teachers' posterior-mean bound predictions at
// p_a, then the consistency clamp: the interval average always lies within
// the returned bounds, and the lower bound stays nonnegative unless
// negative net load is allowed.
Bounds infer_bounds(double p_a, const teachers::TeacherRepository& repo,
                    const teachers::TeacherWeights& weights, bool allow_negative_load);

// Level of p_a under the student's own percentile partition; out-of-range
// values clamp to the first/last level.
int select_level(double p_a, const markov::LevelPartition& partition);

// Per (x,y) row, the weighted average of the prob rows of those teachers
// that define the row, weights renormalized over that subset. Counts are
// weight-scaled sums kept for marginal estimates. level 0 blends the
// pooled tensors.
markov::TransitionTensor blend_tensors(int level, const teachers::TeacherRepository& repo,
                                       const teachers::TeacherWeights& weights);

// Draws n_samples chain states through the fallback row resolver, maps them
// into [bounds.p_min, bounds.p_max], and optionally rescales/shifts so the
// sample mean equals p_a. Returns the samples and the last two states.
std::pair<std::vector<double>, CarryState> enrich_interval(
    double p_a, const Bounds& bounds, const markov::TransitionTensor& tensor,
    const markov::RowResolver& rows, std::optional<CarryState> carry, std::size_t n_samples,
    const EnrichmentConfig& config, Rng& rng);

// The whole student-side pipeline over every interval of the low-resolution
// series, carrying chain state across interval boundaries. Deterministic
// for a fixed (repository, patterns, config) tuple; the random stream is
// derived from hash(seed, transformer_id).
EnrichedSeries enrich_series(const LowResSeries& student_low,
                             const std::vector<teachers::DailyLoadPattern>& student_patterns,
                             const teachers::TeacherRepository& repo,
                             const EnrichmentConfig& config);

}  // namespace gridfill::enrich
