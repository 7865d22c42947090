#include "gridfill/enrich.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gridfill/errors.hpp"

namespace gridfill::enrich {

Bounds infer_bounds(double p_a, const teachers::TeacherRepository& repo,
                    const teachers::TeacherWeights& weights, bool allow_negative_load) {
  if (repo.teachers.empty()) throw ConfigError("infer_bounds: empty teacher repository");
  Bounds b{0.0, 0.0};
  for (const teachers::TeacherModel& t : repo.teachers) {
    const double w = weights.weights.at(t.transformer_id);
    b.p_max += w * gpr::predict_mean(t.gpr_max, p_a);
    b.p_min += w * gpr::predict_mean(t.gpr_min, p_a);
  }
  // consistency clamp: the observed average must be attainable
  b.p_max = std::max(b.p_max, p_a);
  b.p_min = std::min(b.p_min, p_a);
  if (!allow_negative_load) b.p_min = std::max(b.p_min, 0.0);
  b.p_max = std::max(b.p_max, b.p_min);
  return b;
}

int select_level(double p_a, const markov::LevelPartition& partition) {
  return markov::level_of(partition, p_a);
}

markov::TransitionTensor blend_tensors(int level, const teachers::TeacherRepository& repo,
                                       const teachers::TeacherWeights& weights) {
  if (repo.teachers.empty()) throw ConfigError("blend_tensors: empty teacher repository");
  const int n = repo.n_states;
  for (const auto& t : repo.teachers) {
    const auto& tensor = level == 0 ? t.pooled_tensor : t.tensors.at(level - 1);
    if (tensor.n_states != n) {
      throw ConfigError("blend_tensors: teacher '" + t.transformer_id +
                        "' n_states mismatch with repository");
    }
  }

  markov::TransitionTensor out;
  out.n_states = n;
  out.level = level;
  out.counts.assign(static_cast<std::size_t>(n) * n * n, 0.0);
  out.probs.assign(out.counts.size(), 0.0);
  out.defined.assign(static_cast<std::size_t>(n) * n, 0);

  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) {
      double w_defined = 0.0;
      for (const auto& t : repo.teachers) {
        const auto& tensor = level == 0 ? t.pooled_tensor : t.tensors[level - 1];
        if (tensor.row_defined(x, y)) w_defined += weights.weights.at(t.transformer_id);
      }
      const std::size_t base = out.idx(x, y, 1);
      for (const auto& t : repo.teachers) {
        const auto& tensor = level == 0 ? t.pooled_tensor : t.tensors[level - 1];
        const double w = weights.weights.at(t.transformer_id);
        const std::size_t tbase = tensor.idx(x, y, 1);
        for (int z = 0; z < n; ++z) out.counts[base + z] += w * tensor.counts[tbase + z];
        if (tensor.row_defined(x, y) && w_defined > 0.0) {
          const double ws = w / w_defined;
          for (int z = 0; z < n; ++z) out.probs[base + z] += ws * tensor.probs[tbase + z];
        }
      }
      if (w_defined > 0.0) out.defined[out.row_idx(x, y)] = 1;
    }
  }
  return out;
}

namespace {

// initial (prev, cur) pair drawn from the tensor's empirical (x,y)
// occupancy; uniform if the tensor carries no mass at all
CarryState draw_initial_states(const markov::TransitionTensor& tensor, Rng& rng) {
  const int n = tensor.n_states;
  double total = 0.0;
  for (double c : tensor.counts) total += c;
  if (total <= 0.0) {
    return {static_cast<int>(rng.below(n)) + 1, static_cast<int>(rng.below(n)) + 1};
  }
  const double u = rng.uniform_open() * total;
  double cum = 0.0;
  for (int x = 1; x <= n; ++x) {
    for (int y = 1; y <= n; ++y) {
      const std::size_t base = tensor.idx(x, y, 1);
      for (int z = 0; z < n; ++z) cum += tensor.counts[base + z];
      if (u < cum) return {x, y};
    }
  }
  return {n, n};
}

// shifts the samples so that, after clipping to bounds, their mean is the
// target; mean(clip(s + d)) is continuous and non-decreasing in d
void shift_mean_to(std::vector<double>& s, double target, double lo_bound, double hi_bound) {
  auto clipped_mean = [&](double d) {
    double sum = 0.0;
    for (double v : s) sum += std::clamp(v + d, lo_bound, hi_bound);
    return sum / static_cast<double>(s.size());
  };
  double lo = lo_bound, hi = hi_bound;
  for (double v : s) {
    lo = std::min(lo, lo_bound - v);
    hi = std::max(hi, hi_bound - v);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi_bound)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (clipped_mean(mid) < target ? lo : hi) = mid;
  }
  const double d = 0.5 * (lo + hi);
  for (double& v : s) v = std::clamp(v + d, lo_bound, hi_bound);
}

}  // namespace

std::pair<std::vector<double>, CarryState> enrich_interval(
    double p_a, const Bounds& bounds, const markov::TransitionTensor& tensor,
    const markov::RowResolver& rows, std::optional<CarryState> carry, std::size_t n_samples,
    const EnrichmentConfig& config, Rng& rng) {
  if (n_samples < 3) throw ConfigError("enrich_interval: need at least 3 samples per interval");
  if (bounds.p_max < bounds.p_min) throw InputError("enrich_interval: inconsistent bounds");

  CarryState ctx = carry ? *carry : draw_initial_states(tensor, rng);

  markov::StateSequence seq;
  seq.states.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const int z = markov::sample_next(rows, ctx.prev, ctx.cur, rng.uniform_open());
    seq.states.push_back(z);
    ctx.prev = ctx.cur;
    ctx.cur = z;
  }

  std::vector<double> samples =
      markov::states_to_load(seq, bounds.p_max, bounds.p_min, config.n_states, config.bin_mode);

  if (config.mean_preserve) {
    const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
    const double mn = *mn_it, mx = *mx_it;
    if (mx > mn) {
      // stretch the draw onto the full inferred band before recentering
      const double scale = (bounds.p_max - bounds.p_min) / (mx - mn);
      for (double& v : samples) v = bounds.p_min + (v - mn) * scale;
    } else {
      std::fill(samples.begin(), samples.end(), bounds.p_min);
    }
    shift_mean_to(samples, std::clamp(p_a, bounds.p_min, bounds.p_max), bounds.p_min,
                  bounds.p_max);
  }

  return {std::move(samples), ctx};
}

EnrichedSeries enrich_series(const LowResSeries& student_low,
                             const std::vector<teachers::DailyLoadPattern>& student_patterns,
                             const teachers::TeacherRepository& repo,
                             const EnrichmentConfig& config) {
  if (repo.n_states != config.n_states || repo.n_levels != config.n_levels) {
    throw ConfigError("enrich_series: config (n_states=" + std::to_string(config.n_states) +
                      ", n_levels=" + std::to_string(config.n_levels) +
                      ") does not match repository (n_states=" + std::to_string(repo.n_states) +
                      ", n_levels=" + std::to_string(repo.n_levels) + ")");
  }
  if (student_low.values.empty()) throw InputError("enrich_series: empty student series");
  if (config.out_dt <= 0 || student_low.dt % config.out_dt != 0) {
    throw ConfigError("enrich_series: output dt must divide the input interval");
  }
  const std::size_t n_per = static_cast<std::size_t>(student_low.dt / config.out_dt);

  const teachers::TeacherWeights weights =
      teachers::compute_weights(student_patterns, repo, config.weight_mode);
  const markov::LevelPartition partition =
      markov::partition_levels(student_low.values, config.n_levels);

  // blends are memoized per level; the pooled blend backs every resolver
  const markov::TransitionTensor pooled = blend_tensors(0, repo, weights);
  std::vector<std::optional<markov::TransitionTensor>> level_tensors(config.n_levels);
  std::vector<std::optional<markov::RowResolver>> resolvers(config.n_levels);

  Rng rng(config.seed, student_low.transformer_id);

  EnrichedSeries out;
  out.weights = weights;
  out.series.transformer_id = student_low.transformer_id;
  out.series.t0 = student_low.t0;
  out.series.dt = config.out_dt;
  out.series.values.reserve(student_low.values.size() * n_per);
  out.intervals.reserve(student_low.values.size());

  std::optional<std::pair<double, double>> carry_loads;
  for (std::size_t t = 0; t < student_low.values.size(); ++t) {
    with_error_context("enrich_series: interval " + std::to_string(t + 1), [&] {
      const double p_a = student_low.values[t];
      const Bounds bounds = infer_bounds(p_a, repo, weights, config.allow_negative_load);
      const int level = select_level(p_a, partition);
      if (!level_tensors[level - 1]) {
        level_tensors[level - 1] = blend_tensors(level, repo, weights);
        resolvers[level - 1].emplace(*level_tensors[level - 1], pooled);
      }

      std::optional<CarryState> carry;
      if (carry_loads) {
        // last two emitted loads, re-discretized under this interval's bounds
        const double l0 = std::clamp(carry_loads->first, bounds.p_min, bounds.p_max);
        const double l1 = std::clamp(carry_loads->second, bounds.p_min, bounds.p_max);
        const std::vector<double> two{l0, l1};
        const auto states = markov::discretize(two, bounds.p_max, bounds.p_min, config.n_states);
        carry = CarryState{states.states[0], states.states[1]};
      }

      auto [samples, last] =
          enrich_interval(p_a, bounds, *level_tensors[level - 1], *resolvers[level - 1], carry,
                          n_per, config, rng);
      carry_loads = {samples[samples.size() - 2], samples.back()};
      out.series.values.insert(out.series.values.end(), samples.begin(), samples.end());
      out.intervals.push_back(IntervalMeta{bounds.p_max, bounds.p_min, level});
    });
  }
  return out;
}

}  // namespace gridfill::enrich
