#include "gridfill/teachers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "gridfill/errors.hpp"

namespace gridfill::teachers {

std::vector<DailyLoadPattern> extract_patterns(const std::vector<CustomerSeries>& customers) {
  std::vector<DailyLoadPattern> out;
  out.reserve(customers.size());
  for (const CustomerSeries& c : customers) {
    if (c.dt <= 0 || 86400 % c.dt != 0) {
      throw ConfigError("extract_patterns: customer '" + c.customer_id + "' dt " +
                        std::to_string(c.dt) + " s does not divide a day");
    }
    // trim to complete midnight-aligned days
    const std::int64_t lead_s = (86400 - c.t0 % 86400) % 86400;
    const std::size_t lead = static_cast<std::size_t>(lead_s / c.dt);
    const std::size_t per_day = static_cast<std::size_t>(86400 / c.dt);
    const std::size_t days = lead >= c.values.size() ? 0 : (c.values.size() - lead) / per_day;
    if (days == 0) {
      throw InputError("extract_patterns: customer '" + c.customer_id +
                       "' has no complete day of data");
    }

    std::array<double, 24> sums{};
    std::array<std::size_t, 24> counts{};
    const std::int64_t start = c.t0 + static_cast<std::int64_t>(lead) * c.dt;
    for (std::size_t i = 0; i < days * per_day; ++i) {
      const std::int64_t t = start + static_cast<std::int64_t>(i) * c.dt;
      const std::size_t hour = static_cast<std::size_t>((t % 86400) / 3600);
      sums[hour] += c.values[lead + i];
      counts[hour] += 1;
    }
    DailyLoadPattern p;
    p.customer_id = c.customer_id;
    for (std::size_t h = 0; h < 24; ++h) p.values[h] = sums[h] / static_cast<double>(counts[h]);
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

gpr::GprModel fit_bound_model(const std::vector<gpr::TrainingPair>& pairs,
                              gpr::TargetKind kind, int k_folds) {
  const auto grid = gpr::default_grid(pairs);
  const auto params = gpr::select_hyperparams(pairs, grid, k_folds);
  return gpr::fit(pairs, params, kind);
}

}  // namespace

TeacherModel train_teacher(const HighResSeries& hr, const std::vector<CustomerSeries>& customers,
                           const TrainConfig& config) {
  return with_error_context("train_teacher(" + hr.transformer_id + ")", [&] {
    TeacherModel m;
    m.transformer_id = hr.transformer_id;

    const auto stats = segment_and_aggregate(hr, config.low_dt);
    if (stats.size() < config.min_hours) {
      throw InputError("only " + std::to_string(stats.size()) + " complete intervals, need " +
                       std::to_string(config.min_hours));
    }

    std::vector<gpr::TrainingPair> pairs_max, pairs_min;
    std::vector<double> p_avg;
    pairs_max.reserve(stats.size());
    pairs_min.reserve(stats.size());
    p_avg.reserve(stats.size());
    for (const IntervalStats& s : stats) {
      pairs_max.emplace_back(s.p_avg, s.p_max);
      pairs_min.emplace_back(s.p_avg, s.p_min);
      p_avg.push_back(s.p_avg);
    }
    m.gpr_max = fit_bound_model(pairs_max, gpr::TargetKind::max, config.k_folds);
    m.gpr_min = fit_bound_model(pairs_min, gpr::TargetKind::min, config.k_folds);

    m.partition = markov::partition_levels(p_avg, config.n_levels);

    // discretize each interval under its own bounds, then bucket by level
    const std::size_t n_per = static_cast<std::size_t>(config.low_dt / hr.dt);
    std::vector<std::vector<markov::StateSequence>> by_level(config.n_levels);
    std::vector<markov::StateSequence> all;
    all.reserve(stats.size());
    for (std::size_t t = 0; t < stats.size(); ++t) {
      std::span<const double> samples(hr.values.data() + t * n_per, n_per);
      markov::StateSequence seq =
          markov::discretize(samples, stats[t].p_max, stats[t].p_min, config.n_states);
      seq.interval_index = stats[t].t;
      const int level = markov::level_of(m.partition, stats[t].p_avg);
      by_level[level - 1].push_back(seq);
      all.push_back(std::move(seq));
    }
    m.tensors.reserve(config.n_levels);
    for (int j = 1; j <= config.n_levels; ++j) {
      markov::TransitionTensor t = markov::count_and_normalize(by_level[j - 1], config.n_states);
      t.level = j;
      m.tensors.push_back(std::move(t));
    }
    m.pooled_tensor = markov::count_and_normalize(all, config.n_states);

    m.patterns = extract_patterns(customers);
    return m;
  });
}

namespace {

double pattern_energy(const DailyLoadPattern& p) {
  return std::accumulate(p.values.begin(), p.values.end(), 0.0);
}

// top-m patterns by energy, descending; ties broken by customer id
std::vector<const DailyLoadPattern*> top_by_energy(const std::vector<DailyLoadPattern>& patterns,
                                                   std::size_t m) {
  std::vector<const DailyLoadPattern*> ptrs;
  ptrs.reserve(patterns.size());
  for (const auto& p : patterns) ptrs.push_back(&p);
  std::sort(ptrs.begin(), ptrs.end(), [](const DailyLoadPattern* a, const DailyLoadPattern* b) {
    const double ea = pattern_energy(*a), eb = pattern_energy(*b);
    if (ea != eb) return ea > eb;
    return a->customer_id < b->customer_id;
  });
  ptrs.resize(m);
  return ptrs;
}

double pattern_distance(const DailyLoadPattern& a, const DailyLoadPattern& b) {
  double ss = 0.0;
  for (std::size_t h = 0; h < 24; ++h) {
    const double d = a.values[h] - b.values[h];
    ss += d * d;
  }
  return std::sqrt(ss);
}

}  // namespace

TeacherWeights compute_weights(const std::vector<DailyLoadPattern>& student_patterns,
                               const TeacherRepository& repo, WeightMode mode) {
  if (repo.teachers.empty()) throw ConfigError("compute_weights: empty teacher repository");
  if (student_patterns.empty()) throw InputError("compute_weights: student has no patterns");

  // mean pairwise distance W'_k per teacher
  std::vector<double> w_raw;
  w_raw.reserve(repo.teachers.size());
  for (const TeacherModel& teacher : repo.teachers) {
    if (teacher.patterns.empty()) {
      throw InputError("compute_weights: teacher '" + teacher.transformer_id + "' has no patterns");
    }
    const std::size_t m = std::min(student_patterns.size(), teacher.patterns.size());
    const auto sp = top_by_energy(student_patterns, m);
    const auto tp = top_by_energy(teacher.patterns, m);
    double total = 0.0;
    for (const auto* a : sp) {
      for (const auto* b : tp) total += pattern_distance(*a, *b);
    }
    w_raw.push_back(total / (static_cast<double>(m) * static_cast<double>(m)));
  }

  const double mean_raw =
      std::accumulate(w_raw.begin(), w_raw.end(), 0.0) / static_cast<double>(w_raw.size());

  std::vector<double> w(w_raw.size());
  if (mean_raw == 0.0) {
    // all teachers indistinguishable from the student
    std::fill(w.begin(), w.end(), 1.0);
  } else if (mode == WeightMode::paper) {
    w = w_raw;
  } else {
    const double eps = 1e-6 * mean_raw;
    for (std::size_t k = 0; k < w_raw.size(); ++k) w[k] = 1.0 / (w_raw[k] + eps);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);

  TeacherWeights out;
  for (std::size_t k = 0; k < repo.teachers.size(); ++k) {
    out.weights[repo.teachers[k].transformer_id] = w[k] / total;
  }
  return out;
}

}  // namespace gridfill::teachers
