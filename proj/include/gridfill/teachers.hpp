#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gridfill/gpr.hpp"
#include "gridfill/markov.hpp"
#include "gridfill/series.hpp"

namespace gridfill::teachers {

// Hour-of-day mean load of one customer, absolute kW (pattern energy
// reflects appliance capacity, so it is deliberately not normalized).
struct DailyLoadPattern {
  std::string customer_id;
  std::array<double, 24> values{};
};

// Everything learned from one transformer with high-resolution data.
struct TeacherModel {
  std::string transformer_id;
  gpr::GprModel gpr_max;
  gpr::GprModel gpr_min;
  std::vector<markov::TransitionTensor> tensors;  // one per level, index j-1
  markov::TransitionTensor pooled_tensor;         // all levels together
  markov::LevelPartition partition;
  std::vector<DailyLoadPattern> patterns;
};

struct TeacherRepository {
  std::vector<TeacherModel> teachers;
  int n_states = 0;
  int n_levels = 0;
};

// Normalized learning weights, one per teacher transformer.
struct TeacherWeights {
  std::map<std::string, double> weights;
};

enum class WeightMode {
  paper,    // weights proportional to the pattern distance itself
  inverse,  // weights proportional to 1 / (distance + eps); the default
};

struct TrainConfig {
  std::int64_t low_dt = 3600;
  int n_states = 10;
  int n_levels = 10;
  std::size_t min_hours = 240;  // minimum complete intervals
  int k_folds = 5;
};

// Per customer, the hour-of-day mean over all complete (midnight-aligned)
// days. Requires at least one complete day per customer.
std::vector<DailyLoadPattern> extract_patterns(const std::vector<CustomerSeries>& customers);

// Full training pass for one micro-PMU transformer: interval stats, both
// bound models (with hyperparameter selection), level partition, per-level
// and pooled transition tensors, customer patterns.
TeacherModel train_teacher(const HighResSeries& hr, const std::vector<CustomerSeries>& customers,
                           const TrainConfig& config);

// Mean pairwise pattern distance per teacher, normalized into a probability
// vector. Unequal customer counts are reduced to the common count by
// keeping the highest-energy patterns on each side.
TeacherWeights compute_weights(const std::vector<DailyLoadPattern>& student_patterns,
                               const TeacherRepository& repo, WeightMode mode);

}  // namespace gridfill::teachers
