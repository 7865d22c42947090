#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "gridfill/enrich.hpp"
#include "gridfill/powerflow.hpp"
#include "gridfill/synthgen.hpp"
#include "gridfill/teachers.hpp"
#include "gridfill/validate.hpp"

namespace gridfill {

// Run-wide configuration shared by the CLI subcommands. Serialized as JSON;
// unknown keys are rejected so typos do not silently fall back to defaults.
struct RunConfig {
  std::uint64_t seed = 1;
  int n_states = 10;
  int n_levels = 10;
  std::int64_t low_dt = 3600;   // s, smart-meter interval
  std::int64_t out_dt = 1;      // s, enriched output resolution
  std::size_t min_hours = 240;  // minimum training intervals per teacher
  int k_folds = 5;
  double loss_fraction = 0.02;
  std::size_t stride = 1;  // power-flow timestep subsampling
  bool mean_preserve = false;
  bool allow_negative_load = false;
  markov::BinMode bin_mode = markov::BinMode::upper_edge;
  teachers::WeightMode weight_mode = teachers::WeightMode::inverse;

  teachers::TrainConfig train_config() const;
  enrich::EnrichmentConfig enrichment_config() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& c);
RunConfig load_run_config(const std::filesystem::path& path);

// FNV-1a hex digest of the canonical (sorted-key) JSON dump.
std::string config_hash(const nlohmann::json& j);

// --- synthgen -------------------------------------------------------------
synth::ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const synth::ScenarioSpec& spec);
synth::ScenarioSpec load_scenario(const std::filesystem::path& path);

// --- model serialization ----------------------------------------------------
nlohmann::json gpr_to_json(const gpr::GprModel& m);
gpr::GprModel gpr_from_json(const nlohmann::json& j);

nlohmann::json tensor_to_json(const markov::TransitionTensor& t);
markov::TransitionTensor tensor_from_json(const nlohmann::json& j);

nlohmann::json teacher_to_json(const teachers::TeacherModel& m);
teachers::TeacherModel teacher_from_json(const nlohmann::json& j);

// Repository directory: repository.json manifest plus one <id>.json per
// teacher.
void save_repository(const std::filesystem::path& dir, const teachers::TeacherRepository& repo,
                     const std::string& config_hash);
teachers::TeacherRepository load_repository(const std::filesystem::path& dir);

// --- powerflow --------------------------------------------------------------
pf::FeederModel feeder_from_json(const nlohmann::json& j);
nlohmann::json feeder_to_json(const pf::FeederModel& f);
pf::FeederModel load_feeder(const std::filesystem::path& path);

nlohmann::json voltage_summary_to_json(const pf::VoltageTimeSeries& vts);

// --- reports ------------------------------------------------------------------
nlohmann::json validation_report_to_json(const validate::ValidationReport& r);
nlohmann::json enrichment_meta_to_json(const enrich::EnrichedSeries& e, std::int64_t low_dt);

// Reads a JSON document, wrapping parse failures into InputError.
nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace gridfill
