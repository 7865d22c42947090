// gridfill: train statistical enrichment models on high-resolution
// transformer load, enrich smart-meter-only transformers, and evaluate the
// result statistically and through radial power flow.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "gridfill/csv.hpp"
#include "gridfill/enrich.hpp"
#include "gridfill/errors.hpp"
#include "gridfill/json_io.hpp"
#include "gridfill/parallel.hpp"
#include "gridfill/powerflow.hpp"
#include "gridfill/synthgen.hpp"
#include "gridfill/teachers.hpp"
#include "gridfill/validate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gridfill;

namespace {

constexpr const char* kVersion = "0.1.0";

json manifest_base(const std::string& command, const json& config_json, std::uint64_t seed) {
  return json{{"version", kVersion},
              {"command", command},
              {"config_hash", config_hash(config_json)},
              {"seed", seed}};
}

RunConfig load_config_with_env(const fs::path& path) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
  if (const char* env = std::getenv("GRIDFILL_SEED")) {
    cfg.seed = std::strtoull(env, nullptr, 10);
  }
  return cfg;
}

int run_synth(const fs::path& scenario_path, const fs::path& out_dir, int jobs) {
  synth::ScenarioSpec spec = load_scenario(scenario_path);
  if (const char* env = std::getenv("GRIDFILL_SEED")) {
    spec.seed = std::strtoull(env, nullptr, 10);
  }
  const auto gen = synth::generate_scenario(spec, jobs);

  std::vector<std::string> outputs;
  auto emit = [&](const synth::GeneratedTransformer& tr, const std::string& subdir) {
    const fs::path base = out_dir / subdir;
    write_high_res_csv(base / (tr.truth.transformer_id + ".csv"), tr.truth);
    write_customer_csv(base / (tr.truth.transformer_id + "_customers.csv"), tr.customers);
    outputs.push_back(subdir + "/" + tr.truth.transformer_id + ".csv");
    outputs.push_back(subdir + "/" + tr.truth.transformer_id + "_customers.csv");
  };
  for (const auto& tr : gen.teachers) emit(tr, "teachers");
  for (const auto& tr : gen.students) emit(tr, "students");

  const json spec_json = scenario_to_json(spec);
  save_json(out_dir / "scenario.json", spec_json);
  json manifest = manifest_base("synth", spec_json, spec.seed);
  manifest["outputs"] = outputs;
  save_json(out_dir / "manifest.json", manifest);
  return 0;
}

int run_train(const fs::path& data_dir, const fs::path& config_path, const fs::path& repo_dir,
              int jobs) {
  const RunConfig cfg = load_config_with_env(config_path);

  // every teachers/<id>.csv with a <id>_customers.csv companion
  const fs::path teacher_dir = data_dir / "teachers";
  if (!fs::is_directory(teacher_dir)) {
    throw InputError("train: no teachers/ directory under '" + data_dir.string() + "'");
  }
  std::vector<fs::path> series_files;
  for (const auto& entry : fs::directory_iterator(teacher_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.ends_with(".csv") && !name.ends_with("_customers.csv")) {
      series_files.push_back(entry.path());
    }
  }
  std::sort(series_files.begin(), series_files.end());
  if (series_files.empty()) {
    throw InputError("train: no teacher series found in '" + teacher_dir.string() + "'");
  }

  teachers::TeacherRepository repo;
  repo.n_states = cfg.n_states;
  repo.n_levels = cfg.n_levels;
  repo.teachers.resize(series_files.size());
  const teachers::TrainConfig train_cfg = cfg.train_config();
  parallel_for(series_files.size(), jobs, [&](std::size_t i) {
    const HighResSeries hr = load_high_res_csv(series_files[i]);
    fs::path customers_path = series_files[i];
    customers_path.replace_filename(series_files[i].stem().string() + "_customers.csv");
    const auto customers = load_customer_csv(customers_path);
    repo.teachers[i] = teachers::train_teacher(hr, customers, train_cfg);
    if (repo.teachers[i].partition.degenerate) {
      std::cerr << "warning: teacher '" << hr.transformer_id
                << "' has a degenerate load-level partition (constant average load)\n";
    }
  });

  const json cfg_json = run_config_to_json(cfg);
  save_repository(repo_dir, repo, config_hash(cfg_json));
  json manifest = manifest_base("train", cfg_json, cfg.seed);
  json ids = json::array();
  for (const auto& t : repo.teachers) ids.push_back(t.transformer_id);
  manifest["teachers"] = ids;
  save_json(repo_dir / "manifest.json", manifest);
  return 0;
}

int run_enrich(const fs::path& repo_dir, const fs::path& student_path,
               const fs::path& config_path, const fs::path& out_path, const fs::path& meta_path,
               int jobs) {
  const RunConfig cfg = load_config_with_env(config_path);

  // refuse configs that disagree with the trained repository
  const json repo_manifest = load_json(repo_dir / "repository.json");
  const int repo_ns = repo_manifest.at("n_states").get<int>();
  const int repo_nd = repo_manifest.at("n_levels").get<int>();
  if (repo_ns != cfg.n_states || repo_nd != cfg.n_levels) {
    throw ConfigError("enrich: config (n_states=" + std::to_string(cfg.n_states) +
                      ", n_levels=" + std::to_string(cfg.n_levels) + ") does not match repository (n_states=" +
                      std::to_string(repo_ns) + ", n_levels=" + std::to_string(repo_nd) + ")");
  }
  const teachers::TeacherRepository repo = load_repository(repo_dir);

  auto enrich_one = [&](const fs::path& customers_path, const fs::path& out_csv,
                        const fs::path& out_meta) {
    const auto customers = load_customer_csv(customers_path);
    const LowResSeries low = aggregate_customers(customers, cfg.loss_fraction);
    const auto patterns = teachers::extract_patterns(customers);
    const enrich::EnrichedSeries enriched =
        enrich::enrich_series(low, patterns, repo, cfg.enrichment_config());
    write_high_res_csv(out_csv, enriched.series);
    if (!out_meta.empty()) save_json(out_meta, enrichment_meta_to_json(enriched, low.dt));
    return enriched.series.transformer_id;
  };

  const json cfg_json = run_config_to_json(cfg);
  json manifest = manifest_base("enrich", cfg_json, cfg.seed);

  if (fs::is_directory(student_path)) {
    // batch mode: every *_customers.csv becomes <id>_enriched.csv under out
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(student_path)) {
      if (entry.is_regular_file() && entry.path().filename().string().ends_with("_customers.csv")) {
        inputs.push_back(entry.path());
      }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
      throw InputError("enrich: no *_customers.csv files in '" + student_path.string() + "'");
    }
    fs::create_directories(out_path);
    std::vector<std::string> ids(inputs.size());
    parallel_for(inputs.size(), jobs, [&](std::size_t i) {
      std::string stem = inputs[i].stem().string();
      stem.resize(stem.size() - std::string("_customers").size());
      ids[i] = enrich_one(inputs[i], out_path / (stem + "_enriched.csv"),
                          meta_path.empty() ? fs::path{} : out_path / (stem + "_meta.json"));
    });
    manifest["students"] = ids;
    save_json(out_path / "manifest.json", manifest);
  } else {
    manifest["student"] = enrich_one(student_path, out_path, meta_path);
    manifest["outputs"] = json::array({out_path.filename().string()});
    save_json(out_path.string() + ".manifest.json", manifest);
  }
  return 0;
}

int run_validate(const fs::path& actual_path, const fs::path& enriched_path,
                 const fs::path& report_path, const fs::path& hist_path,
                 const fs::path& config_path) {
  const RunConfig cfg = load_config_with_env(config_path);
  const HighResSeries actual = load_high_res_csv(actual_path);
  const HighResSeries enriched = load_high_res_csv(enriched_path);
  const auto report = validate::build_report(actual, enriched, cfg.low_dt);
  save_json(report_path, validation_report_to_json(report));

  if (!hist_path.empty()) {
    std::ofstream out(hist_path);
    if (!out) throw InputError("cannot write '" + hist_path.string() + "'");
    out << "bin_lo,bin_hi,count_actual,count_enriched\n";
    for (const auto& bin : report.histogram) {
      out << format_double(bin.lo) << ',' << format_double(bin.hi) << ',' << bin.count_actual
          << ',' << bin.count_enriched << '\n';
    }
  }

  const json cfg_json = run_config_to_json(cfg);
  json manifest = manifest_base("validate", cfg_json, cfg.seed);
  manifest["actual"] = actual_path.string();
  manifest["enriched"] = enriched_path.string();
  save_json(report_path.string() + ".manifest.json", manifest);
  return 0;
}

int run_powerflow(const fs::path& feeder_path, const fs::path& loads_dir,
                  const fs::path& out_path, const fs::path& summary_path,
                  const fs::path& config_path, int jobs) {
  const RunConfig cfg = load_config_with_env(config_path);
  const pf::FeederModel feeder = load_feeder(feeder_path);

  std::map<std::string, HighResSeries> series;
  for (const auto& bus : feeder.buses) {
    if (bus.transformer_id.empty() || series.contains(bus.transformer_id)) continue;
    const fs::path path = loads_dir / (bus.transformer_id + ".csv");
    if (!fs::exists(path)) {
      throw InputError("powerflow: no load series '" + path.string() + "' for bus '" + bus.id +
                       "'");
    }
    series[bus.transformer_id] = load_high_res_csv(path);
  }
  const auto vts = pf::run_timeseries(feeder, series, cfg.stride, 1e-6, 50, jobs);

  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write '" + out_path.string() + "'");
  out << "timestamp_s";
  for (const auto& id : vts.bus_ids) out << ',' << id;
  out << '\n';
  for (std::size_t t = 0; t < vts.timestamps.size(); ++t) {
    out << vts.timestamps[t];
    for (std::size_t b = 0; b < vts.bus_ids.size(); ++b) out << ',' << format_double(vts.v[b][t]);
    out << '\n';
  }
  if (!summary_path.empty()) save_json(summary_path, voltage_summary_to_json(vts));

  const json cfg_json = run_config_to_json(cfg);
  json manifest = manifest_base("powerflow", cfg_json, cfg.seed);
  manifest["feeder"] = feeder_path.string();
  manifest["steps"] = vts.timestamps.size();
  save_json(out_path.string() + ".manifest.json", manifest);
  return 0;
}

int run_report(const fs::path& validation_path, const fs::path& powerflow_path,
               const fs::path& out_path) {
  json merged{{"version", kVersion}};
  if (!validation_path.empty()) merged["validation"] = load_json(validation_path);
  if (!powerflow_path.empty()) merged["powerflow"] = load_json(powerflow_path);
  save_json(out_path, merged);
  return 0;
}

int error_exit_code(const char* type) {
  return std::string(type) == "input" ? 1 : std::string(type) == "config" ? 2 : 3;
}

int report_error(const char* type, const std::string& message) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << '\n';
  return error_exit_code(type);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistical load data enrichment for service transformers"};
  app.require_subcommand(1);
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  app.add_option("--jobs", jobs, "parallel worker count")->capture_default_str();

  std::string scenario, out_dir, data_dir, config, repo, student, out, meta;
  std::string actual, enriched, report_path, hist, feeder, loads, summary, validation, powerflow;

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic scenario dataset");
  synth_cmd->add_option("--scenario", scenario, "scenario JSON")->required();
  synth_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train teacher models from micro-PMU data");
  train_cmd->add_option("--data", data_dir, "dataset directory (synth layout)")->required();
  train_cmd->add_option("--config", config, "run config JSON");
  train_cmd->add_option("--repo", repo, "output repository directory")->required();

  auto* enrich_cmd = app.add_subcommand("enrich", "enrich a smart-meter-only transformer");
  enrich_cmd->add_option("--repo", repo, "teacher repository directory")->required();
  enrich_cmd->add_option("--student", student,
                         "student customer CSV, or a directory of *_customers.csv")
      ->required();
  enrich_cmd->add_option("--config", config, "run config JSON");
  enrich_cmd->add_option("--out", out, "enriched CSV (or output directory in batch mode)")
      ->required();
  enrich_cmd->add_option("--meta", meta, "per-interval metadata JSON (any value enables it in batch mode)");

  auto* validate_cmd = app.add_subcommand("validate", "compare enriched against actual");
  validate_cmd->add_option("--actual", actual, "ground-truth high-res CSV")->required();
  validate_cmd->add_option("--enriched", enriched, "enriched high-res CSV")->required();
  validate_cmd->add_option("--report", report_path, "output report JSON")->required();
  validate_cmd->add_option("--hist", hist, "histogram CSV export");
  validate_cmd->add_option("--config", config, "run config JSON");

  auto* pf_cmd = app.add_subcommand("powerflow", "time-series radial power flow");
  pf_cmd->add_option("--feeder", feeder, "feeder JSON")->required();
  pf_cmd->add_option("--loads", loads, "directory with <transformer>.csv series")->required();
  pf_cmd->add_option("--out", out, "voltages CSV")->required();
  pf_cmd->add_option("--summary", summary, "per-bus summary JSON");
  pf_cmd->add_option("--config", config, "run config JSON");

  auto* report_cmd = app.add_subcommand("report", "merge validation and powerflow outputs");
  report_cmd->add_option("--validation", validation, "validation report JSON");
  report_cmd->add_option("--powerflow", powerflow, "powerflow summary JSON");
  report_cmd->add_option("--out", out, "combined JSON")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return run_synth(scenario, out_dir, jobs);
    if (train_cmd->parsed()) return run_train(data_dir, config, repo, jobs);
    if (enrich_cmd->parsed()) return run_enrich(repo, student, config, out, meta, jobs);
    if (validate_cmd->parsed()) return run_validate(actual, enriched, report_path, hist, config);
    if (pf_cmd->parsed()) return run_powerflow(feeder, loads, out, summary, config, jobs);
    if (report_cmd->parsed()) return run_report(validation, powerflow, out);
  } catch (const InputError& e) {
    return report_error("input", e.what());
  } catch (const ConfigError& e) {
    return report_error("config", e.what());
  } catch (const NumericalError& e) {
    return report_error("numerical", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
