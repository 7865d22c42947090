#include "gridfill/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "gridfill/errors.hpp"
#include "gridfill/quantile.hpp"
#include "gridfill/rng.hpp"

namespace gridfill {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) {
      throw ConfigError(what + ": unknown key '" + key + "'");
    }
  }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

teachers::TrainConfig RunConfig::train_config() const {
  teachers::TrainConfig c;
  c.low_dt = low_dt;
  c.n_states = n_states;
  c.n_levels = n_levels;
  c.min_hours = min_hours;
  c.k_folds = k_folds;
  return c;
}

enrich::EnrichmentConfig RunConfig::enrichment_config() const {
  enrich::EnrichmentConfig c;
  c.n_states = n_states;
  c.n_levels = n_levels;
  c.seed = seed;
  c.out_dt = out_dt;
  c.mean_preserve = mean_preserve;
  c.allow_negative_load = allow_negative_load;
  c.bin_mode = bin_mode;
  c.weight_mode = weight_mode;
  return c;
}

namespace {

std::string weight_mode_name(teachers::WeightMode m) {
  return m == teachers::WeightMode::paper ? "paper" : "inverse";
}

teachers::WeightMode weight_mode_from(const std::string& s) {
  if (s == "paper") return teachers::WeightMode::paper;
  if (s == "inverse") return teachers::WeightMode::inverse;
  throw ConfigError("unknown weight_mode '" + s + "' (expected paper|inverse)");
}

std::string bin_mode_name(markov::BinMode m) {
  return m == markov::BinMode::midpoint ? "midpoint" : "upper_edge";
}

markov::BinMode bin_mode_from(const std::string& s) {
  if (s == "midpoint") return markov::BinMode::midpoint;
  if (s == "upper_edge") return markov::BinMode::upper_edge;
  throw ConfigError("unknown bin_mode '" + s + "' (expected upper_edge|midpoint)");
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"seed", "n_states", "n_levels", "low_dt_s", "out_dt_s", "min_hours",
                       "k_folds", "loss_fraction", "stride", "mean_preserve",
                       "allow_negative_load", "bin_mode", "weight_mode"},
                      "run config");
  RunConfig c;
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.n_states = get_or<int>(j, "n_states", c.n_states);
  c.n_levels = get_or<int>(j, "n_levels", c.n_levels);
  c.low_dt = get_or<std::int64_t>(j, "low_dt_s", c.low_dt);
  c.out_dt = get_or<std::int64_t>(j, "out_dt_s", c.out_dt);
  c.min_hours = get_or<std::size_t>(j, "min_hours", c.min_hours);
  c.k_folds = get_or<int>(j, "k_folds", c.k_folds);
  c.loss_fraction = get_or<double>(j, "loss_fraction", c.loss_fraction);
  c.stride = get_or<std::size_t>(j, "stride", c.stride);
  c.mean_preserve = get_or<bool>(j, "mean_preserve", c.mean_preserve);
  c.allow_negative_load = get_or<bool>(j, "allow_negative_load", c.allow_negative_load);
  c.bin_mode = bin_mode_from(get_or<std::string>(j, "bin_mode", bin_mode_name(c.bin_mode)));
  c.weight_mode =
      weight_mode_from(get_or<std::string>(j, "weight_mode", weight_mode_name(c.weight_mode)));
  if (c.n_states < 2) throw ConfigError("run config: n_states must be >= 2");
  if (c.n_levels < 1) throw ConfigError("run config: n_levels must be >= 1");
  return c;
}

json run_config_to_json(const RunConfig& c) {
  return json{{"seed", c.seed},
              {"n_states", c.n_states},
              {"n_levels", c.n_levels},
              {"low_dt_s", c.low_dt},
              {"out_dt_s", c.out_dt},
              {"min_hours", c.min_hours},
              {"k_folds", c.k_folds},
              {"loss_fraction", c.loss_fraction},
              {"stride", c.stride},
              {"mean_preserve", c.mean_preserve},
              {"allow_negative_load", c.allow_negative_load},
              {"bin_mode", bin_mode_name(c.bin_mode)},
              {"weight_mode", weight_mode_name(c.weight_mode)}};
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(load_json(path));
}

std::string config_hash(const json& j) {
  const std::uint64_t h = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// --- synthgen ---------------------------------------------------------------

namespace {

std::string pv_mode_name(synth::PvMode m) {
  switch (m) {
    case synth::PvMode::teachers_only: return "teachers_only";
    case synth::PvMode::students_only: return "students_only";
    case synth::PvMode::both: return "both";
    default: return "none";
  }
}

synth::PvMode pv_mode_from(const std::string& s) {
  if (s == "none") return synth::PvMode::none;
  if (s == "teachers_only") return synth::PvMode::teachers_only;
  if (s == "students_only") return synth::PvMode::students_only;
  if (s == "both") return synth::PvMode::both;
  throw ConfigError("unknown pv mode '" + s + "'");
}

}  // namespace

synth::ScenarioSpec scenario_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"n_teachers", "n_students", "customers_per_transformer", "days", "pv",
                       "seed", "dt_s", "loss_fraction"},
                      "scenario");
  synth::ScenarioSpec s;
  s.n_teachers = get_or<int>(j, "n_teachers", s.n_teachers);
  s.n_students = get_or<int>(j, "n_students", s.n_students);
  s.customers_per_transformer =
      get_or<int>(j, "customers_per_transformer", s.customers_per_transformer);
  s.days = get_or<int>(j, "days", s.days);
  s.pv = pv_mode_from(get_or<std::string>(j, "pv", "none"));
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed);
  s.dt = get_or<std::int64_t>(j, "dt_s", s.dt);
  s.loss_fraction = get_or<double>(j, "loss_fraction", s.loss_fraction);
  return s;
}

json scenario_to_json(const synth::ScenarioSpec& s) {
  return json{{"n_teachers", s.n_teachers},
              {"n_students", s.n_students},
              {"customers_per_transformer", s.customers_per_transformer},
              {"days", s.days},
              {"pv", pv_mode_name(s.pv)},
              {"seed", s.seed},
              {"dt_s", s.dt},
              {"loss_fraction", s.loss_fraction}};
}

synth::ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(load_json(path));
}

// --- model serialization ------------------------------------------------------

json gpr_to_json(const gpr::GprModel& m) {
  return json{{"x_train", m.x_train},
              {"y_train", m.y_train},
              {"params",
               {{"sigma_f", m.params.sigma_f},
                {"lambda", m.params.lambda},
                {"sigma_n", m.params.sigma_n}}},
              {"target_kind", m.target_kind == gpr::TargetKind::max ? "max" : "min"}};
}

gpr::GprModel gpr_from_json(const json& j) {
  const auto x = j.at("x_train").get<std::vector<double>>();
  const auto y = j.at("y_train").get<std::vector<double>>();
  if (x.size() != y.size()) throw InputError("gpr model: x_train/y_train length mismatch");
  std::vector<gpr::TrainingPair> pairs;
  pairs.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) pairs.emplace_back(x[i], y[i]);
  gpr::KernelParams params;
  params.sigma_f = j.at("params").at("sigma_f").get<double>();
  params.lambda = j.at("params").at("lambda").get<double>();
  params.sigma_n = j.at("params").at("sigma_n").get<double>();
  const std::string kind = j.at("target_kind").get<std::string>();
  if (kind != "max" && kind != "min") throw InputError("gpr model: bad target_kind '" + kind + "'");
  // refitting rebuilds the factorization deterministically from the arrays
  return gpr::fit(pairs, params, kind == "max" ? gpr::TargetKind::max : gpr::TargetKind::min);
}

json tensor_to_json(const markov::TransitionTensor& t) {
  // counts are the source of truth; probs and the defined mask are derived
  return json{{"n_states", t.n_states}, {"level", t.level}, {"counts", t.counts}};
}

markov::TransitionTensor tensor_from_json(const json& j) {
  markov::TransitionTensor t;
  t.n_states = j.at("n_states").get<int>();
  t.level = j.at("level").get<int>();
  t.counts = j.at("counts").get<std::vector<double>>();
  if (t.n_states < 2) throw InputError("tensor: n_states must be >= 2");
  const auto expected =
      static_cast<std::size_t>(t.n_states) * t.n_states * t.n_states;
  if (t.counts.size() != expected) {
    throw InputError("tensor: counts length " + std::to_string(t.counts.size()) +
                     " does not match n_states^3 = " + std::to_string(expected));
  }
  markov::normalize_from_counts(t);
  return t;
}

namespace {

json partition_to_json(const markov::LevelPartition& p) {
  return json{{"n_levels", p.n_levels}, {"edges", p.edges}, {"degenerate", p.degenerate}};
}

markov::LevelPartition partition_from_json(const json& j) {
  markov::LevelPartition p;
  p.n_levels = j.at("n_levels").get<int>();
  p.edges = j.at("edges").get<std::vector<double>>();
  p.degenerate = get_or<bool>(j, "degenerate", false);
  if (p.edges.size() != static_cast<std::size_t>(p.n_levels) + 1) {
    throw InputError("partition: expected " + std::to_string(p.n_levels + 1) + " edges, got " +
                     std::to_string(p.edges.size()));
  }
  return p;
}

}  // namespace

json teacher_to_json(const teachers::TeacherModel& m) {
  json tensors = json::array();
  for (const auto& t : m.tensors) tensors.push_back(tensor_to_json(t));
  json patterns = json::array();
  for (const auto& p : m.patterns) {
    patterns.push_back(json{{"customer_id", p.customer_id},
                            {"values", std::vector<double>(p.values.begin(), p.values.end())}});
  }
  return json{{"transformer_id", m.transformer_id},
              {"gpr_max", gpr_to_json(m.gpr_max)},
              {"gpr_min", gpr_to_json(m.gpr_min)},
              {"partition", partition_to_json(m.partition)},
              {"tensors", tensors},
              {"pooled_tensor", tensor_to_json(m.pooled_tensor)},
              {"patterns", patterns}};
}

teachers::TeacherModel teacher_from_json(const json& j) {
  teachers::TeacherModel m;
  m.transformer_id = j.at("transformer_id").get<std::string>();
  m.gpr_max = gpr_from_json(j.at("gpr_max"));
  m.gpr_min = gpr_from_json(j.at("gpr_min"));
  m.partition = partition_from_json(j.at("partition"));
  for (const auto& t : j.at("tensors")) m.tensors.push_back(tensor_from_json(t));
  m.pooled_tensor = tensor_from_json(j.at("pooled_tensor"));
  for (const auto& p : j.at("patterns")) {
    teachers::DailyLoadPattern pat;
    pat.customer_id = p.at("customer_id").get<std::string>();
    const auto vals = p.at("values").get<std::vector<double>>();
    if (vals.size() != 24) throw InputError("pattern: expected 24 values");
    std::copy(vals.begin(), vals.end(), pat.values.begin());
    m.patterns.push_back(std::move(pat));
  }
  return m;
}

void save_repository(const std::filesystem::path& dir, const teachers::TeacherRepository& repo,
                     const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  json ids = json::array();
  for (const auto& t : repo.teachers) {
    ids.push_back(t.transformer_id);
    save_json(dir / (t.transformer_id + ".json"), teacher_to_json(t));
  }
  save_json(dir / "repository.json", json{{"version", "0.1.0"},
                                          {"n_states", repo.n_states},
                                          {"n_levels", repo.n_levels},
                                          {"config_hash", config_hash},
                                          {"teachers", ids}});
}

teachers::TeacherRepository load_repository(const std::filesystem::path& dir) {
  const json manifest = load_json(dir / "repository.json");
  teachers::TeacherRepository repo;
  repo.n_states = manifest.at("n_states").get<int>();
  repo.n_levels = manifest.at("n_levels").get<int>();
  for (const auto& id : manifest.at("teachers")) {
    const auto path = dir / (id.get<std::string>() + ".json");
    teachers::TeacherModel m = teacher_from_json(load_json(path));
    if (m.transformer_id != id.get<std::string>()) {
      throw InputError("repository: '" + path.string() + "' holds model for '" +
                       m.transformer_id + "'");
    }
    if (m.pooled_tensor.n_states != repo.n_states ||
        static_cast<int>(m.tensors.size()) != repo.n_levels) {
      throw ConfigError("repository: teacher '" + m.transformer_id +
                        "' disagrees with manifest n_states/n_levels");
    }
    repo.teachers.push_back(std::move(m));
  }
  if (repo.teachers.empty()) throw ConfigError("repository: no teachers listed");
  return repo;
}

// --- powerflow ----------------------------------------------------------------

pf::FeederModel feeder_from_json(const json& j) {
  reject_unknown_keys(
      j, {"buses", "lines", "slack", "v_slack", "s_base_kva", "v_base_kv"}, "feeder");
  pf::FeederModel f;
  f.slack_id = j.at("slack").get<std::string>();
  f.v_slack = get_or<double>(j, "v_slack", f.v_slack);
  f.s_base_kva = get_or<double>(j, "s_base_kva", f.s_base_kva);
  f.v_base_kv = get_or<double>(j, "v_base_kv", f.v_base_kv);
  for (const auto& b : j.at("buses")) {
    pf::Bus bus;
    bus.id = b.at("id").get<std::string>();
    bus.transformer_id = get_or<std::string>(b, "transformer", "");
    f.buses.push_back(std::move(bus));
  }
  for (const auto& l : j.at("lines")) {
    pf::Line line;
    line.from = l.at("from").get<std::string>();
    line.to = l.at("to").get<std::string>();
    line.r = l.at("r").get<double>();
    line.x = l.at("x").get<double>();
    f.lines.push_back(std::move(line));
  }
  return f;
}

json feeder_to_json(const pf::FeederModel& f) {
  json buses = json::array();
  for (const auto& b : f.buses) {
    json jb{{"id", b.id}};
    if (!b.transformer_id.empty()) jb["transformer"] = b.transformer_id;
    buses.push_back(std::move(jb));
  }
  json lines = json::array();
  for (const auto& l : f.lines) {
    lines.push_back(json{{"from", l.from}, {"to", l.to}, {"r", l.r}, {"x", l.x}});
  }
  return json{{"buses", buses},       {"lines", lines},
              {"slack", f.slack_id},  {"v_slack", f.v_slack},
              {"s_base_kva", f.s_base_kva}, {"v_base_kv", f.v_base_kv}};
}

pf::FeederModel load_feeder(const std::filesystem::path& path) {
  return feeder_from_json(load_json(path));
}

json voltage_summary_to_json(const pf::VoltageTimeSeries& vts) {
  json buses = json::array();
  for (std::size_t b = 0; b < vts.bus_ids.size(); ++b) {
    std::vector<double> v = vts.v[b];
    std::sort(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ramp_mean_abs = 0.0, ramp_max_abs = 0.0;
    for (double r : vts.ramps[b]) {
      ramp_mean_abs += std::abs(r);
      ramp_max_abs = std::max(ramp_max_abs, std::abs(r));
    }
    if (!vts.ramps[b].empty()) ramp_mean_abs /= static_cast<double>(vts.ramps[b].size());
    buses.push_back(json{{"bus", vts.bus_ids[b]},
                         {"v_mean", mean},
                         {"v_min", v.front()},
                         {"v_max", v.back()},
                         {"v_p25", quantile_sorted(v, 25.0)},
                         {"v_p75", quantile_sorted(v, 75.0)},
                         {"ramp_mean_abs", ramp_mean_abs},
                         {"ramp_max_abs", ramp_max_abs}});
  }
  return json{{"steps", vts.timestamps.size()}, {"buses", buses}};
}

// --- reports --------------------------------------------------------------------

json validation_report_to_json(const validate::ValidationReport& r) {
  json percentiles = json::array();
  for (const auto& row : r.percentile_table) {
    percentiles.push_back(json{{"percentile", row.percentile},
                               {"actual", row.actual},
                               {"enriched", row.enriched},
                               {"abs_diff", row.abs_diff}});
  }
  json hist = json::array();
  for (const auto& bin : r.histogram) {
    hist.push_back(json{{"lo", bin.lo},
                        {"hi", bin.hi},
                        {"actual", bin.count_actual},
                        {"enriched", bin.count_enriched}});
  }
  json j{{"r2_max", r.r2_max ? json(*r.r2_max) : json(nullptr)},
         {"r2_min", r.r2_min ? json(*r.r2_min) : json(nullptr)},
         {"percentiles", percentiles},
         {"wasserstein_per_hour", r.wasserstein_per_hour},
         {"histogram", hist}};
  if (!r.r2_note.empty()) j["r2_note"] = r.r2_note;
  return j;
}

json enrichment_meta_to_json(const enrich::EnrichedSeries& e, std::int64_t low_dt) {
  json intervals = json::array();
  for (std::size_t t = 0; t < e.intervals.size(); ++t) {
    intervals.push_back(json{{"t", t + 1},
                             {"p_max_star", e.intervals[t].p_max_star},
                             {"p_min_star", e.intervals[t].p_min_star},
                             {"level", e.intervals[t].level}});
  }
  return json{{"transformer_id", e.series.transformer_id},
              {"low_dt_s", low_dt},
              {"out_dt_s", e.series.dt},
              {"weights", e.weights.weights},
              {"intervals", intervals}};
}

// --- files -----------------------------------------------------------------------

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

}  // namespace gridfill
