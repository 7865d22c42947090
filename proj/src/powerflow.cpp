#include "gridfill/powerflow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridfill/errors.hpp"
#include "gridfill/parallel.hpp"

namespace gridfill::pf {

double default_q_kvar(double p_kw) {
  static const double kTanPhi = std::tan(std::acos(0.95));
  return p_kw * kTanPhi;
}

namespace {

// Validated tree form of a feeder: bus order is BFS from the slack, so a
// forward pass is a simple scan and a backward pass the reverse scan.
struct Tree {
  std::vector<std::size_t> bfs;             // bus indices, bfs[0] = slack
  std::vector<std::size_t> parent;          // by bus index
  std::vector<std::complex<double>> z_up;   // impedance of the line to the parent
  std::map<std::string, std::size_t> index; // bus id -> index
};

Tree build_tree(const FeederModel& feeder) {
  Tree tree;
  if (feeder.buses.empty()) throw InputError("powerflow: feeder has no buses");
  for (std::size_t i = 0; i < feeder.buses.size(); ++i) {
    if (!tree.index.emplace(feeder.buses[i].id, i).second) {
      throw InputError("powerflow: duplicate bus id '" + feeder.buses[i].id + "'");
    }
  }
  auto slack_it = tree.index.find(feeder.slack_id);
  if (slack_it == tree.index.end()) {
    throw InputError("powerflow: slack bus '" + feeder.slack_id + "' not in bus list");
  }
  if (feeder.lines.size() + 1 != feeder.buses.size()) {
    throw InputError("powerflow: " + std::to_string(feeder.lines.size()) + " lines cannot form a tree over " +
                     std::to_string(feeder.buses.size()) + " buses");
  }

  std::vector<std::vector<std::pair<std::size_t, std::complex<double>>>> adj(feeder.buses.size());
  for (const Line& line : feeder.lines) {
    auto a = tree.index.find(line.from);
    auto b = tree.index.find(line.to);
    if (a == tree.index.end() || b == tree.index.end()) {
      throw InputError("powerflow: line references unknown bus '" +
                       (a == tree.index.end() ? line.from : line.to) + "'");
    }
    if (line.r < 0.0 || line.x < 0.0) {
      throw InputError("powerflow: negative impedance on line " + line.from + "-" + line.to);
    }
    const std::complex<double> z(line.r, line.x);
    adj[a->second].emplace_back(b->second, z);
    adj[b->second].emplace_back(a->second, z);
  }

  const std::size_t n = feeder.buses.size();
  tree.parent.assign(n, n);
  tree.z_up.assign(n, {0.0, 0.0});
  std::vector<char> seen(n, 0);
  tree.bfs.push_back(slack_it->second);
  seen[slack_it->second] = 1;
  for (std::size_t head = 0; head < tree.bfs.size(); ++head) {
    const std::size_t u = tree.bfs[head];
    for (const auto& [v, z] : adj[u]) {
      if (seen[v]) {
        if (v != tree.parent[u]) {
          throw InputError("powerflow: feeder contains a loop through bus '" +
                           feeder.buses[v].id + "'");
        }
        continue;
      }
      seen[v] = 1;
      tree.parent[v] = u;
      tree.z_up[v] = z;
      tree.bfs.push_back(v);
    }
  }
  if (tree.bfs.size() != n) {
    throw InputError("powerflow: feeder is not connected to the slack bus");
  }
  return tree;
}

SolveResult solve_on_tree(const FeederModel& feeder, const Tree& tree,
                          const std::map<std::string, LoadPoint>& loads, double tol,
                          int max_iter) {
  const std::size_t n = feeder.buses.size();

  // per-unit complex power demand by bus index
  std::vector<std::complex<double>> s(n, {0.0, 0.0});
  double p_load_pu = 0.0;
  for (const auto& [bus_id, load] : loads) {
    auto it = tree.index.find(bus_id);
    if (it == tree.index.end()) {
      throw InputError("powerflow: load given for unknown bus '" + bus_id + "'");
    }
    if (!std::isfinite(load.p_kw)) throw InputError("powerflow: non-finite load at '" + bus_id + "'");
    const double p = load.p_kw / feeder.s_base_kva;
    const double q = (load.q_kvar ? *load.q_kvar : default_q_kvar(load.p_kw)) / feeder.s_base_kva;
    s[it->second] += std::complex<double>(p, q);
    p_load_pu += p;
  }

  std::vector<std::complex<double>> v(n, {feeder.v_slack, 0.0});
  std::vector<std::complex<double>> i_acc(n);
  std::vector<double> trace;

  for (int iter = 1; iter <= max_iter; ++iter) {
    // backward: node injection currents, accumulated leaf -> root
    for (std::size_t k = 0; k < n; ++k) i_acc[k] = std::conj(s[k] / v[k]);
    for (std::size_t k = n; k-- > 1;) {
      const std::size_t u = tree.bfs[k];
      i_acc[tree.parent[u]] += i_acc[u];
    }
    // forward: voltage drops root -> leaves
    double max_dv = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const std::size_t u = tree.bfs[k];
      const std::complex<double> v_new = v[tree.parent[u]] - tree.z_up[u] * i_acc[u];
      max_dv = std::max(max_dv, std::abs(v_new - v[u]));
      v[u] = v_new;
    }
    trace.push_back(max_dv);
    if (max_dv < tol) {
      SolveResult result;
      result.iterations = iter;
      for (std::size_t k = 0; k < n; ++k) result.voltages[feeder.buses[k].id] = v[k];
      // line losses from the converged currents
      double loss = 0.0;
      for (std::size_t k = 1; k < n; ++k) {
        const std::size_t u = tree.bfs[k];
        loss += std::norm(i_acc[u]) * tree.z_up[u].real();
      }
      result.p_loss_pu = loss;
      result.p_load_pu = p_load_pu;
      result.p_slack_pu =
          (v[tree.bfs[0]] * std::conj(i_acc[tree.bfs[0]])).real();
      return result;
    }
  }
  std::ostringstream msg;
  msg << "powerflow: no convergence after " << max_iter << " iterations (max |dV| per iteration:";
  for (double d : trace) msg << ' ' << d;
  msg << ')';
  throw NumericalError(msg.str());
}

}  // namespace

SolveResult solve_snapshot(const FeederModel& feeder, const std::map<std::string, LoadPoint>& loads,
                           double tol, int max_iter) {
  const Tree tree = build_tree(feeder);
  return solve_on_tree(feeder, tree, loads, tol, max_iter);
}

SolveResult snapshot_from_average(const FeederModel& feeder,
                                  const std::map<std::string, LoadPoint>& hourly_loads,
                                  double tol, int max_iter) {
  return solve_snapshot(feeder, hourly_loads, tol, max_iter);
}

VoltageTimeSeries run_timeseries(const FeederModel& feeder,
                                 const std::map<std::string, HighResSeries>& series,
                                 std::size_t stride, double tol, int max_iter, int jobs) {
  if (stride < 1) throw ConfigError("run_timeseries: stride must be >= 1");
  if (series.empty()) throw InputError("run_timeseries: no load series given");

  const Tree tree = build_tree(feeder);

  const HighResSeries& ref = series.begin()->second;
  for (const auto& [tid, s] : series) {
    if (s.t0 != ref.t0 || s.dt != ref.dt || s.values.size() != ref.values.size()) {
      throw InputError("run_timeseries: series '" + tid + "' not aligned with '" +
                       ref.transformer_id + "'");
    }
  }
  // every load bus needs a series
  std::vector<std::pair<std::size_t, const HighResSeries*>> load_buses;
  for (std::size_t i = 0; i < feeder.buses.size(); ++i) {
    const std::string& tid = feeder.buses[i].transformer_id;
    if (tid.empty()) continue;
    auto it = series.find(tid);
    if (it == series.end()) {
      throw InputError("run_timeseries: no series for transformer '" + tid + "' at bus '" +
                       feeder.buses[i].id + "'");
    }
    load_buses.emplace_back(i, &it->second);
  }

  const std::size_t n_steps = ref.values.size() / stride;
  if (n_steps == 0) throw InputError("run_timeseries: stride longer than the series");

  VoltageTimeSeries out;
  for (const Bus& b : feeder.buses) out.bus_ids.push_back(b.id);
  out.timestamps.resize(n_steps);
  out.v.assign(feeder.buses.size(), std::vector<double>(n_steps, 0.0));

  parallel_for(n_steps, jobs, [&](std::size_t step) {
    const std::size_t idx = step * stride;
    const std::int64_t ts = ref.t0 + static_cast<std::int64_t>(idx) * ref.dt;
    std::map<std::string, LoadPoint> loads;
    for (const auto& [bus_idx, hr] : load_buses) {
      loads[feeder.buses[bus_idx].id] = LoadPoint{hr->values[idx], std::nullopt};
    }
    const SolveResult snap = with_error_context(
        "run_timeseries: t=" + std::to_string(ts),
        [&] { return solve_on_tree(feeder, tree, loads, tol, max_iter); });
    out.timestamps[step] = ts;
    for (std::size_t b = 0; b < feeder.buses.size(); ++b) {
      out.v[b][step] = std::abs(snap.voltages.at(feeder.buses[b].id));
    }
  });

  out.ramps.assign(feeder.buses.size(), {});
  for (std::size_t b = 0; b < feeder.buses.size(); ++b) {
    out.ramps[b].reserve(n_steps > 0 ? n_steps - 1 : 0);
    for (std::size_t t = 1; t < n_steps; ++t) {
      out.ramps[b].push_back(out.v[b][t] - out.v[b][t - 1]);
    }
  }
  return out;
}

}  // namespace gridfill::pf
