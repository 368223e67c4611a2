/*
Copyright 2026 The mpcsim Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <fstream>
#include <sstream>

#include "mpcsim/mpc_reduction.hpp"

namespace mpcsim {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + v + "'");
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("config key '" + key + "': bad number '" + v + "'");
  return x;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("config key '" + key + "': bad unsigned integer '" + v + "'");
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': out of range '" + v + "'");
  }
}

}  // namespace

PipelineConfig parse_pipeline_config(std::string_view text) {
  PipelineConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "kind") {
      cfg.kind = parse_kind(value);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, value);
      if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) throw std::invalid_argument("config key 'delta' must be in (0, 1]");
    } else if (key == "c_total") {
      cfg.c_total = parse_double(key, value);
      if (!(cfg.c_total > 0.0)) throw std::invalid_argument("config key 'c_total' must be positive");
    } else if (key == "c_pre") {
      cfg.c_pre = parse_double(key, value);
      if (cfg.c_pre < 0.0) throw std::invalid_argument("config key 'c_pre' must be >= 0");
    } else if (key == "exponent") {
      cfg.exponent = Rational::parse(value);
    } else if (key == "d_floor") {
      cfg.d_floor = static_cast<std::uint32_t>(parse_uint(key, value));
      if (cfg.d_floor < 1) throw std::invalid_argument("config key 'd_floor' must be >= 1");
    } else if (key == "target_delta") {
      cfg.target_delta = parse_uint(key, value);
      if (cfg.target_delta < 1) throw std::invalid_argument("config key 'target_delta' must be >= 1");
    } else if (key == "seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "adaptive") {
      cfg.adaptive = parse_bool(key, value);
    } else if (key == "repetitions") {
      const auto slash = value.find('/');
      if (slash == std::string::npos) throw std::invalid_argument("config key 'repetitions': expected first/later");
      RepetitionCounts r;
      r.first = static_cast<std::uint32_t>(parse_uint(key, trim(std::string_view(value).substr(0, slash))));
      r.later = static_cast<std::uint32_t>(parse_uint(key, trim(std::string_view(value).substr(slash + 1))));
      if (r.first == 0 || r.later == 0) throw std::invalid_argument("config key 'repetitions' must be positive");
      cfg.repetitions = r;
    } else if (key == "parallel") {
      cfg.parallel = parse_bool(key, value);
    } else if (key == "trace_dir") {
      cfg.trace_dir = std::filesystem::path(value);
    } else if (key == "trace_name") {
      cfg.trace_name = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_pipeline_config(buf.str());
}

std::string pipeline_config_to_string(const PipelineConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "kind = " << kind_name(cfg.kind) << "\n";
  out << "delta = " << cfg.delta << "\n";
  out << "c_total = " << cfg.c_total << "\n";
  out << "c_pre = " << cfg.c_pre << "\n";
  out << "exponent = " << cfg.exponent.str() << "\n";
  out << "d_floor = " << cfg.d_floor << "\n";
  out << "target_delta = " << cfg.target_delta << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "adaptive = " << (cfg.adaptive ? "true" : "false") << "\n";
  if (cfg.repetitions) out << "repetitions = " << cfg.repetitions->first << "/" << cfg.repetitions->later << "\n";
  out << "parallel = " << (cfg.parallel ? "true" : "false") << "\n";
  if (cfg.trace_dir) out << "trace_dir = " << cfg.trace_dir->string() << "\n";
  out << "trace_name = " << cfg.trace_name << "\n";
  return out.str();
}

DegreeReduceOptions centralized_options(const PipelineConfig& cfg) {
  DegreeReduceOptions opts;
  opts.kind = cfg.kind;
  opts.target_delta = cfg.target_delta;
  opts.exponent = cfg.exponent;
  opts.d_floor = cfg.d_floor;
  opts.seed = cfg.seed;
  return opts;
}

MpcPipelineResult mpc_pipeline(const Graph& g, const PipelineConfig& cfg) {
  ClusterConfig cc = ClusterConfig::for_graph(g, cfg.delta, cfg.c_total);
  cc.parallel = cfg.parallel;
  cc.trace_dir = cfg.trace_dir;
  cc.trace_name = cfg.trace_name;
  Cluster cluster(g, cc, cfg.seed);
  const DegreeReduceOptions opts = centralized_options(cfg);
  const NodeId n = g.num_nodes();

  MpcPipelineResult result;
  result.solution.kind = cfg.kind;
  GraphView view(g);

  auto max_degree = [&] {
    std::vector<Word> deg(n, 0);
    for (NodeId v = 0; v < n; ++v)
      if (view.alive(v)) deg[v] = view.degree(v);
    return static_cast<std::size_t>(cluster.all_reduce_max(deg, "max-degree"));
  };

  std::size_t delta = max_degree();
  for (std::uint64_t phase = 0;; ++phase) {
    if (delta <= cfg.target_delta) break;
    MpcPhaseMetrics pm;
    pm.delta = delta;
    pm.d = phase_threshold(delta, opts);
    const ExponentiationSchedule schedule =
        compute_schedule(delta, cluster.capacity(), n, cfg.delta, cfg.c_pre, cfg.repetitions);
    pm.k = schedule.k;
    pm.fallback = schedule.fallback;

    std::optional<MpcPartition> part;
    try {
      part.emplace(mpc_h_partition(cluster, view, pm.d, schedule, PartitionOptions{cfg.c_pre, cfg.adaptive}));
    } catch (const PartitionStall&) {
      result.report.stop_reason = "partition-stall";
      break;
    }
    pm.layers = part->hp.ell;
    pm.chunks = part->chunks.size();
    pm.partition_phases = part->phases;
    pm.partition_rounds = part->rounds;
    pm.iterations = part->iterations;
    result.partition_rounds += part->rounds;

    MpcProposals props = mpc_mark_propose(cluster, view, part->hp, cfg.kind, cfg.seed, phase, opts.mis_probability);
    pm.propose_rounds = props.rounds;
    MpcSelection sel = mpc_select(cluster, view, *part, props);
    pm.select_rounds = sel.rounds;

    std::vector<std::uint8_t> gone(n, 0);
    for (NodeId v : sel.solution.removed) gone[v] = 1;
    cluster.execute_node_round(
        [&](NodeId v, Outbox& out) {
          if (!gone[v]) return;
          view.for_each_neighbor(v, [&](NodeId u) {
            if (!gone[u]) out.send(v, u, Word{1});
          });
        },
        "notify-removal");

    GraphView rest = view.without(sel.solution.removed);
    PhaseEntry entry = phase_statistics(view, part->hp, rest);
    result.solution.merge(sel.solution);
    view = std::move(rest);
    const std::size_t delta_after = max_degree();
    if (delta_after != entry.delta_after) throw InvariantError("aggregated degree disagrees with the remainder");
    result.report.phases.push_back(entry);
    result.phases.push_back(std::move(pm));
    if (delta_after >= delta) {
      result.report.stop_reason = "no-progress";
      break;
    }
    delta = delta_after;
  }

  const std::uint64_t before_finish = cluster.rounds();
  FinishResult fin = mpc_finish(cluster, view, cfg.kind, cfg.seed);
  result.finish_rounds = cluster.rounds() - before_finish;
  result.finish_iterations = fin.rounds;
  result.solution.merge(fin.solution);
  result.run = cluster.metrics();
  return result;
}

nlohmann::ordered_json to_json(const IterationStats& s) {
  nlohmann::ordered_json j;
  j["phase"] = s.phase;
  j["iteration"] = s.iteration;
  j["radius"] = s.radius;
  j["repetitions_run"] = s.repetitions_run;
  j["alive_before"] = s.alive_before;
  j["alive_after"] = s.alive_after;
  j["virtual_edges"] = s.virtual_edges;
  j["max_virtual_degree"] = s.max_virtual_degree;
  j["rounds"] = s.rounds;
  return j;
}

nlohmann::ordered_json metrics_to_json(const MpcPipelineResult& r) {
  nlohmann::ordered_json j;
  j["run"] = to_json(r.run);
  j["partition_rounds"] = r.partition_rounds;
  j["finish_rounds"] = r.finish_rounds;
  j["finish_iterations"] = r.finish_iterations;
  j["report"] = to_json(r.report);
  auto& phases = j["phases"] = nlohmann::ordered_json::array();
  for (const MpcPhaseMetrics& p : r.phases) {
    nlohmann::ordered_json pj;
    pj["delta"] = p.delta;
    pj["d"] = p.d;
    pj["k"] = p.k;
    pj["fallback"] = p.fallback;
    pj["layers"] = p.layers;
    pj["chunks"] = p.chunks;
    pj["partition_phases"] = p.partition_phases;
    pj["partition_rounds"] = p.partition_rounds;
    pj["propose_rounds"] = p.propose_rounds;
    pj["select_rounds"] = p.select_rounds;
    auto& its = pj["iterations"] = nlohmann::ordered_json::array();
    for (const IterationStats& s : p.iterations) its.push_back(to_json(s));
    phases.push_back(std::move(pj));
  }
  return j;
}

}  // namespace mpcsim
