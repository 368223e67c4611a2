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

#include "mpcsim/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mpcsim/graph_io.hpp"

namespace mpcsim {

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Centralized: return "centralized";
    case Mode::Mpc: return "mpc";
    case Mode::Both: return "both";
  }
  return "both";
}

Mode parse_mode(std::string_view name) {
  if (name == "centralized") return Mode::Centralized;
  if (name == "mpc") return Mode::Mpc;
  if (name == "both") return Mode::Both;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "' (expected centralized, mpc or both)");
}

namespace {

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw std::invalid_argument("pipeline values must be scalars, got " + v.dump());
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::string join(const std::vector<std::size_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::size_t> parse_list(const std::string& s) {
  std::vector<std::size_t> out;
  if (s.empty()) return out;
  for (const auto& part : split(s, ';')) out.push_back(std::stoull(part));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw HarnessError("cannot write " + path.string());
  out << text;
}

}  // namespace

ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
  ExperimentSpec spec;
  spec.name = get_or<std::string>(j, "name", spec.name);
  if (!j.contains("corpus") || !j.at("corpus").is_array() || j.at("corpus").empty())
    throw std::invalid_argument("experiment spec needs a nonempty 'corpus' array");
  for (const auto& item : j.at("corpus")) {
    InstanceSpec inst;
    if (item.contains("file")) {
      inst.file = std::filesystem::path(item.at("file").get<std::string>());
      inst.seeds = {0};
    } else {
      inst.family = parse_family(item.at("family").get<std::string>());
      inst.params.n = get_or<NodeId>(item, "n", 0);
      inst.params.rows = get_or<NodeId>(item, "rows", 0);
      inst.params.cols = get_or<NodeId>(item, "cols", 0);
      inst.params.attachment = get_or<std::uint32_t>(item, "attachment", inst.params.attachment);
      inst.params.max_degree = get_or<std::uint32_t>(item, "max_degree", inst.params.max_degree);
      inst.params.branching = get_or<std::uint32_t>(item, "branching", inst.params.branching);
      if (!item.contains("seeds") || item.at("seeds").empty())
        throw std::invalid_argument("corpus entry needs explicit 'seeds'");
      inst.seeds = item.at("seeds").get<std::vector<std::uint64_t>>();
    }
    spec.corpus.push_back(std::move(inst));
  }
  if (j.contains("pipeline")) {
    std::string text;
    for (const auto& [key, value] : j.at("pipeline").items()) text += key + " = " + scalar_text(value) + "\n";
    spec.pipeline = parse_pipeline_config(text);
  }
  if (j.contains("kinds")) {
    spec.kinds.clear();
    for (const auto& k : j.at("kinds")) spec.kinds.push_back(parse_kind(k.get<std::string>()));
    if (spec.kinds.empty()) throw std::invalid_argument("'kinds' must not be empty");
  } else {
    spec.kinds = {spec.pipeline.kind};
  }
  if (!j.contains("seeds") || j.at("seeds").empty()) throw std::invalid_argument("experiment spec needs explicit 'seeds'");
  spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  spec.mode = parse_mode(get_or<std::string>(j, "mode", "both"));
  spec.output = get_or<std::string>(j, "output", "out");
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("spec " + path.string() + ": " + e.what());
  }
  return parse_experiment_spec(j);
}

nlohmann::ordered_json to_json(const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["name"] = spec.name;
  auto& corpus = j["corpus"] = nlohmann::ordered_json::array();
  for (const auto& inst : spec.corpus) {
    nlohmann::ordered_json e;
    if (inst.file) {
      e["file"] = inst.file->string();
    } else {
      e["family"] = family_name(inst.family);
      if (inst.params.n) e["n"] = inst.params.n;
      if (inst.params.rows) e["rows"] = inst.params.rows;
      if (inst.params.cols) e["cols"] = inst.params.cols;
      e["attachment"] = inst.params.attachment;
      e["max_degree"] = inst.params.max_degree;
      e["branching"] = inst.params.branching;
      e["seeds"] = inst.seeds;
    }
    corpus.push_back(std::move(e));
  }
  nlohmann::ordered_json p;
  const PipelineConfig& c = spec.pipeline;
  p["delta"] = c.delta;
  p["c_total"] = c.c_total;
  p["c_pre"] = c.c_pre;
  p["exponent"] = c.exponent.str();
  p["d_floor"] = c.d_floor;
  p["target_delta"] = c.target_delta;
  p["adaptive"] = c.adaptive;
  if (c.repetitions) p["repetitions"] = std::to_string(c.repetitions->first) + "/" + std::to_string(c.repetitions->later);
  p["parallel"] = c.parallel;
  j["pipeline"] = p;
  auto& kinds = j["kinds"] = nlohmann::ordered_json::array();
  for (Kind k : spec.kinds) kinds.push_back(kind_name(k));
  j["seeds"] = spec.seeds;
  j["mode"] = mode_name(spec.mode);
  j["output"] = spec.output.string();
  return j;
}

std::vector<Instance> materialize(const ExperimentSpec& spec) {
  std::vector<Instance> out;
  for (const InstanceSpec& is : spec.corpus) {
    if (is.file) {
      Instance inst{is.file->stem().string(), load_graph(*is.file), {}};
      inst.meta.family = "file";
      inst.meta.degeneracy = degeneracy(inst.graph).degeneracy;
      out.push_back(std::move(inst));
      continue;
    }
    for (std::uint64_t seed : is.seeds) {
      GeneratedGraph gg = generate(is.family, is.params, seed);
      std::string id = std::string(family_name(is.family)) + "-n" + std::to_string(gg.graph.num_nodes()) + "-s" +
                       std::to_string(seed);
      out.push_back(Instance{std::move(id), std::move(gg.graph), std::move(gg.meta)});
    }
  }
  if (out.empty()) throw std::invalid_argument("corpus is empty");
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string solution_digest(const nlohmann::ordered_json& solution) { return fnv1a_hex(solution.dump()); }

TwoApprox derive_2approx(const Graph& g, const PartialSolution& sol) {
  if (sol.kind != Kind::Matching || !verify_maximal(g, sol))
    throw InvariantError("derive_2approx needs a maximal matching");
  TwoApprox out;
  out.matching_size = sol.edges.size();
  for (const Edge& e : sol.edges) {
    out.cover.push_back(e.u);
    out.cover.push_back(e.v);
  }
  std::sort(out.cover.begin(), out.cover.end());
  return out;
}

bool is_vertex_cover(const Graph& g, std::span<const NodeId> cover) {
  std::vector<std::uint8_t> in(g.num_nodes(), 0);
  for (NodeId v : cover) {
    if (v >= g.num_nodes()) return false;
    in[v] = 1;
  }
  return std::all_of(g.edges().begin(), g.edges().end(), [&](const Edge& e) { return in[e.u] || in[e.v]; });
}

bool RunRecord::passed() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& p) { return p.second; });
}

std::string RunRecord::label() const {
  return instance + ":" + std::string(kind_name(kind)) + ":" + std::to_string(seed);
}

nlohmann::ordered_json to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["instance"] = r.instance;
  j["family"] = r.family;
  j["n"] = r.n;
  j["m"] = r.m;
  j["max_degree"] = r.max_degree;
  j["degeneracy"] = r.degeneracy;
  j["kind"] = kind_name(r.kind);
  j["seed"] = r.seed;
  j["mode"] = mode_name(r.mode);
  j["digest_centralized"] = r.digest_centralized;
  j["digest_mpc"] = r.digest_mpc;
  j["solution_size"] = r.solution_size;
  j["delta_before"] = r.delta_before;
  j["delta_after"] = r.delta_after;
  j["stop_reason"] = r.stop_reason;
  j["rounds"] = r.rounds;
  j["partition_rounds"] = r.partition_rounds;
  j["peak_words"] = r.peak_words;
  j["matching_size"] = r.matching_size ? nlohmann::ordered_json(*r.matching_size) : nlohmann::ordered_json();
  j["cover_size"] = r.cover_size ? nlohmann::ordered_json(*r.cover_size) : nlohmann::ordered_json();
  nlohmann::ordered_json inv = nlohmann::ordered_json::object();
  for (const auto& [name, ok] : r.invariants) inv[name] = ok;
  j["invariants"] = inv;
  j["metrics"] = r.metrics;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.n = j.at("n").get<NodeId>();
  r.m = j.at("m").get<std::size_t>();
  r.max_degree = j.at("max_degree").get<std::size_t>();
  r.degeneracy = j.at("degeneracy").get<std::uint32_t>();
  r.kind = parse_kind(j.at("kind").get<std::string>());
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mode = parse_mode(j.at("mode").get<std::string>());
  r.digest_centralized = j.at("digest_centralized").get<std::string>();
  r.digest_mpc = j.at("digest_mpc").get<std::string>();
  r.solution_size = j.at("solution_size").get<std::size_t>();
  r.delta_before = j.at("delta_before").get<std::vector<std::size_t>>();
  r.delta_after = j.at("delta_after").get<std::vector<std::size_t>>();
  r.stop_reason = j.at("stop_reason").get<std::string>();
  r.rounds = j.at("rounds").get<std::uint64_t>();
  r.partition_rounds = j.at("partition_rounds").get<std::uint64_t>();
  r.peak_words = j.at("peak_words").get<Word>();
  if (!j.at("matching_size").is_null()) r.matching_size = j.at("matching_size").get<std::size_t>();
  if (!j.at("cover_size").is_null()) r.cover_size = j.at("cover_size").get<std::size_t>();
  // nlohmann::json objects iterate in key order; ordered output keeps insertion order
  for (const auto& [name, ok] : j.at("invariants").items()) r.invariants.emplace_back(name, ok.get<bool>());
  r.metrics = j.at("metrics");
  return r;
}

RunRecord run_instance(const Instance& inst, const PipelineConfig& pipeline, Kind kind, std::uint64_t seed, Mode mode,
                       const std::optional<std::filesystem::path>& solution_dir) {
  const Graph& g = inst.graph;
  RunRecord r;
  r.instance = inst.id;
  r.family = inst.meta.family;
  r.n = g.num_nodes();
  r.m = g.num_edges();
  r.max_degree = g.max_degree();
  r.degeneracy = inst.meta.degeneracy;
  r.kind = kind;
  r.seed = seed;
  r.mode = mode;
  r.metrics = nlohmann::ordered_json::object();

  PipelineConfig cfg = pipeline;
  cfg.kind = kind;
  cfg.seed = seed;
  cfg.trace_name = inst.id + "-" + std::string(kind_name(kind)) + "-s" + std::to_string(seed);

  std::optional<PartialSolution> final_solution;
  auto persist = [&](const nlohmann::ordered_json& sol, const char* tag) {
    if (!solution_dir) return;
    write_text(*solution_dir / (cfg.trace_name + "-" + tag + ".json"), sol.dump() + "\n");
  };
  auto fill_report = [&](const ReductionReport& rep) {
    r.delta_before.clear();
    r.delta_after.clear();
    for (const PhaseEntry& e : rep.phases) {
      r.delta_before.push_back(e.delta_before);
      r.delta_after.push_back(e.delta_after);
    }
    r.stop_reason = rep.stop_reason;
  };

  if (mode != Mode::Mpc) {
    PipelineResult c = solve_centralized(g, centralized_options(cfg));
    const auto sol = solution_to_json(c.solution, seed, c.report);
    r.digest_centralized = solution_digest(sol);
    persist(sol, "centralized");
    r.invariants.emplace_back("maximal-centralized", verify_maximal(g, c.solution));
    fill_report(c.report);
    r.metrics["centralized"] = {{"report", to_json(c.report)}, {"finish_rounds", c.finish_rounds}};
    final_solution = std::move(c.solution);
  }
  if (mode != Mode::Centralized) {
    MpcPipelineResult m = mpc_pipeline(g, cfg);
    const auto sol = solution_to_json(m.solution, seed, m.report);
    r.digest_mpc = solution_digest(sol);
    persist(sol, "mpc");
    r.invariants.emplace_back("maximal-mpc", verify_maximal(g, m.solution));
    r.invariants.emplace_back("budget", m.run.violations.empty());
    r.rounds = m.run.rounds;
    r.partition_rounds = m.partition_rounds;
    r.peak_words = m.run.peak_words;
    fill_report(m.report);
    r.metrics["mpc"] = metrics_to_json(m);
    if (!final_solution) final_solution = std::move(m.solution);
  }
  if (mode == Mode::Both) r.invariants.emplace_back("oracle-equal", r.digest_centralized == r.digest_mpc);
  r.solution_size = final_solution->size();
  if (kind == Kind::Matching) {
    bool cover_ok = false;
    if (verify_maximal(g, *final_solution)) {
      TwoApprox approx = derive_2approx(g, *final_solution);
      r.matching_size = approx.matching_size;
      r.cover_size = approx.cover.size();
      cover_ok = is_vertex_cover(g, approx.cover);
    }
    r.invariants.emplace_back("vertex-cover", cover_ok);
  }
  return r;
}

std::vector<RunRecord> run(const ExperimentSpec& spec) {
  if (spec.seeds.empty()) throw std::invalid_argument("experiment spec lists no seeds");
  const std::vector<Instance> instances = materialize(spec);
  const std::filesystem::path solutions = spec.output / "solutions";
  std::filesystem::create_directories(solutions);
  std::vector<RunRecord> records;
  for (const Instance& inst : instances) {
    for (Kind kind : spec.kinds) {
      for (std::uint64_t seed : spec.seeds) {
        try {
          records.push_back(run_instance(inst, spec.pipeline, kind, seed, spec.mode, solutions));
        } catch (const std::exception& e) {
          throw HarnessError("instance " + inst.id + " (" + std::string(kind_name(kind)) + ", seed " +
                             std::to_string(seed) + "): " + e.what());
        }
      }
    }
  }
  std::string lines;
  for (const RunRecord& r : records) lines += to_json(r).dump() + "\n";
  write_text(spec.output / "records.jsonl", lines);
  return records;
}

std::vector<RunRecord> load_records(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw std::invalid_argument("cannot open records " + jsonl.string());
  std::vector<RunRecord> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(record_from_json(nlohmann::json::parse(line)));
  return out;
}

ReportRow report_row(const RunRecord& r) {
  return ReportRow{r.label(), r.n, r.m, r.degeneracy, r.delta_before, r.delta_after, r.rounds, r.peak_words, r.invariants};
}

namespace {

constexpr const char* kCsvHeader = "instance,n,m,degeneracy,delta_before,delta_after,rounds,peak_words,invariants";

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ReportRow& r : rows) {
    std::string inv;
    for (const auto& [name, ok] : r.invariants) {
      if (!inv.empty()) inv += ';';
      inv += name + (ok ? "=pass" : "=fail");
    }
    out += r.instance + "," + std::to_string(r.n) + "," + std::to_string(r.m) + "," + std::to_string(r.degeneracy) +
           "," + join(r.delta_before) + "," + join(r.delta_after) + "," + std::to_string(r.rounds) + "," +
           std::to_string(r.peak_words) + "," + inv + "\n";
  }
  return out;
}

std::vector<ReportRow> parse_report_csv(std::string_view text) {
  std::vector<ReportRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw std::invalid_argument("report CSV has an unexpected header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != 9) throw std::invalid_argument("report CSV row has " + std::to_string(cells.size()) + " cells");
    ReportRow r;
    r.instance = cells[0];
    r.n = static_cast<NodeId>(std::stoul(cells[1]));
    r.m = std::stoull(cells[2]);
    r.degeneracy = static_cast<std::uint32_t>(std::stoul(cells[3]));
    r.delta_before = parse_list(cells[4]);
    r.delta_after = parse_list(cells[5]);
    r.rounds = std::stoull(cells[6]);
    r.peak_words = std::stoull(cells[7]);
    if (!cells[8].empty()) {
      for (const auto& item : split(cells[8], ';')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad invariant cell '" + item + "'");
        r.invariants.emplace_back(item.substr(0, eq), item.substr(eq + 1) == "pass");
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::ordered_json summarize(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json s;
  std::set<std::string> instances;
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_invariant;
  std::size_t failed = 0;
  std::uint64_t rounds_min = 0, rounds_max = 0, rounds_sum = 0;
  Word peak = 0;
  std::size_t phases = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ReportRow& r = rows[i];
    instances.insert(r.instance.substr(0, r.instance.find(':')));
    bool ok = true;
    for (const auto& [name, pass] : r.invariants) {
      auto& slot = per_invariant[name];
      (pass ? slot.first : slot.second) += 1;
      ok = ok && pass;
    }
    if (!ok) ++failed;
    rounds_min = i == 0 ? r.rounds : std::min(rounds_min, r.rounds);
    rounds_max = std::max(rounds_max, r.rounds);
    rounds_sum += r.rounds;
    peak = std::max(peak, r.peak_words);
    phases += r.delta_before.size();
  }
  s["rows"] = rows.size();
  s["instances"] = instances.size();
  s["failed_rows"] = failed;
  s["all_invariants_pass"] = failed == 0;
  nlohmann::ordered_json inv = nlohmann::ordered_json::object();
  for (const auto& [name, counts] : per_invariant) inv[name] = {{"pass", counts.first}, {"fail", counts.second}};
  s["invariants"] = inv;
  s["rounds"] = {{"min", rounds_min},
                 {"max", rounds_max},
                 {"mean", rows.empty() ? 0.0 : static_cast<double>(rounds_sum) / static_cast<double>(rows.size())}};
  s["peak_words_max"] = peak;
  s["reduction_phases"] = phases;
  return s;
}

nlohmann::ordered_json report(const std::vector<RunRecord>& records, const std::filesystem::path& dir) {
  std::vector<ReportRow> rows;
  rows.reserve(records.size());
  for (const RunRecord& r : records) rows.push_back(report_row(r));
  std::filesystem::create_directories(dir);
  write_text(dir / "report.csv", report_csv(rows));
  nlohmann::ordered_json summary = summarize(rows);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace mpcsim
