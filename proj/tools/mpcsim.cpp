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

// mpcsim: generate graphs, run the reduction pipelines, compare, report.
// Exit status: 0 all invariants pass, 1 some invariant failed, 2 usage or runtime error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mpcsim/graph_io.hpp"
#include "mpcsim/harness.hpp"

namespace {

using namespace mpcsim;

struct PipelineFlags {
  std::optional<std::string> config;
  std::optional<std::string> kind;
  std::optional<double> delta;
  std::optional<double> c_pre;
  std::optional<double> c_total;
  std::optional<std::string> exponent;
  std::optional<std::uint64_t> target_delta;
  std::optional<std::uint32_t> d_floor;
  std::optional<std::string> repetitions;
  std::optional<std::string> trace_dir;
  bool adaptive = false;
  bool serial = false;

  void add(CLI::App* app) {
    app->add_option("--config", config, "pipeline config file (key = value lines)");
    app->add_option("--kind", kind, "matching or mis");
    app->add_option("--delta", delta, "memory exponent, S = n^delta");
    app->add_option("--c-pre", c_pre, "preprocessing constant (0 disables retention)");
    app->add_option("--c-total", c_total, "total memory constant");
    app->add_option("--exponent", exponent, "threshold exponent, d = ceil(delta_max^e)");
    app->add_option("--d-floor", d_floor, "lower bound on the peeling threshold d");
    app->add_option("--target-delta", target_delta, "stop reducing once the max degree is at most this");
    app->add_option("--repetitions", repetitions, "override repetition counts, first/later");
    app->add_option("--trace-dir", trace_dir, "write per-round NDJSON traces here");
    app->add_flag("--adaptive", adaptive, "stop repetitions early once the node target is met");
    app->add_flag("--serial", serial, "run machine steps on one thread");
  }

  // Flags override the config file, which overrides the base.
  PipelineConfig apply(PipelineConfig base) const {
    std::string text;
    if (config) {
      std::ifstream in(*config);
      if (!in) throw std::invalid_argument("cannot open config file " + *config);
      std::stringstream buf;
      buf << in.rdbuf();
      text = buf.str() + "\n";
    } else {
      text = pipeline_config_to_string(base);
    }
    auto put = [&](const std::string& key, const std::string& value) { text += key + " = " + value + "\n"; };
    auto num = [](double x) {
      std::ostringstream o;
      o.precision(17);
      o << x;
      return o.str();
    };
    if (kind) put("kind", *kind);
    if (delta) put("delta", num(*delta));
    if (c_pre) put("c_pre", num(*c_pre));
    if (c_total) put("c_total", num(*c_total));
    if (exponent) put("exponent", *exponent);
    if (d_floor) put("d_floor", std::to_string(*d_floor));
    if (target_delta) put("target_delta", std::to_string(*target_delta));
    if (repetitions) put("repetitions", *repetitions);
    if (trace_dir) put("trace_dir", *trace_dir);
    if (adaptive) put("adaptive", "true");
    if (serial) put("parallel", "false");
    return parse_pipeline_config(text);
  }
};

struct GeneratorFlags {
  std::string family = "tree";
  GeneratorParams params;

  void add(CLI::App* app) {
    app->add_option("--family", family, "tree, grid, pa, bdr, complete-tree");
    app->add_option("--n", params.n, "node count");
    app->add_option("--rows", params.rows, "grid rows");
    app->add_option("--cols", params.cols, "grid columns");
    app->add_option("--attachment", params.attachment, "preferential attachment edges per node");
    app->add_option("--max-degree", params.max_degree, "bounded-degree random cap");
    app->add_option("--branching", params.branching, "complete tree branching");
  }
};

int print_records(const std::vector<RunRecord>& records) {
  bool ok = true;
  for (const RunRecord& r : records) {
    std::cout << r.label() << (r.passed() ? " ok" : " FAIL");
    for (const auto& [name, pass] : r.invariants)
      if (!pass) std::cout << " " << name;
    std::cout << " size=" << r.solution_size << " rounds=" << r.rounds << " peak=" << r.peak_words << "\n";
    ok = ok && r.passed();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MPC degree-reduction simulator"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a generated graph and its metadata");
  GeneratorFlags gen_flags;
  gen_flags.add(gen);
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "graph file; metadata goes to <out>.meta.json")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "run an experiment spec or a single graph");
  std::optional<std::string> spec_path, graph_path, out_dir, mode_str;
  std::vector<std::uint64_t> seeds;
  PipelineFlags run_flags;
  run_cmd->add_option("--spec", spec_path, "experiment spec JSON");
  run_cmd->add_option("--graph", graph_path, "single graph file");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--mode", mode_str, "centralized, mpc or both");
  run_cmd->add_option("--seed", seeds, "pipeline seed(s)");
  run_flags.add(run_cmd);

  // compare
  auto* cmp = app.add_subcommand("compare", "run both executions on one graph and compare digests");
  std::string cmp_graph;
  std::uint64_t cmp_seed = 1;
  PipelineFlags cmp_flags;
  cmp->add_option("--graph", cmp_graph, "graph file")->required();
  cmp->add_option("--seed", cmp_seed, "pipeline seed");
  cmp_flags.add(cmp);

  // report
  auto* rep = app.add_subcommand("report", "write report.csv and summary.json from records.jsonl");
  std::string rep_records;
  std::optional<std::string> rep_out;
  rep->add_option("--records", rep_records, "records.jsonl")->required();
  rep->add_option("--out", rep_out, "output directory (default: next to the records)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      GeneratedGraph gg = generate(parse_family(gen_flags.family), gen_flags.params, gen_seed);
      save_graph(gen_out, gg.graph);
      std::ofstream meta(gen_out + ".meta.json");
      meta << metadata_to_json(gg.meta).dump(2) << "\n";
      std::cout << gen_out << ": n=" << gg.graph.num_nodes() << " m=" << gg.graph.num_edges()
                << " degeneracy=" << gg.meta.degeneracy << "\n";
      return 0;
    }
    if (*run_cmd) {
      if (spec_path.has_value() == graph_path.has_value()) {
        std::cerr << "run: give exactly one of --spec or --graph\n";
        return 2;
      }
      ExperimentSpec spec;
      if (spec_path) {
        spec = load_experiment_spec(*spec_path);
      } else {
        InstanceSpec is;
        is.file = *graph_path;
        spec.corpus.push_back(is);
        spec.seeds = {1};
      }
      spec.pipeline = run_flags.apply(spec.pipeline);
      if (run_flags.kind) spec.kinds = {spec.pipeline.kind};
      if (out_dir) spec.output = *out_dir;
      if (mode_str) spec.mode = parse_mode(*mode_str);
      if (!seeds.empty()) spec.seeds = seeds;
      const auto records = run(spec);
      const auto summary = report(records, spec.output);
      const int rc = print_records(records);
      std::cout << "wrote " << (spec.output / "records.jsonl").string() << ", all_invariants_pass="
                << (summary["all_invariants_pass"].get<bool>() ? "true" : "false") << "\n";
      return rc;
    }
    if (*cmp) {
      InstanceSpec is;
      is.file = cmp_graph;
      ExperimentSpec spec;
      spec.corpus.push_back(is);
      Instance inst = std::move(materialize(spec).front());
      PipelineConfig cfg = cmp_flags.apply(PipelineConfig{});
      RunRecord r = run_instance(inst, cfg, cfg.kind, cmp_seed, Mode::Both);
      std::cout << "centralized " << r.digest_centralized << "\nmpc         " << r.digest_mpc << "\n";
      return print_records({r});
    }
    if (*rep) {
      const auto records = load_records(rep_records);
      const std::filesystem::path dir =
          rep_out ? std::filesystem::path(*rep_out) : std::filesystem::path(rep_records).parent_path();
      const auto summary = report(records, dir.empty() ? "." : dir);
      std::cout << summary.dump(2) << "\n";
      return summary["all_invariants_pass"].get<bool>() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
