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


#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mpcsim/harness.hpp"
#include "oracles.hpp"

using namespace mpcsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mpcsim_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::size_t brute_min_cover(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::size_t best = n;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    bool ok = true;
    for (const Edge& e : g.edges()) ok = ok && (((mask >> e.u) & 1) || ((mask >> e.v) & 1));
    if (ok) best = std::min<std::size_t>(best, std::popcount(mask));
  }
  return best;
}

// Key order is not part of the record.
nlohmann::json plain(const RunRecord& r) { return nlohmann::json::parse(to_json(r).dump()); }

nlohmann::json small_spec(const fs::path& out) {
  nlohmann::json j = nlohmann::json::parse(R"({
    "name": "t",
    "corpus": [{"family": "tree", "n": 200, "seeds": [1, 2]},
               {"family": "grid", "rows": 8, "cols": 9, "seeds": [0]}],
    "pipeline": {"delta": 0.9, "d_floor": 5},
    "kinds": ["matching", "mis"],
    "seeds": [3, 4],
    "mode": "both"
  })");
  j["output"] = out.string();
  return j;
}

}  // namespace

TEST_CASE("spec parsing") {
  ExperimentSpec s = parse_experiment_spec(small_spec("o"));
  CHECK(s.corpus.size() == 2);
  CHECK(s.kinds.size() == 2);
  CHECK(s.pipeline.d_floor == 5);
  CHECK(s.mode == Mode::Both);
  CHECK(materialize(s).size() == 3);
  CHECK(materialize(s)[0].id == "tree-n200-s1");

  ExperimentSpec back = parse_experiment_spec(nlohmann::json::parse(to_json(s).dump()));
  CHECK(to_json(back) == to_json(s));

  auto bad = small_spec("o");
  bad.erase("seeds");
  CHECK_THROWS_AS(parse_experiment_spec(bad), std::invalid_argument);
  bad = small_spec("o");
  bad["corpus"] = nlohmann::json::array();
  CHECK_THROWS_AS(parse_experiment_spec(bad), std::invalid_argument);
  bad = small_spec("o");
  bad["corpus"][0].erase("seeds");
  CHECK_THROWS_AS(parse_experiment_spec(bad), std::invalid_argument);
  bad = small_spec("o");
  bad["mode"] = "sideways";
  CHECK_THROWS(parse_experiment_spec(bad));
  CHECK_THROWS_AS(load_experiment_spec("/nonexistent/spec.json"), std::invalid_argument);
}

TEST_CASE("fnv1a") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("2-approximate vertex cover") {
  Graph c4 = oracle::cycle(4);
  PartialSolution m{Kind::Matching, {{0, 1}, {2, 3}}, {}, {0, 1, 2, 3}};
  TwoApprox a = derive_2approx(c4, m);
  CHECK(a.matching_size == 2);
  CHECK(a.cover.size() == 4);
  CHECK(is_vertex_cover(c4, a.cover));
  CHECK(a.cover.size() <= 2 * brute_min_cover(c4));

  Graph star = oracle::star(6);
  TwoApprox s = derive_2approx(star, PartialSolution{Kind::Matching, {{0, 3}}, {}, {0, 3}});
  CHECK(s.cover == std::vector<NodeId>{0, 3});
  CHECK(brute_min_cover(star) == 1);

  CHECK_THROWS_AS(derive_2approx(c4, PartialSolution{Kind::Matching, {{0, 1}}, {}, {0, 1}}), InvariantError);
  CHECK_FALSE(is_vertex_cover(c4, std::vector<NodeId>{0}));

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Graph g = oracle::gnp(10, 0.35, seed);
    DegreeReduceOptions o;
    o.seed = seed;
    TwoApprox t = derive_2approx(g, solve_centralized(g, o).solution);
    CHECK(is_vertex_cover(g, t.cover));
    CHECK(t.cover.size() <= 2 * brute_min_cover(g));
  }
}

TEST_CASE("run, records and report") {
  const fs::path out = scratch("run");
  ExperimentSpec spec = parse_experiment_spec(small_spec(out));
  std::vector<RunRecord> recs = run(spec);
  CHECK(recs.size() == 3 * 2 * 2);
  for (const RunRecord& r : recs) {
    CHECK(r.passed());
    CHECK(r.digest_centralized == r.digest_mpc);
    CHECK(r.digest_mpc.size() == 16);
    CHECK(fs::exists(out / "solutions"));
  }
  std::vector<RunRecord> again = run(spec);
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(plain(again[i]) == plain(recs[i]));

  std::vector<RunRecord> loaded = load_records(out / "records.jsonl");
  REQUIRE(loaded.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(plain(loaded[i]) == plain(recs[i]));

  nlohmann::ordered_json summary = report(recs, out);
  CHECK(summary["rows"] == recs.size());
  CHECK(summary["instances"] == 3);
  CHECK(summary["all_invariants_pass"] == true);
  CHECK(fs::exists(out / "report.csv"));

  std::vector<ReportRow> rows;
  for (const RunRecord& r : recs) rows.push_back(report_row(r));
  std::string csv = report_csv(rows);
  CHECK(csv.rfind("instance,n,m,degeneracy,delta_before,delta_after,rounds,peak_words,invariants\n", 0) == 0);
  CHECK(report_csv(parse_report_csv(csv)) == csv);
  fs::remove_all(out);
}

TEST_CASE("recorded rounds match the trace log") {
  const fs::path dir = scratch("trace");
  GeneratorParams p;
  p.n = 300;
  GeneratedGraph gg = generate(Family::Tree, p, 5);
  Instance inst{"tree-n300-s5", gg.graph, gg.meta};
  PipelineConfig cfg;
  cfg.delta = 0.8;
  cfg.d_floor = 3;
  cfg.trace_dir = dir;
  RunRecord r = run_instance(inst, cfg, Kind::Mis, 7, Mode::Mpc);
  CHECK(r.passed());
  CHECK(r.digest_centralized.empty());
  const fs::path log = dir / "tree-n300-s5-mis-s7.ndjson";
  REQUIRE(fs::exists(log));
  std::ifstream in(log);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) lines += !line.empty();
  const std::uint64_t machines = r.metrics["mpc"]["run"]["machines"].get<std::uint64_t>();
  CHECK(lines == r.rounds * machines);
  CHECK(peak_from_trace_log(log) == r.peak_words);
  fs::remove_all(dir);
}

TEST_CASE("mode names") {
  for (Mode m : {Mode::Centralized, Mode::Mpc, Mode::Both}) CHECK(parse_mode(mode_name(m)) == m);
  CHECK_THROWS(parse_mode("x"));
}
