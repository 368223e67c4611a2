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

#include "mpcsim/generators.hpp"
#include "mpcsim/mpc_reduction.hpp"
#include "oracles.hpp"

using namespace mpcsim;

TEST_CASE("pipeline config parsing") {
  PipelineConfig c = parse_pipeline_config(
      "# comment\nkind = mis\ndelta = 0.7\nc_pre = 0\nexponent = 1/5\nd_floor = 3\n"
      "repetitions = 1/2\nseed = 9\nadaptive = true\nparallel = false\ntrace_name = x\n");
  CHECK(c.kind == Kind::Mis);
  CHECK(c.delta == doctest::Approx(0.7));
  CHECK(c.c_pre == 0.0);
  CHECK(c.exponent.num == 1);
  CHECK(c.exponent.den == 5);
  CHECK(c.d_floor == 3);
  REQUIRE(c.repetitions);
  CHECK(*c.repetitions == RepetitionCounts{1, 2});
  CHECK(c.seed == 9);
  CHECK(c.adaptive);
  CHECK_FALSE(c.parallel);
  CHECK(c.trace_name == "x");

  PipelineConfig back = parse_pipeline_config(pipeline_config_to_string(c));
  CHECK(pipeline_config_to_string(back) == pipeline_config_to_string(c));

  CHECK_THROWS_AS(parse_pipeline_config("delta = 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pipeline_config("delta = 1.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pipeline_config("colour = red"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pipeline_config("d_floor = 0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_pipeline_config("kind"), std::invalid_argument);

  DegreeReduceOptions o = centralized_options(c);
  CHECK(o.kind == Kind::Mis);
  CHECK(o.d_floor == 3);
  CHECK(o.seed == 9);
}

TEST_CASE("pipeline equals the centralized reference and is maximal") {
  std::vector<std::pair<Family, GeneratorParams>> cases;
  GeneratorParams p;
  p.n = 3000;
  cases.push_back({Family::Tree, p});
  p.attachment = 3;
  cases.push_back({Family::PreferentialAttachment, p});
  p.max_degree = 5;
  cases.push_back({Family::BoundedDegreeRandom, p});
  GeneratorParams grid;
  grid.rows = grid.cols = 40;
  cases.push_back({Family::Grid, grid});

  for (auto& [family, params] : cases) {
    Graph g = generate(family, params, 1).graph;
    const std::uint32_t degen = degeneracy(g).degeneracy;
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      for (std::uint64_t seed : {1u, 2u}) {
        PipelineConfig cfg;
        cfg.kind = kind;
        cfg.seed = seed;
        cfg.delta = 0.9;
        cfg.d_floor = 2 * degen + 1;
        cfg.target_delta = 2;
        MpcPipelineResult r = mpc_pipeline(g, cfg);
        PipelineResult ref = solve_centralized(g, centralized_options(cfg));
        CHECK(r.solution == ref.solution);
        CHECK(r.report == ref.report);
        CHECK(verify_maximal(g, r.solution));
        CHECK(r.run.violations.empty());
        CHECK(r.run.peak_words <= r.run.capacity);
        CHECK(r.phases.size() == r.report.phases.size());
        std::uint64_t parts = 0;
        for (const MpcPhaseMetrics& ph : r.phases) parts += ph.partition_rounds;
        CHECK(parts == r.partition_rounds);
        auto j = metrics_to_json(r);
        CHECK(j.contains("phases"));
      }
    }
  }
}

TEST_CASE("serial and parallel pipelines agree") {
  Graph g = oracle::gnp(2000, 0.002, 4);
  PipelineConfig cfg;
  cfg.delta = 0.9;
  cfg.d_floor = 2 * degeneracy(g).degeneracy + 1;
  MpcPipelineResult a = mpc_pipeline(g, cfg);
  cfg.parallel = false;
  MpcPipelineResult b = mpc_pipeline(g, cfg);
  CHECK(a.solution == b.solution);
  CHECK(a.run.rounds == b.run.rounds);
  CHECK(a.run.peak_words == b.run.peak_words);
}

TEST_CASE("pipeline on tiny graphs") {
  for (NodeId n : {0u, 1u, 2u}) {
    Graph g = n == 2 ? oracle::path(2) : build_graph(n, {});
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      PipelineConfig cfg;
      cfg.kind = kind;
      cfg.delta = 1.0;
      MpcPipelineResult r = mpc_pipeline(g, cfg);
      CHECK(verify_maximal(g, r.solution));
    }
  }
}
