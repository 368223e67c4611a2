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

#include <cmath>
#include <map>

#include "mpcsim/reduction.hpp"
#include "mpcsim/generators.hpp"
#include "oracles.hpp"

using namespace mpcsim;

namespace {

HPartition manual(std::vector<std::uint32_t> layer, std::uint32_t d) {
  HPartition hp;
  hp.ell = *std::max_element(layer.begin(), layer.end());
  hp.layer = std::move(layer);
  hp.d = d;
  return hp;
}

ProposalSet empty_matching(NodeId n) {
  ProposalSet p;
  p.kind = Kind::Matching;
  p.marked_parent.assign(n, kNoNode);
  p.proposed_child.assign(n, kNoNode);
  return p;
}

ProposalSet empty_mis(NodeId n) {
  ProposalSet p;
  p.kind = Kind::Mis;
  p.marked.assign(n, 0);
  p.proposed.assign(n, 0);
  return p;
}

// Top-down sweep written from the definition.
PartialSolution sweep_oracle(const GraphView& view, const HPartition& hp, const ProposalSet& props) {
  const NodeId n = view.num_nodes();
  PartialSolution sol;
  sol.kind = props.kind;
  std::vector<std::uint8_t> gone(n, 0);
  for (std::uint32_t i = hp.ell; i >= 1; --i) {
    for (NodeId v = 0; v < n; ++v) {
      if (!view.alive(v) || hp.layer[v] != i || gone[v]) continue;
      if (props.kind == Kind::Matching) {
        NodeId c = props.proposed_child[v];
        if (c == kNoNode || gone[c]) continue;
        sol.edges.push_back(normalized({c, v}));
        gone[c] = gone[v] = 1;
      } else {
        if (!props.proposed[v]) continue;
        sol.nodes.push_back(v);
        gone[v] = 1;
        view.for_each_neighbor(v, [&](NodeId u) { gone[u] = 1; });
      }
    }
  }
  for (NodeId v = 0; v < n; ++v)
    if (gone[v]) sol.removed.push_back(v);
  std::sort(sol.edges.begin(), sol.edges.end());
  std::sort(sol.nodes.begin(), sol.nodes.end());
  return sol;
}

}  // namespace

TEST_CASE("single oriented edge is always marked and proposed") {
  Graph g = oracle::path(2);
  HPartition hp = manual({1, 2}, 1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    ProposalSet p = mark_and_propose_matching(GraphView(g), hp, s);
    CHECK(p.marked_parent[0] == 1);
    CHECK(p.proposed_child[1] == 0);
  }
}

TEST_CASE("unoriented edges are never marked") {
  Graph g = oracle::cycle(4);
  HPartition hp = h_partition(g, 2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    ProposalSet p = mark_and_propose_matching(GraphView(g), hp, s);
    CHECK(p.marked_count() == 0);
    CHECK(p.proposed_count() == 0);
  }
}

TEST_CASE("star center proposes each leaf uniformly") {
  Graph g = oracle::star(5);
  HPartition hp = h_partition(g, 2);
  std::map<NodeId, int> freq;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) {
    ProposalSet p = mark_and_propose_matching(GraphView(g), hp, s);
    for (NodeId v = 1; v <= 5; ++v) REQUIRE(p.marked_parent[v] == 0);
    REQUIRE(p.proposed_count() == 1);
    ++freq[p.proposed_child[0]];
  }
  for (NodeId v = 1; v <= 5; ++v) CHECK(std::abs(freq[v] / double(trials) - 0.2) <= 0.02);
}

TEST_CASE("a child marks each parent uniformly") {
  Graph g = oracle::star(3);  // node 0 is the child, 1..3 its parents
  HPartition hp = manual({1, 2, 2, 2}, 3);
  std::map<NodeId, int> freq;
  const int trials = 9000;
  for (int s = 0; s < trials; ++s) ++freq[mark_and_propose_matching(GraphView(g), hp, s).marked_parent[0]];
  for (NodeId v = 1; v <= 3; ++v) CHECK(std::abs(freq[v] / double(trials) - 1.0 / 3) <= 0.02);
}

TEST_CASE("mis marking") {
  SUBCASE("isolated node, p = 1") {
    Graph g = build_graph(1, {});
    ProposalSet p = mark_and_propose_mis(GraphView(g), h_partition(g, 1), 1.0, 3);
    CHECK(p.marked[0]);
    CHECK(p.proposed[0]);
  }
  SUBCASE("adjacent same-layer pair, p = 1") {
    Graph g = oracle::path(2);
    ProposalSet p = mark_and_propose_mis(GraphView(g), h_partition(g, 1), 1.0, 3);
    CHECK(p.marked[0]);
    CHECK(p.marked[1]);
    CHECK_FALSE(p.proposed[0]);
    CHECK_FALSE(p.proposed[1]);
  }
  SUBCASE("Bernoulli frequency") {
    Graph g = build_graph(1, {});
    HPartition hp = h_partition(g, 1);
    int marked = 0;
    const int trials = 10000;
    for (int s = 0; s < trials; ++s) marked += mark_and_propose_mis(GraphView(g), hp, 0.25, s).marked[0];
    CHECK(std::abs(marked / double(trials) - 0.25) <= 0.02);
  }
}

TEST_CASE("select_matching examples") {
  Graph g = oracle::path(3);  // u=0, v=1, w=2
  HPartition hp = manual({1, 2, 3}, 2);
  GraphView view(g);
  SUBCASE("chain") {
    ProposalSet p = empty_matching(3);
    p.marked_parent[0] = 1;
    p.marked_parent[1] = 2;
    p.proposed_child[1] = 0;
    p.proposed_child[2] = 1;
    PartialSolution s = select_matching(view, hp, p);
    CHECK(s.edges == std::vector<Edge>{{1, 2}});
    CHECK(s.removed == std::vector<NodeId>{1, 2});
  }
  SUBCASE("nothing proposed") {
    PartialSolution s = select_matching(view, hp, empty_matching(3));
    CHECK(s.edges.empty());
    CHECK(s.removed.empty());
  }
  SUBCASE("single proposal") {
    ProposalSet p = empty_matching(3);
    p.marked_parent[0] = 1;
    p.proposed_child[1] = 0;
    CHECK(select_matching(view, hp, p).edges == std::vector<Edge>{{0, 1}});
  }
  SUBCASE("proposal without mark is rejected") {
    ProposalSet p = empty_matching(3);
    p.proposed_child[1] = 0;
    CHECK_THROWS_AS(select_matching(view, hp, p), InvariantError);
  }
}

TEST_CASE("select_mis examples") {
  Graph g = oracle::path(2);  // u=0 child, w=1 parent
  HPartition hp = manual({1, 2}, 1);
  GraphView view(g);
  ProposalSet p = empty_mis(2);
  p.marked[0] = p.marked[1] = p.proposed[0] = p.proposed[1] = 1;
  PartialSolution s = select_mis(view, hp, p);
  CHECK(s.nodes == std::vector<NodeId>{1});
  CHECK(s.removed == std::vector<NodeId>{0, 1});

  CHECK(select_mis(view, hp, empty_mis(2)).nodes.empty());

  HPartition flat = manual({1, 1}, 1);
  CHECK_THROWS_AS(select_mis(view, flat, p), InvariantError);
}

TEST_CASE("reduce_once properties on random graphs") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    Graph g = oracle::gnp(200, 0.02 + 0.005 * (s % 5), s);
    const std::uint32_t d = 2 * degeneracy(g).degeneracy + 1;
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      GraphView view(g);
      ReduceResult r = reduce_once(view, kind, d, s, 0);
      CHECK_NOTHROW(check_proposals(view, r.partition, r.proposals));
      CHECK(r.solution == sweep_oracle(view, r.partition, r.proposals));
      if (kind == Kind::Matching) {
        std::vector<std::uint8_t> used(g.num_nodes(), 0);
        for (const Edge& e : r.solution.edges) {
          CHECK(g.has_edge(e.u, e.v));
          CHECK_FALSE(used[e.u]);
          CHECK_FALSE(used[e.v]);
          used[e.u] = used[e.v] = 1;
          // proposed edges are marked edges
          CHECK((r.proposals.marked_parent[e.u] == e.v || r.proposals.marked_parent[e.v] == e.u));
        }
      } else {
        CHECK(oracle::is_independent(g, r.solution.nodes));
        for (NodeId v : r.solution.nodes) CHECK(r.proposals.proposed[v]);
      }
      for (NodeId v : r.solution.removed) CHECK_FALSE(r.remainder.alive(v));
      CHECK(r.remainder.alive_count() + r.solution.removed.size() == g.num_nodes());
      // remaining nodes keep their out-degree bound
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        if (!r.remainder.alive(v)) continue;
        std::uint32_t up = 0;
        r.remainder.for_each_neighbor(v, [&](NodeId u) { up += r.partition.layer[u] >= r.partition.layer[v]; });
        CHECK(up <= d);
      }
    }
  }
}

TEST_CASE("reduce_once on an edgeless graph with p = 1 selects everything") {
  Graph g = build_graph(6, {});
  ReduceResult r = reduce_once(GraphView(g), Kind::Mis, 1, 2, 0, 1.0);
  CHECK(r.solution.nodes.size() == 6);
  CHECK(r.remainder.alive_count() == 0);
}

TEST_CASE("matching heavy hub is matched or stripped") {
  // one parent with d^4 children and no other edges
  const std::uint32_t d = 4, children = 256;
  Graph g = oracle::star(children);
  int hit = 0;
  const int trials = 1000;
  for (int s = 0; s < trials; ++s) {
    ReduceResult r = reduce_once(GraphView(g), Kind::Matching, d, s);
    hit += !r.remainder.alive(0) || r.remainder.degree(0) < children;
  }
  CHECK(hit >= 990);
}

TEST_CASE("rational exponent and thresholds") {
  CHECK(Rational::parse("1/10").num == 1);
  CHECK(Rational::parse("1/10").den == 10);
  CHECK(Rational::parse("0.25").value() == doctest::Approx(0.25));
  CHECK_THROWS(Rational::parse("x"));
  CHECK(ceil_rational_power(1024, {1, 10}) == 2);
  CHECK(ceil_rational_power(1025, {1, 10}) == 3);
  CHECK(ceil_rational_power(8, {1, 3}) == 2);
  CHECK(ceil_rational_power(9, {1, 3}) == 3);
  CHECK(ceil_rational_power(1, {1, 10}) == 1);
  DegreeReduceOptions o;
  o.d_floor = 7;
  CHECK(phase_threshold(1024, o) == 7);
  CHECK(default_mis_probability(5) == doctest::Approx(0.04));
}

TEST_CASE("degree_reduce examples") {
  SUBCASE("already below target") {
    Graph g = oracle::path(5);
    DegreeReduceOptions o;
    o.target_delta = 2;
    DegreeReduceResult r = degree_reduce(g, o);
    CHECK(r.report.phases.empty());
    CHECK(r.solution.size() == 0);
    CHECK(r.report.stop_reason == "target-reached");
  }
  SUBCASE("big star") {
    Graph g = oracle::star(1000);
    for (std::uint64_t s = 0; s < 10; ++s) {
      DegreeReduceOptions o;
      o.target_delta = 10;
      o.seed = s;
      DegreeReduceResult r = degree_reduce(g, o);
      REQUIRE(r.report.phases.size() == 1);
      REQUIRE(r.solution.edges.size() == 1);
      CHECK(r.solution.edges[0].u == 0);
      CHECK(r.remainder.num_alive_edges() == 0);
    }
  }
  SUBCASE("target must be positive") {
    DegreeReduceOptions o;
    o.target_delta = 0;
    CHECK_THROWS_AS(degree_reduce(oracle::path(3), o), std::invalid_argument);
  }
}

TEST_CASE("phase count under the 0.4-power decay") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    GeneratorParams p;
    p.n = 3000;
    p.attachment = 2;
    Graph g = generate(Family::PreferentialAttachment, p, s).graph;
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      DegreeReduceOptions o;
      o.kind = kind;
      o.seed = s;
      DegreeReduceResult r = degree_reduce(g, o);
      bool law = true;
      for (const PhaseEntry& e : r.report.phases)
        law = law && static_cast<double>(e.delta_after) <= std::ceil(std::pow(double(e.delta_before), 0.4));
      if (!law) continue;
      const double dl = double(g.max_degree());
      CHECK(r.report.phases.size() <= std::ceil(std::log2(std::log2(dl))) + 5);
    }
  }
}

TEST_CASE("verify_maximal examples") {
  Graph c4 = oracle::cycle(4);
  PartialSolution m{Kind::Matching, {{0, 1}, {2, 3}}, {}, {0, 1, 2, 3}};
  CHECK(verify_maximal(c4, m));
  PartialSolution none{Kind::Matching, {}, {}, {}};
  CHECK_FALSE(verify_maximal(oracle::path(2), none));
  Graph s = oracle::star(5);
  CHECK(verify_maximal(s, PartialSolution{Kind::Mis, {}, {0}, {}}));
  CHECK_FALSE(verify_maximal(s, PartialSolution{Kind::Mis, {}, {1}, {}}));
  // not independent
  CHECK_FALSE(verify_maximal(s, PartialSolution{Kind::Mis, {}, {0, 1}, {}}));
}

TEST_CASE("verify_maximal agrees with the oracle definitions") {
  for (std::uint64_t s = 0; s < 200; ++s) {
    Graph g = oracle::gnp(8, 0.4, s);
    // random candidate sets
    std::vector<NodeId> nodes;
    for (NodeId v = 0; v < 8; ++v)
      if ((s >> (v % 6)) & 1) nodes.push_back(v);
    CHECK(verify_maximal(g, PartialSolution{Kind::Mis, {}, nodes, {}}) == oracle::is_maximal_independent(g, nodes));
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
      if ((e.u + e.v + s) % 3 == 0) edges.push_back(e);
    CHECK(verify_maximal(g, PartialSolution{Kind::Matching, edges, {}, {}}) == oracle::is_maximal_matching(g, edges));
  }
}

TEST_CASE("arboricity schedule") {
  GeneratorParams p;
  p.n = 2000;
  Graph tree = generate(Family::Tree, p, 1).graph;
  ArboricityScheduleResult r = arboricity_schedule(tree, Kind::Matching, 3);
  REQUIRE(r.attempts.size() == 1);
  CHECK(r.attempts[0].lambda_hat == 2);
  CHECK(r.attempts[0].decay_ok);
  CHECK(verify_maximal(tree, r.solution));

  for (std::uint32_t c : {2u, 3u, 5u}) {
    p.attachment = c;
    Graph g = generate(Family::PreferentialAttachment, p, 2).graph;
    const double degen = degeneracy(g).degeneracy;
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      ArboricityScheduleResult a = arboricity_schedule(g, kind, 4);
      CHECK(verify_maximal(g, a.solution));
      CHECK(a.attempts.size() <= std::ceil(std::log2(std::max(1.0, std::log2(degen)))) + 1);
    }
  }
}

TEST_CASE("solve_centralized is maximal and deterministic") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Graph g = oracle::gnp(150, 0.04, s);
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      DegreeReduceOptions o;
      o.kind = kind;
      o.seed = s;
      PipelineResult a = solve_centralized(g, o), b = solve_centralized(g, o);
      CHECK(a.solution == b.solution);
      if (kind == Kind::Matching)
        CHECK(oracle::is_maximal_matching(g, a.solution.edges));
      else
        CHECK(oracle::is_maximal_independent(g, a.solution.nodes));
      auto j = solution_to_json(a.solution, s, a.report);
      CHECK(j["kind"] == std::string(kind_name(kind)));
    }
  }
}
