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

#include "mpcsim/graph.hpp"
#include "mpcsim/reduction.hpp"
#include "oracles.hpp"

using namespace mpcsim;

TEST_CASE("build_graph path and degrees") {
  std::vector<Edge> e{{0, 1}, {1, 2}};
  Graph g = build_graph(3, e);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.max_degree() == 2);
}

TEST_CASE("build_graph rejects bad input") {
  auto kind_of = [](NodeId n, std::vector<Edge> e) {
    try {
      build_graph(n, e);
    } catch (const GraphError& err) {
      return err.kind();
    }
    FAIL("no error");
    return GraphErrorKind::Parse;
  };
  CHECK(kind_of(2, {{0, 0}}) == GraphErrorKind::SelfLoop);
  CHECK(kind_of(4, {{0, 1}, {0, 1}}) == GraphErrorKind::DuplicateEdge);
  CHECK(kind_of(4, {{0, 1}, {1, 0}}) == GraphErrorKind::DuplicateEdge);
  CHECK(kind_of(3, {{0, 3}}) == GraphErrorKind::EndpointOutOfRange);
}

TEST_CASE("adjacency is symmetric and sorted on random graphs") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    Graph g = oracle::gnp(40, 0.15, s);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      auto nb = g.neighbors(v);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      for (NodeId u : nb) {
        CHECK(u != v);
        CHECK(g.has_edge(u, v));
      }
    }
  }
}

TEST_CASE("degeneracy of small graphs") {
  CHECK(degeneracy(oracle::star(5)).degeneracy == 1);
  CHECK(degeneracy(oracle::complete(4)).degeneracy == 3);
  CHECK(degeneracy(oracle::cycle(5)).degeneracy == 2);
  CHECK(degeneracy(build_graph(3, {})).degeneracy == 0);
}

TEST_CASE("degeneracy matches brute force and brackets arboricity") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    const NodeId n = 3 + s % 6;
    Graph g = oracle::gnp(n, 0.2 + 0.1 * (s % 6), s);
    ArboricityEstimate a = degeneracy(g);
    CHECK(a.degeneracy == oracle::brute_degeneracy(g));
    CHECK(a.lambda_lower <= a.lambda_upper);
    CHECK(a.lambda_upper <= std::max<std::uint32_t>(a.degeneracy, 1));
    // witness: each node has at most `degeneracy` neighbors later in the order
    std::vector<std::size_t> pos(n);
    REQUIRE(a.peeling_order.size() == n);
    for (std::size_t i = 0; i < n; ++i) pos[a.peeling_order[i]] = i;
    for (NodeId v = 0; v < n; ++v) {
      std::uint32_t later = 0;
      for (NodeId u : g.neighbors(v)) later += pos[u] > pos[v];
      CHECK(later <= a.degeneracy);
    }
  }
}

TEST_CASE("h_partition examples") {
  SUBCASE("star K_{1,5}, d = 2") {
    HPartition hp = h_partition(oracle::star(5), 2);
    CHECK(hp.ell == 2);
    CHECK(hp.layer[0] == 2);
    for (NodeId v = 1; v <= 5; ++v) CHECK(hp.layer[v] == 1);
  }
  SUBCASE("C_4, d = 2") {
    HPartition hp = h_partition(oracle::cycle(4), 2);
    CHECK(hp.ell == 1);
    for (NodeId v = 0; v < 4; ++v) CHECK(hp.layer[v] == 1);
  }
  SUBCASE("K_4, d = 2 stalls") { CHECK_THROWS_AS(h_partition(oracle::complete(4), 2), PartitionStall); }
}

TEST_CASE("h_partition agrees with the peeling oracle and is valid") {
  for (std::uint64_t s = 0; s < 80; ++s) {
    Graph g = oracle::gnp(60, 0.03 + 0.01 * (s % 8), s);
    const std::uint32_t degen = degeneracy(g).degeneracy;
    for (std::uint32_t d : {std::max<std::uint32_t>(degen, 1), 2 * degen + 1, 5 * degen + 2}) {
      HPartition hp = h_partition(g, d);
      CHECK(hp.layer == oracle::peel(g, d));
      CHECK(is_valid_h_partition(hp, GraphView(g)));
      auto sizes = hp.layer_sizes();
      for (std::uint32_t i = 1; i <= hp.ell; ++i) CHECK(sizes[i] > 0);
      // out-degree bound
      for (NodeId v = 0; v < g.num_nodes(); ++v) {
        std::uint32_t up = 0;
        for (NodeId u : g.neighbors(v)) up += hp.layer[u] >= hp.layer[v];
        CHECK(up <= d);
      }
    }
  }
}

TEST_CASE("stall exactly when d is below the degeneracy") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    Graph g = oracle::gnp(9, 0.5, s);
    const std::uint32_t degen = oracle::brute_degeneracy(g);
    if (degen == 0) continue;
    CHECK_NOTHROW(h_partition(g, degen));
    if (degen >= 2) CHECK_THROWS_AS(h_partition(g, degen - 1), PartitionStall);
  }
}

TEST_CASE("h_partition on a view ignores dead nodes") {
  Graph g = oracle::star(5);
  std::vector<std::uint8_t> alive{0, 1, 1, 1, 1, 1};
  HPartition hp = h_partition(GraphView(g, alive), 1);
  CHECK(hp.layer[0] == 0);
  CHECK(hp.ell == 1);
}

TEST_CASE("orientation examples") {
  Graph s = oracle::star(5);
  HPartition hp = h_partition(s, 2);
  Orientation leaf = orientation_of(hp, s, 3);
  CHECK(leaf.outgoing == std::vector<NodeId>{0});
  CHECK(leaf.incoming.empty());
  CHECK(leaf.unoriented.empty());
  Orientation center = orientation_of(hp, s, 0);
  CHECK(center.incoming.size() == 5);

  Graph c4 = oracle::cycle(4);
  HPartition hc = h_partition(c4, 2);
  for (NodeId v = 0; v < 4; ++v) {
    Orientation o = orientation_of(hc, c4, v);
    CHECK(o.outgoing.empty());
    CHECK(o.incoming.empty());
    CHECK(o.unoriented.size() == 2);
  }

  Graph iso = build_graph(1, {});
  Orientation o = orientation_of(h_partition(iso, 1), iso, 0);
  CHECK(o.outgoing.empty());
  CHECK(o.incoming.empty());
  CHECK(o.unoriented.empty());
}

TEST_CASE("layer decay law on random sparse graphs") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    Graph g = oracle::gnp(300, 0.01, s);
    const std::uint32_t lambda = degeneracy(g).degeneracy;
    const std::uint32_t d = 2 * lambda + 1;
    HPartition hp = h_partition(g, d);
    auto suffix = hp.suffix_sizes();
    for (std::uint32_t i = 1; i < hp.ell; ++i) CHECK(std::uint64_t{d} * suffix[i + 1] <= 2ull * lambda * suffix[i]);
    CHECK(layer_decay_holds(hp, lambda));
  }
}

TEST_CASE("GraphView removal") {
  Graph g = oracle::path(5);
  GraphView v(g);
  CHECK(v.alive_count() == 5);
  std::vector<NodeId> rm{2};
  GraphView w = v.without(rm);
  CHECK(w.alive_count() == 4);
  CHECK(w.degree(1) == 1);
  CHECK(w.num_alive_edges() == 2);
  CHECK(w.max_degree() == 1);
  CHECK(v.alive(2));
}
