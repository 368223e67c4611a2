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

#include "mpcsim/reduction.hpp"
#include "oracles.hpp"

using namespace mpcsim;

TEST_CASE("finish on trivial inputs") {
  Graph empty = build_graph(5, {});
  FinishResult r = finish_greedy(GraphView(empty), Kind::Mis, 1);
  CHECK(r.solution.nodes.size() == 5);

  Graph edge = oracle::path(2);
  FinishResult m = finish_greedy(GraphView(edge), Kind::Matching, 1);
  CHECK(m.solution.edges == std::vector<Edge>{{0, 1}});
}

TEST_CASE("C_5 maximal independent sets have size 2") {
  Graph c5 = oracle::cycle(5);
  for (std::uint64_t s = 0; s < 100; ++s) {
    FinishResult r = finish_greedy(GraphView(c5), Kind::Mis, s);
    CHECK(r.solution.nodes.size() == 2);
    CHECK(oracle::is_maximal_independent(c5, r.solution.nodes));
  }
}

TEST_CASE("finish produces maximal solutions on random views") {
  for (std::uint64_t s = 0; s < 60; ++s) {
    Graph g = oracle::gnp(80, 0.06, s);
    std::vector<std::uint8_t> alive(80, 1);
    for (NodeId v = 0; v < 80; v += 7) alive[v] = 0;
    GraphView view(g, alive);
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      FinishResult r = finish_greedy(view, kind, s);
      // every chosen element lives in the view
      for (NodeId v : r.solution.nodes) CHECK(view.alive(v));
      for (const Edge& e : r.solution.edges) CHECK((view.alive(e.u) && view.alive(e.v)));
      GraphView rest = view.without(r.solution.removed);
      if (kind == Kind::Matching) {
        CHECK(rest.num_alive_edges() == 0);
      } else {
        CHECK(rest.alive_count() == 0);
        CHECK(oracle::is_independent(g, r.solution.nodes));
      }
    }
  }
}

TEST_CASE("finish priorities are deterministic and symmetric") {
  CHECK(finish_edge_priority(3, 1, 4, 9) == finish_edge_priority(3, 1, 9, 4));
  CHECK(finish_node_priority(3, 1, 4) == finish_node_priority(3, 1, 4));
  CHECK(finish_node_priority(3, 1, 4) != finish_node_priority(3, 2, 4));
}
