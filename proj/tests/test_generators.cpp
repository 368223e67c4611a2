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
#include "oracles.hpp"

using namespace mpcsim;

namespace {

bool connected(const Graph& g) {
  if (g.num_nodes() == 0) return true;
  auto dist = oracle::bfs(g, 0);
  return std::none_of(dist.begin(), dist.end(), [](auto d) { return d == UINT32_MAX; });
}

}  // namespace

TEST_CASE("tree n=100") {
  GeneratorParams p;
  p.n = 100;
  GeneratedGraph gg = generate(Family::Tree, p, 7);
  CHECK(gg.graph.num_edges() == 99);
  CHECK(connected(gg.graph));
  CHECK(degeneracy(gg.graph).degeneracy == 1);
  CHECK(gg.meta.degeneracy == 1);
  CHECK(gg.meta.family == "tree");
}

TEST_CASE("grid 10x10") {
  GeneratorParams p;
  p.rows = p.cols = 10;
  GeneratedGraph gg = generate(Family::Grid, p, 0);
  CHECK(gg.graph.num_nodes() == 100);
  CHECK(gg.graph.num_edges() == 180);
  CHECK(degeneracy(gg.graph).degeneracy == 2);
  CHECK(gg.graph.max_degree() == 4);
}

TEST_CASE("preferential attachment degeneracy bounded by attachment") {
  for (std::uint32_t c : {1u, 2u, 3u}) {
    GeneratorParams p;
    p.n = 1000;
    p.attachment = c;
    GeneratedGraph gg = generate(Family::PreferentialAttachment, p, 11);
    CHECK(degeneracy(gg.graph).degeneracy <= c);
    CHECK(gg.graph.num_nodes() == 1000);
  }
}

TEST_CASE("bounded degree random respects the cap") {
  for (std::uint32_t k : {2u, 3u, 6u}) {
    GeneratorParams p;
    p.n = 500;
    p.max_degree = k;
    Graph g = generate(Family::BoundedDegreeRandom, p, 3).graph;
    CHECK(g.max_degree() <= k);
  }
}

TEST_CASE("complete tree shape") {
  GeneratorParams p;
  p.n = 13;
  p.branching = 3;
  Graph g = generate(Family::CompleteTree, p, 0).graph;
  CHECK(g.num_edges() == 12);
  CHECK(g.degree(0) == 3);
  CHECK(connected(g));
}

TEST_CASE("generation is deterministic in the seed") {
  GeneratorParams p;
  p.n = 300;
  p.attachment = 2;
  for (Family f : {Family::Tree, Family::PreferentialAttachment, Family::BoundedDegreeRandom}) {
    Graph a = generate(f, p, 5).graph, b = generate(f, p, 5).graph, c = generate(f, p, 6).graph;
    CHECK(a.edges() == b.edges());
    CHECK(a.edges() != c.edges());
  }
}

TEST_CASE("invalid parameters") {
  GeneratorParams p;
  CHECK_THROWS_AS(generate(Family::Tree, p, 0), GraphError);
  CHECK_THROWS_AS(generate(Family::Grid, p, 0), GraphError);
  CHECK_THROWS_AS(parse_family("nope"), GraphError);
  CHECK(parse_family("pa") == Family::PreferentialAttachment);
  CHECK(parse_family("bdr") == Family::BoundedDegreeRandom);
}

TEST_CASE("matching gadget structure") {
  PlantedGadget gd = matching_gadget(8, 16, 4, 1);
  CHECK(gd.planted.size() == 8);
  for (std::size_t h = 0; h < 8; ++h) {
    CHECK(gd.children[h].size() == 16);
    for (NodeId c : gd.children[h]) CHECK(gd.graph.degree(c) == 4);
  }
  HPartition hp = h_partition(gd.graph, 4);
  for (std::size_t h = 0; h < 8; ++h)
    for (NodeId c : gd.children[h]) CHECK(hp.layer[c] < hp.layer[gd.planted[h]]);
}

TEST_CASE("mis gadget structure") {
  PlantedGadget gd = mis_gadget(3, 10, 5);
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(gd.graph.degree(gd.planted[h]) == 10);
    for (NodeId c : gd.children[h]) CHECK(gd.graph.degree(c) == 5);
  }
  CHECK_THROWS_AS(mis_gadget(3, 10, 3), GraphError);
}
