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

#include "mpcsim/generators.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "mpcsim/rng.hpp"

namespace mpcsim {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw GraphError(GraphErrorKind::InvalidParameter, what); }

Stream generator_stream(std::uint64_t seed, std::uint64_t salt) {
  return node_stream(seed, salt, 0, StreamTag::Generator);
}

template <class T>
void shuffle(std::vector<T>& xs, Stream& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[rng.uniform_below(i)]);
}

std::vector<Edge> random_tree(NodeId n, std::uint64_t seed) {
  // random recursive tree on a shuffled labelling
  Stream rng = generator_stream(seed, 1);
  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), 0);
  shuffle(label, rng);
  std::vector<Edge> edges;
  edges.reserve(n > 0 ? n - 1 : 0);
  for (NodeId i = 1; i < n; ++i) edges.push_back({label[i], label[rng.uniform_below(i)]});
  return edges;
}

std::vector<Edge> grid(NodeId rows, NodeId cols) {
  std::vector<Edge> edges;
  auto id = [cols](NodeId r, NodeId c) { return r * cols + c; };
  for (NodeId r = 0; r < rows; ++r)
    for (NodeId c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1)});
      if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c)});
    }
  return edges;
}

std::vector<Edge> preferential_attachment(NodeId n, std::uint32_t c, std::uint64_t seed) {
  // seed clique on c+1 nodes; each later node attaches to c distinct earlier nodes
  // chosen proportionally to degree, so every node has <= c earlier neighbors
  Stream rng = generator_stream(seed, 2);
  std::vector<Edge> edges;
  std::vector<NodeId> endpoints;
  for (NodeId u = 0; u <= c; ++u)
    for (NodeId v = u + 1; v <= c; ++v) {
      edges.push_back({u, v});
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  std::vector<NodeId> picked;
  for (NodeId v = c + 1; v < n; ++v) {
    picked.clear();
    while (picked.size() < c) {
      NodeId t = endpoints.empty() ? static_cast<NodeId>(rng.uniform_below(v)) : endpoints[rng.uniform_below(endpoints.size())];
      if (std::find(picked.begin(), picked.end(), t) == picked.end()) picked.push_back(t);
    }
    for (NodeId t : picked) {
      edges.push_back({t, v});
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return edges;
}

std::vector<Edge> bounded_degree_random(NodeId n, std::uint32_t max_degree, std::uint64_t seed) {
  Stream rng = generator_stream(seed, 3);
  std::vector<std::uint32_t> deg(n, 0);
  std::set<Edge> seen;
  std::vector<Edge> edges;
  const std::uint64_t attempts = std::uint64_t{n} * max_degree;
  for (std::uint64_t a = 0; a < attempts && n >= 2; ++a) {
    NodeId u = static_cast<NodeId>(rng.uniform_below(n));
    NodeId v = static_cast<NodeId>(rng.uniform_below(n));
    if (u == v || deg[u] >= max_degree || deg[v] >= max_degree) continue;
    Edge e = normalized({u, v});
    if (!seen.insert(e).second) continue;
    ++deg[u];
    ++deg[v];
    edges.push_back(e);
  }
  return edges;
}

std::vector<Edge> complete_tree(NodeId n, std::uint32_t branching) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.push_back({(v - 1) / branching, v});
  return edges;
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Tree: return "tree";
    case Family::Grid: return "grid";
    case Family::PreferentialAttachment: return "preferential-attachment";
    case Family::BoundedDegreeRandom: return "bounded-degree-random";
    case Family::CompleteTree: return "complete-tree";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "tree") return Family::Tree;
  if (name == "grid") return Family::Grid;
  if (name == "preferential-attachment" || name == "pa") return Family::PreferentialAttachment;
  if (name == "bounded-degree-random" || name == "bdr") return Family::BoundedDegreeRandom;
  if (name == "complete-tree") return Family::CompleteTree;
  invalid("unknown graph family '" + std::string(name) + "'");
}

GeneratedGraph generate(Family family, const GeneratorParams& params, std::uint64_t seed) {
  GeneratedGraph out;
  out.meta.family = std::string(family_name(family));
  out.meta.seed = seed;
  NodeId n = params.n;
  std::vector<Edge> edges;
  switch (family) {
    case Family::Tree:
      if (n < 1) invalid("tree needs n >= 1");
      edges = random_tree(n, seed);
      out.meta.params["n"] = n;
      out.meta.arboricity_bound = 1;
      break;
    case Family::Grid:
      if (params.rows < 1 || params.cols < 1) invalid("grid needs rows, cols >= 1");
      n = params.rows * params.cols;
      edges = grid(params.rows, params.cols);
      out.meta.params["rows"] = params.rows;
      out.meta.params["cols"] = params.cols;
      out.meta.arboricity_bound = 2;
      break;
    case Family::PreferentialAttachment:
      if (params.attachment < 1) invalid("preferential-attachment needs attachment parameter >= 1");
      if (n < params.attachment + 1) invalid("preferential-attachment needs n >= attachment + 1");
      edges = preferential_attachment(n, params.attachment, seed);
      out.meta.params["n"] = n;
      out.meta.params["attachment"] = params.attachment;
      out.meta.arboricity_bound = params.attachment;
      break;
    case Family::BoundedDegreeRandom:
      if (params.max_degree < 1) invalid("bounded-degree-random needs max_degree >= 1");
      if (n < 1) invalid("bounded-degree-random needs n >= 1");
      edges = bounded_degree_random(n, params.max_degree, seed);
      out.meta.params["n"] = n;
      out.meta.params["max_degree"] = params.max_degree;
      out.meta.arboricity_bound = (params.max_degree + 2) / 2;
      break;
    case Family::CompleteTree:
      if (n < 1 || params.branching < 1) invalid("complete-tree needs n >= 1 and branching >= 1");
      edges = complete_tree(n, params.branching);
      out.meta.params["n"] = n;
      out.meta.params["branching"] = params.branching;
      out.meta.arboricity_bound = 1;
      break;
  }
  out.graph = build_graph(n, edges);
  out.meta.degeneracy = degeneracy(out.graph).degeneracy;
  return out;
}

PlantedGadget matching_gadget(std::uint32_t planted, std::uint32_t in_degree, std::uint32_t parents_per_child,
                              std::uint64_t seed) {
  if (parents_per_child < 1 || planted < parents_per_child || planted < 3 || in_degree % parents_per_child != 0)
    invalid("matching_gadget needs planted >= max(3, parents_per_child) and parents_per_child | in_degree");
  const std::uint64_t children = std::uint64_t{planted} * in_degree / parents_per_child;
  const NodeId n = static_cast<NodeId>(planted + children);
  Stream rng = generator_stream(seed, 4);
  std::vector<NodeId> label(n);
  std::iota(label.begin(), label.end(), 0);
  shuffle(label, rng);

  PlantedGadget gadget;
  gadget.children.resize(planted);
  for (std::uint32_t h = 0; h < planted; ++h) gadget.planted.push_back(label[h]);
  std::vector<Edge> edges;
  for (std::uint32_t h = 0; h < planted; ++h) edges.push_back({label[h], label[(h + 1) % planted]});
  // child c attaches to hubs c, c+step, ..., which are distinct and cover each hub in_degree times
  const std::uint32_t step = planted / parents_per_child;
  for (std::uint64_t c = 0; c < children; ++c) {
    NodeId child = label[planted + c];
    for (std::uint32_t t = 0; t < parents_per_child; ++t) {
      std::uint32_t h = static_cast<std::uint32_t>((c + std::uint64_t{t} * step) % planted);
      edges.push_back({label[h], child});
      gadget.children[h].push_back(child);
    }
  }
  gadget.graph = build_graph(n, edges);
  return gadget;
}

PlantedGadget mis_gadget(std::uint32_t planted, std::uint32_t in_degree, std::uint32_t group_size) {
  if (planted < 1 || group_size < 1 || in_degree % group_size != 0)
    invalid("mis_gadget needs group_size | in_degree");
  const NodeId n = planted * (in_degree + 1);
  PlantedGadget gadget;
  gadget.children.resize(planted);
  std::vector<Edge> edges;
  for (std::uint32_t h = 0; h < planted; ++h) {
    const NodeId hub = h * (in_degree + 1);
    gadget.planted.push_back(hub);
    for (std::uint32_t c = 0; c < in_degree; ++c) {
      const NodeId child = hub + 1 + c;
      gadget.children[h].push_back(child);
      edges.push_back({hub, child});
      const std::uint32_t group_start = c - c % group_size;
      for (std::uint32_t o = group_start; o < c; ++o) edges.push_back({hub + 1 + o, child});
    }
  }
  gadget.graph = build_graph(n, edges);
  return gadget;
}

}  // namespace mpcsim
