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

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mpcsim/graph.hpp"

namespace mpcsim {

enum class Family { Tree, Grid, PreferentialAttachment, BoundedDegreeRandom, CompleteTree };

std::string_view family_name(Family f);
/// Accepts "tree", "grid", "preferential-attachment" (or "pa"),
/// "bounded-degree-random" (or "bdr"), "complete-tree".
Family parse_family(std::string_view name);

struct GeneratorParams {
  NodeId n = 0;                   // tree, preferential-attachment, bounded-degree-random, complete-tree
  NodeId rows = 0, cols = 0;      // grid
  std::uint32_t attachment = 1;   // preferential-attachment: edges per new node
  std::uint32_t max_degree = 3;   // bounded-degree-random
  std::uint32_t branching = 3;    // complete-tree
};

struct GraphMetadata {
  std::string family;
  std::map<std::string, std::uint64_t> params;
  std::uint64_t seed = 0;
  std::uint32_t arboricity_bound = 0;  // known from the construction
  std::uint32_t degeneracy = 0;        // measured
};

struct GeneratedGraph {
  Graph graph;
  GraphMetadata meta;
};

/// Deterministic given (family, params, seed). Throws GraphError(InvalidParameter).
GeneratedGraph generate(Family family, const GeneratorParams& params, std::uint64_t seed);

// Planted heavy-node gadgets for the degree-reduction mechanism checks.

struct PlantedGadget {
  Graph graph;
  std::vector<NodeId> planted;                 // the heavy nodes
  std::vector<std::vector<NodeId>> children;   // children of each planted node
};

/// `planted` hubs, each adjacent to `in_degree` children. Every child is shared by
/// `parents_per_child` distinct hubs chosen at random; hubs form a cycle among themselves.
/// Children have degree parents_per_child, so any d >= parents_per_child puts them in layer 1.
PlantedGadget matching_gadget(std::uint32_t planted, std::uint32_t in_degree, std::uint32_t parents_per_child,
                              std::uint64_t seed);

/// `planted` hubs, each with `in_degree` private children grouped into cliques of
/// `group_size`; a child has group_size - 1 same-layer neighbors plus its hub.
PlantedGadget mis_gadget(std::uint32_t planted, std::uint32_t in_degree, std::uint32_t group_size);

}  // namespace mpcsim
