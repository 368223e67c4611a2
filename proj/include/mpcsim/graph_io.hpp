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

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mpcsim/generators.hpp"
#include "mpcsim/graph.hpp"

namespace mpcsim {

// Text format: a header line "n m", then m lines "u v" (0-based, u < v) in
// ascending order, every line newline-terminated.

void write_graph(std::ostream& out, const Graph& g);
std::string graph_to_string(const Graph& g);
/// Throws GraphError(Parse) on malformed input and the build_graph errors otherwise.
Graph read_graph(std::istream& in);
Graph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const Graph& g);

/// {family, params, seed, degeneracy} plus the construction's arboricity bound.
nlohmann::ordered_json metadata_to_json(const GraphMetadata& meta);
GraphMetadata metadata_from_json(const nlohmann::json& j);

}  // namespace mpcsim
