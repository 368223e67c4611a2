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

#include "mpcsim/graph_io.hpp"

#include <fstream>
#include <sstream>

namespace mpcsim {

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

std::string graph_to_string(const Graph& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

Graph read_graph(std::istream& in) {
  auto parse_error = [](const std::string& what) { return GraphError(GraphErrorKind::Parse, what); };
  std::string line;
  if (!std::getline(in, line)) throw parse_error("missing header line");
  std::istringstream header(line);
  std::uint64_t n = 0, m = 0;
  if (!(header >> n >> m)) throw parse_error("header must be 'n m'");
  if (n > kNoNode) throw parse_error("node count too large");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw parse_error("expected " + std::to_string(m) + " edges, got " + std::to_string(i));
    std::istringstream row(line);
    std::int64_t u = -1, v = -1;
    if (!(row >> u >> v) || u < 0 || v < 0) throw parse_error("bad edge line " + std::to_string(i + 2) + ": '" + line + "'");
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw parse_error("trailing content after edge list");
  return build_graph(static_cast<NodeId>(n), edges);
}

Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw GraphError(GraphErrorKind::Parse, "cannot open " + path.string());
  return read_graph(in);
}

void save_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  write_graph(out, g);
}

nlohmann::ordered_json metadata_to_json(const GraphMetadata& meta) {
  nlohmann::ordered_json j;
  j["family"] = meta.family;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta.params) params[k] = v;
  j["params"] = params;
  j["seed"] = meta.seed;
  j["degeneracy"] = meta.degeneracy;
  j["arboricity_bound"] = meta.arboricity_bound;
  return j;
}

GraphMetadata metadata_from_json(const nlohmann::json& j) {
  GraphMetadata meta;
  meta.family = j.at("family").get<std::string>();
  for (const auto& [k, v] : j.at("params").items()) meta.params[k] = v.get<std::uint64_t>();
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.degeneracy = j.at("degeneracy").get<std::uint32_t>();
  meta.arboricity_bound = j.value("arboricity_bound", 0u);
  return meta;
}

}  // namespace mpcsim
