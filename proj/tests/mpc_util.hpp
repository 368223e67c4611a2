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

#include <algorithm>

#include "mpcsim/runtime.hpp"

namespace oracle {

// A cluster large enough that budgets never interfere with a unit test.
inline mpcsim::ClusterConfig roomy(const mpcsim::Graph& g, mpcsim::MachineId machines = 4) {
  mpcsim::ClusterConfig cfg;
  cfg.n = g.num_nodes();
  cfg.m = g.num_edges();
  cfg.delta = 1.0;
  cfg.capacity = std::max<mpcsim::Word>(64, 4 * (std::size_t{g.num_nodes()} + 2 * g.num_edges()) *
                                               (std::size_t{g.num_nodes()} + 1));
  cfg.machines = machines;
  return cfg;
}

}  // namespace oracle
