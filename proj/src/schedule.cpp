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

#include <algorithm>
#include <bit>
#include <cmath>

#include "mpcsim/mpc_reduction.hpp"

namespace mpcsim {

namespace {

using u128 = unsigned __int128;

// base^exp, saturating just above `limit`
u128 bounded_pow(std::uint64_t base, std::uint64_t exp, u128 limit) {
  u128 r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > limit) return limit + 1;
  }
  return r;
}

}  // namespace

std::uint32_t preprocessing_layer_count(NodeId n, double delta, double c_pre) {
  if (c_pre <= 0.0 || n < 4) return 0;
  const double x = std::log2(std::log2(static_cast<double>(n))) / delta;
  if (x <= 1.0) return 0;
  const double layers = c_pre * std::log2(x);
  return static_cast<std::uint32_t>(std::ceil(layers - 1e-9));
}

ExponentiationSchedule compute_schedule(std::size_t delta_max, Word capacity, NodeId n, double delta, double c_pre,
                                        std::optional<RepetitionCounts> repetitions) {
  ExponentiationSchedule s;
  s.delta_max = delta_max;
  s.capacity = capacity;
  s.preprocessing_layers = preprocessing_layer_count(n, delta, c_pre);
  s.overridden = repetitions.has_value();
  const RepetitionCounts reps = repetitions.value_or(RepetitionCounts{});
  if (reps.first == 0 || reps.later == 0) throw std::invalid_argument("repetition counts must be positive");

  const std::uint32_t cap = static_cast<std::uint32_t>(std::bit_width(std::max<NodeId>(n, 2)) - 1);
  if (delta_max <= 1) {
    s.k = cap;
  } else {
    if (bounded_pow(delta_max, 2, capacity) > capacity) {
      s.fallback = true;
      return s;
    }
    while (s.k < cap && bounded_pow(delta_max, (std::uint64_t{1} << (s.k + 1)) + 1, capacity) <= capacity) ++s.k;
  }
  s.repetitions.assign(std::size_t{s.k} + 1, reps.later);
  s.repetitions[0] = reps.first;
  return s;
}

void ChunkIndex::append(const Chunk& c) {
  if (c.first != layers() + 1 || c.last < c.first)
    throw InvariantError("chunk [" + std::to_string(c.first) + ", " + std::to_string(c.last) +
                         "] does not continue at layer " + std::to_string(layers() + 1));
  if (c.width() > c.radius) throw InvariantError("chunk is wider than its radius");
  chunks_.push_back(c);
}

std::uint32_t ChunkIndex::chunk_of(std::uint32_t layer) const {
  if (layer == 0 || layer > layers()) throw std::out_of_range("layer " + std::to_string(layer) + " is in no chunk");
  auto it = std::partition_point(chunks_.begin(), chunks_.end(), [&](const Chunk& c) { return c.last < layer; });
  return static_cast<std::uint32_t>(it - chunks_.begin());
}

}  // namespace mpcsim
