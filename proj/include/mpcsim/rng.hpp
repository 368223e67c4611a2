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

namespace mpcsim {

// Counter-based random streams. A stream is a pure function of
// (seed, phase, node, tag), so any executor that knows those four values
// reproduces the same draws regardless of scheduling.

constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class StreamTag : std::uint64_t {
  Mark = 1,
  Propose = 2,
  FinishPriority = 3,
  Generator = 4,
  Placement = 5,
};

class Stream {
 public:
  constexpr explicit Stream(std::uint64_t key) : state_(key) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, bound); bound must be positive.
  constexpr std::uint64_t uniform_below(std::uint64_t bound) {
    // multiply-shift; bias is at most bound / 2^64
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  /// Uniform in [0, 1) with 53 bits.
  constexpr double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  constexpr bool bernoulli(double p) { return unit() < p; }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t phase, std::uint64_t node, StreamTag tag) {
  std::uint64_t k = mix64(seed ^ 0x5851f42d4c957f2dULL);
  k = mix64(k ^ (phase * 0x2545f4914f6cdd1dULL));
  k = mix64(k ^ (node * 0x9fb21c651e98df25ULL));
  return mix64(k ^ static_cast<std::uint64_t>(tag));
}

constexpr Stream node_stream(std::uint64_t seed, std::uint64_t phase, std::uint64_t node, StreamTag tag) {
  return Stream(stream_key(seed, phase, node, tag));
}

}  // namespace mpcsim
