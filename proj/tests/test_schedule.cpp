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

#include <cmath>

#include "mpcsim/mpc_reduction.hpp"

using namespace mpcsim;

namespace {

// Largest k with delta^(2^k + 1) <= s, by direct search.
int brute_k(std::size_t delta, Word s) {
  int k = -1;
  for (int t = 0; t < 6; ++t) {
    long double p = std::pow(static_cast<long double>(delta), (1 << t) + 1);
    if (p <= static_cast<long double>(s)) k = t;
  }
  return k;
}

}  // namespace

TEST_CASE("schedule examples") {
  ExponentiationSchedule a = compute_schedule(8, Word{1} << 15, 1 << 20, 0.5);
  CHECK_FALSE(a.fallback);
  CHECK(a.k == 2);
  CHECK(a.repetitions == std::vector<std::uint32_t>{60, 20, 20});
  CHECK(a.radius(0) == 1);
  CHECK(a.radius(2) == 4);

  ExponentiationSchedule b = compute_schedule(2, 8, 1000, 0.5);
  CHECK(b.k == 1);
  CHECK(b.iterations() == 2);

  ExponentiationSchedule c = compute_schedule(10, 50, 1000, 0.5);
  CHECK(c.fallback);
  CHECK(c.repetitions.empty());
  CHECK(c.radius(3) == 1);

  ExponentiationSchedule d = compute_schedule(8, Word{1} << 15, 1 << 20, 0.5, 2.0, RepetitionCounts{1, 1});
  CHECK(d.overridden);
  CHECK(d.repetitions == std::vector<std::uint32_t>{1, 1, 1});
}

TEST_CASE("schedule k matches a direct search") {
  for (std::size_t delta = 2; delta < 40; ++delta)
    for (Word s : {Word{8}, Word{100}, Word{1} << 12, Word{1} << 20}) {
      ExponentiationSchedule sc = compute_schedule(delta, s, 1 << 30, 0.5);
      const int k = brute_k(delta, s);
      if (delta * delta > s) {
        CHECK(sc.fallback);
      } else {
        REQUIRE(k >= 0);
        CHECK(sc.k == static_cast<std::uint32_t>(k));
      }
    }
}

TEST_CASE("k is capped by n") {
  ExponentiationSchedule sc = compute_schedule(2, Word{1} << 40, 8, 0.5);
  CHECK((1u << sc.k) <= 8);
}

TEST_CASE("preprocessing layer count") {
  CHECK(preprocessing_layer_count(1 << 16, 0.5, 2.0) == 6);
  CHECK(preprocessing_layer_count(1 << 16, 0.5, 0.0) == 0);
  CHECK(preprocessing_layer_count(4, 1.0, 2.0) == 0);
  for (NodeId n : {100u, 10000u, 1000000u})
    for (double delta : {0.3, 0.5, 0.8}) {
      const double x = std::log2(std::log2(std::log2(double(n))) / delta);
      CHECK(preprocessing_layer_count(n, delta, 2.0) == static_cast<std::uint32_t>(std::max(0.0, std::ceil(2.0 * x))));
    }
}

TEST_CASE("chunk index") {
  ChunkIndex idx;
  CHECK(idx.layers() == 0);
  Chunk a;
  a.first = 1;
  a.last = 3;
  a.radius = 4;
  idx.append(a);
  Chunk b;
  b.first = 4;
  b.last = 4;
  idx.append(b);
  CHECK(idx.layers() == 4);
  CHECK(idx.chunk_of(1) == 0);
  CHECK(idx.chunk_of(3) == 0);
  CHECK(idx.chunk_of(4) == 1);
  CHECK_THROWS_AS(idx.chunk_of(5), std::out_of_range);
  CHECK_THROWS_AS(idx.chunk_of(0), std::out_of_range);
  Chunk gap;
  gap.first = 6;
  gap.last = 7;
  gap.radius = 2;
  CHECK_THROWS_AS(idx.append(gap), InvariantError);
  CHECK(a.width() == 3);
  Chunk wide;
  wide.first = 5;
  wide.last = 7;
  CHECK_THROWS_AS(idx.append(wide), InvariantError);
}
