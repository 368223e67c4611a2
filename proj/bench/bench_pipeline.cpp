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

// Wall-clock comparison: serial centralized reference vs the MPC simulation with
// machine steps on one thread and under OpenMP. Checks the outputs agree.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <omp.h>

#include "mpcsim/generators.hpp"
#include "mpcsim/mpc_reduction.hpp"

using namespace mpcsim;

namespace {

template <class F>
double best_ms(int reps, F&& f) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pipeline benchmark"};
  std::vector<NodeId> sizes{1 << 12, 1 << 14, 1 << 16};
  int reps = 3;
  double delta = 0.8;
  std::string family = "tree";
  app.add_option("--n", sizes, "node counts");
  app.add_option("--reps", reps, "repetitions per measurement (best is reported)");
  app.add_option("--delta", delta, "memory exponent");
  app.add_option("--family", family, "generator family");
  CLI11_PARSE(app, argc, argv);

  std::printf("threads=%d family=%s delta=%.2f\n", omp_get_max_threads(), family.c_str(), delta);
  std::printf("%8s %8s %6s %12s %12s %12s %8s %6s\n", "n", "m", "kind", "central_ms", "mpc_serial", "mpc_omp",
              "rounds", "equal");
  int rc = 0;
  for (NodeId n : sizes) {
    GeneratorParams p;
    p.n = n;
    const Graph g = generate(parse_family(family), p, 7).graph;
    for (Kind kind : {Kind::Matching, Kind::Mis}) {
      PipelineConfig cfg;
      cfg.kind = kind;
      cfg.delta = delta;
      cfg.seed = 11;
      PipelineResult central;
      MpcPipelineResult serial, par;
      const double tc = best_ms(reps, [&] { central = solve_centralized(g, centralized_options(cfg)); });
      cfg.parallel = false;
      const double ts = best_ms(reps, [&] { serial = mpc_pipeline(g, cfg); });
      cfg.parallel = true;
      const double tp = best_ms(reps, [&] { par = mpc_pipeline(g, cfg); });
      const bool equal = central.solution == serial.solution && serial.solution == par.solution;
      if (!equal) rc = 1;
      std::printf("%8u %8zu %6s %12.2f %12.2f %12.2f %8llu %6s\n", n, g.num_edges(),
                  std::string(kind_name(kind)).c_str(), tc, ts, tp,
                  static_cast<unsigned long long>(par.run.rounds), equal ? "yes" : "NO");
    }
  }
  return rc;
}
