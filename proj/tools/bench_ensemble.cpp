// Copyright 2026 The gsprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Benchmark of the trajectory ensemble: the OpenMP kernel against the serial
// reference. Both must produce bit-identical statistics; the timing ratio
// depends on the machine (on a single hardware thread the parallel kernel
// simply matches the serial one).

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gsprep/simulator.hpp"
#include "gsprep/system_model.hpp"

namespace {

gsp::SystemSpec reference_system() {
  gsp::Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  gsp::CMat Lambda(1, 2);
  Lambda(0, 0) = gsp::Cplx(1.0, -1.0);
  Lambda(0, 1) = gsp::Cplx(0.0, 1.0);
  return gsp::SystemSpec::validated(1, G, Lambda, gsp::CMat::Zero(2, 1), 1.0);
}

double run_timed(const gsp::SystemSpec& spec, const gsp::SimConfig& cfg,
                 gsp::ConditionalRun* out) {
  const auto start = std::chrono::steady_clock::now();
  *out = gsp::simulate_conditional(spec, cfg);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) {
      quick = true;
    }
  }

  const gsp::SystemSpec spec = reference_system();
  gsp::SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = quick ? 1.0 : 10.0;
  cfg.n_traj = quick ? 2000 : 10000;
  cfg.seed = 555;
  cfg.max_samples = 11;

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::cout << "ensemble benchmark: " << cfg.n_traj << " trajectories, "
            << static_cast<long>(cfg.T / cfg.dt) << " steps, " << threads
            << " thread(s) available\n";

  gsp::ConditionalRun serial_run;
  gsp::SimConfig serial_cfg = cfg;
  serial_cfg.parallel = false;
  const double t_serial = run_timed(spec, serial_cfg, &serial_run);
  std::cout << "serial reference: " << t_serial << " s\n";

  gsp::ConditionalRun parallel_run;
  const double t_parallel = run_timed(spec, cfg, &parallel_run);
  std::cout << (parallel_run.used_parallel ? "openmp kernel:    "
                                           : "openmp kernel unavailable, "
                                             "serial fallback: ")
            << t_parallel << " s";
  if (parallel_run.used_parallel && t_parallel > 0.0) {
    std::cout << "  (speedup x" << t_serial / t_parallel << ")";
  }
  std::cout << "\n";

  const bool identical =
      (serial_run.stats.mean_of_means.array() ==
       parallel_run.stats.mean_of_means.array())
          .all() &&
      (serial_run.stats.Sigma.array() == parallel_run.stats.Sigma.array())
          .all() &&
      (serial_run.stats.Vc_final.array() ==
       parallel_run.stats.Vc_final.array())
          .all();
  std::cout << "statistics bit-identical: " << (identical ? "yes" : "NO")
            << "\n";
  return identical ? 0 : 1;
}
