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

#ifndef GSPREP_SIMULATOR_HPP_
#define GSPREP_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "gsprep/system_model.hpp"

namespace gsp {

enum class FeedbackMode { kNone, kMarkovian };

/// Gain schedule for Markovian feedback u dt = F dy. kFixedSteady applies
/// the steady-covariance gain for all t; kTracking recomputes the canceling
/// gain from the transient covariance V_t.
enum class GainSchedule { kFixedSteady, kTracking };

struct FeedbackPolicy {
  FeedbackMode mode = FeedbackMode::kNone;
  GainSchedule schedule = GainSchedule::kFixedSteady;
  // Explicit gain pair; when absent, the canceling pair B = V C^T + M,
  // F = -I is derived from the steady covariance.
  std::optional<Mat> B;
  std::optional<Mat> F;
};

struct SimConfig {
  double dt = 1e-3;
  double T = 1.0;
  int n_traj = 1;
  std::uint64_t seed = 0;
  FeedbackPolicy feedback;
  std::optional<Vec> X0;  // initial mean, default 0
  std::optional<Mat> V0;  // initial covariance, default I/2
  Eigen::Index max_samples = 201;  // recorded time points (incl. endpoints)
  int store_trajectories = 0;      // keep the first k mean paths
  bool parallel = true;            // ensemble kernel dispatch
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec> mean;
};

/// Ensemble statistics over trajectories at the sample times. Sigma is the
/// classical covariance of the conditional means, E[x x^T] - E[x] E[x]^T.
struct EnsembleSeries {
  std::vector<double> t;
  std::vector<Vec> mean;
  std::vector<Mat> Sigma;
  std::vector<Mat> Vc;  // deterministic conditional covariance
};

struct EnsembleStats {
  Vec mean_of_means;
  Mat Sigma;
  Mat Vc_final;
  Mat Vunc_ensemble;  // Vc_final + Sigma
  // Direct integration of dV/dt = A V + V A^T + N on the same grid; filled
  // for open-loop runs, where it must match Vunc_ensemble statistically.
  std::optional<Mat> Vunc_deterministic;
  Vec mean_standard_error;
  int n_traj = 0;
  double T = 0.0;
};

struct ConditionalRun {
  EnsembleSeries series;
  EnsembleStats stats;
  std::vector<Trajectory> trajectories;
  bool used_parallel = false;
  FeedbackMode feedback_mode = FeedbackMode::kNone;
  GainSchedule gain_schedule = GainSchedule::kFixedSteady;
};

/// Euler-Maruyama ensemble of the conditional moment equations driven by
/// unit-variance innovation increments:
///
///   x_{k+1} = x_k + (A x_k + B u_k) dt + sqrt(eta) (V_k C^T + M) dw_k.
///
/// V_k is precomputed on the step grid (shared by all trajectories).
/// Trajectory i draws from its own generator seeded by (seed, i), so results
/// are independent of scheduling; the parallel and serial paths reduce in a
/// fixed block order and return bit-identical statistics.
ConditionalRun simulate_conditional(const SystemSpec& spec,
                                    const SimConfig& config);

/// Deterministic unconditional moments: dx/dt = A x, dV/dt = A V + V A^T + N.
struct DeterministicRun {
  std::vector<double> t;
  std::vector<Vec> mean;
  std::vector<Mat> V;
};

DeterministicRun simulate_unconditional(const SystemSpec& spec,
                                        const SimConfig& config);

/// Noise-canceling closed loop: with B F = -(V C^T + M) at the steady
/// covariance, the mean obeys dx/dt = (A + sqrt(eta) B F C) x. Returns the
/// sampled deterministic path from config.X0.
Trajectory simulate_closed_loop_mean(const SystemSpec& spec,
                                     const Mat& V_steady,
                                     const SimConfig& config);

}  // namespace gsp

#endif  // GSPREP_SIMULATOR_HPP_
