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

#include "gsprep/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gsprep/analysis.hpp"
#include "gsprep/designer.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gsp {

namespace {

// Trajectories are grouped in fixed blocks; each block owns its partial
// sums, computed in trajectory order and merged in block order. The
// reduction is therefore independent of thread count and scheduling, which
// keeps the parallel kernel bit-identical to the serial reference.
constexpr int kBlock = 64;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t master, std::uint64_t idx) {
  return mix64(master + (idx + 1) * 0x9E3779B97F4A7C15ULL);
}

struct Grid {
  long steps = 0;
  std::vector<double> h;       // per-step size (uniform except maybe last)
  std::vector<double> t;       // t_0..t_steps
  std::vector<long> samples;   // recorded step indices, ascending, 0 first
};

Grid make_grid(double T, double dt, Eigen::Index max_samples) {
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "T and dt must be positive");
  }
  Grid g;
  g.steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  g.h.resize(g.steps);
  g.t.resize(g.steps + 1);
  g.t[0] = 0.0;
  double t = 0.0;
  for (long k = 0; k < g.steps; ++k) {
    g.h[k] = (k + 1 == g.steps) ? T - t : dt;
    t += g.h[k];
    g.t[k + 1] = (k + 1 == g.steps) ? T : t;
  }
  const Eigen::Index want = std::max<Eigen::Index>(2, max_samples);
  const long stride =
      std::max<long>(1, (g.steps + static_cast<long>(want) - 2) /
                            (static_cast<long>(want) - 1));
  for (long k = 0; k <= g.steps; k += stride) {
    g.samples.push_back(k);
  }
  if (g.samples.back() != g.steps) {
    g.samples.push_back(g.steps);
  }
  return g;
}

struct InitialMoments {
  Vec x0;
  Mat V0;
};

InitialMoments resolve_initial(const SystemSpec& spec,
                               const SimConfig& config) {
  const Eigen::Index n = 2 * spec.m;
  InitialMoments init;
  init.x0 = config.X0.value_or(Vec::Zero(n));
  init.V0 = config.V0.value_or(Mat(0.5 * Mat::Identity(n, n)));
  if (init.x0.size() != n || init.V0.rows() != n || init.V0.cols() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "initial moments must have dimension 2m");
  }
  return init;
}

// Conditional covariance on the step grid (4th-order steps, symmetrized).
std::vector<Mat> covariance_path(const DerivedMatrices& d, double eta,
                                 const Mat& V0, const Grid& grid) {
  const Mat Ct = d.C.transpose();
  auto rhs = [&](const Mat& V) -> Mat {
    const Mat gain = V * Ct + d.M;
    return d.A * V + V * d.A.transpose() + d.N -
           eta * (gain * gain.transpose());
  };
  std::vector<Mat> path(grid.steps + 1);
  Mat V = 0.5 * (V0 + V0.transpose());
  path[0] = V;
  for (long k = 0; k < grid.steps; ++k) {
    const double h = grid.h[k];
    const Mat k1 = rhs(V);
    const Mat k2 = rhs(V + 0.5 * h * k1);
    const Mat k3 = rhs(V + 0.5 * h * k2);
    const Mat k4 = rhs(V + h * k3);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    V = 0.5 * (V + V.transpose()).eval();
    if (!V.allFinite() || V.norm() > 1e12) {
      throw Error(ErrorCode::kStepSizeTooLarge,
                  "conditional covariance diverged at t = " +
                      std::to_string(grid.t[k + 1]));
    }
    path[k + 1] = V;
  }
  return path;
}

// Unconditional covariance (no information gain) on the same grid.
std::vector<Mat> lyapunov_path(const DerivedMatrices& d, const Mat& V0,
                               const Grid& grid) {
  auto rhs = [&](const Mat& V) -> Mat {
    return d.A * V + V * d.A.transpose() + d.N;
  };
  std::vector<Mat> path(grid.steps + 1);
  Mat V = 0.5 * (V0 + V0.transpose());
  path[0] = V;
  for (long k = 0; k < grid.steps; ++k) {
    const double h = grid.h[k];
    const Mat k1 = rhs(V);
    const Mat k2 = rhs(V + 0.5 * h * k1);
    const Mat k3 = rhs(V + 0.5 * h * k2);
    const Mat k4 = rhs(V + h * k3);
    V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    V = 0.5 * (V + V.transpose()).eval();
    if (!V.allFinite() || V.norm() > 1e12) {
      throw Error(ErrorCode::kStepSizeTooLarge,
                  "unconditional covariance diverged at t = " +
                      std::to_string(grid.t[k + 1]));
    }
    path[k + 1] = V;
  }
  return path;
}

struct ResolvedFeedback {
  FeedbackMode mode = FeedbackMode::kNone;
  GainSchedule schedule = GainSchedule::kFixedSteady;
  Mat BF;  // fixed-schedule product, 2m x m
};

ResolvedFeedback resolve_feedback(const SystemSpec& spec,
                                  const SimConfig& config) {
  const Eigen::Index n = 2 * spec.m;
  ResolvedFeedback fb;
  fb.mode = config.feedback.mode;
  fb.schedule = config.feedback.schedule;
  if (fb.mode == FeedbackMode::kNone) {
    fb.BF = Mat::Zero(n, spec.m);
    return fb;
  }
  if (fb.schedule == GainSchedule::kTracking) {
    if (config.feedback.B || config.feedback.F) {
      throw Error(ErrorCode::kInvalidInput,
                  "the tracking schedule derives its own canceling gain; "
                  "drop the explicit B/F or use the fixed schedule");
    }
    fb.BF = Mat::Zero(n, spec.m);  // per-step gain built from V_t
    return fb;
  }
  if (config.feedback.B && config.feedback.F) {
    const Mat& B = *config.feedback.B;
    const Mat& F = *config.feedback.F;
    if (B.rows() != n || B.cols() != spec.m || F.rows() != spec.m ||
        F.cols() != spec.m) {
      throw Error(ErrorCode::kInvalidInput,
                  "feedback B must be 2m x m and F must be m x m");
    }
    fb.BF = B * F;
    return fb;
  }
  if (config.feedback.B || config.feedback.F) {
    throw Error(ErrorCode::kInvalidInput,
                "feedback B and F must be given together");
  }
  // Canonical canceling gain needs the steady covariance.
  const SteadyStateReport rep = steady_state_verdict(spec);
  if (!rep.V) {
    if (!rep.detectable_CA.verdict) {
      throw Error(ErrorCode::kNotDetectable,
                  "canonical feedback needs a steady covariance, but the "
                  "pair [C, A] is not detectable");
    }
    throw Error(ErrorCode::kNotInDomRic,
                "canonical feedback needs a steady covariance: " +
                    rep.solver_error);
  }
  const FeedbackGain gain = feedback_gain(*rep.V, rep.d);
  fb.BF = gain.B * gain.F;
  return fb;
}

struct StepTables {
  std::vector<Mat> update;  // I + h_k (A + sqrt(eta) BF_k C)
  std::vector<Mat> noise;   // sqrt(h_k) (sqrt(eta)(V_k C^T + M) + BF_k)
};

StepTables make_tables(const DerivedMatrices& d, double eta, const Grid& grid,
                       const std::vector<Mat>& vpath,
                       const ResolvedFeedback& fb) {
  const Eigen::Index n = 2 * d.m;
  const double sqrt_eta = std::sqrt(eta);
  const Mat I = Mat::Identity(n, n);
  const Mat Ct = d.C.transpose();
  StepTables tables;
  tables.update.resize(grid.steps);
  tables.noise.resize(grid.steps);
  for (long k = 0; k < grid.steps; ++k) {
    Mat BFk;
    if (fb.mode == FeedbackMode::kMarkovian &&
        fb.schedule == GainSchedule::kTracking) {
      BFk = -(vpath[k] * Ct + d.M);
    } else {
      BFk = fb.BF;
    }
    const Mat innovation_gain = sqrt_eta * (vpath[k] * Ct + d.M);
    tables.update[k] = I + grid.h[k] * (d.A + sqrt_eta * (BFk * d.C));
    tables.noise[k] = std::sqrt(grid.h[k]) * (innovation_gain + BFk);
  }
  return tables;
}

struct BlockAccumulators {
  // [block][sample], flattened: block-major
  std::vector<Vec> sum_x;
  std::vector<Mat> sum_xx;
};

// One slot per block so worker threads never share error state.
struct EnsembleError {
  bool failed = false;
  std::string message;
};

void run_block(long block, long n_traj, const Grid& grid,
               const StepTables& tables, const Vec& x0, std::uint64_t seed,
               Eigen::Index m, int store_trajectories,
               BlockAccumulators& acc, std::vector<Trajectory>& stored,
               EnsembleError& err) {
  const Eigen::Index n = x0.size();
  const auto n_samples = static_cast<long>(grid.samples.size());
  const long begin = block * kBlock;
  const long end = std::min<long>(begin + kBlock, n_traj);

  Vec x(n), xnext(n), xi(m);
  for (long idx = begin; idx < end; ++idx) {
    std::mt19937_64 rng(trajectory_seed(seed, static_cast<std::uint64_t>(idx)));
    std::normal_distribution<double> normal(0.0, 1.0);
    x = x0;
    long sp = 0;
    auto record = [&](long step, const Vec& value) {
      if (sp < n_samples && grid.samples[sp] == step) {
        acc.sum_x[block * n_samples + sp] += value;
        acc.sum_xx[block * n_samples + sp] += value * value.transpose();
        if (idx < store_trajectories) {
          stored[idx].t.push_back(grid.t[step]);
          stored[idx].mean.push_back(value);
        }
        ++sp;
      }
    };
    record(0, x);
    for (long k = 0; k < grid.steps; ++k) {
      for (Eigen::Index c = 0; c < m; ++c) {
        xi(c) = normal(rng);
      }
      xnext.noalias() = tables.update[k] * x;
      xnext.noalias() += tables.noise[k] * xi;
      x.swap(xnext);
      if (sp < n_samples && grid.samples[sp] == k + 1) {
        if (!x.allFinite() || x.norm() > 1e9) {
          err.failed = true;
          err.message = "trajectory " + std::to_string(idx) +
                        " diverged near t = " + std::to_string(grid.t[k + 1]);
          return;
        }
        record(k + 1, x);
      }
    }
  }
}

}  // namespace

ConditionalRun simulate_conditional(const SystemSpec& spec,
                                    const SimConfig& config) {
  if (config.n_traj <= 0) {
    throw Error(ErrorCode::kInvalidInput, "n_traj must be positive");
  }
  const DerivedMatrices d = derive_matrices(spec);
  const Eigen::Index n = 2 * spec.m;
  const Grid grid = make_grid(config.T, config.dt, config.max_samples);
  const InitialMoments init = resolve_initial(spec, config);
  const ResolvedFeedback fb = resolve_feedback(spec, config);
  const std::vector<Mat> vpath = covariance_path(d, spec.eta, init.V0, grid);
  const StepTables tables = make_tables(d, spec.eta, grid, vpath, fb);

  const long n_traj = config.n_traj;
  const long n_blocks = (n_traj + kBlock - 1) / kBlock;
  const auto n_samples = static_cast<long>(grid.samples.size());
  const int store = std::min<long>(config.store_trajectories, n_traj);

  BlockAccumulators acc;
  acc.sum_x.assign(n_blocks * n_samples, Vec::Zero(n));
  acc.sum_xx.assign(n_blocks * n_samples, Mat::Zero(n, n));
  std::vector<Trajectory> stored(store);
  std::vector<EnsembleError> errors(n_blocks);

  bool used_parallel = false;
#ifdef _OPENMP
  if (config.parallel) {
    used_parallel = true;
#pragma omp parallel for schedule(dynamic, 1)
    for (long b = 0; b < n_blocks; ++b) {
      run_block(b, n_traj, grid, tables, init.x0, config.seed, spec.m, store,
                acc, stored, errors[b]);
    }
  }
#endif
  if (!used_parallel) {
    for (long b = 0; b < n_blocks; ++b) {
      run_block(b, n_traj, grid, tables, init.x0, config.seed, spec.m, store,
                acc, stored, errors[b]);
      if (errors[b].failed) {
        break;
      }
    }
  }
  for (const EnsembleError& err : errors) {
    if (err.failed) {
      throw Error(ErrorCode::kNonFiniteState, err.message);
    }
  }

  // Fixed-order merge: block 0, 1, ... for every sample.
  ConditionalRun run;
  run.used_parallel = used_parallel;
  run.feedback_mode = fb.mode;
  run.gain_schedule = fb.schedule;
  const double inv_n = 1.0 / static_cast<double>(n_traj);
  for (long j = 0; j < n_samples; ++j) {
    Vec sx = Vec::Zero(n);
    Mat sxx = Mat::Zero(n, n);
    for (long b = 0; b < n_blocks; ++b) {
      sx += acc.sum_x[b * n_samples + j];
      sxx += acc.sum_xx[b * n_samples + j];
    }
    const Vec mean = inv_n * sx;
    Mat Sigma = inv_n * sxx - mean * mean.transpose();
    Sigma = 0.5 * (Sigma + Sigma.transpose()).eval();
    run.series.t.push_back(grid.t[grid.samples[j]]);
    run.series.mean.push_back(mean);
    run.series.Sigma.push_back(Sigma);
    run.series.Vc.push_back(vpath[grid.samples[j]]);
  }
  run.trajectories = std::move(stored);

  run.stats.mean_of_means = run.series.mean.back();
  run.stats.Sigma = run.series.Sigma.back();
  run.stats.Vc_final = run.series.Vc.back();
  run.stats.Vunc_ensemble = run.stats.Vc_final + run.stats.Sigma;
  run.stats.n_traj = config.n_traj;
  run.stats.T = config.T;
  run.stats.mean_standard_error =
      (run.stats.Sigma.diagonal() * inv_n).cwiseMax(0.0).cwiseSqrt();
  if (fb.mode == FeedbackMode::kNone) {
    run.stats.Vunc_deterministic =
        lyapunov_path(d, init.V0, grid).back();
  }
  return run;
}

DeterministicRun simulate_unconditional(const SystemSpec& spec,
                                        const SimConfig& config) {
  const DerivedMatrices d = derive_matrices(spec);
  const Grid grid = make_grid(config.T, config.dt, config.max_samples);
  const InitialMoments init = resolve_initial(spec, config);
  const std::vector<Mat> vpath = lyapunov_path(d, init.V0, grid);

  DeterministicRun run;
  Vec x = init.x0;
  std::vector<Vec> means(grid.steps + 1);
  means[0] = x;
  for (long k = 0; k < grid.steps; ++k) {
    const double h = grid.h[k];
    const Vec k1 = d.A * x;
    const Vec k2 = d.A * (x + 0.5 * h * k1);
    const Vec k3 = d.A * (x + 0.5 * h * k2);
    const Vec k4 = d.A * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    means[k + 1] = x;
  }
  for (long s : grid.samples) {
    run.t.push_back(grid.t[s]);
    run.mean.push_back(means[s]);
    run.V.push_back(vpath[s]);
  }
  return run;
}

Trajectory simulate_closed_loop_mean(const SystemSpec& spec,
                                     const Mat& V_steady,
                                     const SimConfig& config) {
  const DerivedMatrices d = derive_matrices(spec);
  const Grid grid = make_grid(config.T, config.dt, config.max_samples);
  const InitialMoments init = resolve_initial(spec, config);
  const FeedbackGain gain = feedback_gain(V_steady, d);
  const double sqrt_eta = std::sqrt(spec.eta);
  const Mat D = d.A + sqrt_eta * (gain.B * gain.F * d.C);

  Trajectory traj;
  Vec x = init.x0;
  std::vector<Vec> means(grid.steps + 1);
  means[0] = x;
  for (long k = 0; k < grid.steps; ++k) {
    const double h = grid.h[k];
    const Vec k1 = D * x;
    const Vec k2 = D * (x + 0.5 * h * k1);
    const Vec k3 = D * (x + 0.5 * h * k2);
    const Vec k4 = D * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    means[k + 1] = x;
  }
  for (long s : grid.samples) {
    traj.t.push_back(grid.t[s]);
    traj.mean.push_back(means[s]);
  }
  return traj;
}

}  // namespace gsp
