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

#ifndef GSPREP_SYSTEM_MODEL_HPP_
#define GSPREP_SYSTEM_MODEL_HPP_

#include <Eigen/Dense>
#include <complex>

#include "gsprep/errors.hpp"

namespace gsp {

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Cplx = std::complex<double>;

/// Continuously monitored linear bosonic system with m modes, quadrature
/// ordering (q_1..q_m, p_1..p_m).
///
///   - G:      2m x 2m real symmetric Hamiltonian kernel.
///   - Lambda: m x 2m complex coupling of the m measurement channels.
///   - K:      2m x m complex drive coupling for the control input u.
///   - eta:    detector efficiency in (0, 1].
struct SystemSpec {
  Eigen::Index m = 0;
  Mat G;
  CMat Lambda;
  CMat K;
  double eta = 1.0;

  /// Validates dimensions, symmetry of G, and the efficiency range.
  /// Throws Error(kInvalidInput) on violation.
  static SystemSpec validated(Eigen::Index m, Mat G, CMat Lambda, CMat K,
                              double eta = 1.0);
};

/// Real matrices of the moment equations, all derived from a SystemSpec:
///
///   dXbar = (A Xbar + B u) dt + sqrt(eta) (V C^T + M) dw
///   dV/dt = A V + V A^T + N - eta (V C^T + M)(V C^T + M)^T
///
/// R and Im are the real and imaginary parts of Lambda; C = 2 R.
struct DerivedMatrices {
  Eigen::Index m = 0;
  double eta = 1.0;
  Mat J;   // 2m x 2m symplectic form
  Mat A;   // 2m x 2m drift
  Mat B;   // 2m x m  drive
  Mat C;   // m x 2m  measured quadrature map
  Mat M;   // 2m x m  measurement back-action cross term
  Mat N;   // 2m x 2m diffusion
  Mat R;   // m x 2m
  Mat Im;  // m x 2m
};

/// First and second moments of a Gaussian state. cov is kept symmetric;
/// construction rejects asymmetry beyond 1e-10 * ||cov||.
struct GaussianMoments {
  Vec mean;
  Mat cov;

  static GaussianMoments validated(Vec mean, Mat cov);
};

/// J = [[0, I], [-I, 0]] in the (q.., p..) ordering.
Mat symplectic_form(Eigen::Index m);

/// Computes A, B, C, M, N from the system parameters. The complex
/// intermediates must be real up to a 1e-12 relative residue; a larger
/// imaginary remainder indicates inconsistent inputs and throws.
DerivedMatrices derive_matrices(const SystemSpec& spec);

/// Gaussian phase-space density at point x.
double wigner_density(const GaussianMoments& state, const Vec& x);

/// Tr[rho^2] = 1 / (2^m sqrt(det V)). Requires V positive definite.
double purity(const Mat& V, Eigen::Index m);

}  // namespace gsp

#endif  // GSPREP_SYSTEM_MODEL_HPP_
