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

#include "gsprep/cross_check.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <string>

namespace gsp::crosscheck {

namespace {

double max_real_eigenvalue(const CMat& F) {
  Eigen::ComplexEigenSolver<CMat> eig(F, /*computeEigenvectors=*/false);
  return eig.eigenvalues().real().maxCoeff();
}

CMat residual(const RiccatiProblem& p, const CMat& X) {
  return p.F.adjoint() * X + X * p.F + X * p.P * X + p.Kc;
}

// Integrates dX/dt = residual(X) from 0 until F + P X is Hurwitz with a
// margin. The flow converges for solvable instances; the margin only has to
// be good enough to put Newton in its contraction region.
CMat stabilizing_start(const RiccatiProblem& p) {
  const Eigen::Index n = p.F.rows();
  CMat X = CMat::Zero(n, n);
  if (max_real_eigenvalue(p.F) < -1e-9) {
    return X;
  }
  const double fnorm = std::max(1.0, p.F.norm());
  const double h = 0.05 / fnorm;
  const int max_steps = 400000;
  for (int k = 0; k < max_steps; ++k) {
    const CMat k1 = residual(p, X);
    const CMat k2 = residual(p, X + 0.5 * h * k1);
    const CMat k3 = residual(p, X + 0.5 * h * k2);
    const CMat k4 = residual(p, X + h * k3);
    X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    X = 0.5 * (X + X.adjoint()).eval();
    if (!X.allFinite()) {
      throw Error(ErrorCode::kNonFiniteState,
                  "stabilizing flow diverged in the cross-check solver");
    }
    if (k % 25 == 24 &&
        max_real_eigenvalue(p.F + p.P * X) < -1e-6 * fnorm) {
      return X;
    }
  }
  throw Error(ErrorCode::kNotInDomRic,
              "cross-check flow found no stabilizing start");
}

}  // namespace

CMat solve_lyapunov_complex(const CMat& F, const CMat& Q) {
  const Eigen::Index n = F.rows();
  if (F.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "Lyapunov operands must be square");
  }
  // vec(F^dag X + X F) = (I (x) F^dag + F^T (x) I) vec(X), column-major.
  CMat op = CMat::Zero(n * n, n * n);
  const CMat Fd = F.adjoint();
  for (Eigen::Index i = 0; i < n; ++i) {
    op.block(i * n, i * n, n, n) += Fd;
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) +=
          F(j, i) * CMat::Identity(n, n);  // (F^T)(i, j) = F(j, i)
    }
  }
  CVec rhs = -Eigen::Map<const CVec>(Q.data(), n * n);
  CVec x = op.partialPivLu().solve(rhs);
  CMat X = Eigen::Map<const CMat>(x.data(), n, n);
  return 0.5 * (X + X.adjoint());
}

CMat newton_kleinman_are(const RiccatiProblem& prob, double tol,
                         int max_iter) {
  CMat X = stabilizing_start(prob);
  double prev_delta = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const CMat Fk = prob.F + prob.P * X;
    // X_{k+1} solves Fk^dag X + X Fk + (Kc - X_k P X_k) = 0.
    const CMat Xn = solve_lyapunov_complex(Fk, prob.Kc - X * prob.P * X);
    const double delta = (Xn - X).norm();
    X = Xn;
    if (delta <= tol * std::max(1.0, X.norm())) {
      break;
    }
    // Steps that stop shrinking while already tiny are rounding noise, not
    // progress; the algebraic residual below is the real acceptance test.
    if (delta >= 0.5 * prev_delta && delta <= 1e-9 * std::max(1.0, X.norm())) {
      break;
    }
    prev_delta = delta;
  }
  const double res = residual(prob, X).norm();
  const double scale =
      std::max({1.0, X.norm(), prob.F.norm(), prob.Kc.norm()});
  if (res > 1e-8 * scale) {
    throw Error(ErrorCode::kNotInDomRic,
                "cross-check Newton stalled at residual " +
                    std::to_string(res));
  }
  return X;
}

}  // namespace gsp::crosscheck
