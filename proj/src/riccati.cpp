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

#include "gsprep/riccati.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gsp {

namespace {

constexpr double kAxisTolRel = 1e-8;   // axis distance, relative to ||H||
constexpr double kCondMax = 1e10;      // usable subspace basis limit
constexpr double kRankTolRel = 1e-8;   // rank-test sigma threshold

double hermitian_asymmetry(const CMat& Z) {
  return (Z - Z.adjoint()).cwiseAbs().maxCoeff();
}

// Unitary plane rotation [[c, s], [-conj(s), c]] with real c >= 0 that maps
// (f, g) to (r, 0).
struct PlaneRotation {
  double c;
  Cplx s;
};

PlaneRotation make_rotation(Cplx f, Cplx g) {
  const double af = std::abs(f);
  const double ag = std::abs(g);
  if (ag == 0.0) {
    return {1.0, Cplx(0.0, 0.0)};
  }
  if (af == 0.0) {
    return {0.0, std::conj(g) / ag};
  }
  const double d = std::hypot(af, ag);
  const Cplx phase = f / af;
  return {af / d, phase * std::conj(g) / d};
}

// Swaps the diagonal entries at (k, k) and (k+1, k+1) of the upper
// triangular T by a unitary similarity, accumulating into U. Keeps
// U T U^dag invariant; T stays upper triangular.
void swap_adjacent(CMat& T, CMat& U, Eigen::Index k) {
  const Eigen::Index n = T.rows();
  const Cplx a = T(k, k);
  const Cplx c = T(k + 1, k + 1);
  const Cplx b = T(k, k + 1);
  // (b, c - a) spans the eigenvector of the 2x2 block for eigenvalue c.
  const PlaneRotation g = make_rotation(b, c - a);
  if (g.s == Cplx(0.0, 0.0)) {
    return;  // equal eigenvalues: order is immaterial
  }
  for (Eigen::Index j = k; j < n; ++j) {
    const Cplx x = T(k, j);
    const Cplx y = T(k + 1, j);
    T(k, j) = g.c * x + g.s * y;
    T(k + 1, j) = -std::conj(g.s) * x + g.c * y;
  }
  for (Eigen::Index i = 0; i <= k + 1; ++i) {
    const Cplx x = T(i, k);
    const Cplx y = T(i, k + 1);
    T(i, k) = g.c * x + std::conj(g.s) * y;
    T(i, k + 1) = -g.s * x + g.c * y;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cplx x = U(i, k);
    const Cplx y = U(i, k + 1);
    U(i, k) = g.c * x + std::conj(g.s) * y;
    U(i, k + 1) = -g.s * x + g.c * y;
  }
  T(k + 1, k) = Cplx(0.0, 0.0);
}

// Selection sort on the Schur diagonal: bubble every eigenvalue with
// Re < 0 to the leading block, preserving relative order elsewhere.
Eigen::Index reorder_stable_first(CMat& T, CMat& U) {
  const Eigen::Index n = T.rows();
  Eigen::Index next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (T(i, i).real() < 0.0) {
      for (Eigen::Index k = i; k > next; --k) {
        swap_adjacent(T, U, k - 1);
      }
      ++next;
    }
  }
  return next;
}

struct SubspaceDecomposition {
  CMat T;
  CMat U;
  CVec spectrum;          // reordered diagonal, stable block first
  Eigen::Index n_stable;  // eigenvalues with Re < 0
  double min_axis;        // min |Re lambda|
  double sv_min;          // extreme singular values of X1
  double sv_max;
  double condition;       // sv_max / sv_min
};

SubspaceDecomposition decompose(const RiccatiProblem& prob) {
  const CMat H = build_hamiltonian(prob);
  const Eigen::Index n = prob.F.rows();
  Eigen::ComplexSchur<CMat> schur(H);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotInDomRic, "Schur iteration did not converge");
  }
  SubspaceDecomposition s;
  s.T = schur.matrixT();
  s.U = schur.matrixU();
  s.n_stable = reorder_stable_first(s.T, s.U);
  s.spectrum = s.T.diagonal();
  s.min_axis = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.spectrum.size(); ++i) {
    s.min_axis = std::min(s.min_axis, std::abs(s.spectrum(i).real()));
  }
  s.sv_min = 0.0;
  s.sv_max = 0.0;
  s.condition = std::numeric_limits<double>::infinity();
  if (s.n_stable == n) {
    Eigen::JacobiSVD<CMat> svd(s.U.topLeftCorner(n, n));
    s.sv_max = svd.singularValues()(0);
    s.sv_min = svd.singularValues()(n - 1);
    if (s.sv_min > 0.0) {
      s.condition = s.sv_max / s.sv_min;
    }
  }
  return s;
}

// Eigenvector rank test for the pair [P, F^dag]: every eigenvalue of F^dag
// in the closed right half plane must keep [F^dag - lambda I; P] at full
// column rank. Local mirror of the certificate in analysis.cpp, kept here
// so this module stays below it in the layering.
bool pair_detectable(const CMat& P, const CMat& Fd) {
  const Eigen::Index n = Fd.rows();
  const double scale = std::max(1.0, Fd.norm());
  const double sigma_scale = std::max({1.0, Fd.norm(), P.norm()});
  Eigen::ComplexEigenSolver<CMat> eig(Fd, /*computeEigenvectors=*/false);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cplx lambda = eig.eigenvalues()(i);
    if (lambda.real() < -kAxisTolRel * scale) {
      continue;
    }
    CMat stacked(n + P.rows(), n);
    stacked.topRows(n) = Fd - lambda * CMat::Identity(n, n);
    stacked.bottomRows(P.rows()) = P;
    Eigen::JacobiSVD<CMat> svd(stacked);
    if (svd.singularValues()(n - 1) <= kRankTolRel * sigma_scale) {
      return false;
    }
  }
  return true;
}

}  // namespace

RiccatiProblem RiccatiProblem::validated(CMat F, CMat P, CMat Kc) {
  const Eigen::Index n = F.rows();
  if (n == 0 || F.cols() != n || P.rows() != n || P.cols() != n ||
      Kc.rows() != n || Kc.cols() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "Riccati coefficient matrices must be square and congruent");
  }
  const double pscale = std::max(1.0, P.cwiseAbs().maxCoeff());
  const double kscale = std::max(1.0, Kc.cwiseAbs().maxCoeff());
  if (hermitian_asymmetry(P) > 1e-12 * pscale) {
    throw Error(ErrorCode::kInvalidInput, "P must be Hermitian");
  }
  if (hermitian_asymmetry(Kc) > 1e-12 * kscale) {
    throw Error(ErrorCode::kInvalidInput, "Kc must be Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (P + P.adjoint()),
                                          Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  const double tol = 1e-10 * pscale;
  if (lo < -tol && hi > tol) {
    throw Error(ErrorCode::kIndefiniteQuadraticTerm,
                "P must be positive or negative semidefinite");
  }
  RiccatiProblem prob;
  prob.F = std::move(F);
  prob.P = 0.5 * (P + P.adjoint());
  prob.Kc = 0.5 * (Kc + Kc.adjoint());
  return prob;
}

CMat build_hamiltonian(const RiccatiProblem& prob) {
  const Eigen::Index n = prob.F.rows();
  CMat H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = prob.F;
  H.topRightCorner(n, n) = prob.P;
  H.bottomLeftCorner(n, n) = -prob.Kc;
  H.bottomRightCorner(n, n) = -prob.F.adjoint();
  return H;
}

DomRicReport dom_ric_check(const RiccatiProblem& prob) {
  const Eigen::Index n = prob.F.rows();
  const SubspaceDecomposition s = decompose(prob);
  const double hnorm = std::max(1.0, build_hamiltonian(prob).norm());

  DomRicReport report;
  report.min_axis_distance = s.min_axis;
  report.imaginary_axis_free = s.min_axis > kAxisTolRel * hnorm;
  report.subspace_condition = s.condition;
  report.complementary =
      s.n_stable == n && s.sv_min > 1e-14 * std::max(s.sv_max, 1e-300);
  report.detectable_pair = pair_detectable(prob.P, prob.F.adjoint());
  return report;
}

RiccatiSolution solve_are(const RiccatiProblem& prob, bool strict) {
  const Eigen::Index n = prob.F.rows();
  const SubspaceDecomposition s = decompose(prob);
  const double hnorm = std::max(1.0, build_hamiltonian(prob).norm());

  if (s.min_axis <= kAxisTolRel * hnorm) {
    throw Error(ErrorCode::kNotInDomRic,
                "Hamiltonian eigenvalue within tolerance of the imaginary "
                "axis (min |Re| = " +
                    std::to_string(s.min_axis) + ")");
  }
  if (s.n_stable != n) {
    throw Error(ErrorCode::kNotInDomRic,
                "stable invariant subspace has dimension " +
                    std::to_string(s.n_stable) + ", expected " +
                    std::to_string(n));
  }
  if (!(s.sv_min > 1e-14 * std::max(s.sv_max, 1e-300))) {
    throw Error(ErrorCode::kNotInDomRic,
                "stable subspace is not complementary (X1 singular)");
  }
  const bool ill = s.condition >= kCondMax;
  if (ill && strict) {
    throw Error(ErrorCode::kIllConditionedSubspace,
                "cond(X1) = " + std::to_string(s.condition));
  }

  const CMat X1 = s.U.topLeftCorner(n, n);
  const CMat X2 = s.U.bottomLeftCorner(n, n);
  // X X1 = X2  <=>  X1^T X^T = X2^T (plain transposes).
  CMat X = X1.transpose()
               .partialPivLu()
               .solve(X2.transpose())
               .transpose();
  X = 0.5 * (X + X.adjoint()).eval();

  RiccatiSolution sol;
  sol.X = X;
  sol.hamiltonian_spectrum = s.spectrum;
  sol.subspace_condition = s.condition;
  sol.ill_conditioned = ill;
  sol.residual =
      (prob.F.adjoint() * X + X * prob.F + X * prob.P * X + prob.Kc).norm();
  Eigen::ComplexEigenSolver<CMat> eig(prob.F + prob.P * X,
                                      /*computeEigenvectors=*/false);
  sol.closed_loop_spectrum = eig.eigenvalues();
  return sol;
}

Mat solve_lyapunov(const Mat& A, const Mat& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "Lyapunov operands must be square");
  }
  const double qscale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * qscale) {
    throw Error(ErrorCode::kInvalidInput, "Q must be symmetric");
  }
  Eigen::EigenSolver<Mat> eig(A, /*computeEigenvectors=*/false);
  const double max_re = eig.eigenvalues().real().maxCoeff();
  if (!(max_re < 0.0)) {
    throw Error(ErrorCode::kUnstableDrift,
                "drift is not Hurwitz (max Re lambda = " +
                    std::to_string(max_re) + ")");
  }
  // vec(A V) + vec(V A^T) = (I (x) A + A (x) I) vec(V), column-major.
  Mat op = Mat::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    op.block(i * n, i * n, n, n) += A;
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) +=
          A(i, j) * Mat::Identity(n, n);
    }
  }
  Vec rhs = -Eigen::Map<const Vec>(Q.data(), n * n);
  Vec v = op.partialPivLu().solve(rhs);
  Mat V = Eigen::Map<const Mat>(v.data(), n, n);
  return 0.5 * (V + V.transpose());
}

namespace {

Mat riccati_rhs(const Mat& A, const Mat& N, const Mat& Ct, const Mat& M,
                double eta, const Mat& V) {
  const Mat gain = V * Ct + M;
  return A * V + V * A.transpose() + N - eta * (gain * gain.transpose());
}

void guard_state(const Mat& V, double t) {
  if (!V.allFinite()) {
    throw Error(ErrorCode::kNonFiniteState,
                "covariance became non-finite at t = " + std::to_string(t));
  }
  if (V.norm() > 1e12) {
    throw Error(ErrorCode::kStepSizeTooLarge,
                "covariance norm exceeded 1e12 at t = " + std::to_string(t) +
                    "; the flow is diverging or the step is too large");
  }
}

}  // namespace

CovarianceSeries integrate_riccati_ode(const DerivedMatrices& d, double eta,
                                       const Mat& V0, double T, double dt,
                                       StepMode mode) {
  const Eigen::Index n = 2 * d.m;
  if (V0.rows() != n || V0.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "V0 must be 2m x 2m");
  }
  if (!(T > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::kInvalidInput, "T and dt must be positive");
  }
  if (!(eta > 0.0) || eta > 1.0) {
    throw Error(ErrorCode::kInvalidInput, "eta must lie in (0, 1]");
  }
  const Mat Ct = d.C.transpose();
  auto f = [&](const Mat& V) { return riccati_rhs(d.A, d.N, Ct, d.M, eta, V); };

  CovarianceSeries out;
  Mat V = 0.5 * (V0 + V0.transpose());
  out.t.push_back(0.0);
  out.V.push_back(V);

  if (mode == StepMode::kFixed) {
    const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    double t = 0.0;
    for (long k = 0; k < steps; ++k) {
      const double h = std::min(dt, T - t);
      const Mat k1 = f(V);
      const Mat k2 = f(V + 0.5 * h * k1);
      const Mat k3 = f(V + 0.5 * h * k2);
      const Mat k4 = f(V + h * k3);
      V += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      V = 0.5 * (V + V.transpose()).eval();
      t = (k + 1 == steps) ? T : t + h;
      guard_state(V, t);
      out.t.push_back(t);
      out.V.push_back(V);
    }
    return out;
  }

  // Embedded 5(4) pair (Dormand-Prince coefficients), matrix-valued state,
  // Frobenius-norm error control.
  constexpr double rtol = 1e-10;
  constexpr double atol = 1e-12;
  double t = 0.0;
  double h = std::min(dt, T);
  int consecutive_rejects = 0;
  while (t < T) {
    h = std::min(h, T - t);
    if (h < 1e-14 * std::max(1.0, T)) {
      throw Error(ErrorCode::kStepSizeTooLarge,
                  "adaptive step underflow at t = " + std::to_string(t));
    }
    const Mat k1 = f(V);
    const Mat k2 = f(V + h * (1.0 / 5.0) * k1);
    const Mat k3 = f(V + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
    const Mat k4 =
        f(V + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
    const Mat k5 =
        f(V + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                   64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
    const Mat k6 =
        f(V + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                   46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                   5103.0 / 18656.0 * k5));
    const Mat y5 = V + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                            125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                            11.0 / 84.0 * k6);
    const Mat k7 = f(y5);
    const Mat err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 +
                         71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5 +
                         22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);
    const double scale =
        atol + rtol * std::max({V.norm(), y5.norm(), 1e-30});
    const double err_ratio = err.norm() / scale;
    if (err_ratio <= 1.0) {
      t += h;
      V = 0.5 * (y5 + y5.transpose());
      guard_state(V, t);
      out.t.push_back(t);
      out.V.push_back(V);
      consecutive_rejects = 0;
    } else if (++consecutive_rejects > 60) {
      throw Error(ErrorCode::kStepSizeTooLarge,
                  "step control stalled at t = " + std::to_string(t));
    }
    const double factor =
        0.9 * std::pow(std::max(err_ratio, 1e-10), -0.2);
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return out;
}

}  // namespace gsp
