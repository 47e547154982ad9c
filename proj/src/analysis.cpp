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

#include "gsprep/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace gsp {

namespace {

constexpr double kAxisTolRel = 1e-8;
constexpr double kRankTolRel = 1e-8;

double spectral_axis_tol(const CMat& Am) {
  return kAxisTolRel * std::max(1.0, Am.norm());
}

struct RankProbe {
  double sigma_scaled;
  CVec direction;
};

// Smallest singular value of [Am - lambda I; Cm], scaled by the pair norm,
// with the corresponding right singular direction.
RankProbe stacked_rank_probe(const CMat& Cm, const CMat& Am, Cplx lambda) {
  const Eigen::Index n = Am.rows();
  const double sigma_scale = std::max({1.0, Am.norm(), Cm.norm()});
  CMat stacked(n + Cm.rows(), n);
  stacked.topRows(n) = Am - lambda * CMat::Identity(n, n);
  stacked.bottomRows(Cm.rows()) = Cm;
  Eigen::JacobiSVD<CMat> svd(stacked, Eigen::ComputeThinV);
  return {svd.singularValues()(n - 1) / sigma_scale, svd.matrixV().col(n - 1)};
}

// Shared eigenvalue sweep: probes every eigenvalue of Am selected by `pick`
// and returns the minimum scaled sigma with its witness.
Certificate sweep_eigenvalues(const CMat& Cm, const CMat& Am, bool axis_only) {
  const Eigen::Index n = Am.rows();
  if (Cm.cols() != n || Am.cols() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "pair dimensions: Cm must be p x n, Am must be n x n");
  }
  const double axis_tol = spectral_axis_tol(Am);
  Eigen::ComplexEigenSolver<CMat> eig(Am, /*computeEigenvectors=*/false);

  Certificate cert;
  cert.margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cplx lambda = eig.eigenvalues()(i);
    const bool in_sweep = axis_only ? std::abs(lambda.real()) <= axis_tol
                                    : lambda.real() >= -axis_tol;
    if (!in_sweep) {
      continue;
    }
    const RankProbe probe = stacked_rank_probe(Cm, Am, lambda);
    if (probe.sigma_scaled < cert.margin) {
      cert.margin = probe.sigma_scaled;
      cert.witness_eigenvalue = lambda;
      cert.witness_direction = probe.direction;
    }
  }
  return cert;
}

CVec eigenvalues_of(const Mat& A) {
  Eigen::EigenSolver<Mat> eig(A, /*computeEigenvectors=*/false);
  return eig.eigenvalues();
}

}  // namespace

Certificate is_detectable(const CMat& Cm, const CMat& Am) {
  Certificate cert = sweep_eigenvalues(Cm, Am, /*axis_only=*/false);
  cert.verdict = cert.margin > kRankTolRel;
  if (cert.verdict) {
    // evidence is only attached to failures
    cert.witness_eigenvalue.reset();
    cert.witness_direction.reset();
  }
  return cert;
}

Certificate is_detectable(const Mat& Cm, const Mat& Am) {
  return is_detectable(CMat(Cm.cast<Cplx>()), CMat(Am.cast<Cplx>()));
}

Certificate has_imaginary_unobservable_mode(const CMat& Cm, const CMat& Am) {
  Certificate cert = sweep_eigenvalues(Cm, Am, /*axis_only=*/true);
  cert.verdict = cert.margin <= kRankTolRel;  // true = a mode is hidden
  if (!cert.verdict) {
    cert.witness_eigenvalue.reset();
    cert.witness_direction.reset();
  }
  return cert;
}

AxisModeEquivalence axis_mode_equivalence(const DerivedMatrices& d) {
  const Mat Amc = d.A - d.M * d.C;

  AxisModeEquivalence eq;
  eq.pbh = has_imaginary_unobservable_mode(
      CMat((d.C * d.J.transpose()).cast<Cplx>()),
      CMat(Amc.transpose().cast<Cplx>()));
  eq.axis_unobservable_mode = eq.pbh.verdict;

  const CMat drift = Amc.cast<Cplx>() -
                     Cplx(0.0, 0.5) * (d.J * d.C.transpose() * d.C).cast<Cplx>();
  Eigen::ComplexEigenSolver<CMat> eig(drift, /*computeEigenvectors=*/false);
  eq.min_axis_distance = eig.eigenvalues().real().cwiseAbs().minCoeff();
  eq.axis_closed_loop_eigenvalue =
      eq.min_axis_distance <= spectral_axis_tol(drift);
  return eq;
}

Certificate heisenberg_certificate(const Mat& V, const Mat& J) {
  const Eigen::Index n = V.rows();
  if (J.rows() != n || J.cols() != n || V.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "V and J must be square, same size");
  }
  const CMat H = V.cast<Cplx>() + Cplx(0.0, 0.5) * J.cast<Cplx>();
  Eigen::SelfAdjointEigenSolver<CMat> eig(H);
  Certificate cert;
  cert.margin = eig.eigenvalues().minCoeff();
  cert.verdict = cert.margin >= -1e-9 * std::max(1.0, V.norm());
  if (!cert.verdict) {
    Eigen::Index idx = 0;
    eig.eigenvalues().minCoeff(&idx);
    cert.witness_eigenvalue = Cplx(eig.eigenvalues()(idx), 0.0);
    cert.witness_direction = eig.eigenvectors().col(idx);
  }
  return cert;
}

PurityReport is_pure(const Mat& V, Eigen::Index m) {
  if (V.rows() != 2 * m || V.cols() != 2 * m) {
    throw Error(ErrorCode::kInvalidInput, "covariance must be 2m x 2m");
  }
  const Mat J = symplectic_form(m);
  PurityReport rep;
  rep.residual =
      (J * V * J * V + 0.25 * Mat::Identity(2 * m, 2 * m)).norm();
  rep.pure = rep.residual <= 1e-9 * std::max(1.0, V.squaredNorm());
  try {
    rep.purity = purity(V, m);
  } catch (const Error&) {
    rep.purity = 0.0;
    rep.pure = false;
  }
  return rep;
}

SteadyPureResiduals unconditional_pure_conditions(const Mat& V_s,
                                                  const SystemSpec& spec) {
  const DerivedMatrices d = derive_matrices(spec);
  const Eigen::Index n = 2 * d.m;
  if (V_s.rows() != n || V_s.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "V_s must be 2m x 2m");
  }
  const CMat Vc = V_s.cast<Cplx>() + Cplx(0.0, 0.5) * d.J.cast<Cplx>();
  SteadyPureResiduals r;
  r.coupling = (Vc * spec.Lambda.transpose()).norm();
  r.hamiltonian = (d.J * spec.G * V_s + V_s * spec.G * d.J.transpose()).norm();
  r.innovation_gain = (V_s * d.C.transpose() + d.M).norm();
  return r;
}

PdFeasibilityReport unconditional_pd_feasibility(const Mat& G) {
  const Eigen::Index n = G.rows();
  if (G.cols() != n || n % 2 != 0 || n == 0) {
    throw Error(ErrorCode::kInvalidInput, "G must be 2m x 2m");
  }
  const Mat J = symplectic_form(n / 2);
  const Mat JG = J * G;

  // Orthonormal basis of symmetric matrices under the Frobenius inner
  // product; the map V -> J G V + V G J^T preserves symmetry.
  std::vector<Mat> basis;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Mat E = Mat::Zero(n, n);
      if (i == j) {
        E(i, i) = 1.0;
      } else {
        E(i, j) = inv_sqrt2;
        E(j, i) = inv_sqrt2;
      }
      basis.push_back(E);
    }
  }
  const auto s = static_cast<Eigen::Index>(basis.size());
  Mat L(s, s);
  for (Eigen::Index k = 0; k < s; ++k) {
    const Mat image = JG * basis[k] + basis[k] * JG.transpose();
    for (Eigen::Index r = 0; r < s; ++r) {
      L(r, k) = (basis[r].array() * image.array()).sum();
    }
  }
  Eigen::JacobiSVD<Mat> svd(L, Eigen::ComputeFullV);
  const double smax = svd.singularValues()(0);
  const double tol = 1e-10 * std::max(1.0, smax);

  PdFeasibilityReport rep;
  std::vector<Mat> null_basis;
  for (Eigen::Index k = 0; k < s; ++k) {
    if (svd.singularValues()(k) <= tol) {
      Mat V = Mat::Zero(n, n);
      for (Eigen::Index r = 0; r < s; ++r) {
        V += svd.matrixV()(r, k) * basis[r];
      }
      null_basis.push_back(V);
    }
  }
  rep.nullity = static_cast<Eigen::Index>(null_basis.size());

  if (null_basis.empty()) {
    rep.status = PdFeasibilityReport::Status::kInfeasible;
    rep.certified = true;
    return rep;
  }

  // A direction annihilated by every null-basis element is annihilated by
  // every solution; any solution is then singular and never PD.
  {
    Mat stacked(rep.nullity * n, n);
    for (Eigen::Index k = 0; k < rep.nullity; ++k) {
      stacked.middleRows(k * n, n) = null_basis[k];
    }
    Eigen::JacobiSVD<Mat> ksvd(stacked);
    const double ksmax = ksvd.singularValues()(0);
    if (ksvd.singularValues()(n - 1) <= 1e-10 * std::max(1.0, ksmax)) {
      rep.status = PdFeasibilityReport::Status::kInfeasible;
      rep.certified = true;
      return rep;
    }
  }

  auto definite_witness = [&](const Mat& V) -> std::optional<Mat> {
    Eigen::SelfAdjointEigenSolver<Mat> eig(V, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double scale = std::max(std::abs(lo), std::abs(hi));
    if (lo > 1e-10 * scale) return V;
    if (hi < -1e-10 * scale) return Mat(-V);
    return std::nullopt;
  };

  if (rep.nullity == 1) {
    if (auto w = definite_witness(null_basis[0])) {
      rep.status = PdFeasibilityReport::Status::kFeasible;
      rep.certified = true;
      rep.witness = *w;
    } else {
      // one-dimensional solution set spanned by an indefinite or singular
      // matrix: no scaling makes it PD
      rep.status = PdFeasibilityReport::Status::kInfeasible;
      rep.certified = true;
    }
    return rep;
  }

  // Higher-dimensional solution set: hunt for a PD combination. A found
  // witness certifies feasibility; exhausting draws certifies nothing.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const Mat& V : null_basis) {
    if (auto w = definite_witness(V)) {
      rep.status = PdFeasibilityReport::Status::kFeasible;
      rep.certified = true;
      rep.witness = *w;
      return rep;
    }
  }
  for (int trial = 0; trial < 4000; ++trial) {
    Mat V = Mat::Zero(n, n);
    for (const Mat& Bk : null_basis) {
      V += normal(rng) * Bk;
    }
    if (auto w = definite_witness(V)) {
      rep.status = PdFeasibilityReport::Status::kFeasible;
      rep.certified = true;
      rep.witness = *w;
      return rep;
    }
  }
  rep.status = PdFeasibilityReport::Status::kUndetermined;
  rep.certified = false;
  return rep;
}

SteadyStateReport steady_state_verdict(const SystemSpec& spec, bool strict) {
  SteadyStateReport rep;
  rep.d = derive_matrices(spec);
  rep.eta = spec.eta;
  const Mat& A = rep.d.A;
  const Mat& C = rep.d.C;
  const Mat& M = rep.d.M;
  const Mat& N = rep.d.N;
  const double eta = spec.eta;

  rep.detectable_CA = is_detectable(C, A);
  const Mat Amc = A - M * C;
  rep.detectable_CAmc = is_detectable(C, Amc);

  const Mat Aeta = A - eta * (M * C);
  const RiccatiProblem prob = RiccatiProblem::validated(
      Aeta.transpose().cast<Cplx>(), (-eta * (C.transpose() * C)).cast<Cplx>(),
      (N - eta * (M * M.transpose())).cast<Cplx>());
  rep.dom = dom_ric_check(prob);

  if (!rep.detectable_CA.verdict) {
    return rep;
  }

  RiccatiSolution sol;
  try {
    sol = solve_are(prob, strict);
  } catch (const Error& e) {
    rep.solver_error = e.what();
    rep.solver_code = e.code();
    return rep;
  }
  const double ximag = sol.X.imag().cwiseAbs().maxCoeff();
  if (ximag > 1e-8 * std::max(1.0, sol.X.norm())) {
    rep.solver_error = "steady covariance has imaginary residue " +
                       std::to_string(ximag);
    rep.solver_code = ErrorCode::kNotInDomRic;
    return rep;
  }
  Mat V = sol.X.real();
  V = 0.5 * (V + V.transpose()).eval();
  rep.V = V;
  rep.riccati_residual = sol.residual;
  rep.subspace_condition = sol.subspace_condition;

  const Mat closed = A - eta * (M * C) - eta * (V * (C.transpose() * C));
  rep.closed_loop = eigenvalues_of(closed);
  rep.closed_loop_stable = rep.closed_loop.real().maxCoeff() < 0.0;

  rep.heisenberg = heisenberg_certificate(V, rep.d.J);
  rep.purity = is_pure(V, rep.d.m);
  rep.pure_conditions = unconditional_pure_conditions(V, spec);

  if (eigenvalues_of(A).real().maxCoeff() < 0.0) {
    rep.V_unconditional = solve_lyapunov(A, N);
  }
  return rep;
}

Mat steady_covariance_complex_route(const DerivedMatrices& d, double eta) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw Error(ErrorCode::kInvalidInput, "eta must lie in (0, 1]");
  }
  const Mat Aeta = d.A - eta * (d.M * d.C);
  const CMat omega =
      Aeta.cast<Cplx>() -
      Cplx(0.0, 0.5 * eta) * (d.J * d.C.transpose() * d.C).cast<Cplx>();
  // Substituting V = Y + (i/2) J into the real steady equation leaves a
  // Hermitian equation for Y whose constant term is (1 - eta) N plus an
  // imaginary remainder ~ (M C J + J C^T M^T); the remainder is nonzero
  // whenever Im(Lambda)^T Re(Lambda) is asymmetric.
  const Mat cross =
      d.M * d.C * d.J + d.J * d.C.transpose() * d.M.transpose();
  const CMat Kc = (1.0 - eta) *
                  (d.N.cast<Cplx>() + Cplx(0.0, 0.5) * cross.cast<Cplx>());
  const RiccatiProblem prob = RiccatiProblem::validated(
      omega.adjoint(), (-eta * (d.C.transpose() * d.C)).cast<Cplx>(), Kc);
  const RiccatiSolution sol = solve_are(prob);
  const CMat Vc = sol.X + Cplx(0.0, 0.5) * d.J.cast<Cplx>();
  const double residue = Vc.imag().cwiseAbs().maxCoeff();
  if (residue > 1e-7 * std::max(1.0, Vc.norm())) {
    throw Error(ErrorCode::kNotInDomRic,
                "shifted-form covariance has imaginary residue " +
                    std::to_string(residue));
  }
  Mat V = Vc.real();
  return 0.5 * (V + V.transpose());
}

}  // namespace gsp
