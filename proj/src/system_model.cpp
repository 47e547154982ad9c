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

#include "gsprep/system_model.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

namespace gsp {

namespace {

// Largest |imag| entry relative to the real scale; guards formulas whose
// result must be real by construction.
double imaginary_residue(const CMat& Z) {
  const double re = Z.real().cwiseAbs().maxCoeff();
  const double im = Z.imag().cwiseAbs().maxCoeff();
  return im / std::max(1.0, re);
}

Mat real_part_checked(const CMat& Z, const char* what) {
  const double residue = imaginary_residue(Z);
  if (residue > 1e-12) {
    throw Error(ErrorCode::kInvalidInput,
                std::string(what) + " has imaginary residue " +
                    std::to_string(residue));
  }
  return Z.real();
}

}  // namespace

Mat symplectic_form(Eigen::Index m) {
  Mat J = Mat::Zero(2 * m, 2 * m);
  J.topRightCorner(m, m) = Mat::Identity(m, m);
  J.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
  return J;
}

SystemSpec SystemSpec::validated(Eigen::Index m, Mat G, CMat Lambda, CMat K,
                                 double eta) {
  if (m <= 0) {
    throw Error(ErrorCode::kInvalidInput, "mode count must be positive");
  }
  const Eigen::Index n = 2 * m;
  if (G.rows() != n || G.cols() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "G must be 2m x 2m, got " + std::to_string(G.rows()) + " x " +
                    std::to_string(G.cols()));
  }
  const double gscale = std::max(1.0, G.cwiseAbs().maxCoeff());
  if ((G - G.transpose()).cwiseAbs().maxCoeff() > 1e-10 * gscale) {
    throw Error(ErrorCode::kInvalidInput, "G must be symmetric");
  }
  if (Lambda.rows() != m || Lambda.cols() != n) {
    throw Error(ErrorCode::kInvalidInput,
                "Lambda must be m x 2m, got " + std::to_string(Lambda.rows()) +
                    " x " + std::to_string(Lambda.cols()));
  }
  if (K.size() == 0) {
    K = CMat::Zero(n, m);
  }
  if (K.rows() != n || K.cols() != m) {
    throw Error(ErrorCode::kInvalidInput,
                "K must be 2m x m, got " + std::to_string(K.rows()) + " x " +
                    std::to_string(K.cols()));
  }
  if (!(eta > 0.0) || eta > 1.0) {
    throw Error(ErrorCode::kInvalidInput,
                "eta must lie in (0, 1], got " + std::to_string(eta));
  }
  SystemSpec spec;
  spec.m = m;
  spec.G = 0.5 * (G + G.transpose());
  spec.Lambda = std::move(Lambda);
  spec.K = std::move(K);
  spec.eta = eta;
  return spec;
}

GaussianMoments GaussianMoments::validated(Vec mean, Mat cov) {
  if (cov.rows() != cov.cols() || cov.rows() != mean.size() ||
      cov.rows() % 2 != 0 || cov.rows() == 0) {
    throw Error(ErrorCode::kInvalidInput,
                "moments must have matching even dimension 2m");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kInvalidInput, "covariance must be symmetric");
  }
  GaussianMoments g;
  g.mean = std::move(mean);
  g.cov = 0.5 * (cov + cov.transpose());
  return g;
}

DerivedMatrices derive_matrices(const SystemSpec& spec) {
  const Eigen::Index m = spec.m;
  const Mat J = symplectic_form(m);
  const Mat R = spec.Lambda.real();
  const Mat Im = spec.Lambda.imag();

  const CMat LdL = spec.Lambda.adjoint() * spec.Lambda;
  // (1/2i)(L^dag L - L^T L^*) == imag(L^dag L); computed in complex form so
  // the residue check can catch inconsistent inputs.
  const Cplx half_over_i(0.0, -0.5);
  const CMat drift_kernel =
      spec.G.cast<Cplx>() + half_over_i * (LdL - LdL.conjugate());

  DerivedMatrices d;
  d.m = m;
  d.eta = spec.eta;
  d.J = J;
  d.A = J * real_part_checked(drift_kernel, "drift kernel");
  d.B = J * real_part_checked(spec.K + spec.K.conjugate(), "drive kernel");
  d.C = real_part_checked(spec.Lambda + spec.Lambda.conjugate(),
                          "measurement map");
  d.M = -J * Im.transpose();
  d.N = J * real_part_checked(0.5 * (LdL + LdL.conjugate()),
                              "diffusion kernel") *
        J.transpose();
  d.R = R;
  d.Im = Im;
  return d;
}

double wigner_density(const GaussianMoments& state, const Vec& x) {
  const Eigen::Index n = state.cov.rows();
  if (x.size() != n) {
    throw Error(ErrorCode::kInvalidInput, "evaluation point dimension");
  }
  Eigen::LLT<Mat> llt(state.cov);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance is not positive definite");
  }
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  const Vec r = x - state.mean;
  const double quad = r.dot(llt.solve(r));
  const double log_norm =
      -0.5 * static_cast<double>(n) * std::log(2.0 * M_PI) - 0.5 * log_det;
  return std::exp(log_norm - 0.5 * quad);
}

double purity(const Mat& V, Eigen::Index m) {
  if (V.rows() != 2 * m || V.cols() != 2 * m) {
    throw Error(ErrorCode::kInvalidInput, "covariance must be 2m x 2m");
  }
  Eigen::LLT<Mat> llt(0.5 * (V + V.transpose()));
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kSingularCovariance,
                "covariance is not positive definite");
  }
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < 2 * m; ++i) {
    log_det += 2.0 * std::log(llt.matrixL()(i, i));
  }
  return std::exp(-static_cast<double>(m) * std::log(2.0) - 0.5 * log_det);
}

}  // namespace gsp
