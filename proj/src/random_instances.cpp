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

#include "gsprep/random_instances.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

namespace gsp::testing {

namespace {

Mat gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                    std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Mat X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      X(i, j) = normal(rng);
    }
  }
  return X;
}

CMat gaussian_cmatrix(Eigen::Index rows, Eigen::Index cols,
                      std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  CMat X(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      X(i, j) = Cplx(normal(rng), normal(rng));
    }
  }
  return X;
}

// Local eigenvector rank margin for the pair [Cm, Am] over the closed right
// half plane; mirrors the production certificate without depending on it.
double detectability_margin(const Mat& Cm, const Mat& Am) {
  const Eigen::Index n = Am.rows();
  const double sigma_scale = std::max({1.0, Am.norm(), Cm.norm()});
  Eigen::EigenSolver<Mat> eig(Am, /*computeEigenvectors=*/false);
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Cplx lambda = eig.eigenvalues()(i);
    if (lambda.real() < -1e-10 * sigma_scale) {
      continue;
    }
    CMat stacked(n + Cm.rows(), n);
    stacked.topRows(n) =
        Am.cast<Cplx>() - lambda * CMat::Identity(n, n);
    stacked.bottomRows(Cm.rows()) = Cm.cast<Cplx>();
    Eigen::JacobiSVD<CMat> svd(stacked);
    margin = std::min(margin, svd.singularValues()(n - 1) / sigma_scale);
  }
  return margin;
}

double min_axis_distance(const CMat& H) {
  Eigen::ComplexEigenSolver<CMat> eig(H, /*computeEigenvectors=*/false);
  return eig.eigenvalues().real().cwiseAbs().minCoeff();
}

}  // namespace

Mat random_symmetric(Eigen::Index n, std::mt19937_64& rng, double scale) {
  const Mat X = gaussian_matrix(n, n, rng, scale);
  return 0.5 * (X + X.transpose());
}

Mat random_symplectic(Eigen::Index m, std::mt19937_64& rng, double spread) {
  const Mat J = symplectic_form(m);
  const Mat Y = random_symmetric(2 * m, rng, spread);
  // X = J Y satisfies X^T J + J X = 0, so exp(X) is symplectic exactly.
  return Mat((J * Y).exp());
}

Mat random_pure_covariance(Eigen::Index m, std::mt19937_64& rng,
                           double spread) {
  const Mat S = random_symplectic(m, rng, spread);
  return Mat(0.5 * (S * S.transpose()));
}

SystemSpec random_system(Eigen::Index m, std::mt19937_64& rng, double eta) {
  const Mat G = random_symmetric(2 * m, rng, 1.0);
  const CMat Lambda = gaussian_cmatrix(m, 2 * m, rng, 1.0);
  const CMat K = gaussian_cmatrix(2 * m, m, rng, 0.5);
  return SystemSpec::validated(m, G, Lambda, K, eta);
}

SystemSpec random_detectable_system(Eigen::Index m, std::mt19937_64& rng,
                                    double eta, double margin) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    SystemSpec spec = random_system(m, rng, eta);
    const DerivedMatrices d = derive_matrices(spec);
    if (detectability_margin(d.C, d.A) > margin &&
        detectability_margin(d.C, d.A - d.M * d.C) > margin) {
      return spec;
    }
  }
  throw Error(ErrorCode::kNotDetectable,
              "no detectable draw with the requested margin");
}

Mat random_stable_matrix(Eigen::Index n, std::mt19937_64& rng) {
  const Mat X = gaussian_matrix(n, n, rng, 1.0);
  Eigen::EigenSolver<Mat> eig(X, /*computeEigenvectors=*/false);
  const double shift = eig.eigenvalues().real().maxCoeff();
  // Push the spectrum left of -0.2 so Lyapunov solves stay well posed.
  return X - (shift + 0.2 + std::abs(shift) * 0.05) * Mat::Identity(n, n);
}

RiccatiProblem random_dom_ric_problem(Eigen::Index n, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 500; ++attempt) {
    const CMat F = gaussian_cmatrix(n, n, rng, 1.0);
    const CMat O = gaussian_cmatrix(n, std::max<Eigen::Index>(1, n - 1), rng,
                                    1.0);
    const CMat Z = gaussian_cmatrix(n, n, rng, 1.0);
    const CMat P = -(O * O.adjoint());
    const CMat Kc = Z.adjoint() * Z;
    RiccatiProblem prob = RiccatiProblem::validated(F, P, Kc);

    // Equivalent conditions, checked locally: clear axis distance for the
    // Hamiltonian and a detectability margin for [O^dag, F^dag].
    const CMat H = build_hamiltonian(prob);
    if (min_axis_distance(H) < 1e-4 * std::max(1.0, H.norm())) {
      continue;
    }
    const Eigen::Index q = O.cols();
    const double sigma_scale = std::max({1.0, F.norm(), O.norm()});
    Eigen::ComplexEigenSolver<CMat> eig(prob.F.adjoint(),
                                        /*computeEigenvectors=*/false);
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const Cplx lambda = eig.eigenvalues()(i);
      if (lambda.real() < -1e-10 * sigma_scale) {
        continue;
      }
      CMat stacked(n + q, n);
      stacked.topRows(n) =
          prob.F.adjoint() - lambda * CMat::Identity(n, n);
      stacked.bottomRows(q) = O.adjoint();
      Eigen::JacobiSVD<CMat> svd(stacked);
      margin = std::min(margin, svd.singularValues()(n - 1) / sigma_scale);
    }
    if (margin > 1e-4) {
      return prob;
    }
  }
  throw Error(ErrorCode::kNotInDomRic,
              "no well-posed random equation after 500 draws");
}

}  // namespace gsp::testing
