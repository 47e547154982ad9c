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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gsprep/random_instances.hpp"
#include "gsprep/system_model.hpp"

namespace {

using gsp::CMat;
using gsp::Cplx;
using gsp::Mat;
using gsp::Vec;

gsp::SystemSpec reference_system(double eta = 1.0) {
  Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  CMat Lambda(1, 2);
  Lambda(0, 0) = Cplx(1.0, -1.0);
  Lambda(0, 1) = Cplx(0.0, 1.0);
  return gsp::SystemSpec::validated(1, G, Lambda, CMat::Zero(2, 1), eta);
}

}  // namespace

TEST_CASE("symplectic form squares to minus identity") {
  for (Eigen::Index m : {1, 2, 3, 5}) {
    const Mat J = gsp::symplectic_form(m);
    CHECK(((J * J) + Mat::Identity(2 * m, 2 * m)).norm() == 0.0);
    CHECK((J + J.transpose()).norm() == 0.0);
  }
}

TEST_CASE("single-mode reference system derives the frozen matrices") {
  const gsp::DerivedMatrices d = gsp::derive_matrices(reference_system());

  Mat A_expect(2, 2);
  A_expect << -1.0, 0.0, -2.0, -1.0;
  CHECK((d.A - A_expect).cwiseAbs().maxCoeff() <= 1e-14);

  Mat C_expect(1, 2);
  C_expect << 2.0, 0.0;
  CHECK((d.C - C_expect).cwiseAbs().maxCoeff() <= 1e-14);

  Mat M_expect(2, 1);
  M_expect << -1.0, -1.0;
  CHECK((d.M - M_expect).cwiseAbs().maxCoeff() <= 1e-14);

  Mat N_expect(2, 2);
  N_expect << 1.0, 1.0, 1.0, 2.0;
  CHECK((d.N - N_expect).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK(d.B.norm() == 0.0);  // no drive coupling

  Mat Amc_expect(2, 2);
  Amc_expect << 1.0, 0.0, 0.0, -1.0;
  CHECK((d.A - d.M * d.C - Amc_expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("derived matrices satisfy the structural identities") {
  std::mt19937_64 rng(77001);
  for (int i = 0; i < 40; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    const gsp::SystemSpec spec = gsp::testing::random_system(m, rng);
    const gsp::DerivedMatrices d = gsp::derive_matrices(spec);
    const Mat& J = d.J;
    const double scale = std::max(1.0, d.A.norm());

    // C and M come straight from the coupling split.
    CHECK((d.C - 2.0 * d.R).norm() <= 1e-12);
    CHECK((d.M + J * d.Im.transpose()).norm() <= 1e-12);

    // The drift minus injection is J-skew-Hamiltonian.
    const Mat Amc = d.A - d.M * d.C;
    CHECK((Amc * J.transpose() - J * Amc.transpose()).norm() <=
          1e-12 * scale);

    // Diffusion minus back-action equals the quarter form.
    const Mat lhs = d.N - d.M * d.M.transpose();
    const Mat rhs =
        0.25 * (J * d.C.transpose() * d.C * J.transpose());
    CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, d.N.norm()));

    // N - eta M M^T is the diffusion of the filtered state: PSD.
    const Mat noise = d.N - spec.eta * (d.M * d.M.transpose());
    const double min_eig =
        Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (noise + noise.transpose()))
            .eigenvalues()
            .minCoeff();
    CHECK(min_eig >= -1e-10 * std::max(1.0, d.N.norm()));
  }
}

TEST_CASE("drive matrix is J (K + conj K)") {
  std::mt19937_64 rng(77002);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const Eigen::Index m = 2;
  CMat K(2 * m, m);
  for (Eigen::Index r = 0; r < 2 * m; ++r) {
    for (Eigen::Index c = 0; c < m; ++c) {
      K(r, c) = Cplx(uni(rng), uni(rng));
    }
  }
  gsp::SystemSpec spec = gsp::testing::random_system(m, rng);
  spec = gsp::SystemSpec::validated(m, spec.G, spec.Lambda, K, spec.eta);
  const gsp::DerivedMatrices d = gsp::derive_matrices(spec);
  const Mat expected = d.J * (2.0 * K.real());
  CHECK((d.B - expected).norm() <= 1e-12 * std::max(1.0, expected.norm()));
}

TEST_CASE("validation rejects malformed systems") {
  Mat G(2, 2);
  G << 2.0, 0.5, 0.0, 0.0;  // not symmetric
  CMat Lambda(1, 2);
  Lambda.setZero();
  CHECK_THROWS_AS(gsp::SystemSpec::validated(1, G, Lambda, CMat(), 1.0),
                  gsp::Error);

  Mat G_ok = Mat::Zero(2, 2);
  CHECK_THROWS_AS(
      gsp::SystemSpec::validated(1, G_ok, CMat::Zero(2, 2), CMat(), 1.0),
      gsp::Error);  // Lambda must be m x 2m
  CHECK_THROWS_AS(
      gsp::SystemSpec::validated(1, G_ok, Lambda, CMat(), 0.0),
      gsp::Error);  // eta out of range
  CHECK_THROWS_AS(
      gsp::SystemSpec::validated(1, G_ok, Lambda, CMat(), 1.5),
      gsp::Error);

  const gsp::SystemSpec ok =
      gsp::SystemSpec::validated(1, G_ok, Lambda, CMat(), 1.0);
  CHECK(ok.K.rows() == 2);  // empty drive expands to zeros
  CHECK(ok.K.cols() == 1);
  CHECK(ok.K.norm() == 0.0);

  try {
    gsp::SystemSpec::validated(1, G, Lambda, CMat(), 1.0);
    CHECK(false);
  } catch (const gsp::Error& e) {
    CHECK(e.code() == gsp::ErrorCode::kInvalidInput);
    CHECK(e.exit_code() == 9);
  }
}

TEST_CASE("vacuum phase-space density peaks at 1/pi") {
  gsp::GaussianMoments state =
      gsp::GaussianMoments::validated(Vec::Zero(2), 0.5 * Mat::Identity(2, 2));
  const double at_origin = gsp::wigner_density(state, Vec::Zero(2));
  CHECK(at_origin == doctest::Approx(1.0 / M_PI).epsilon(1e-12));

  // One standard deviation out in q: falls by exp(-1).
  Vec x(2);
  x << std::sqrt(0.5), 0.0;
  CHECK(gsp::wigner_density(state, x) ==
        doctest::Approx(std::exp(-0.5) / M_PI).epsilon(1e-12));

  gsp::GaussianMoments singular =
      gsp::GaussianMoments::validated(Vec::Zero(2), Mat::Zero(2, 2));
  CHECK_THROWS_AS(gsp::wigner_density(singular, Vec::Zero(2)), gsp::Error);
}

TEST_CASE("purity of reference covariances") {
  CHECK(gsp::purity(0.5 * Mat::Identity(2, 2), 1) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gsp::purity(Mat::Identity(2, 2), 1) ==
        doctest::Approx(0.5).epsilon(1e-12));
  Mat squeezed(2, 2);
  squeezed << 1.0, 0.0, 0.0, 0.25;
  CHECK(gsp::purity(squeezed, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gsp::purity(0.5 * Mat::Identity(4, 4), 2) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(gsp::purity(Mat::Zero(2, 2), 1), gsp::Error);
}

TEST_CASE("moment validation symmetrizes and rejects asymmetry") {
  Mat cov(2, 2);
  cov << 1.0, 0.3, 0.3 + 1e-14, 1.0;
  const gsp::GaussianMoments ok =
      gsp::GaussianMoments::validated(Vec::Zero(2), cov);
  CHECK((ok.cov - ok.cov.transpose()).norm() == 0.0);

  cov(1, 0) = 0.8;
  CHECK_THROWS_AS(gsp::GaussianMoments::validated(Vec::Zero(2), cov),
                  gsp::Error);
}

TEST_CASE("random symplectics preserve the form and pure covariances") {
  std::mt19937_64 rng(77003);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    const Mat J = gsp::symplectic_form(m);
    const Mat S = gsp::testing::random_symplectic(m, rng);
    CHECK((S * J * S.transpose() - J).norm() <= 1e-10 * S.norm() * S.norm());

    const Mat V = gsp::testing::random_pure_covariance(m, rng);
    // J V J V = -I/4 marks a pure Gaussian covariance.
    CHECK((J * V * J * V + 0.25 * Mat::Identity(2 * m, 2 * m)).norm() <=
          1e-9 * std::max(1.0, V.norm() * V.norm()));
  }
}
