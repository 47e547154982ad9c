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

#include "gsprep/designer.hpp"
#include "gsprep/random_instances.hpp"

namespace {

using gsp::CMat;
using gsp::Cplx;
using gsp::Mat;

Mat example_V() { return 0.5 * Mat::Identity(2, 2); }

}  // namespace

TEST_CASE("canonical coupling real part is [I 0]") {
  const Mat R = gsp::default_R(2);
  REQUIRE(R.rows() == 2);
  REQUIRE(R.cols() == 4);
  CHECK((R.leftCols(2) - Mat::Identity(2, 2)).norm() == 0.0);
  CHECK(R.rightCols(2).norm() == 0.0);
}

TEST_CASE("innovation-canceling gain on the known steady covariance") {
  // System with a single monitored mode whose steady covariance is I/2.
  Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  CMat Lambda(1, 2);
  Lambda(0, 0) = Cplx(1.0, -1.0);
  Lambda(0, 1) = Cplx(0.0, 1.0);
  const gsp::DerivedMatrices d = gsp::derive_matrices(
      gsp::SystemSpec::validated(1, G, Lambda, CMat(), 1.0));

  const gsp::FeedbackGain fb = gsp::feedback_gain(example_V(), d);
  Mat B_expect(2, 1);
  B_expect << 0.0, -1.0;
  CHECK((fb.B - B_expect).norm() <= 1e-14);
  CHECK((fb.F + Mat::Identity(1, 1)).norm() == 0.0);
  // The product cancels the innovation gain exactly.
  CHECK((fb.B * fb.F + example_V() * d.C.transpose() + d.M).norm() <= 1e-14);
}

TEST_CASE("designing for the ground-state covariance gives the known triple") {
  gsp::DesignRequest req;
  req.V_s = example_V();
  const gsp::DesignResult res = gsp::synthesize(req);

  Mat G_expect(2, 2);
  G_expect << 0.0, 1.0, 1.0, 0.0;
  CHECK((res.system.G - G_expect).norm() <= 1e-12);

  CMat Lambda_expect(1, 2);
  Lambda_expect << Cplx(1.0, 0.0), Cplx(0.0, 0.0);
  CHECK((res.system.Lambda - Lambda_expect).norm() <= 1e-12);

  // Closed loop is exactly -I for this design.
  REQUIRE(res.verification.V.has_value());
  CHECK((*res.verification.V - req.V_s).norm() <= 1e-10);
  for (Eigen::Index i = 0; i < res.verification.closed_loop.size(); ++i) {
    CHECK(std::abs(res.verification.closed_loop(i) - Cplx(-1.0, 0.0)) <=
          1e-10);
  }
  CHECK(res.rank_margin > 1e-3);
}

TEST_CASE("duplicate coupling rows break the rank condition") {
  gsp::DesignRequest req;
  req.V_s = 0.5 * Mat::Identity(4, 4);
  Mat R(2, 4);
  R.row(0) << 1.0, 0.0, 0.0, 0.0;
  R.row(1) << 1.0, 0.0, 0.0, 0.0;  // same row twice: [R V_s J; R] loses rank
  req.R = R;
  try {
    gsp::synthesize(req);
    FAIL("expected rank_deficient");
  } catch (const gsp::Error& e) {
    CHECK(e.code() == gsp::ErrorCode::kRankDeficient);
    CHECK(e.exit_code() == 5);
  }
}

TEST_CASE("impure targets are rejected before any synthesis") {
  gsp::DesignRequest req;
  req.V_s = Mat::Identity(2, 2);  // purity 1/2
  try {
    gsp::synthesize(req);
    FAIL("expected not_pure");
  } catch (const gsp::Error& e) {
    CHECK(e.code() == gsp::ErrorCode::kNotPure);
    CHECK(e.exit_code() == 4);
  }
}

TEST_CASE("canonical coupling keeps the rank condition on random targets") {
  std::mt19937_64 rng(77001);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    gsp::DesignRequest req;
    req.V_s = gsp::testing::random_pure_covariance(m, rng);
    const gsp::DesignResult res = gsp::synthesize(req);
    CHECK(res.rank_margin > 1e-8);
    REQUIRE(res.verification.V.has_value());
    const double rel =
        (*res.verification.V - req.V_s).norm() / req.V_s.norm();
    CHECK(rel <= 1e-8);
  }
}

TEST_CASE("round trips with a random imaginary coupling part") {
  std::mt19937_64 rng(77002);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    gsp::DesignRequest req;
    req.V_s = gsp::testing::random_pure_covariance(m, rng);
    Mat Im(m, 2 * m);
    for (Eigen::Index r = 0; r < Im.rows(); ++r) {
      for (Eigen::Index c = 0; c < Im.cols(); ++c) {
        Im(r, c) = uni(rng);
      }
    }
    req.Im = Im;
    const gsp::DesignResult res = gsp::synthesize(req);

    // Structural sanity of the synthesized model.
    CHECK((res.system.G - res.system.G.transpose()).norm() <=
          1e-12 * std::max(1.0, res.system.G.norm()));
    CHECK((res.system.Lambda.imag() - Im).norm() <= 1e-14);
    CHECK(res.verification.detectable_CAmc.verdict);

    // Recovery of the target.
    REQUIRE(res.verification.V.has_value());
    const double rel =
        (*res.verification.V - req.V_s).norm() / req.V_s.norm();
    CHECK(rel <= 1e-7);

    // The drive matrix is realizable: B = 2 J Re(K) for the reported K.
    const Mat B_from_K =
        2.0 * gsp::symplectic_form(m) * res.system.K.real();
    CHECK((res.B - B_from_K).norm() <= 1e-10 * std::max(1.0, res.B.norm()));
    CHECK(res.system.K.imag().norm() == 0.0);
  }
}

TEST_CASE("substitution residual of the designed parameters") {
  // Independent of the steady re-solve: plug the synthesized matrices into
  // the steady equation at eta = 1 and check the algebraic residual.
  std::mt19937_64 rng(77003);
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index m = (i % 2) + 1;
    gsp::DesignRequest req;
    req.V_s = gsp::testing::random_pure_covariance(m, rng);
    const gsp::DesignResult res = gsp::synthesize(req);
    const gsp::DerivedMatrices d = gsp::derive_matrices(res.system);
    const Mat& V = req.V_s;
    const Mat Amc = d.A - d.M * d.C;
    const Mat resid = Amc * V + V * Amc.transpose() -
                      V * d.C.transpose() * d.C * V +
                      0.25 * d.J * d.C.transpose() * d.C * d.J.transpose();
    const double scale =
        std::max(1.0, 2.0 * Amc.norm() * V.norm() +
                          d.C.squaredNorm() * (V.norm() * V.norm() + 0.25));
    CHECK(resid.norm() <= 1e-10 * scale);
  }
}
