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

#include "gsprep/analysis.hpp"
#include "gsprep/random_instances.hpp"

namespace {

using gsp::CMat;
using gsp::Cplx;
using gsp::Mat;

gsp::SystemSpec reference_system(double eta = 1.0) {
  Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  CMat Lambda(1, 2);
  Lambda(0, 0) = Cplx(1.0, -1.0);
  Lambda(0, 1) = Cplx(0.0, 1.0);
  return gsp::SystemSpec::validated(1, G, Lambda, CMat(), eta);
}

double min_eig_sym(const Mat& S) {
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (S + S.transpose()))
      .eigenvalues()
      .minCoeff();
}

}  // namespace

TEST_CASE("eigenvector rank test finds hidden unstable modes") {
  Mat A(2, 2);
  A << 1.0, 0.0, 0.0, -1.0;
  Mat C(1, 2);
  C << 0.0, 1.0;  // only the stable direction is visible
  const gsp::Certificate bad = gsp::is_detectable(C, A);
  CHECK_FALSE(bad.verdict);
  REQUIRE(bad.witness_eigenvalue.has_value());
  CHECK(std::abs(*bad.witness_eigenvalue - Cplx(1.0, 0.0)) <= 1e-12);
  REQUIRE(bad.witness_direction.has_value());

  Mat C_good(1, 2);
  C_good << 1.0, 0.0;
  const gsp::Certificate good = gsp::is_detectable(C_good, A);
  CHECK(good.verdict);
  CHECK(good.margin > 0.1);
}

TEST_CASE("detectability is invariant under output injection") {
  std::mt19937_64 rng(99001);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    const gsp::SystemSpec spec = gsp::testing::random_system(m, rng);
    const gsp::DerivedMatrices d = gsp::derive_matrices(spec);
    const Mat Amc = d.A - d.M * d.C;
    CHECK(gsp::is_detectable(d.C, d.A).verdict ==
          gsp::is_detectable(d.C, Amc).verdict);
  }
}

TEST_CASE("axis-mode equivalence on the reference system") {
  const gsp::DerivedMatrices d = gsp::derive_matrices(reference_system());
  const gsp::AxisModeEquivalence eq = gsp::axis_mode_equivalence(d);
  CHECK(eq.consistent());
  CHECK_FALSE(eq.axis_unobservable_mode);
  CHECK_FALSE(eq.axis_closed_loop_eigenvalue);
  // The complex drift has eigenvalues 1 and -1: distance 1 from the axis.
  CHECK(eq.min_axis_distance == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("axis-mode equivalence detects a constructed axis mode") {
  // Zero Hamiltonian with a real coupling to one quadrature only: the
  // conjugate quadrature sits at eigenvalue 0 and is invisible, so both
  // routes must report an axis mode.
  Mat G = Mat::Zero(2, 2);
  CMat Lambda(1, 2);
  Lambda(0, 0) = Cplx(1.0, 0.0);
  Lambda(0, 1) = Cplx(0.0, 0.0);
  const gsp::DerivedMatrices d = gsp::derive_matrices(
      gsp::SystemSpec::validated(1, G, Lambda, CMat(), 1.0));
  const gsp::AxisModeEquivalence eq = gsp::axis_mode_equivalence(d);
  CHECK(eq.consistent());
}

TEST_CASE("uncertainty certificate eigenvalues on frozen covariances") {
  const Mat J = gsp::symplectic_form(1);
  Mat V(2, 2);
  V << 1.0, 0.0, 0.0, 0.25;
  const CMat H = V.cast<Cplx>() + Cplx(0.0, 0.5) * J.cast<Cplx>();
  const Eigen::VectorXd eigs =
      Eigen::SelfAdjointEigenSolver<CMat>(H).eigenvalues();
  CHECK(eigs(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eigs(1) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(gsp::heisenberg_certificate(V, J).verdict);

  // Shrinking below the quantum limit must fail the certificate.
  const gsp::Certificate tooSmall =
      gsp::heisenberg_certificate(0.1 * Mat::Identity(2, 2), J);
  CHECK_FALSE(tooSmall.verdict);
  CHECK(tooSmall.margin == doctest::Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("purity identity splits pure from mixed") {
  CHECK(gsp::is_pure(0.5 * Mat::Identity(2, 2), 1).pure);
  Mat squeezed(2, 2);
  squeezed << 1.0, 0.0, 0.0, 0.25;
  CHECK(gsp::is_pure(squeezed, 1).pure);
  const gsp::PurityReport mixed = gsp::is_pure(Mat::Identity(2, 2), 1);
  CHECK_FALSE(mixed.pure);
  CHECK(mixed.purity == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("reference steady state and its certificates") {
  const gsp::SteadyStateReport rep =
      gsp::steady_state_verdict(reference_system());
  CHECK(rep.detectable_CA.verdict);
  CHECK(rep.detectable_CAmc.verdict);
  CHECK(rep.dom.in_domain());
  REQUIRE(rep.V.has_value());
  CHECK((*rep.V - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-10);
  CHECK(rep.closed_loop_stable);
  for (Eigen::Index i = 0; i < rep.closed_loop.size(); ++i) {
    CHECK(std::abs(rep.closed_loop(i) - Cplx(-1.0, 0.0)) <= 1e-8);
  }
  CHECK(rep.heisenberg.verdict);
  CHECK(rep.purity.pure);
  CHECK(rep.purity.purity == doctest::Approx(1.0).epsilon(1e-10));

  // Without conditioning the same system settles into a mixed state.
  REQUIRE(rep.V_unconditional.has_value());
  Mat vunc_expect(2, 2);
  vunc_expect << 0.5, 0.0, 0.0, 1.0;
  CHECK((*rep.V_unconditional - vunc_expect).norm() <= 1e-10);

  // Measurement-free steady-pure conditions do not hold here.
  CHECK(rep.pure_conditions.coupling ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(rep.pure_conditions.innovation_gain ==
        doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("undetectable system reports and withholds the covariance") {
  Mat G(2, 2);
  G << 0.0, -1.0, -1.0, 0.0;  // drift J G = diag(-1, 1): unstable direction
  const gsp::SystemSpec spec =
      gsp::SystemSpec::validated(1, G, CMat::Zero(1, 2), CMat(), 1.0);
  const gsp::SteadyStateReport rep = gsp::steady_state_verdict(spec);
  CHECK_FALSE(rep.detectable_CA.verdict);
  CHECK_FALSE(rep.V.has_value());
  CHECK(rep.detectable_CA.witness_eigenvalue.has_value());
}

TEST_CASE("partial efficiency: equation residual and complex-route agreement") {
  for (double eta : {0.25, 0.5, 0.75}) {
    const gsp::SystemSpec spec = reference_system(eta);
    const gsp::SteadyStateReport rep = gsp::steady_state_verdict(spec);
    REQUIRE(rep.V.has_value());
    const Mat& V = *rep.V;
    const gsp::DerivedMatrices& d = rep.d;

    const Mat Aeta = d.A - eta * (d.M * d.C);
    const Mat gain = V * d.C.transpose() + d.M;
    const Mat resid = Aeta * V + V * Aeta.transpose() -
                      eta * (V * d.C.transpose()) * (d.C * V) + d.N -
                      eta * (d.M * d.M.transpose());
    // Same equation, written with the raw innovation gain.
    const Mat resid2 = d.A * V + V * d.A.transpose() + d.N -
                       eta * (gain * gain.transpose());
    CHECK(resid.norm() <= 1e-10 * std::max(1.0, V.norm()));
    CHECK((resid - resid2).norm() <= 1e-12 * std::max(1.0, V.norm()));

    const Mat V2 = gsp::steady_covariance_complex_route(d, eta);
    CHECK((V2 - V).norm() <= 1e-8 * std::max(1.0, V.norm()));

    // Partial detection cannot reach a pure state here.
    CHECK(rep.purity.purity < 1.0);
    CHECK(rep.heisenberg.verdict);
  }
}

TEST_CASE("conditioning monotonically shrinks with efficiency (reference)") {
  const Mat V25 = *gsp::steady_state_verdict(reference_system(0.25)).V;
  const Mat V50 = *gsp::steady_state_verdict(reference_system(0.5)).V;
  const Mat V100 = *gsp::steady_state_verdict(reference_system(1.0)).V;
  CHECK(min_eig_sym(V25 - V50) >= -1e-9);
  CHECK(min_eig_sym(V50 - V100) >= -1e-9);
}

TEST_CASE("positive definite feasibility of the commutation condition") {
  // Reference Hamiltonian kernel: null space is spanned by diag(0, 1),
  // which is singular, so no PD solution exists and that is provable.
  Mat G_ref(2, 2);
  G_ref << 2.0, 0.0, 0.0, 0.0;
  const gsp::PdFeasibilityReport infeasible =
      gsp::unconditional_pd_feasibility(G_ref);
  CHECK(infeasible.status == gsp::PdFeasibilityReport::Status::kInfeasible);
  CHECK(infeasible.certified);
  CHECK(infeasible.nullity == 1);

  // Isotropic kernel: V = a I solves it for any a > 0.
  const gsp::PdFeasibilityReport feasible =
      gsp::unconditional_pd_feasibility(Mat::Identity(2, 2));
  CHECK(feasible.status == gsp::PdFeasibilityReport::Status::kFeasible);
  CHECK(feasible.certified);
  REQUIRE(feasible.witness.size() > 0);
  CHECK(min_eig_sym(feasible.witness) > 0.0);
  const Mat J = gsp::symplectic_form(1);
  CHECK((J * feasible.witness + feasible.witness * J.transpose()).norm() <=
        1e-9);

  // Zero kernel: every symmetric matrix is in the null space.
  const gsp::PdFeasibilityReport trivial =
      gsp::unconditional_pd_feasibility(Mat::Zero(2, 2));
  CHECK(trivial.status == gsp::PdFeasibilityReport::Status::kFeasible);
  REQUIRE(trivial.witness.size() > 0);
  CHECK(min_eig_sym(trivial.witness) > 0.0);
}

TEST_CASE("steady covariances of random detectable systems are physical") {
  std::mt19937_64 rng(99002);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Index m = (i % 2) + 1;
    const gsp::SystemSpec spec = gsp::testing::random_detectable_system(m, rng);
    const gsp::SteadyStateReport rep = gsp::steady_state_verdict(spec);
    REQUIRE(rep.V.has_value());
    CHECK(rep.closed_loop_stable);
    CHECK(rep.heisenberg.verdict);
    CHECK(rep.purity.pure);  // eta = 1
  }
}
