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

#ifndef GSPREP_ANALYSIS_HPP_
#define GSPREP_ANALYSIS_HPP_

#include <optional>

#include "gsprep/riccati.hpp"
#include "gsprep/system_model.hpp"

namespace gsp {

/// Verdict plus numerical evidence. margin is the smallest scaled singular
/// value of the rank test over tested eigenvalues (infinity when the sweep is
/// empty); for failures the offending eigenvalue and direction are attached.
struct Certificate {
  bool verdict = false;
  double margin = 0.0;
  std::optional<Cplx> witness_eigenvalue;
  std::optional<CVec> witness_direction;
};

/// Eigenvector rank test for the pair [Cm, Am]: every eigenvalue of Am with
/// Re >= 0 must keep [Am - lambda I; Cm] at full column rank.
Certificate is_detectable(const CMat& Cm, const CMat& Am);
Certificate is_detectable(const Mat& Cm, const Mat& Am);

/// True verdict when some imaginary-axis eigenvalue of Am is unobservable
/// through Cm. margin is the smallest scaled sigma over axis eigenvalues.
Certificate has_imaginary_unobservable_mode(const CMat& Cm, const CMat& Am);

/// Two equivalent axis tests used to cross-validate each other: the pair
/// [C J^T, (A - M C)^T] has an imaginary-axis unobservable mode exactly when
/// the complex drift A - M C - (i/2) J C^T C has an imaginary-axis
/// eigenvalue.
struct AxisModeEquivalence {
  bool axis_unobservable_mode = false;  // route 1: PBH sweep
  bool axis_closed_loop_eigenvalue = false;  // route 2: complex drift spectrum
  double min_axis_distance = 0.0;  // route 2 distance of spectrum to the axis
  Certificate pbh;                 // route 1 evidence

  bool consistent() const {
    return axis_unobservable_mode == axis_closed_loop_eigenvalue;
  }
};

AxisModeEquivalence axis_mode_equivalence(const DerivedMatrices& d);

/// Physicality: smallest eigenvalue of the Hermitian matrix V + (i/2) J must
/// be >= -1e-9 * max(1, ||V||).
Certificate heisenberg_certificate(const Mat& V, const Mat& J);

/// Purity identity check: a Gaussian covariance is pure iff J V J V = -I/4.
struct PurityReport {
  bool pure = false;
  double purity = 0.0;    // 1 / (2^m sqrt(det V))
  double residual = 0.0;  // ||J V J V + I/4||_F
};

PurityReport is_pure(const Mat& V, Eigen::Index m);

/// Residuals of the two algebraic conditions a pure covariance V_s must meet
/// for the measurement-free (dissipation-only) dynamics to hold it steady:
///   (V_s + (i/2) J) Lambda^T = 0  and  J G V_s + V_s G J^T = 0.
struct SteadyPureResiduals {
  double coupling = 0.0;     // ||(V_s + iJ/2) Lambda^T||_F
  double hamiltonian = 0.0;  // ||J G V_s + V_s G J^T||_F
  double innovation_gain = 0.0;  // ||V_s C^T + M||_F, zero when both hold
};

SteadyPureResiduals unconditional_pure_conditions(const Mat& V_s,
                                                  const SystemSpec& spec);

/// Feasibility of J G V + V G J^T = 0 over positive definite V, decided on
/// the nullspace of the linear map restricted to symmetric matrices.
struct PdFeasibilityReport {
  enum class Status { kInfeasible, kFeasible, kUndetermined };
  Status status = Status::kUndetermined;
  bool certified = false;   // proof-backed verdict (vs randomized search)
  Eigen::Index nullity = 0; // dimension of the symmetric nullspace
  Mat witness;              // PD solution when feasible, empty otherwise
};

PdFeasibilityReport unconditional_pd_feasibility(const Mat& G);

/// Full steady-state characterization of a monitored system at its
/// efficiency. When the detectability gate fails, V and the dependent fields
/// stay empty and `detectable` carries the evidence.
struct SteadyStateReport {
  DerivedMatrices d;
  Certificate detectable_CA;    // pair [C, A]
  Certificate detectable_CAmc;  // pair [C, A - M C]; equivalent by injection
  DomRicReport dom;
  std::optional<Mat> V;           // stabilizing steady covariance
  double riccati_residual = 0.0;  // algebraic residual of V
  double subspace_condition = 0.0;
  CVec closed_loop;  // eigenvalues of A - eta M C - eta V C^T C
  bool closed_loop_stable = false;
  Certificate heisenberg;
  PurityReport purity;
  SteadyPureResiduals pure_conditions;  // measurement-free conditions at V
  std::optional<Mat> V_unconditional;   // steady covariance without
                                        // conditioning; requires stable A
  double eta = 1.0;
  std::string solver_error;  // non-empty when the steady solve failed even
                             // though detectability held
  ErrorCode solver_code = ErrorCode::kNotInDomRic;  // cause of solver_error
};

/// Derives matrices, certifies detectability, solves the steady Riccati
/// equation at efficiency spec.eta, and attaches physicality and purity
/// certificates. Does not throw on a negative verdict; callers decide.
SteadyStateReport steady_state_verdict(const SystemSpec& spec,
                                       bool strict = false);

/// Steady covariance recovered through the shifted Hermitian form
/// Y = V - (i/2) J, solved in the complex field. Independent consistency
/// route for the real solve; returns the reconstructed real V.
Mat steady_covariance_complex_route(const DerivedMatrices& d, double eta);

}  // namespace gsp

#endif  // GSPREP_ANALYSIS_HPP_
