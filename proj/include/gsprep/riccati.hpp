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

#ifndef GSPREP_RICCATI_HPP_
#define GSPREP_RICCATI_HPP_

#include <vector>

#include "gsprep/system_model.hpp"

namespace gsp {

/// Algebraic Riccati equation in the complex field,
///
///   F^dag X + X F + X P X + Kc = 0,
///
/// solved for the stabilizing Hermitian X (all eigenvalues of F + P X in the
/// open left half plane). P and Kc must be Hermitian and P must be sign
/// semidefinite (PSD or NSD); an indefinite P is rejected at construction.
struct RiccatiProblem {
  CMat F;
  CMat P;
  CMat Kc;

  static RiccatiProblem validated(CMat F, CMat P, CMat Kc);
};

/// [[F, P], [-Kc, -F^dag]]; its spectrum is symmetric about the imaginary
/// axis, and the stabilizing solution lives on the stable invariant subspace.
CMat build_hamiltonian(const RiccatiProblem& prob);

/// Solvability report. The equation has a unique stabilizing solution iff
/// the Hamiltonian has no imaginary-axis eigenvalues and the stable subspace
/// is complementary to the image of [0; I] (basis block X1 invertible).
/// detectable_pair reports the equivalent detectability test on [P, F^dag],
/// meaningful when P is sign semidefinite.
struct DomRicReport {
  bool imaginary_axis_free = false;
  bool complementary = false;
  bool detectable_pair = false;
  double min_axis_distance = 0.0;   // min |Re lambda(H)|
  double subspace_condition = 0.0;  // cond_2(X1), inf when singular

  bool in_domain() const { return imaginary_axis_free && complementary; }
};

DomRicReport dom_ric_check(const RiccatiProblem& prob);

struct RiccatiSolution {
  CMat X;                      // stabilizing Hermitian solution
  CVec hamiltonian_spectrum;   // 2n eigenvalues, stable half first
  CVec closed_loop_spectrum;   // eigenvalues of F + P X
  double residual = 0.0;       // ||F^dag X + X F + X P X + Kc||_F
  double subspace_condition = 0.0;
  bool ill_conditioned = false;  // cond(X1) >= 1e10
};

/// Schur-based solve: complex Schur form of the Hamiltonian, stable
/// eigenvalues reordered to the leading block by unitary similarity swaps,
/// X recovered from the subspace basis. Throws Error(kNotInDomRic) when the
/// domain conditions fail; with strict=true an ill-conditioned X1 throws
/// Error(kIllConditionedSubspace) instead of being flagged.
RiccatiSolution solve_are(const RiccatiProblem& prob, bool strict = false);

/// Solves A V + V A^T + Q = 0 for symmetric Q and Hurwitz A (checked,
/// Error(kUnstableDrift) otherwise) by dense vectorization.
Mat solve_lyapunov(const Mat& A, const Mat& Q);

enum class StepMode {
  kAdaptive,  // embedded 5(4) pair, local error controlled
  kFixed,     // classical 4th-order steps of exactly dt
};

struct CovarianceSeries {
  std::vector<double> t;
  std::vector<Mat> V;

  const Mat& back() const { return V.back(); }
};

/// Integrates dV/dt = A V + V A^T + N - eta (V C^T + M)(V C^T + M)^T from
/// V0 over [0, T]. dt is the fixed step (kFixed) or the initial step
/// (kAdaptive). V is symmetrized after every accepted step. Divergence
/// (||V|| > 1e12) and non-finite values throw.
CovarianceSeries integrate_riccati_ode(const DerivedMatrices& d, double eta,
                                       const Mat& V0, double T, double dt,
                                       StepMode mode = StepMode::kAdaptive);

}  // namespace gsp

#endif  // GSPREP_RICCATI_HPP_
