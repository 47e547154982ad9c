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

#ifndef GSPREP_ERRORS_HPP_
#define GSPREP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace gsp {

/// Failure classes surfaced by the library. Each maps to a documented CLI
/// exit code (see exit_code_for) so scripted callers can branch on cause.
enum class ErrorCode {
  kInvalidInput,            // dimension mismatch, asymmetry, residue checks
  kSingularCovariance,      // covariance not positive definite
  kNotInDomRic,             // Hamiltonian outside the solvable domain
  kIllConditionedSubspace,  // stable subspace basis numerically unusable
  kIndefiniteQuadraticTerm, // quadratic coefficient neither PSD nor NSD
  kUnstableDrift,           // Lyapunov solve requested for non-Hurwitz drift
  kStepSizeTooLarge,        // integrator rejected the step budget
  kNonFiniteState,          // NaN/Inf encountered during integration
  kNotDetectable,           // measurement cannot pin down unstable modes
  kNotPure,                 // target covariance fails the purity identity
  kRankDeficient,           // design rank condition violated
  kConfigParse,             // scenario file malformed
  kVerificationFailed,      // acceptance suite reported failures
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid_input";
    case ErrorCode::kSingularCovariance: return "singular_covariance";
    case ErrorCode::kNotInDomRic: return "not_in_dom_ric";
    case ErrorCode::kIllConditionedSubspace: return "ill_conditioned_subspace";
    case ErrorCode::kIndefiniteQuadraticTerm: return "indefinite_quadratic_term";
    case ErrorCode::kUnstableDrift: return "unstable_drift";
    case ErrorCode::kStepSizeTooLarge: return "step_size_too_large";
    case ErrorCode::kNonFiniteState: return "non_finite_state";
    case ErrorCode::kNotDetectable: return "not_detectable";
    case ErrorCode::kNotPure: return "not_pure";
    case ErrorCode::kRankDeficient: return "rank_deficient";
    case ErrorCode::kConfigParse: return "config_parse";
    case ErrorCode::kVerificationFailed: return "verification_failed";
  }
  return "unknown";
}

/// Process exit code for a given failure class. Codes are part of the CLI
/// contract and documented in the README.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigParse: return 2;
    case ErrorCode::kNotDetectable: return 3;
    case ErrorCode::kNotPure: return 4;
    case ErrorCode::kRankDeficient: return 5;
    case ErrorCode::kVerificationFailed: return 6;
    case ErrorCode::kNotInDomRic:
    case ErrorCode::kIllConditionedSubspace:
    case ErrorCode::kIndefiniteQuadraticTerm: return 7;
    case ErrorCode::kUnstableDrift:
    case ErrorCode::kStepSizeTooLarge:
    case ErrorCode::kNonFiniteState: return 8;
    case ErrorCode::kInvalidInput:
    case ErrorCode::kSingularCovariance: return 9;
  }
  return 1;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  int exit_code() const { return exit_code_for(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gsp

#endif  // GSPREP_ERRORS_HPP_
