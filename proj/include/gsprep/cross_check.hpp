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

#ifndef GSPREP_CROSS_CHECK_HPP_
#define GSPREP_CROSS_CHECK_HPP_

#include "gsprep/riccati.hpp"

namespace gsp::crosscheck {

// Verification-only solvers. They deliberately share no machinery with the
// Schur-based path in riccati.cpp: Lyapunov equations are solved by dense
// vectorization and the Riccati solution is reached by Newton iteration from
// a stabilizing start produced by integrating the matrix flow. Used by the
// self-check suite and unit tests to cross-validate solve_are.

/// F^dag X + X F + Q = 0 via (I (x) F^dag + F^T (x) I) vec(X) = -vec(Q).
/// F must be Hurwitz for the solution to be the stabilizing one.
CMat solve_lyapunov_complex(const CMat& F, const CMat& Q);

/// Newton iteration for F^dag X + X F + X P X + Kc = 0. Each step solves a
/// Lyapunov equation in the closed loop F + P X_k. When F is not already
/// Hurwitz the start X_0 comes from integrating dX/dt = residual(X) until
/// the loop stabilizes. Quadratic convergence near the stabilizing solution.
CMat newton_kleinman_are(const RiccatiProblem& prob, double tol = 1e-13,
                         int max_iter = 100);

}  // namespace gsp::crosscheck

#endif  // GSPREP_CROSS_CHECK_HPP_
