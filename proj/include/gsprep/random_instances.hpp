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

#ifndef GSPREP_RANDOM_INSTANCES_HPP_
#define GSPREP_RANDOM_INSTANCES_HPP_

#include <random>

#include "gsprep/riccati.hpp"
#include "gsprep/system_model.hpp"

namespace gsp::testing {

// Seeded instance generators for property suites. Everything here is
// self-contained (detectability margins are recomputed locally) so the
// generators stay independent of the certificate code they exercise.
// Draws with thin margins are rejected and redrawn: the suites probe the
// solvers on well-posed instances, not on the boundary of solvability.

Mat random_symmetric(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0);

/// exp(J Y) for symmetric Y: an exact symplectic matrix, S^T J S = J.
Mat random_symplectic(Eigen::Index m, std::mt19937_64& rng,
                      double spread = 0.6);

/// (1/2) S S^T for a random symplectic S: a pure-state covariance.
Mat random_pure_covariance(Eigen::Index m, std::mt19937_64& rng,
                           double spread = 0.6);

/// Random monitored system with m modes and m channels. No structural
/// guarantees beyond validity.
SystemSpec random_system(Eigen::Index m, std::mt19937_64& rng,
                         double eta = 1.0);

/// Random system redrawn until the pair [C, A] passes a local eigenvector
/// rank test with margin, so downstream steady solves are well posed.
SystemSpec random_detectable_system(Eigen::Index m, std::mt19937_64& rng,
                                    double eta = 1.0, double margin = 1e-4);

/// Random Hurwitz matrix (shifted to a definite stability margin).
Mat random_stable_matrix(Eigen::Index n, std::mt19937_64& rng);

/// Random complex equation in the solvable domain: F + structured P = -O O^d
/// and Kc = Z^d Z, redrawn until the Hamiltonian spectrum keeps a clear
/// distance from the imaginary axis and the detectability margin holds.
RiccatiProblem random_dom_ric_problem(Eigen::Index n, std::mt19937_64& rng);

}  // namespace gsp::testing

#endif  // GSPREP_RANDOM_INSTANCES_HPP_
