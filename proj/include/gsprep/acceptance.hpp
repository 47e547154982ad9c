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

#ifndef GSPREP_ACCEPTANCE_HPP_
#define GSPREP_ACCEPTANCE_HPP_

#include <iostream>
#include <string>

#include "gsprep/system_model.hpp"

namespace gsp {

/// End-to-end self-check suite. Prints one PASS/FAIL line per criterion and
/// returns the number of failures (0 = all green). Backs the `verify`
/// subcommand and the standalone acceptance binary.
int run_acceptance(std::ostream& out);

/// Golden-value check of the single-mode reference system (kappa = 1):
/// derived matrices, steady covariance I/2, closed-loop spectrum {-1, -1},
/// purity 1. Exposed with an injectable matrix set so a deliberately
/// corrupted input can prove the check has teeth.
bool reference_system_check(const DerivedMatrices& d, std::string* why);

}  // namespace gsp

#endif  // GSPREP_ACCEPTANCE_HPP_
