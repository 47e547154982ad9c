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

#ifndef GSPREP_DESIGNER_HPP_
#define GSPREP_DESIGNER_HPP_

#include <optional>

#include "gsprep/analysis.hpp"
#include "gsprep/system_model.hpp"

namespace gsp {

/// Inverse design request: find system parameters whose conditional steady
/// covariance equals the pure target V_s. R and Im optionally pin the real
/// and imaginary parts of the coupling matrix; both default to canonical
/// choices (R = [I 0], Im = 0).
struct DesignRequest {
  Mat V_s;
  std::optional<Mat> R;
  std::optional<Mat> Im;
  double eta = 1.0;
};

struct DesignResult {
  SystemSpec system;   // synthesized parameters (G, Lambda, K, eta)
  Mat B;               // drive matrix realized by system.K
  Mat F;               // Markovian gain with B F = -(V_s C^T + M)
  double rank_margin;  // smallest scaled sigma of [R V_s J; R]
  SteadyStateReport verification;  // steady solve of the synthesized system
};

/// Canonical coupling real part [I 0]; keeps the design rank condition
/// satisfied for every pure target.
Mat default_R(Eigen::Index m);

/// Synthesizes (G, Lambda) holding V_s steady under conditioning:
///   G = -R^T Im - Im^T R + 2 J^T V_s R^T R + 2 R^T R V_s J,
/// checks rank [R V_s J; R] = 2m, and re-solves the steady state to verify
/// the round trip. Throws kNotPure for an impure target and kRankDeficient
/// when the coupling choice breaks the rank condition.
DesignResult synthesize(const DesignRequest& request);

/// Innovation-canceling Markovian feedback for a steady covariance V:
/// B = V C^T + M and F = -I, so B F = -(V C^T + M).
struct FeedbackGain {
  Mat B;
  Mat F;
};

FeedbackGain feedback_gain(const Mat& V, const DerivedMatrices& d);

}  // namespace gsp

#endif  // GSPREP_DESIGNER_HPP_
