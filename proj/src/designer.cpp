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

#include "gsprep/designer.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

namespace gsp {

Mat default_R(Eigen::Index m) {
  Mat R = Mat::Zero(m, 2 * m);
  R.leftCols(m) = Mat::Identity(m, m);
  return R;
}

FeedbackGain feedback_gain(const Mat& V, const DerivedMatrices& d) {
  if (V.rows() != 2 * d.m || V.cols() != 2 * d.m) {
    throw Error(ErrorCode::kInvalidInput, "V must be 2m x 2m");
  }
  FeedbackGain g;
  g.B = V * d.C.transpose() + d.M;
  g.F = -Mat::Identity(d.m, d.m);
  return g;
}

DesignResult synthesize(const DesignRequest& request) {
  const Eigen::Index n = request.V_s.rows();
  if (request.V_s.cols() != n || n == 0 || n % 2 != 0) {
    throw Error(ErrorCode::kInvalidInput, "V_s must be 2m x 2m");
  }
  const Eigen::Index m = n / 2;
  const Mat V_s = 0.5 * (request.V_s + request.V_s.transpose());
  if ((V_s - request.V_s).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, V_s.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kInvalidInput, "V_s must be symmetric");
  }

  const PurityReport target_purity = is_pure(V_s, m);
  if (!target_purity.pure) {
    throw Error(ErrorCode::kNotPure,
                "target covariance is not pure (identity residual = " +
                    std::to_string(target_purity.residual) + ", purity = " +
                    std::to_string(target_purity.purity) + ")");
  }

  const Mat R = request.R.value_or(default_R(m));
  const Mat Im = request.Im.value_or(Mat::Zero(m, n));
  if (R.rows() != m || R.cols() != n || Im.rows() != m || Im.cols() != n) {
    throw Error(ErrorCode::kInvalidInput, "R and Im must be m x 2m");
  }

  const Mat J = symplectic_form(m);
  Mat stacked(n, n);
  stacked.topRows(m) = R * V_s * J;
  stacked.bottomRows(m) = R;
  Eigen::JacobiSVD<Mat> svd(stacked);
  const double sigma_scale = std::max(1.0, svd.singularValues()(0));
  const double rank_margin = svd.singularValues()(n - 1) / sigma_scale;
  if (rank_margin <= 1e-8) {
    throw Error(ErrorCode::kRankDeficient,
                "[R V_s J; R] is rank deficient (scaled sigma_min = " +
                    std::to_string(rank_margin) + "); pick a different R");
  }

  const Mat RtR = R.transpose() * R;
  const Mat G = -R.transpose() * Im - Im.transpose() * R +
                2.0 * J.transpose() * V_s * RtR + 2.0 * RtR * V_s * J;

  CMat Lambda(m, n);
  Lambda.real() = R;
  Lambda.imag() = Im;

  // Drive realizing the innovation-canceling B: B = V_s C^T + M and
  // B = J (K + K^*), so a real K = J^T B / 2 reproduces it.
  const Mat C = 2.0 * R;
  const Mat M = -J * Im.transpose();
  const Mat B = V_s * C.transpose() + M;
  const CMat K = (0.5 * (J.transpose() * B)).cast<Cplx>();

  DesignResult result;
  result.system =
      SystemSpec::validated(m, G, Lambda, K, request.eta);
  result.B = B;
  result.F = -Mat::Identity(m, m);
  result.rank_margin = rank_margin;
  result.verification = steady_state_verdict(result.system);
  return result;
}

}  // namespace gsp
