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

#ifndef GSPREP_SCENARIO_HPP_
#define GSPREP_SCENARIO_HPP_

#include <json.hpp>
#include <string>
#include <vector>

#include "gsprep/designer.hpp"
#include "gsprep/simulator.hpp"
#include "gsprep/system_model.hpp"

namespace gsp {

/// A scenario file names either a concrete system or a design target, plus
/// optional simulation settings, requested outputs, and an efficiency sweep.
struct Scenario {
  std::string name;
  std::optional<SystemSpec> system;
  std::optional<DesignRequest> design;
  SimConfig sim;
  std::vector<std::string> outputs;  // report, covariance_series,
                                     // ensemble_summary, trajectories
  std::vector<double> eta_sweep;
};

/// Parses and validates a scenario JSON document. All structural problems
/// (missing keys, ragged matrices, bad enum strings) throw
/// Error(kConfigParse); semantic validation errors keep their own codes.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario up to field ordering and float formatting.
nlohmann::json scenario_to_json(const Scenario& s);

// JSON <-> Eigen helpers shared by scenario and report code. Matrices are
// row-major nested arrays.
nlohmann::json mat_to_json(const Mat& m);
nlohmann::json cmat_to_json_re(const CMat& m);
nlohmann::json cmat_to_json_im(const CMat& m);
Mat json_to_mat(const nlohmann::json& j, const char* what);
Vec json_to_vec(const nlohmann::json& j, const char* what);

/// Writes through a temp file + rename, so readers never see partial output.
void write_text_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const nlohmann::json& j);

}  // namespace gsp

#endif  // GSPREP_SCENARIO_HPP_
