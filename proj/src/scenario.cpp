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

#include "gsprep/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gsprep/errors.hpp"

namespace gsp {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::kConfigParse, what);
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) {
    bad(std::string("missing required key '") + key + "'");
  }
  return *it;
}

double number_field(const json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (!it->is_number()) {
    bad(std::string("'") + key + "' must be a number");
  }
  return it->get<double>();
}

std::int64_t int_field(const json& j, const char* key, std::int64_t fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    return fallback;
  }
  if (!it->is_number_integer()) {
    bad(std::string("'") + key + "' must be an integer");
  }
  return it->get<std::int64_t>();
}

CMat complex_from_parts(const json& j, const char* re_key, const char* im_key,
                        const char* what) {
  const Mat re = json_to_mat(field(j, re_key), re_key);
  Mat im = Mat::Zero(re.rows(), re.cols());
  if (auto it = j.find(im_key); it != j.end()) {
    im = json_to_mat(*it, im_key);
    if (im.rows() != re.rows() || im.cols() != re.cols()) {
      bad(std::string(what) + ": real and imaginary parts have different "
                              "shapes");
    }
  }
  return re.cast<Cplx>() + Cplx(0.0, 1.0) * im.cast<Cplx>();
}

SystemSpec parse_system(const json& j) {
  if (!j.is_object()) {
    bad("'system' must be an object");
  }
  const std::int64_t m = int_field(j, "m", -1);
  if (m <= 0) {
    bad("'system.m' must be a positive integer");
  }
  const Mat G = json_to_mat(field(j, "G"), "system.G");
  const CMat Lambda = complex_from_parts(j, "Lambda_re", "Lambda_im",
                                         "system.Lambda");
  CMat K = CMat::Zero(2 * m, m);
  if (j.contains("K_re") || j.contains("K_im")) {
    const json& k_re = j.contains("K_re") ? j.at("K_re") : json::array();
    json with_parts = json::object();
    with_parts["K_re"] = k_re;
    if (j.contains("K_im")) {
      with_parts["K_im"] = j.at("K_im");
    }
    if (!j.contains("K_re")) {
      bad("'system.K_im' given without 'system.K_re'");
    }
    K = complex_from_parts(with_parts, "K_re", "K_im", "system.K");
  }
  const double eta = number_field(j, "eta", 1.0);
  return SystemSpec::validated(static_cast<Eigen::Index>(m), G, Lambda, K,
                               eta);
}

DesignRequest parse_design(const json& j) {
  if (!j.is_object()) {
    bad("'design' must be an object");
  }
  DesignRequest req;
  req.V_s = json_to_mat(field(j, "V_s"), "design.V_s");
  if (auto it = j.find("R"); it != j.end()) {
    req.R = json_to_mat(*it, "design.R");
  }
  if (auto it = j.find("Im"); it != j.end()) {
    req.Im = json_to_mat(*it, "design.Im");
  }
  req.eta = number_field(j, "eta", 1.0);
  return req;
}

FeedbackPolicy parse_feedback(const json& j) {
  FeedbackPolicy fb;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "none") {
      return fb;
    }
    if (s == "markovian") {
      fb.mode = FeedbackMode::kMarkovian;
      return fb;
    }
    bad("'sim.feedback' string must be 'none' or 'markovian'");
  }
  if (!j.is_object()) {
    bad("'sim.feedback' must be a string or an object");
  }
  const json& mode = field(j, "mode");
  if (!mode.is_string()) {
    bad("'sim.feedback.mode' must be a string");
  }
  const std::string mode_s = mode.get<std::string>();
  if (mode_s == "none") {
    fb.mode = FeedbackMode::kNone;
  } else if (mode_s == "markovian") {
    fb.mode = FeedbackMode::kMarkovian;
  } else {
    bad("'sim.feedback.mode' must be 'none' or 'markovian'");
  }
  if (auto it = j.find("gain"); it != j.end()) {
    if (!it->is_string()) {
      bad("'sim.feedback.gain' must be a string");
    }
    const std::string gain = it->get<std::string>();
    if (gain == "fixed") {
      fb.schedule = GainSchedule::kFixedSteady;
    } else if (gain == "tracking") {
      fb.schedule = GainSchedule::kTracking;
    } else {
      bad("'sim.feedback.gain' must be 'fixed' or 'tracking'");
    }
  }
  if (auto it = j.find("B"); it != j.end()) {
    fb.B = json_to_mat(*it, "sim.feedback.B");
  }
  if (auto it = j.find("F"); it != j.end()) {
    fb.F = json_to_mat(*it, "sim.feedback.F");
  }
  return fb;
}

SimConfig parse_sim(const json& j) {
  if (!j.is_object()) {
    bad("'sim' must be an object");
  }
  SimConfig sim;
  sim.dt = number_field(j, "dt", sim.dt);
  sim.T = number_field(j, "T", sim.T);
  sim.n_traj = static_cast<int>(int_field(j, "n_traj", sim.n_traj));
  const std::int64_t seed = int_field(j, "seed", 0);
  if (seed < 0) {
    bad("'sim.seed' must be nonnegative");
  }
  sim.seed = static_cast<std::uint64_t>(seed);
  if (auto it = j.find("feedback"); it != j.end()) {
    sim.feedback = parse_feedback(*it);
  }
  if (auto it = j.find("X0"); it != j.end()) {
    sim.X0 = json_to_vec(*it, "sim.X0");
  }
  if (auto it = j.find("V0"); it != j.end()) {
    sim.V0 = json_to_mat(*it, "sim.V0");
  }
  sim.max_samples = static_cast<Eigen::Index>(
      int_field(j, "max_samples", sim.max_samples));
  sim.store_trajectories = static_cast<int>(
      int_field(j, "store_trajectories", sim.store_trajectories));
  if (auto it = j.find("parallel"); it != j.end()) {
    if (!it->is_boolean()) {
      bad("'sim.parallel' must be a boolean");
    }
    sim.parallel = it->get<bool>();
  }
  return sim;
}

const std::set<std::string>& known_outputs() {
  static const std::set<std::string> kOutputs = {
      "report", "covariance_series", "ensemble_summary", "trajectories"};
  return kOutputs;
}

}  // namespace

Mat json_to_mat(const json& j, const char* what) {
  if (!j.is_array()) {
    bad(std::string(what) + " must be an array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) {
    return Mat(0, 0);
  }
  if (!j[0].is_array()) {
    bad(std::string(what) + " rows must be arrays");
  }
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(std::string(what) + " has ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        bad(std::string(what) + " entries must be numbers");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

Vec json_to_vec(const json& j, const char* what) {
  if (!j.is_array()) {
    bad(std::string(what) + " must be an array of numbers");
  }
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!j[i].is_number()) {
      bad(std::string(what) + " entries must be numbers");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row.push_back(m(r, c));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json cmat_to_json_re(const CMat& m) { return mat_to_json(m.real()); }

json cmat_to_json_im(const CMat& m) { return mat_to_json(m.imag()); }

Scenario parse_scenario(const json& j) {
  try {
    if (!j.is_object()) {
      bad("scenario document must be a JSON object");
    }
    Scenario s;
    if (auto it = j.find("name"); it != j.end()) {
      if (!it->is_string()) {
        bad("'name' must be a string");
      }
      s.name = it->get<std::string>();
    }
    const bool has_system = j.contains("system");
    const bool has_design = j.contains("design");
    if (has_system == has_design) {
      bad("scenario must contain exactly one of 'system' or 'design'");
    }
    if (has_system) {
      s.system = parse_system(j.at("system"));
    } else {
      s.design = parse_design(j.at("design"));
    }
    if (auto it = j.find("sim"); it != j.end()) {
      s.sim = parse_sim(*it);
    }
    if (auto it = j.find("outputs"); it != j.end()) {
      if (!it->is_array()) {
        bad("'outputs' must be an array of strings");
      }
      for (const json& o : *it) {
        if (!o.is_string()) {
          bad("'outputs' must be an array of strings");
        }
        const std::string name = o.get<std::string>();
        if (known_outputs().count(name) == 0) {
          bad("unknown output '" + name + "'");
        }
        s.outputs.push_back(name);
      }
    } else {
      s.outputs = {"report"};
    }
    if (auto it = j.find("eta_sweep"); it != j.end()) {
      if (!it->is_array()) {
        bad("'eta_sweep' must be an array of numbers");
      }
      for (const json& e : *it) {
        if (!e.is_number()) {
          bad("'eta_sweep' must be an array of numbers");
        }
        s.eta_sweep.push_back(e.get<double>());
      }
    }
    return s;
  } catch (const Error&) {
    throw;
  } catch (const json::exception& e) {
    bad(std::string("malformed scenario: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    bad("cannot open scenario file '" + path + "'");
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad("invalid JSON in '" + path + "': " + e.what());
  }
  return parse_scenario(j);
}

json scenario_to_json(const Scenario& s) {
  json j = json::object();
  j["name"] = s.name;
  if (s.system) {
    json sys = json::object();
    sys["m"] = static_cast<std::int64_t>(s.system->m);
    sys["G"] = mat_to_json(s.system->G);
    sys["Lambda_re"] = cmat_to_json_re(s.system->Lambda);
    sys["Lambda_im"] = cmat_to_json_im(s.system->Lambda);
    if (s.system->K.size() > 0 && s.system->K.norm() > 0.0) {
      sys["K_re"] = cmat_to_json_re(s.system->K);
      sys["K_im"] = cmat_to_json_im(s.system->K);
    }
    sys["eta"] = s.system->eta;
    j["system"] = std::move(sys);
  }
  if (s.design) {
    json des = json::object();
    des["V_s"] = mat_to_json(s.design->V_s);
    if (s.design->R) {
      des["R"] = mat_to_json(*s.design->R);
    }
    if (s.design->Im) {
      des["Im"] = mat_to_json(*s.design->Im);
    }
    des["eta"] = s.design->eta;
    j["design"] = std::move(des);
  }
  json sim = json::object();
  sim["dt"] = s.sim.dt;
  sim["T"] = s.sim.T;
  sim["n_traj"] = s.sim.n_traj;
  sim["seed"] = s.sim.seed;
  if (s.sim.feedback.mode == FeedbackMode::kNone) {
    sim["feedback"] = "none";
  } else {
    json fb = json::object();
    fb["mode"] = "markovian";
    fb["gain"] = s.sim.feedback.schedule == GainSchedule::kTracking
                     ? "tracking"
                     : "fixed";
    if (s.sim.feedback.B) {
      fb["B"] = mat_to_json(*s.sim.feedback.B);
    }
    if (s.sim.feedback.F) {
      fb["F"] = mat_to_json(*s.sim.feedback.F);
    }
    sim["feedback"] = std::move(fb);
  }
  if (s.sim.X0) {
    json x0 = json::array();
    for (Eigen::Index i = 0; i < s.sim.X0->size(); ++i) {
      x0.push_back((*s.sim.X0)(i));
    }
    sim["X0"] = std::move(x0);
  }
  if (s.sim.V0) {
    sim["V0"] = mat_to_json(*s.sim.V0);
  }
  sim["max_samples"] = static_cast<std::int64_t>(s.sim.max_samples);
  sim["store_trajectories"] = s.sim.store_trajectories;
  sim["parallel"] = s.sim.parallel;
  j["sim"] = std::move(sim);
  j["outputs"] = s.outputs;
  if (!s.eta_sweep.empty()) {
    j["eta_sweep"] = s.eta_sweep;
  }
  return j;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kInvalidInput, "cannot write '" + tmp + "'");
    }
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw Error(ErrorCode::kInvalidInput, "short write to '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Error(ErrorCode::kInvalidInput,
                "cannot move '" + tmp + "' into place");
  }
}

void write_json_atomic(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

}  // namespace gsp
