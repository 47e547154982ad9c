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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <string>

#include "gsprep/acceptance.hpp"
#include "gsprep/scenario.hpp"

namespace {

using nlohmann::json;

struct CmdResult {
  int exit_code = -1;
  std::string output;
};

// Runs the installed binary with stderr folded into stdout.
CmdResult run_cli(const std::string& args) {
  const std::string cmd = std::string(GSPREP_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) {
    res.output.append(buf, got);
  }
  const int status = pclose(pipe);
  if (WIFEXITED(status)) {
    res.exit_code = WEXITSTATUS(status);
  }
  return res;
}

std::string fresh_dir() {
  char tmpl[] = "/tmp/gsprep_cli_XXXXXX";
  char* dir = mkdtemp(tmpl);
  REQUIRE(dir != nullptr);
  return dir;
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  const std::string path = dir + "/" + name;
  std::ofstream f(path);
  REQUIRE(f.good());
  f << content;
  return path;
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  return json::parse(f);
}

std::string scenario_path(const char* name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

const char* kSmokeScenario = R"({
  "name": "smoke",
  "system": {
    "m": 1,
    "G": [[2.0, 0.0], [0.0, 0.0]],
    "Lambda_re": [[1.0, 0.0]],
    "Lambda_im": [[-1.0, 1.0]],
    "eta": 1.0
  },
  "sim": {
    "dt": 0.001, "T": 0.5, "n_traj": 200, "seed": 31415,
    "store_trajectories": 2, "max_samples": 21
  },
  "outputs": ["report", "ensemble_summary", "covariance_series",
              "trajectories"]
})";

}  // namespace

TEST_CASE("analyze reports the reference steady state") {
  const std::string dir = fresh_dir();
  const CmdResult r = run_cli("analyze --scenario " +
                              scenario_path("example1.json") + " --out " + dir);
  CHECK(r.exit_code == 0);

  const json rep = load_json(dir + "/analyze_report.json");
  CHECK(rep["scenario"] == "example1");
  CHECK(rep["detectable"]["verdict"].get<bool>());
  CHECK(rep["detectable_after_injection"]["verdict"].get<bool>());
  CHECK(rep["closed_loop_stable"].get<bool>());
  CHECK(rep["purity"]["pure"].get<bool>());
  CHECK(rep["purity"]["value"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep["V"][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(rep["V"][1][1].get<double>() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(std::abs(rep["V"][0][1].get<double>()) <= 1e-8);
  for (const json& eig : rep["closed_loop_eigenvalues"]) {
    CHECK(eig["re"].get<double>() == doctest::Approx(-1.0).epsilon(1e-6));
    CHECK(std::abs(eig["im"].get<double>()) <= 1e-6);
  }
  CHECK(rep["axis_equivalence"]["consistent"].get<bool>());
  CHECK(rep["unconditional_pd_feasibility"]["status"] == "infeasible");
  CHECK(rep["unconditional_pd_feasibility"]["certified"].get<bool>());
  CHECK(rep["unconditional_pd_feasibility"]["nullity"].get<int>() == 1);
  CHECK(rep["V_unconditional"][1][1].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("efficiency sweep entries stay physical and ordered") {
  const std::string dir = fresh_dir();
  const CmdResult r = run_cli("analyze --scenario " +
                              scenario_path("eta_sweep.json") + " --out " +
                              dir);
  CHECK(r.exit_code == 0);
  const json rep = load_json(dir + "/analyze_report.json");
  REQUIRE(rep.contains("eta_sweep"));
  const json& sweep = rep["eta_sweep"];
  REQUIRE(sweep.size() == 4);
  double last_purity = 0.0;
  for (const json& entry : sweep) {
    CHECK(entry["solved"].get<bool>());
    CHECK(entry["heisenberg_margin"].get<double>() >= -1e-8);
    CHECK(entry["unconditional_minus_conditional_min_eig"].get<double>() >=
          -1e-8);
    const double purity = entry["purity"].get<double>();
    CHECK(purity >= last_purity - 1e-12);  // better detectors, purer states
    last_purity = purity;
  }
  CHECK(sweep.back()["eta"].get<double>() == doctest::Approx(1.0));
  CHECK(last_purity == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("efficiency override from the command line") {
  const std::string dir = fresh_dir();
  const CmdResult r =
      run_cli("analyze --scenario " + scenario_path("example1.json") +
              " --eta 0.5 --out " + dir);
  CHECK(r.exit_code == 0);
  const json rep = load_json(dir + "/analyze_report.json");
  CHECK(rep["eta"].get<double>() == doctest::Approx(0.5));
  CHECK(rep["purity"]["value"].get<double>() < 0.999);
  CHECK(rep["heisenberg"]["verdict"].get<bool>());
}

TEST_CASE("design emits a verified, re-ingestible system") {
  const std::string dir = fresh_dir();
  const CmdResult r = run_cli("design --scenario " +
                              scenario_path("squeezed.json") + " --out " + dir);
  CHECK(r.exit_code == 0);

  const json rep = load_json(dir + "/design_report.json");
  CHECK(rep["rank_margin"].get<double>() > 1e-8);
  CHECK(rep["verification"]["target_recovery_rel_error"].get<double>() <=
        1e-6);

  // The emitted scenario must analyze cleanly to the same covariance.
  const std::string dir2 = fresh_dir();
  const CmdResult r2 =
      run_cli("analyze --scenario " + dir + "/system.json --out " + dir2);
  CHECK(r2.exit_code == 0);
  const json rep2 = load_json(dir2 + "/analyze_report.json");
  CHECK(rep2["scenario"] == "squeezed-synthesized");
  CHECK(rep2["V"][0][0].get<double>() ==
        doctest::Approx(0.18393972058572116).epsilon(1e-6));
  CHECK(rep2["V"][1][1].get<double>() ==
        doctest::Approx(1.3591409142295226).epsilon(1e-6));
  CHECK(rep2["purity"]["pure"].get<bool>());
}

TEST_CASE("design rejects impure targets with the documented code") {
  const std::string dir = fresh_dir();
  const std::string path = write_file(
      dir, "impure.json",
      R"({"name": "impure", "design": {"V_s": [[1.0, 0.0], [0.0, 1.0]]}})");
  const CmdResult r = run_cli("design --scenario " + path);
  CHECK(r.exit_code == 4);
  CHECK(r.output.find("not_pure") != std::string::npos);
}

TEST_CASE("analyze flags undetectable systems with the documented code") {
  const std::string dir = fresh_dir();
  const std::string path = write_file(dir, "deaf.json", R"({
    "name": "deaf",
    "system": {
      "m": 1,
      "G": [[0.0, -1.0], [-1.0, 0.0]],
      "Lambda_re": [[0.0, 0.0]],
      "Lambda_im": [[0.0, 0.0]]
    }
  })");
  const CmdResult r = run_cli("analyze --scenario " + path);
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("not_detectable") != std::string::npos);
}

TEST_CASE("configuration errors exit with the parse code") {
  const std::string dir = fresh_dir();

  const std::string bad = write_file(dir, "bad.json", "{ not json");
  CHECK(run_cli("analyze --scenario " + bad).exit_code == 2);

  const std::string both = write_file(dir, "both.json", R"({
    "name": "both",
    "system": {"m": 1, "G": [[0.0, 0.0], [0.0, 0.0]],
               "Lambda_re": [[1.0, 0.0]], "Lambda_im": [[0.0, 0.0]]},
    "design": {"V_s": [[0.5, 0.0], [0.0, 0.5]]}
  })");
  CHECK(run_cli("analyze --scenario " + both).exit_code == 2);

  const std::string neither =
      write_file(dir, "neither.json", R"({"name": "neither"})");
  CHECK(run_cli("analyze --scenario " + neither).exit_code == 2);

  const std::string bad_output = write_file(dir, "bad_output.json", R"({
    "name": "bad-output",
    "system": {"m": 1, "G": [[2.0, 0.0], [0.0, 0.0]],
               "Lambda_re": [[1.0, 0.0]], "Lambda_im": [[-1.0, 1.0]]},
    "outputs": ["report", "bogus"]
  })");
  const CmdResult r = run_cli("analyze --scenario " + bad_output);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("config_parse") != std::string::npos);
}

TEST_CASE("simulate writes summary, series, and trajectories") {
  const std::string dir = fresh_dir();
  const std::string path = write_file(dir, "smoke.json", kSmokeScenario);
  const CmdResult r = run_cli("simulate --scenario " + path + " --out " + dir);
  CHECK(r.exit_code == 0);

  const json summary = load_json(dir + "/ensemble_summary.json");
  CHECK(summary["seed"].get<std::uint64_t>() == 31415);
  CHECK(summary["feedback_mode"] == "none");
  CHECK(summary["ensemble_identity_rel_residual"].get<double>() <= 0.6);
  CHECK(summary["Vc_final"][0][0].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-6));

  std::ifstream series(dir + "/covariance_series.csv");
  REQUIRE(series.good());
  std::string header;
  std::getline(series, header);
  CHECK(header.rfind("t,mean_1,mean_2,Vc_1_1", 0) == 0);
  CHECK(header.find(",Vunc_1_1") != std::string::npos);  // open loop
  int rows = 0;
  for (std::string line; std::getline(series, line);) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 21);

  std::ifstream traj(dir + "/trajectories.csv");
  REQUIRE(traj.good());
  std::getline(traj, header);
  CHECK(header == "t,traj0_x1,traj0_x2,traj1_x1,traj1_x2");
}

TEST_CASE("seed and kernel overrides reach the simulator") {
  const std::string dir = fresh_dir();
  const std::string path = write_file(dir, "smoke.json", kSmokeScenario);
  const CmdResult r = run_cli("simulate --scenario " + path +
                              " --seed 999 --serial --out " + dir);
  CHECK(r.exit_code == 0);
  const json summary = load_json(dir + "/ensemble_summary.json");
  CHECK(summary["seed"].get<std::uint64_t>() == 999);
  CHECK_FALSE(summary["used_parallel"].get<bool>());
}

TEST_CASE("oversized steps exit with the integrator code") {
  const std::string dir = fresh_dir();
  const std::string path = write_file(dir, "coarse.json", R"({
    "name": "coarse",
    "system": {"m": 1, "G": [[2.0, 0.0], [0.0, 0.0]],
               "Lambda_re": [[1.0, 0.0]], "Lambda_im": [[-1.0, 1.0]]},
    "sim": {"dt": 5.0, "T": 10.0, "n_traj": 4,
            "V0": [[5.0, 0.0], [0.0, 5.0]]}
  })");
  const CmdResult r = run_cli("simulate --scenario " + path);
  CHECK(r.exit_code == 8);
  CHECK(r.output.find("step_size_too_large") != std::string::npos);
}

TEST_CASE("golden reference check catches an injected sign error") {
  gsp::Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  gsp::CMat Lambda(1, 2);
  Lambda(0, 0) = gsp::Cplx(1.0, -1.0);
  Lambda(0, 1) = gsp::Cplx(0.0, 1.0);
  const gsp::DerivedMatrices d = gsp::derive_matrices(
      gsp::SystemSpec::validated(1, G, Lambda, gsp::CMat(), 1.0));

  std::string why;
  CHECK(gsp::reference_system_check(d, &why));
  CHECK(why.find("worst deviation") != std::string::npos);

  gsp::DerivedMatrices corrupted = d;
  corrupted.M = -corrupted.M;
  std::string complaint;
  CHECK_FALSE(gsp::reference_system_check(corrupted, &complaint));
  CHECK(complaint.find("A - M C") != std::string::npos);
}

TEST_CASE("scenario round trip preserves the document") {
  const gsp::Scenario sc = gsp::load_scenario(scenario_path("example1.json"));
  const nlohmann::json j = gsp::scenario_to_json(sc);
  const gsp::Scenario rt = gsp::parse_scenario(j);

  CHECK(rt.name == sc.name);
  REQUIRE(rt.system.has_value());
  REQUIRE(sc.system.has_value());
  CHECK(rt.system->m == sc.system->m);
  CHECK((rt.system->G - sc.system->G).norm() == 0.0);
  CHECK((rt.system->Lambda - sc.system->Lambda).norm() == 0.0);
  CHECK(rt.system->eta == sc.system->eta);
  CHECK(rt.sim.dt == sc.sim.dt);
  CHECK(rt.sim.T == sc.sim.T);
  CHECK(rt.sim.n_traj == sc.sim.n_traj);
  CHECK(rt.sim.seed == sc.sim.seed);
  CHECK(rt.sim.max_samples == sc.sim.max_samples);
  CHECK(rt.outputs == sc.outputs);
  CHECK(rt.eta_sweep == sc.eta_sweep);
}
