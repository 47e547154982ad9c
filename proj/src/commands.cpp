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

#include "gsprep/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>

#include "gsprep/acceptance.hpp"
#include "gsprep/analysis.hpp"
#include "gsprep/designer.hpp"
#include "gsprep/scenario.hpp"
#include "gsprep/simulator.hpp"

namespace gsp {

namespace {

using nlohmann::json;

int guarded(std::ostream& /*out*/, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    // e.what() already carries the "<tag>: " prefix.
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(ErrorCode::kInvalidInput);
  }
}

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json cplx_json(const Cplx& z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

json cvec_json(const CVec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(cplx_json(v(i)));
  }
  return arr;
}

json vec_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(v(i));
  }
  return arr;
}

json certificate_json(const Certificate& c) {
  json j = json::object();
  j["verdict"] = c.verdict;
  j["margin"] = c.margin;
  if (c.witness_eigenvalue) {
    j["witness_eigenvalue"] = cplx_json(*c.witness_eigenvalue);
  }
  return j;
}

json steady_report_json(const SteadyStateReport& rep) {
  json j = json::object();
  j["eta"] = rep.eta;
  j["derived"] = {{"A", mat_to_json(rep.d.A)}, {"B", mat_to_json(rep.d.B)},
                  {"C", mat_to_json(rep.d.C)}, {"M", mat_to_json(rep.d.M)},
                  {"N", mat_to_json(rep.d.N)}};
  j["detectable"] = certificate_json(rep.detectable_CA);
  j["detectable_after_injection"] = certificate_json(rep.detectable_CAmc);
  j["dom_ric"] = {{"imaginary_axis_free", rep.dom.imaginary_axis_free},
                  {"complementary", rep.dom.complementary},
                  {"detectable_pair", rep.dom.detectable_pair},
                  {"min_axis_distance", rep.dom.min_axis_distance},
                  {"subspace_condition", rep.dom.subspace_condition}};
  if (rep.V) {
    j["V"] = mat_to_json(*rep.V);
    j["riccati_residual"] = rep.riccati_residual;
    j["subspace_condition"] = rep.subspace_condition;
    j["closed_loop_eigenvalues"] = cvec_json(rep.closed_loop);
    j["closed_loop_stable"] = rep.closed_loop_stable;
    j["heisenberg"] = certificate_json(rep.heisenberg);
    j["purity"] = {{"pure", rep.purity.pure},
                   {"value", rep.purity.purity},
                   {"residual", rep.purity.residual}};
    j["measurement_free_residuals"] = {
        {"coupling", rep.pure_conditions.coupling},
        {"hamiltonian", rep.pure_conditions.hamiltonian},
        {"innovation_gain", rep.pure_conditions.innovation_gain}};
  }
  if (!rep.solver_error.empty()) {
    j["solver_error"] = rep.solver_error;
  }
  if (rep.V_unconditional) {
    j["V_unconditional"] = mat_to_json(*rep.V_unconditional);
  }
  return j;
}

void print_matrix(std::ostream& out, const Mat& m, const char* indent = "  ") {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << indent;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << m(r, c);
    }
    out << "\n";
  }
}

void print_steady_summary(std::ostream& out, const SteadyStateReport& rep) {
  out << "eta: " << rep.eta << "\n";
  out << "detectable [C, A]: " << (rep.detectable_CA.verdict ? "yes" : "no")
      << " (margin " << rep.detectable_CA.margin << ")\n";
  if (!rep.detectable_CA.verdict && rep.detectable_CA.witness_eigenvalue) {
    const Cplx w = *rep.detectable_CA.witness_eigenvalue;
    out << "  undetectable mode at lambda = " << w.real() << " + "
        << w.imag() << "i\n";
  }
  if (!rep.V) {
    if (!rep.solver_error.empty()) {
      out << "steady solve failed: " << rep.solver_error << "\n";
    }
    return;
  }
  out << "steady conditional covariance V:\n";
  print_matrix(out, *rep.V);
  out << "riccati residual: " << rep.riccati_residual << "\n";
  out << "closed-loop eigenvalues:";
  for (Eigen::Index i = 0; i < rep.closed_loop.size(); ++i) {
    out << " (" << rep.closed_loop(i).real() << ", "
        << rep.closed_loop(i).imag() << ")";
  }
  out << (rep.closed_loop_stable ? " [stable]" : " [NOT stable]") << "\n";
  out << "heisenberg: " << (rep.heisenberg.verdict ? "pass" : "FAIL")
      << " (margin " << rep.heisenberg.margin << ")\n";
  out << "purity: " << rep.purity.purity
      << (rep.purity.pure ? " [pure]" : " [mixed]") << "\n";
  out << "measurement-free steady residuals: coupling="
      << rep.pure_conditions.coupling
      << " hamiltonian=" << rep.pure_conditions.hamiltonian
      << " innovation_gain=" << rep.pure_conditions.innovation_gain << "\n";
  if (rep.V_unconditional) {
    out << "unconditional steady covariance:\n";
    print_matrix(out, *rep.V_unconditional);
  }
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kInvalidInput,
                "cannot create output directory '" + dir + "': " +
                    ec.message());
  }
}

SystemSpec apply_eta_override(const SystemSpec& spec,
                              const std::optional<double>& eta) {
  if (!eta) {
    return spec;
  }
  return SystemSpec::validated(spec.m, spec.G, spec.Lambda, spec.K, *eta);
}

json system_json(const SystemSpec& spec) {
  json sys = json::object();
  sys["m"] = static_cast<std::int64_t>(spec.m);
  sys["G"] = mat_to_json(spec.G);
  sys["Lambda_re"] = cmat_to_json_re(spec.Lambda);
  sys["Lambda_im"] = cmat_to_json_im(spec.Lambda);
  sys["K_re"] = cmat_to_json_re(spec.K);
  sys["K_im"] = cmat_to_json_im(spec.K);
  sys["eta"] = spec.eta;
  return sys;
}

void write_series_csv(const std::string& path, const EnsembleSeries& series,
                      const std::vector<Mat>* vunc) {
  const Eigen::Index n = series.mean.front().size();
  std::ostringstream csv;
  csv << "t";
  for (Eigen::Index i = 0; i < n; ++i) {
    csv << ",mean_" << i + 1;
  }
  auto matrix_header = [&](const char* tag) {
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        csv << "," << tag << "_" << r + 1 << "_" << c + 1;
      }
    }
  };
  matrix_header("Vc");
  matrix_header("Sigma");
  if (vunc) {
    matrix_header("Vunc");
  }
  csv << "\n";
  for (std::size_t k = 0; k < series.t.size(); ++k) {
    csv << fmt17(series.t[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      csv << "," << fmt17(series.mean[k](i));
    }
    auto matrix_row = [&](const Mat& m) {
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          csv << "," << fmt17(m(r, c));
        }
      }
    };
    matrix_row(series.Vc[k]);
    matrix_row(series.Sigma[k]);
    if (vunc) {
      matrix_row((*vunc)[k]);
    }
    csv << "\n";
  }
  write_text_atomic(path, csv.str());
}

void write_trajectories_csv(const std::string& path,
                            const std::vector<Trajectory>& trajs) {
  std::ostringstream csv;
  const Eigen::Index n = trajs.front().mean.front().size();
  csv << "t";
  for (std::size_t k = 0; k < trajs.size(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      csv << ",traj" << k << "_x" << i + 1;
    }
  }
  csv << "\n";
  for (std::size_t row = 0; row < trajs.front().t.size(); ++row) {
    csv << fmt17(trajs.front().t[row]);
    for (const Trajectory& tr : trajs) {
      for (Eigen::Index i = 0; i < n; ++i) {
        csv << "," << fmt17(tr.mean[row](i));
      }
    }
    csv << "\n";
  }
  write_text_atomic(path, csv.str());
}

}  // namespace

int cmd_analyze(const CommandOptions& opt, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario_path);
    if (!sc.system) {
      throw Error(ErrorCode::kConfigParse,
                  "analyze needs a scenario with a 'system' block");
    }
    const SystemSpec spec = apply_eta_override(*sc.system, opt.eta);
    const SteadyStateReport rep = steady_state_verdict(spec, opt.strict);

    json report = steady_report_json(rep);
    report["scenario"] = sc.name;

    const PdFeasibilityReport pd = unconditional_pd_feasibility(spec.G);
    const char* pd_status =
        pd.status == PdFeasibilityReport::Status::kInfeasible ? "infeasible"
        : pd.status == PdFeasibilityReport::Status::kFeasible ? "feasible"
                                                              : "undetermined";
    report["unconditional_pd_feasibility"] = {
        {"status", pd_status},
        {"certified", pd.certified},
        {"nullity", static_cast<std::int64_t>(pd.nullity)}};
    if (pd.witness.size() > 0) {
      report["unconditional_pd_feasibility"]["witness"] =
          mat_to_json(pd.witness);
    }

    const AxisModeEquivalence axis = axis_mode_equivalence(rep.d);
    report["axis_equivalence"] = {
        {"axis_unobservable_mode", axis.axis_unobservable_mode},
        {"axis_closed_loop_eigenvalue", axis.axis_closed_loop_eigenvalue},
        {"min_axis_distance", axis.min_axis_distance},
        {"consistent", axis.consistent()}};

    if (!sc.eta_sweep.empty()) {
      json sweep = json::array();
      for (double eta : sc.eta_sweep) {
        const SystemSpec swept =
            SystemSpec::validated(spec.m, spec.G, spec.Lambda, spec.K, eta);
        const SteadyStateReport srep = steady_state_verdict(swept, opt.strict);
        json entry = json::object();
        entry["eta"] = eta;
        entry["solved"] = srep.V.has_value();
        if (srep.V) {
          entry["V"] = mat_to_json(*srep.V);
          entry["purity"] = srep.purity.purity;
          entry["heisenberg_margin"] = srep.heisenberg.margin;
          if (srep.V_unconditional) {
            const Mat gap = *srep.V_unconditional - *srep.V;
            entry["unconditional_minus_conditional_min_eig"] =
                Eigen::SelfAdjointEigenSolver<Mat>(
                    0.5 * (gap + gap.transpose()))
                    .eigenvalues()
                    .minCoeff();
          }
        } else if (!srep.solver_error.empty()) {
          entry["solver_error"] = srep.solver_error;
        }
        sweep.push_back(std::move(entry));
      }
      report["eta_sweep"] = std::move(sweep);
    }

    out << "scenario: " << sc.name << "\n";
    print_steady_summary(out, rep);
    out << "unconditional PD feasibility: " << pd_status
        << (pd.certified ? " (certified)" : " (search only)") << "\n";

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      write_json_atomic(opt.out_dir + "/analyze_report.json", report);
    }

    if (!rep.detectable_CA.verdict) {
      std::ostringstream why;
      why << "the pair [C, A] has an undetectable unstable mode";
      if (rep.detectable_CA.witness_eigenvalue) {
        why << " at lambda = (" << rep.detectable_CA.witness_eigenvalue->real()
            << ", " << rep.detectable_CA.witness_eigenvalue->imag() << ")";
      }
      throw Error(ErrorCode::kNotDetectable, why.str());
    }
    if (!rep.V) {
      throw Error(rep.solver_code, rep.solver_error);
    }
    return 0;
  });
}

int cmd_design(const CommandOptions& opt, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario_path);
    if (!sc.design) {
      throw Error(ErrorCode::kConfigParse,
                  "design needs a scenario with a 'design' block");
    }
    DesignRequest req = *sc.design;
    if (opt.eta) {
      req.eta = *opt.eta;
    }
    const DesignResult res = synthesize(req);

    json report = json::object();
    report["scenario"] = sc.name;
    report["target_V_s"] = mat_to_json(req.V_s);
    report["rank_margin"] = res.rank_margin;
    report["system"] = system_json(res.system);
    report["B"] = mat_to_json(res.B);
    report["F"] = mat_to_json(res.F);

    json verification = steady_report_json(res.verification);
    double rel_error = -1.0;
    if (res.verification.V) {
      rel_error = (*res.verification.V - req.V_s).norm() /
                  std::max(1e-300, req.V_s.norm());
      verification["target_recovery_rel_error"] = rel_error;
    }
    report["verification"] = std::move(verification);

    out << "scenario: " << sc.name << "\n";
    out << "rank margin: " << res.rank_margin << "\n";
    out << "synthesized G:\n";
    print_matrix(out, res.system.G);
    out << "synthesized Lambda (re):\n";
    print_matrix(out, res.system.Lambda.real());
    out << "synthesized Lambda (im):\n";
    print_matrix(out, res.system.Lambda.imag());
    out << "drive B:\n";
    print_matrix(out, res.B);
    if (res.verification.V) {
      out << "round-trip covariance error: " << rel_error << "\n";
    }

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      write_json_atomic(opt.out_dir + "/design_report.json", report);
      Scenario emitted;
      emitted.name = sc.name.empty() ? "synthesized" : sc.name + "-synthesized";
      emitted.system = res.system;
      emitted.sim = sc.sim;
      emitted.outputs = {"report"};
      write_json_atomic(opt.out_dir + "/system.json",
                        scenario_to_json(emitted));
    }

    if (!res.verification.V) {
      throw Error(ErrorCode::kVerificationFailed,
                  "synthesized system has no steady covariance: " +
                      res.verification.solver_error);
    }
    if (rel_error > 1e-6) {
      throw Error(ErrorCode::kVerificationFailed,
                  "round-trip covariance error " + std::to_string(rel_error) +
                      " exceeds 1e-6");
    }
    return 0;
  });
}

int cmd_simulate(const CommandOptions& opt, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const Scenario sc = load_scenario(opt.scenario_path);
    if (!sc.system) {
      throw Error(ErrorCode::kConfigParse,
                  "simulate needs a scenario with a 'system' block");
    }
    const SystemSpec spec = apply_eta_override(*sc.system, opt.eta);
    SimConfig cfg = sc.sim;
    if (opt.seed) {
      cfg.seed = *opt.seed;
    }
    if (opt.serial) {
      cfg.parallel = false;
    }
    const bool want_traj =
        std::find(sc.outputs.begin(), sc.outputs.end(), "trajectories") !=
        sc.outputs.end();
    if (want_traj && cfg.store_trajectories == 0) {
      cfg.store_trajectories = std::min(10, cfg.n_traj);
    }

    const ConditionalRun run = simulate_conditional(spec, cfg);

    // The deterministic unconditional path shares the grid, so the ensemble
    // identity V_unc = V_c + Sigma can be checked per sampled time.
    std::optional<DeterministicRun> unc;
    if (run.feedback_mode == FeedbackMode::kNone) {
      unc = simulate_unconditional(spec, cfg);
    }

    json summary = json::object();
    summary["scenario"] = sc.name;
    summary["seed"] = cfg.seed;
    summary["eta"] = spec.eta;
    summary["config"] = scenario_to_json([&] {
      Scenario echo = sc;
      echo.system = spec;
      echo.sim = cfg;
      return echo;
    }());
    summary["used_parallel"] = run.used_parallel;
    summary["feedback_mode"] =
        run.feedback_mode == FeedbackMode::kNone ? "none" : "markovian";
    summary["gain_schedule"] =
        run.gain_schedule == GainSchedule::kTracking ? "tracking" : "fixed";
    summary["mean_of_means"] = vec_json(run.stats.mean_of_means);
    summary["mean_standard_error"] = vec_json(run.stats.mean_standard_error);
    summary["Sigma"] = mat_to_json(run.stats.Sigma);
    summary["Vc_final"] = mat_to_json(run.stats.Vc_final);
    summary["Vunc_ensemble"] = mat_to_json(run.stats.Vunc_ensemble);
    if (run.stats.Vunc_deterministic) {
      summary["Vunc_deterministic"] =
          mat_to_json(*run.stats.Vunc_deterministic);
      const double rel =
          (run.stats.Vunc_ensemble - *run.stats.Vunc_deterministic).norm() /
          std::max(1e-300, run.stats.Vunc_deterministic->norm());
      summary["ensemble_identity_rel_residual"] = rel;
      out << "ensemble identity |Vc+Sigma-Vunc|/|Vunc|: " << rel << "\n";
    }
    out << "trajectories: " << run.stats.n_traj << ", T = " << run.stats.T
        << ", kernel: " << (run.used_parallel ? "parallel" : "serial")
        << "\n";
    out << "final conditional covariance:\n";
    print_matrix(out, run.stats.Vc_final);
    out << "final mean-spread covariance:\n";
    print_matrix(out, run.stats.Sigma);

    if (!opt.out_dir.empty()) {
      ensure_out_dir(opt.out_dir);
      const bool want_summary =
          std::find(sc.outputs.begin(), sc.outputs.end(),
                    "ensemble_summary") != sc.outputs.end() ||
          std::find(sc.outputs.begin(), sc.outputs.end(), "report") !=
              sc.outputs.end();
      if (want_summary) {
        write_json_atomic(opt.out_dir + "/ensemble_summary.json", summary);
      }
      if (std::find(sc.outputs.begin(), sc.outputs.end(),
                    "covariance_series") != sc.outputs.end()) {
        write_series_csv(opt.out_dir + "/covariance_series.csv", run.series,
                         unc ? &unc->V : nullptr);
      }
      if (want_traj && !run.trajectories.empty()) {
        write_trajectories_csv(opt.out_dir + "/trajectories.csv",
                               run.trajectories);
      }
    }
    return 0;
  });
}

int cmd_verify(const CommandOptions& /*opt*/, std::ostream& out) {
  return guarded(out, [&]() -> int {
    const int failures = run_acceptance(out);
    if (failures > 0) {
      std::cerr << "error: " << to_string(ErrorCode::kVerificationFailed)
                << ": " << failures << " acceptance criteria failed\n";
      return exit_code_for(ErrorCode::kVerificationFailed);
    }
    return 0;
  });
}

}  // namespace gsp
