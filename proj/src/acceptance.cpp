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

#include "gsprep/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "gsprep/analysis.hpp"
#include "gsprep/cross_check.hpp"
#include "gsprep/designer.hpp"
#include "gsprep/random_instances.hpp"
#include "gsprep/riccati.hpp"
#include "gsprep/simulator.hpp"

namespace gsp {

namespace {

struct CriterionResult {
  bool ok = false;
  std::string detail;  // margin summary, or failure reason
};

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

/// Single-mode reference system: one damped mode monitored through one
/// quadrature, kappa = 1. Its steady conditional covariance is I/2.
SystemSpec reference_system(double eta) {
  Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  CMat Lambda(1, 2);
  Lambda(0, 0) = Cplx(1.0, -1.0);
  Lambda(0, 1) = Cplx(0.0, 1.0);
  const CMat K = CMat::Zero(2, 1);
  return SystemSpec::validated(1, G, Lambda, K, eta);
}

double min_eig_sym(const Mat& S) {
  return Eigen::SelfAdjointEigenSolver<Mat>(0.5 * (S + S.transpose()))
      .eigenvalues()
      .minCoeff();
}

double min_eig_herm(const CMat& H) {
  return Eigen::SelfAdjointEigenSolver<CMat>(0.5 * (H + H.adjoint()))
      .eigenvalues()
      .minCoeff();
}

// ---------------------------------------------------------------------------
// 1. Reference-system golden values.

CriterionResult criterion_reference() {
  const DerivedMatrices d = derive_matrices(reference_system(1.0));
  std::string why;
  if (!reference_system_check(d, &why)) {
    return {false, why};
  }
  return {true, why};
}

// ---------------------------------------------------------------------------
// 2. No positive definite covariance is held steady by the reference
//    Hamiltonian without conditioning.

CriterionResult criterion_pd_infeasible() {
  Mat G(2, 2);
  G << 2.0, 0.0, 0.0, 0.0;
  const PdFeasibilityReport rep = unconditional_pd_feasibility(G);
  if (rep.status != PdFeasibilityReport::Status::kInfeasible) {
    return {false, "expected an infeasible verdict"};
  }
  if (!rep.certified) {
    return {false, "infeasibility was not certified"};
  }
  return {true, "certified, symmetric nullity " + std::to_string(rep.nullity)};
}

// ---------------------------------------------------------------------------
// 3. Random equation suite with an independent Newton iteration oracle.

CriterionResult criterion_riccati_suite() {
  std::mt19937_64 rng(1234503);
  double worst_residual = 0.0;
  double worst_herm = 0.0;
  double worst_psd = 0.0;
  double worst_oracle = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Eigen::Index n = (i % 6) + 1;
    const RiccatiProblem prob = testing::random_dom_ric_problem(n, rng);
    RiccatiSolution sol;
    try {
      sol = solve_are(prob);
    } catch (const Error& e) {
      return {false, "instance " + std::to_string(i) +
                         " failed to solve: " + e.what()};
    }
    const double xnorm = sol.X.norm();
    const double scale =
        std::max(1.0, 2.0 * prob.F.norm() * xnorm +
                          prob.P.norm() * xnorm * xnorm + prob.Kc.norm());
    const double rel = sol.residual / scale;
    worst_residual = std::max(worst_residual, rel);
    if (rel > 1e-8) {
      return {false, "instance " + std::to_string(i) + " residual " +
                         sci(sol.residual) + " exceeds 1e-8 * scale"};
    }
    const double herm = (sol.X - sol.X.adjoint()).cwiseAbs().maxCoeff();
    worst_herm = std::max(worst_herm, herm);
    if (herm > 1e-10) {
      return {false, "instance " + std::to_string(i) +
                         " solution not Hermitian: " + sci(herm)};
    }
    const double re_max = sol.closed_loop_spectrum.real().maxCoeff();
    if (re_max >= 0.0) {
      return {false, "instance " + std::to_string(i) +
                         " closed loop not strictly stable: max Re = " +
                         sci(re_max)};
    }
    const double xmin = min_eig_herm(sol.X);
    worst_psd = std::min(worst_psd, xmin);
    if (xmin < -1e-8) {
      return {false, "instance " + std::to_string(i) +
                         " solution indefinite: min eig = " + sci(xmin)};
    }
    if (n <= 3) {
      CMat oracle;
      try {
        oracle = crosscheck::newton_kleinman_are(prob);
      } catch (const Error& e) {
        return {false, "instance " + std::to_string(i) +
                           " oracle failed: " + e.what()};
      }
      const double diff =
          (oracle - sol.X).norm() / std::max(1.0, sol.X.norm());
      worst_oracle = std::max(worst_oracle, diff);
      if (diff > 1e-7) {
        return {false, "instance " + std::to_string(i) +
                           " disagrees with the Newton oracle by " +
                           sci(diff)};
      }
    }
  }
  return {true, "500 instances; worst residual " + sci(worst_residual) +
                    ", worst oracle gap " + sci(worst_oracle)};
}

// ---------------------------------------------------------------------------
// 4. Steady conditional states of random detectable systems are physical and
//    pure at unit efficiency.

CriterionResult criterion_pure_steady() {
  std::mt19937_64 rng(1234504);
  double worst_heis = 0.0;
  double worst_purity = 0.0;
  for (Eigen::Index m = 1; m <= 3; ++m) {
    for (int i = 0; i < 100; ++i) {
      const SystemSpec spec = testing::random_detectable_system(m, rng);
      const SteadyStateReport rep = steady_state_verdict(spec);
      if (!rep.V) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) +
                           " has no steady covariance: " + rep.solver_error};
      }
      const CMat herm =
          rep.V->cast<Cplx>() + Cplx(0.0, 0.5) * rep.d.J.cast<Cplx>();
      const double hmin = min_eig_herm(herm);
      worst_heis = std::min(worst_heis, hmin);
      if (hmin < -1e-8) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) +
                           " violates the uncertainty bound: " + sci(hmin)};
      }
      const PurityReport purity = is_pure(*rep.V, m);
      const double vnorm = rep.V->norm();
      const double allowed = 1e-6 * std::max(1.0, vnorm * vnorm);
      worst_purity = std::max(worst_purity, purity.residual / allowed);
      if (purity.residual > allowed) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) + " purity residual " +
                           sci(purity.residual) + " exceeds " + sci(allowed)};
      }
    }
  }
  return {true, "300 systems; worst uncertainty margin " + sci(worst_heis) +
                    ", worst scaled purity residual " + sci(worst_purity)};
}

// ---------------------------------------------------------------------------
// 5. Inverse design round trip for random pure targets.

CriterionResult criterion_design_roundtrip() {
  std::mt19937_64 rng(1234505);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  double worst_rel = 0.0;
  double worst_sub = 0.0;
  for (Eigen::Index m = 1; m <= 3; ++m) {
    for (int i = 0; i < 100; ++i) {
      DesignRequest req;
      req.V_s = testing::random_pure_covariance(m, rng);
      Mat im(m, 2 * m);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index c = 0; c < 2 * m; ++c) {
          im(r, c) = uni(rng);
        }
      }
      req.Im = im;
      DesignResult res;
      try {
        res = synthesize(req);
      } catch (const Error& e) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) + " failed: " + e.what()};
      }
      if (!res.verification.V) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) + " round trip has no steady V: " +
                           res.verification.solver_error};
      }
      const double rel =
          (*res.verification.V - req.V_s).norm() / req.V_s.norm();
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-6) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) + " recovery error " + sci(rel)};
      }
      // Direct substitution into the unit-efficiency steady equation.
      const DerivedMatrices d = derive_matrices(res.system);
      const Mat Amc = d.A - d.M * d.C;
      const Mat CtC = d.C.transpose() * d.C;
      const Mat quarter =
          0.25 * (d.J * CtC * d.J.transpose());
      const Mat resid = Amc * req.V_s + req.V_s * Amc.transpose() -
                        req.V_s * CtC * req.V_s + quarter;
      const double vnorm = req.V_s.norm();
      const double scale =
          std::max(1.0, 2.0 * Amc.norm() * vnorm +
                            CtC.norm() * vnorm * vnorm + quarter.norm());
      const double sub = resid.norm() / scale;
      worst_sub = std::max(worst_sub, sub);
      if (sub > 1e-9) {
        return {false, "m=" + std::to_string(m) + " instance " +
                           std::to_string(i) + " substitution residual " +
                           sci(sub)};
      }
    }
  }
  return {true, "300 targets; worst recovery " + sci(worst_rel) +
                    ", worst substitution residual " + sci(worst_sub)};
}

// ---------------------------------------------------------------------------
// 6. Monte Carlo covariance decomposition V_unc = V_c + Sigma.

constexpr std::uint64_t kEnsembleSeed = 987654321ULL;

SimConfig ensemble_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 10.0;
  cfg.n_traj = 10000;
  cfg.seed = seed;
  cfg.max_samples = 11;
  return cfg;
}

CriterionResult criterion_ensemble_identity(
    std::optional<ConditionalRun>& cache) {
  const SystemSpec spec = reference_system(1.0);
  ConditionalRun run;
  try {
    run = simulate_conditional(spec, ensemble_config(kEnsembleSeed));
  } catch (const Error& e) {
    return {false, std::string("ensemble run failed: ") + e.what()};
  }
  if (!run.stats.Vunc_deterministic) {
    return {false, "deterministic unconditional covariance missing"};
  }
  const double rel =
      (run.stats.Vunc_ensemble - *run.stats.Vunc_deterministic).norm() /
      run.stats.Vunc_deterministic->norm();
  cache = std::move(run);
  if (rel > 0.05) {
    return {false, "identity residual " + sci(rel) + " exceeds 0.05"};
  }
  return {true, "10000 trajectories; identity residual " + sci(rel)};
}

// ---------------------------------------------------------------------------
// 7. Efficiency sweep: existence, physicality, purity ordering.

CriterionResult criterion_eta_sweep() {
  const double etas[] = {0.25, 0.5, 0.75, 1.0};
  double worst_gap = 0.0;
  double purity_at_unit = 0.0;
  double max_purity = 0.0;
  for (double eta : etas) {
    const SteadyStateReport rep = steady_state_verdict(reference_system(eta));
    if (!rep.V) {
      return {false, "eta=" + std::to_string(eta) +
                         ": no stabilizing solution: " + rep.solver_error};
    }
    if (!rep.closed_loop_stable) {
      return {false, "eta=" + std::to_string(eta) + ": closed loop unstable"};
    }
    if (!rep.heisenberg.verdict) {
      return {false, "eta=" + std::to_string(eta) +
                         ": uncertainty certificate failed"};
    }
    max_purity = std::max(max_purity, rep.purity.purity);
    if (eta == 1.0) {
      purity_at_unit = rep.purity.purity;
    }
    if (!rep.V_unconditional) {
      return {false, "eta=" + std::to_string(eta) +
                         ": drift not stable, no unconditional covariance"};
    }
    const double gap = min_eig_sym(*rep.V_unconditional - *rep.V);
    worst_gap = std::min(worst_gap, gap);
    if (gap < -1e-8) {
      return {false, "eta=" + std::to_string(eta) +
                         ": conditioning did not shrink the covariance, "
                         "min eig gap " +
                         sci(gap)};
    }
  }
  if (std::abs(purity_at_unit - 1.0) > 1e-6) {
    return {false, "purity at eta=1 is " + sci(purity_at_unit)};
  }
  if (max_purity > 1.0 + 1e-8) {
    return {false, "purity exceeds 1: " + sci(max_purity)};
  }
  return {true, "4 efficiencies; worst ordering margin " + sci(worst_gap) +
                    ", purity(1) - 1 = " + sci(purity_at_unit - 1.0)};
}

// ---------------------------------------------------------------------------
// 8. Agreement of the two imaginary-axis mode tests.

CriterionResult criterion_axis_equivalence() {
  std::mt19937_64 rng(1234508);
  double closest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index m = (i % 3) + 1;
    const SystemSpec spec = testing::random_system(m, rng);
    const DerivedMatrices d = derive_matrices(spec);
    const AxisModeEquivalence eq = axis_mode_equivalence(d);
    closest = std::min(closest, eq.min_axis_distance);
    if (!eq.consistent()) {
      return {false, "instance " + std::to_string(i) +
                         " (m=" + std::to_string(m) +
                         "): rank test says " +
                         (eq.axis_unobservable_mode ? "axis mode"
                                                    : "no axis mode") +
                         ", spectrum says the opposite (axis distance " +
                         sci(eq.min_axis_distance) + ")"};
    }
  }
  return {true, "200 systems agree; closest axis approach " + sci(closest)};
}

// ---------------------------------------------------------------------------
// 9. Transient equation converges to the steady fixed point.

CriterionResult criterion_ode_convergence() {
  const SystemSpec spec = reference_system(1.0);
  const DerivedMatrices d = derive_matrices(spec);
  const Mat half = 0.5 * Mat::Identity(2, 2);
  std::vector<Mat> starts;
  starts.push_back(5.0 * Mat::Identity(2, 2));
  starts.push_back(half);
  Mat diag(2, 2);
  diag << 3.0, 0.0, 0.0, 0.3;
  starts.push_back(diag);
  double worst_final = 0.0;
  for (const Mat& v0 : starts) {
    CovarianceSeries series;
    try {
      series = integrate_riccati_ode(d, 1.0, v0, 20.0, 1e-3,
                                     StepMode::kAdaptive);
    } catch (const Error& e) {
      return {false, std::string("integration failed: ") + e.what()};
    }
    const double err = (series.back() - half).norm();
    worst_final = std::max(worst_final, err);
    if (err > 1e-6) {
      return {false, "final distance to the fixed point " + sci(err)};
    }
  }
  // Starting exactly at the fixed point must stay there.
  const CovarianceSeries flat =
      integrate_riccati_ode(d, 1.0, half, 20.0, 1e-3, StepMode::kAdaptive);
  double drift = 0.0;
  for (const Mat& v : flat.V) {
    drift = std::max(drift, (v - half).norm());
  }
  if (drift > 20.0 * 1e-9) {
    return {false, "fixed point drifts by " + sci(drift) + " over 20 units"};
  }
  return {true, "3 starts; worst final distance " + sci(worst_final) +
                    ", fixed-point drift " + sci(drift)};
}

// ---------------------------------------------------------------------------
// 10. Determinism and seed sensitivity of the ensemble kernel.

CriterionResult criterion_determinism(
    const std::optional<ConditionalRun>& cached) {
  const SystemSpec spec = reference_system(1.0);
  ConditionalRun first;
  try {
    if (cached) {
      first = *cached;
    } else {
      first = simulate_conditional(spec, ensemble_config(kEnsembleSeed));
    }
    const ConditionalRun repeat =
        simulate_conditional(spec, ensemble_config(kEnsembleSeed));
    if (!(first.stats.mean_of_means.array() ==
          repeat.stats.mean_of_means.array())
             .all() ||
        !(first.stats.Sigma.array() == repeat.stats.Sigma.array()).all() ||
        !(first.stats.Vc_final.array() == repeat.stats.Vc_final.array())
             .all()) {
      return {false, "same seed did not reproduce bit-identical statistics"};
    }
    const ConditionalRun other =
        simulate_conditional(spec, ensemble_config(kEnsembleSeed + 1));
    double worst_z = 0.0;
    for (Eigen::Index i = 0; i < first.stats.mean_of_means.size(); ++i) {
      const double se = std::hypot(first.stats.mean_standard_error(i),
                                   other.stats.mean_standard_error(i));
      const double z =
          std::abs(first.stats.mean_of_means(i) -
                   other.stats.mean_of_means(i)) /
          std::max(se, 1e-300);
      worst_z = std::max(worst_z, z);
    }
    if (worst_z > 3.0) {
      return {false,
              "different seeds disagree by " + sci(worst_z) +
                  " combined standard errors"};
    }
    // Second-moment agreement, scaled by the sampling error of a covariance
    // estimate from n trajectories.
    const double n = static_cast<double>(first.stats.n_traj);
    const double tol = 3.0 * std::sqrt(2.0 / n) *
                       (first.stats.Sigma.norm() + other.stats.Sigma.norm());
    const double sdiff = (first.stats.Sigma - other.stats.Sigma).norm();
    if (sdiff > std::max(tol, 1e-12)) {
      return {false, "mean-spread covariances from different seeds differ by " +
                         sci(sdiff) + " (allowed " + sci(tol) + ")"};
    }
    return {true, "bit-identical repeat; cross-seed worst z = " +
                      sci(worst_z)};
  } catch (const Error& e) {
    return {false, std::string("ensemble run failed: ") + e.what()};
  }
}

}  // namespace

bool reference_system_check(const DerivedMatrices& d, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) {
      *why = msg;
    }
    return false;
  };
  double worst = 0.0;
  Mat c_expected(1, 2);
  c_expected << 2.0, 0.0;
  const double c_err = (d.C - c_expected).cwiseAbs().maxCoeff();
  worst = std::max(worst, c_err);
  if (c_err > 1e-12) {
    return fail("measurement row C mismatch: largest deviation " +
                sci(c_err));
  }
  Mat amc_expected(2, 2);
  amc_expected << 1.0, 0.0, 0.0, -1.0;
  const Mat amc = d.A - d.M * d.C;
  const double amc_err = (amc - amc_expected).cwiseAbs().maxCoeff();
  worst = std::max(worst, amc_err);
  if (amc_err > 1e-12) {
    return fail("A - M C mismatch: largest deviation " + sci(amc_err));
  }

  const RiccatiProblem prob = RiccatiProblem::validated(
      amc.transpose().cast<Cplx>(),
      (-(d.C.transpose() * d.C)).cast<Cplx>(),
      (d.N - d.M * d.M.transpose()).cast<Cplx>());
  RiccatiSolution sol;
  try {
    sol = solve_are(prob);
  } catch (const Error& e) {
    return fail(std::string("steady solve failed: ") + e.what());
  }
  const Mat V = sol.X.real();
  const double v_err =
      (V - 0.5 * Mat::Identity(2, 2)).cwiseAbs().maxCoeff();
  worst = std::max(worst, v_err);
  if (v_err > 1e-8) {
    return fail("steady covariance is not I/2: largest deviation " +
                sci(v_err));
  }
  const Mat closed = amc - V * (d.C.transpose() * d.C);
  const CVec eigs = Eigen::ComplexEigenSolver<CMat>(closed.cast<Cplx>())
                        .eigenvalues();
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    const double dev = std::abs(eigs(i) - Cplx(-1.0, 0.0));
    worst = std::max(worst, dev);
    if (dev > 1e-8) {
      return fail("closed-loop eigenvalue " + std::to_string(i) +
                  " is not -1: deviation " + sci(dev));
    }
  }
  const double p = purity(V, d.m);
  worst = std::max(worst, std::abs(p - 1.0));
  if (std::abs(p - 1.0) > 1e-10) {
    return fail("steady purity is " + sci(p) + ", expected 1");
  }
  if (why != nullptr) {
    *why = "worst deviation " + sci(worst);
  }
  return true;
}

int run_acceptance(std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  int failures = 0;
  int index = 0;
  std::optional<ConditionalRun> ensemble_cache;
  const std::vector<std::pair<std::string, std::function<CriterionResult()>>>
      criteria = {
          {"reference-system golden values", criterion_reference},
          {"measurement-free pure state infeasible for the reference "
           "Hamiltonian",
           criterion_pd_infeasible},
          {"random steady-equation suite with Newton oracle",
           criterion_riccati_suite},
          {"steady states of detectable systems are pure and physical",
           criterion_pure_steady},
          {"inverse design round trip on random pure targets",
           criterion_design_roundtrip},
          {"ensemble covariance decomposition",
           [&] { return criterion_ensemble_identity(ensemble_cache); }},
          {"efficiency sweep existence, physicality, and ordering",
           criterion_eta_sweep},
          {"imaginary-axis mode tests agree", criterion_axis_equivalence},
          {"transient covariance converges to the fixed point",
           criterion_ode_convergence},
          {"seeded ensemble determinism",
           [&] { return criterion_determinism(ensemble_cache); }},
      };
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto start = Clock::now();
    CriterionResult result;
    try {
      result = fn();
    } catch (const std::exception& e) {
      result = {false, std::string("unexpected exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(Clock::now() - start).count();
    if (!result.ok) {
      ++failures;
    }
    out << (result.ok ? "PASS" : "FAIL") << " " << index << "/10 " << name
        << " — " << result.detail << " [" << std::fixed
        << std::setprecision(2) << seconds << " s]\n";
    out.unsetf(std::ios::floatfield);
  }
  out << (failures == 0 ? "all criteria passed"
                        : std::to_string(failures) + " criteria FAILED")
      << "\n";
  return failures;
}

}  // namespace gsp
