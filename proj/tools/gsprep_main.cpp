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

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "gsprep/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "gsprep: steady-state preparation, analysis, and simulation of "
      "continuously monitored Gaussian systems"};
  app.require_subcommand(1);

  gsp::CommandOptions opt;
  double eta = 0.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub, bool needs_scenario) {
    auto* sc = sub->add_option("--scenario", opt.scenario_path,
                               "scenario file (JSON)");
    if (needs_scenario) {
      sc->required()->check(CLI::ExistingFile);
    }
    sub->add_option("--out", opt.out_dir,
                    "output directory for reports and series");
    sub->add_option("--seed", seed, "override the scenario RNG seed");
    sub->add_option("--eta", eta,
                    "override the detection efficiency, in (0, 1]");
    sub->add_flag("--strict", opt.strict,
                  "treat an ill-conditioned invariant subspace as fatal");
    sub->add_flag("--serial", opt.serial,
                  "force the serial ensemble kernel");
  };
  // The bound doubles receive their values at the end of parsing, so the
  // optional overrides are latched afterwards based on what was seen.
  auto latch_overrides = [&](CLI::App* sub) {
    if (sub->count("--seed") > 0) {
      opt.seed = seed;
    }
    if (sub->count("--eta") > 0) {
      opt.eta = eta;
    }
  };

  CLI::App* analyze = app.add_subcommand(
      "analyze", "detectability, steady covariance, and certificates");
  add_common(analyze, true);
  CLI::App* design = app.add_subcommand(
      "design", "synthesize system parameters for a pure target covariance");
  add_common(design, true);
  CLI::App* simulate = app.add_subcommand(
      "simulate", "stochastic ensemble of the conditional moment equations");
  add_common(simulate, true);
  CLI::App* verify =
      app.add_subcommand("verify", "run the end-to-end acceptance suite");
  add_common(verify, false);

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) {
    latch_overrides(analyze);
    return gsp::cmd_analyze(opt, std::cout);
  }
  if (design->parsed()) {
    latch_overrides(design);
    return gsp::cmd_design(opt, std::cout);
  }
  if (simulate->parsed()) {
    latch_overrides(simulate);
    return gsp::cmd_simulate(opt, std::cout);
  }
  latch_overrides(verify);
  return gsp::cmd_verify(opt, std::cout);
}
