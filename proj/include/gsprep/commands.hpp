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

#ifndef GSPREP_COMMANDS_HPP_
#define GSPREP_COMMANDS_HPP_

#include <iostream>
#include <optional>
#include <string>

namespace gsp {

/// Options shared by the CLI subcommands. Absent optionals fall back to the
/// scenario file's values.
struct CommandOptions {
  std::string scenario_path;
  std::string out_dir;  // empty: no files, report to stdout
  std::optional<std::uint64_t> seed;
  std::optional<double> eta;
  bool strict = false;
  bool serial = false;  // force the serial ensemble kernel
};

// Each command returns a process exit code (0 on success; see
// exit_code_for in errors.hpp for the failure table).
int cmd_analyze(const CommandOptions& opt, std::ostream& out);
int cmd_design(const CommandOptions& opt, std::ostream& out);
int cmd_simulate(const CommandOptions& opt, std::ostream& out);
int cmd_verify(const CommandOptions& opt, std::ostream& out);

}  // namespace gsp

#endif  // GSPREP_COMMANDS_HPP_
