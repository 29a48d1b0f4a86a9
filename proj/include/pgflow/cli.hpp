// Copyright 2026 The pgflow Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef PGFLOW_CLI_HPP
#define PGFLOW_CLI_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pgflow/config.hpp"
#include "pgflow/harness.hpp"

namespace pgflow {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfigError = 2 };

/// Command-line values that take precedence over the config file.
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

/// Loads `path` (empty: all defaults), applies overrides and validates.
RunConfig load_run_config(const std::string& path, const CliOverrides& o);

/// Names accepted by cmd_verify.
std::vector<std::string> experiment_names();
/// Runs one named experiment with [verify] parameters from cfg.
VerificationReport run_experiment(const RunConfig& cfg, const std::string& name);

// Each returns an ExitCode and writes its files under cfg.out_dir.
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_bound(const RunConfig& cfg, const std::vector<BoundKind>& kinds, std::ostream& log);
int cmd_verify(const RunConfig& cfg, const std::string& experiment, std::ostream& log);
int cmd_suite(const std::string& config_dir, const CliOverrides& o, std::ostream& log);

/// Full front end (argument parsing included); never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pgflow

#endif  // PGFLOW_CLI_HPP
