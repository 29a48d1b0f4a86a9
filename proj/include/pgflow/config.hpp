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


#ifndef PGFLOW_CONFIG_HPP
#define PGFLOW_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgflow/bounds.hpp"
#include "pgflow/experiments.hpp"
#include "pgflow/problems.hpp"
#include "pgflow/schedules.hpp"

namespace pgflow {

/// Sectioned key/value store. Text form:
///
///   # comment
///   [schedule]
///   psi = power 0.5
///   h = 0.25
///
/// JSON form: an object of objects, {"schedule": {"psi": "power 0.5", "h": 0.25}}.
/// Arrays are accepted for vector values and arrays of arrays for matrices.
class KeyValueConfig {
 public:
  using Section = std::map<std::string, std::string>;

  static KeyValueConfig parse_text(const std::string& text);
  static KeyValueConfig parse_json(const std::string& text);
  /// JSON when the first non-blank character is '{', text otherwise.
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& section) const { return data_.count(section) != 0; }
  const Section& section(const std::string& name) const;
  std::vector<std::string> section_names() const;
  void set(const std::string& section, const std::string& key, const std::string& value);

 private:
  std::map<std::string, Section> data_;
};

// Value parsing helpers; all throw ConfigError naming `what` on bad input.
double parse_double(const std::string& s, const std::string& what);
std::uint64_t parse_u64(const std::string& s, const std::string& what);
bool parse_bool(const std::string& s, const std::string& what);
/// Comma- and/or whitespace-separated numbers.
std::vector<double> parse_list(const std::string& s, const std::string& what);
/// Rows separated by ';'.
std::vector<std::vector<double>> parse_rows(const std::string& s, const std::string& what);
/// "constant" or "power <a>".
AdjustmentSchedule parse_psi(const std::string& s, double h, const std::string& what);

struct ProblemConfig {
  std::string family = "canonical_pl";
  std::vector<double> lambda;
  std::vector<double> x_star;
  std::vector<std::vector<double>> offsets;
  std::size_t d = 2;
  double mu = 2.0;
  double sigma_sq = 0.1;
  double curvature = 6.0;
  double delta = 3.0;
  double offset = 1.0;
  std::vector<double> x0;
  // Declared-constant overrides.
  std::optional<double> L, mu_pl, mu_rsi, tau, sigma_star_sq;
};

struct RunConfig {
  ProblemConfig problem;

  AdjustmentSchedule adj = AdjustmentSchedule::constant(0.01);
  BatchSchedule batch = BatchSchedule::constant(1.0);
  std::size_t epoch_steps = 100;

  std::string mode = "sgd";  // sgd | pgd | svrg | mb-pgf | vr-pgf | time-changed
  double dt = 0.0;           // 0: h for the continuous modes
  double T = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_epochs = 5;
  std::optional<double> sigma;  // constant scalar volatility instead of sigma_MB
  std::size_t stride = 1;
  bool jumps = true;

  std::size_t n_paths = 1;
  bool n_paths_given = false;  // overrides experiment defaults when set
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 0;
  double slack_se = 3.0;

  std::string out_dir = ".";
  std::string format = "csv";

  std::vector<BoundKind> bounds;

  std::string experiment;
  std::map<std::string, std::string> experiment_params;

  bool is_continuous() const;
  /// Step count of a discrete run or grid step count of a continuous one.
  std::size_t steps() const;
  double step() const;
};

/// Reads every section, rejecting unknown sections and keys with a ConfigError
/// that lists the valid names. Values are range-checked.
RunConfig parse_run_config(const KeyValueConfig& kv);

ProblemPtr build_problem(const ProblemConfig& pc);
Vector start_point(const ProblemConfig& pc, const FiniteSumProblem& p);
BoundInputs bound_inputs(const RunConfig& cfg, const FiniteSumProblem& p);

/// Throws ConfigError naming the violated stepsize condition for any
/// requested bound that does not apply.
void check_bounds_admissible(const RunConfig& cfg);

}  // namespace pgflow

#endif  // PGFLOW_CONFIG_HPP
