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


#ifndef PGFLOW_HARNESS_HPP
#define PGFLOW_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pgflow/bounds.hpp"
#include "pgflow/schedules.hpp"
#include "pgflow/trajectory.hpp"

namespace pgflow {

class Rng;

/// Mean and (n-1)-normalised variance of a fixed-length vector across paths.
struct VectorStats {
  std::vector<double> mean;
  std::vector<double> variance;
  std::size_t n_paths = 0;
  std::size_t divergence_count = 0;
  double se(std::size_t i) const;
};

/// Returns the per-path sample, or an empty vector for a diverged path.
using PathSampler = std::function<std::vector<double>(std::size_t path, Rng& rng)>;

/// Runs n_paths samplers on seed-derived streams and reduces them in path
/// order, so the result does not depend on `threads` (0 = hardware count).
/// Throws EnsembleError when more than half of the paths diverge.
VectorStats ensemble_reduce(const PathSampler& sampler, std::size_t n_paths,
                            std::uint64_t master_seed, std::size_t threads = 0);

struct EnsembleStats {
  std::vector<double> grid;
  std::vector<std::string> names;
  std::vector<std::vector<double>> mean;      // [observable][row]
  std::vector<std::vector<double>> variance;  // [observable][row]
  std::size_t n_paths = 0;
  std::size_t divergence_count = 0;

  std::size_t index_of(const std::string& name) const;
  const std::vector<double>& mean_of(const std::string& name) const;
  std::vector<double> standard_error(const std::string& name) const;
};

using PathRunner = std::function<Trajectory(std::size_t path, Rng& rng)>;
/// Appends derived per-row series computed from one trajectory.
using SeriesExtractor =
    std::function<void(const Trajectory& tr, std::vector<std::vector<double>>& out)>;

struct EnsembleOptions {
  std::size_t threads = 0;
  std::vector<std::string> extra_names;
  SeriesExtractor extra;
};

/// Aggregates f_gap, grad_norm_sq, dist_sq (plus any extra series) over
/// n_paths trajectories sharing one time grid. Requires n_paths >= 2.
EnsembleStats ensemble_run(const PathRunner& runner, std::size_t n_paths,
                           std::uint64_t master_seed, const EnsembleOptions& opt = {});

/// (1/phi(t)) int_0^t psi(s) v(s) ds along a recorded grid (trapezoidal, with
/// the weight normalised by the same rule); row 0 returns v(0).
std::vector<double> psi_weighted_running_average(const std::vector<double>& times,
                                                 const std::vector<double>& values,
                                                 const AdjustmentSchedule& adj);
/// sum_{j<=k} psi_j v_j / phi_{k+1} for rows recorded at every step.
std::vector<double> psi_weighted_index_average(const std::vector<double>& values,
                                               const AdjustmentSchedule& adj);

struct Checkpoint {
  std::string label;
  double t = 0.0;
  double empirical = 0.0;
  double se = 0.0;
  double reference = 0.0;  // bound, or the value compared against
  double tolerance = 0.0;
  double violation_se = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::string experiment;
  std::vector<Checkpoint> checkpoints;
  bool pass = false;
  double max_violation_se = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::size_t divergence_count = 0;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::string> notes;

  /// pass = every checkpoint passed; updates max_violation_se.
  void finalize();
  /// Appends one checkpoint for empirical <= reference + slack * se.
  Checkpoint& add_one_sided(std::string label, double t, double empirical, double se,
                            double reference, double slack_se);
  /// Appends one checkpoint for |empirical - reference| <= slack * se.
  Checkpoint& add_two_sided(std::string label, double t, double empirical, double se,
                            double reference, double slack_se);
  /// Appends one checkpoint for |empirical - reference| <= tolerance.
  Checkpoint& add_absolute(std::string label, double t, double empirical, double reference,
                           double tolerance);
};

/// About `count` grid indices in [first, n), geometrically spaced, always
/// including the last.
std::vector<std::size_t> geometric_checkpoints(std::size_t n, std::size_t count = 30,
                                               std::size_t first = 1);

/// Series a bound kind is checked against, e.g. "f_gap", "grad_norm_sq",
/// "dist_sq", or a psi-weighted running average ("f_gap_wavg", "grad_norm_sq_wavg").
std::string observable_for(BoundKind kind);

/// One-sided check of a rate bound at geometric checkpoints. Continuous kinds
/// evaluate the bound at the grid time; discrete kinds map grid row n (step n)
/// to the bound's iteration index.
VerificationReport verify_bound(const EnsembleStats& stats, const RateBound& bound,
                                double slack_se = 3.0, std::size_t n_checkpoints = 30);

}  // namespace pgflow

#endif  // PGFLOW_HARNESS_HPP
