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


#ifndef PGFLOW_EXPERIMENTS_HPP
#define PGFLOW_EXPERIMENTS_HPP

// Named Monte-Carlo experiments. Every parameter struct defaults to the
// canonical configuration used by the acceptance suite.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pgflow/harness.hpp"
#include "pgflow/problems.hpp"
#include "pgflow/schedules.hpp"

namespace pgflow {

/// Seed used whenever none is given. Never derived from the clock.
inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

/// d = 2, H = diag(1, 2), four offsets with covariance 0.625 I, x* = 0.
ProblemPtr make_canonical_pl_problem();
Vector canonical_pl_start();

/// Quadratic with mean Hessian `curvature` I in d = 2 whose component
/// curvatures differ by +-delta per coordinate (so the VR estimator has
/// nonzero variance) and offsets +-s e_j. x* = (1, -1).
ProblemPtr make_svrg_problem(double curvature = 6.0, double delta = 3.0, double s = 1.0);

struct BallParams {
  enum class Mode { kContinuous, kDiscrete };
  Mode mode = Mode::kContinuous;
  std::size_t d = 2;
  double mu = 2.0;
  double sigma_sq = 0.1;
  double h = 1e-4;
  double b = 1.0;
  double dt = 1e-4;  // continuous mode only
  double T_long = 5.0;
  double tail_start = 2.5;
  double x0_offset = 0.0;  // x0 = x* + offset * (1, ..., 1)
  std::size_t stride = 10;
  std::size_t n_paths = 1000;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  double rel_tol = 0.10;
  std::size_t threads = 0;
};
VerificationReport ball_experiment(const BallParams& p);

struct TimeChangeParams {
  double lambda = 1.0;  // f = lambda / 2 x^2
  double x0 = 1.0;
  double h = 1e-3;
  double sigma = 5.0;
  double dt = 1e-3;
  double tau_horizon = 50.0;  // X runs on [0, tau(T_w)] with tau(T_w) = this
  std::size_t n_checkpoints = 30;
  std::size_t n_paths = 100;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  double min_pass_fraction = 0.95;
  bool warp = true;  // false: psi = 1, both processes identical in law
  std::size_t threads = 0;
};
VerificationReport time_change_experiment(const TimeChangeParams& p);

struct SvrgParams {
  double curvature = 6.0;
  double delta = 3.0;
  double offset = 1.0;
  double h = 0.01;
  std::size_t m = 100;
  std::size_t n_epochs = 5;
  double dt_divisor = 4.0;  // SDDE step = h / dt_divisor
  double declared_mu = 10.0;
  double declared_L = 1.0;
  std::size_t n_paths = 500;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  bool run_discrete = true;
  bool run_continuous = true;
  std::size_t threads = 0;
};
VerificationReport svrg_experiment(const SvrgParams& p);

struct DiscreteBoundsParams {
  AdjustmentSchedule adj = AdjustmentSchedule::constant(0.25);
  std::size_t batch = 1;
  std::size_t n_steps = 2000;
  std::size_t n_paths = 500;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  bool pl_only = false;
  std::size_t threads = 0;
};
/// MB-SGD on the canonical PL problem against PL_DT (and, unless pl_only, the
/// other admissible discrete bounds).
VerificationReport discrete_bounds_experiment(const DiscreteBoundsParams& p);

struct ContinuousBoundsParams {
  AdjustmentSchedule adj = AdjustmentSchedule::constant(0.25);
  std::size_t batch = 1;
  double dt_divisor = 5.0;
  double T = 200.0;
  std::size_t n_paths = 500;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  std::size_t threads = 0;
};
/// MB-PGF on the canonical PL problem against SMOOTH_CT, WQC_W1, WQC_W2, PL_CT.
VerificationReport continuous_bounds_experiment(const ContinuousBoundsParams& p);

struct AsymptoticParams {
  std::vector<double> a_values{0.3, 0.5, 0.8};
  double h = 0.25;
  std::size_t n_steps = 100000;
  std::size_t stride = 100;
  std::size_t n_paths = 200;
  std::uint64_t seed = kDefaultSeed;
  double slope_tol = 0.15;
  std::size_t threads = 0;
};
/// Fits the log-log slope of E[f(x_k) - f*] over the final decade.
VerificationReport asymptotic_rate_experiment(const AsymptoticParams& p);

struct LandscapeParams {
  std::vector<double> lambda{1.0, 2.0, -0.5};
  std::vector<double> x0{1.0, 1.0, 1.0};
  double dt = 1e-4;
  double T = 10.0;
  double sigma = 0.0;
  double h = 1.0;  // noise scale sqrt(h) sigma when sigma > 0
  std::size_t n_paths = 200;
  std::uint64_t seed = kDefaultSeed;
  double slack_se = 3.0;
  double error_factor = 5.0;  // pathwise tolerance error_factor * dt * ||x0||
  double slope_tol = 0.02;
  std::size_t threads = 0;
};
VerificationReport landscape_stretch_experiment(const LandscapeParams& p);

struct WeakErrorParams {
  std::vector<double> h_list{0.02, 0.01, 0.005};
  double T = 1.0;
  double mu = 2.0;
  double sigma_sq = 0.1;
  std::size_t d = 2;
  double x0 = 5.0;  // x0 = x0 * (1, ..., 1), x* = 0
  std::size_t n_paths = 10000;
  std::uint64_t seed = kDefaultSeed;
  double ratio_lo = 1.6, ratio_hi = 2.4;
  double slope_lo = 0.7, slope_hi = 1.3;
  std::size_t threads = 0;
};
VerificationReport weak_error_experiment(const WeakErrorParams& p);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pgflow

#endif  // PGFLOW_EXPERIMENTS_HPP
