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


#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pgflow/continuous.hpp"
#include "pgflow/discrete.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/experiments.hpp"
#include "pgflow/harness.hpp"
#include "pgflow/rng.hpp"

namespace {

using namespace pgflow;

PathRunner sgd_runner(const FiniteSumProblem& p, const AdjustmentSchedule& adj, std::size_t n,
                      const Vector& x0) {
  return [&p, adj, n, x0](std::size_t, Rng& rng) {
    return run_mb_sgd(p, adj, BatchSchedule::constant(1.0), x0, n, rng);
  };
}

TEST(Harness, ZeroNoiseHasZeroVariance) {
  auto p = make_isotropic_quadratic(3, 1.5, 0.0);
  const Vector x0 = Vector::Constant(3, 2.0);
  const auto st = ensemble_run(sgd_runner(*p, AdjustmentSchedule::constant(0.1), 50, x0), 8, 1);
  for (const auto& v : st.variance)
    for (double x : v) EXPECT_EQ(x, 0.0);
  for (double x : st.standard_error("f_gap")) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(st.n_paths, 8u);
}

TEST(Harness, StandardErrorShrinksWithSqrtPaths) {
  auto sampler = [](std::size_t, Rng& rng) { return std::vector<double>{rng.normal()}; };
  const auto a = ensemble_reduce(sampler, 20000, 5);
  const auto b = ensemble_reduce(sampler, 80000, 6);
  EXPECT_NEAR(a.se(0) / b.se(0), 2.0, 0.05);
  EXPECT_NEAR(a.variance[0], 1.0, 0.05);
}

TEST(Harness, ResultsIndependentOfThreadCount) {
  auto p = make_canonical_pl_problem();
  const Vector x0 = canonical_pl_start();
  const auto run = sgd_runner(*p, AdjustmentSchedule::constant(0.1), 200, x0);
  EnsembleOptions o1, o3;
  o1.threads = 1;
  o3.threads = 3;
  const auto a = ensemble_run(run, 101, 42, o1);
  const auto b = ensemble_run(run, 101, 42, o3);
  const auto c = ensemble_run(run, 101, 42, o1);
  EXPECT_EQ(a.grid, b.grid);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(a.mean, c.mean);
  const auto d = ensemble_run(run, 101, 43, o1);
  EXPECT_NE(a.mean, d.mean);
}

TEST(Harness, MajorityDivergenceThrows) {
  auto sampler = [](std::size_t path, Rng&) {
    return path % 3 == 0 ? std::vector<double>{1.0} : std::vector<double>{};
  };
  EXPECT_THROW(ensemble_reduce(sampler, 30, 1), EnsembleError);
  auto fine = [](std::size_t path, Rng&) {
    return path % 3 == 0 ? std::vector<double>{} : std::vector<double>{1.0};
  };
  const auto st = ensemble_reduce(fine, 30, 1);
  EXPECT_EQ(st.divergence_count, 10u);
  EXPECT_EQ(st.n_paths, 20u);
}

TEST(Harness, DivergentStepSizeIsCounted) {
  auto p = make_isotropic_quadratic(2, 1.0, 0.0);
  // h = 3 with mu = 1 oscillates with growth 2^k and overflows.
  const auto run = sgd_runner(*p, AdjustmentSchedule::constant(3.0), 2000, Vector::Ones(2));
  EXPECT_THROW(ensemble_run(run, 4, 1), EnsembleError);
}

EnsembleStats synthetic(const std::vector<double>& grid, const std::vector<double>& mean,
                        double se, std::size_t n) {
  EnsembleStats st;
  st.grid = grid;
  st.names = {"f_gap", "grad_norm_sq", "dist_sq", "f_gap_wavg", "grad_norm_sq_wavg"};
  st.n_paths = n;
  for (std::size_t i = 0; i < st.names.size(); ++i) {
    st.mean.push_back(mean);
    st.variance.emplace_back(mean.size(), se * se * static_cast<double>(n));
  }
  return st;
}

TEST(Harness, VerifyBoundOnSyntheticData) {
  BoundInputs in;
  in.L = 2.0;
  in.mu = 1.0;
  in.f0_gap = 1.0;
  in.adj = AdjustmentSchedule::constant(0.1);
  const RateBound bound(BoundKind::PL_CT, in);
  std::vector<double> grid, below, above;
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.05 * i;
    grid.push_back(t);
    below.push_back(0.9 * bound(t));
    above.push_back(bound(t) + 0.01);
  }
  const auto ok = verify_bound(synthetic(grid, below, 1e-3, 100), bound);
  EXPECT_TRUE(ok.pass);
  EXPECT_LT(ok.max_violation_se, 0.0);
  const auto bad = verify_bound(synthetic(grid, above, 1e-3, 100), bound);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.max_violation_se, 10.0, 1e-6);
  // Within the 3-se slack.
  std::vector<double> close;
  for (double t : grid) close.push_back(bound(t) + 2e-3);
  EXPECT_TRUE(verify_bound(synthetic(grid, close, 1e-3, 100), bound).pass);
}

TEST(Harness, VerifyDiscreteBoundUsesNextIterate) {
  BoundInputs in;
  in.L = 1.0;
  in.mu = 1.0;
  in.f0_gap = 1.0;
  in.adj = AdjustmentSchedule::constant(0.5);
  const RateBound bound(BoundKind::PL_DT, in);
  std::vector<double> grid, exact;
  for (int k = 0; k <= 20; ++k) {
    grid.push_back(0.5 * k);
    exact.push_back(std::pow(0.5, k));  // noiseless GD on the PL bound's own recursion
  }
  const auto rep = verify_bound(synthetic(grid, exact, 0.0, 10), bound);
  EXPECT_TRUE(rep.pass);
  for (const auto& c : rep.checkpoints) EXPECT_NEAR(c.empirical, c.reference, 1e-15);
}

TEST(Harness, PsiWeightedAverages) {
  const auto adj = AdjustmentSchedule::power(0.1, 1.0);
  std::vector<double> t, v, one;
  for (int i = 0; i <= 1000; ++i) {
    t.push_back(0.01 * i);
    v.push_back(3.0);
    one.push_back(t.back());
  }
  for (double x : psi_weighted_running_average(t, v, adj)) EXPECT_NEAR(x, 3.0, 1e-14);
  // v(s) = s, psi = 1/(1+s): (t - log(1+t)) / log(1+t).
  const auto avg = psi_weighted_running_average(t, one, adj);
  const double T = 10.0, ref = (T - std::log1p(T)) / std::log1p(T);
  EXPECT_NEAR(avg.back(), ref, 1e-4);
  const auto idx = psi_weighted_index_average({1.0, 2.0, 3.0}, AdjustmentSchedule::constant(0.1));
  EXPECT_DOUBLE_EQ(idx[0], 1.0);
  EXPECT_DOUBLE_EQ(idx[1], 1.5);
  EXPECT_DOUBLE_EQ(idx[2], 2.0);
}

TEST(Harness, GeometricCheckpoints) {
  const auto idx = geometric_checkpoints(10001, 30, 1);
  EXPECT_EQ(idx.front(), 1u);
  EXPECT_EQ(idx.back(), 10000u);
  EXPECT_LE(idx.size(), 31u);
  EXPECT_GE(idx.size(), 25u);
  for (std::size_t i = 1; i < idx.size(); ++i) EXPECT_GT(idx[i], idx[i - 1]);
  EXPECT_EQ(geometric_checkpoints(3, 30, 1), (std::vector<std::size_t>{1, 2}));
  EXPECT_TRUE(geometric_checkpoints(1, 30, 1).empty());
}

TEST(Harness, ObservableMapping) {
  EXPECT_EQ(observable_for(BoundKind::PL_CT), "f_gap");
  EXPECT_EQ(observable_for(BoundKind::SMOOTH_DT), "grad_norm_sq_wavg");
  EXPECT_EQ(observable_for(BoundKind::WQC_W1), "f_gap_wavg");
  EXPECT_EQ(observable_for(BoundKind::VR_DT), "dist_sq");
}

TEST(Harness, TimeChangeWithoutWarpAgrees) {
  TimeChangeParams p;
  p.warp = false;
  p.n_paths = 100;
  p.tau_horizon = 5.0;
  const auto rep = time_change_experiment(p);
  EXPECT_TRUE(rep.pass);
  ASSERT_FALSE(rep.checkpoints.empty());
}

TEST(Harness, LandscapeZeroLambdaStaysPut) {
  LandscapeParams p;
  p.lambda = {0.0};
  p.x0 = {1.0};
  p.T = 1.0;
  const auto rep = landscape_stretch_experiment(p);
  EXPECT_TRUE(rep.pass);
  for (const auto& c : rep.checkpoints) EXPECT_EQ(c.empirical, 0.0) << c.label;
}

TEST(Harness, LandscapeNoiselessTracksReference) {
  LandscapeParams p;
  p.T = 2.0;
  const auto rep = landscape_stretch_experiment(p);
  EXPECT_TRUE(rep.pass);
}

TEST(Harness, WeakErrorNoiselessIsFirstOrder) {
  WeakErrorParams p;
  p.sigma_sq = 0.0;
  p.n_paths = 2;
  const auto rep = weak_error_experiment(p);
  EXPECT_TRUE(rep.pass);
}

TEST(Harness, WeakErrorAtMinimizerRejected) {
  WeakErrorParams p;
  p.sigma_sq = 0.0;
  p.x0 = 0.0;
  p.n_paths = 2;
  // No signal: the error is identically zero and no rate can be fitted.
  const auto rep = weak_error_experiment(p);
  EXPECT_FALSE(rep.pass);
}

TEST(Harness, NoiselessBallCollapsesToMinimizer) {
  BallParams p;
  p.sigma_sq = 0.0;
  p.n_paths = 4;
  p.T_long = 3.0;
  p.tail_start = 2.0;
  p.dt = 1e-3;
  p.h = 1e-3;
  const auto rep = ball_experiment(p);
  for (const auto& c : rep.checkpoints) {
    if (c.label.find("tail") != std::string::npos) EXPECT_EQ(c.empirical, 0.0);
  }
}

TEST(Harness, PlEnergyIncrementsBoundedByNoiseInjection) {
  // d/dt E[e^{2 mu t} (f - f*)] <= e^{2 mu t} L h d s^2 / (2 b): per grid
  // interval the mean increment stays below the integrated injection term.
  auto p = make_canonical_pl_problem();
  const auto adj = AdjustmentSchedule::constant(0.1);
  const auto batch = BatchSchedule::constant(1.0);
  const BoundInputs in = BoundInputs::from_problem(*p, canonical_pl_start(), adj, batch);
  const double mu = in.mu, dt = 1e-3, T = 3.0;
  const double inject = 0.5 * in.adj.h * static_cast<double>(in.d) * in.sigma_star_sq * in.L;
  std::vector<double> grid;
  auto sampler = [&](std::size_t, Rng& rng) {
    const Trajectory tr = simulate_mb_pgf(*p, adj, batch, canonical_pl_start(), dt, T, rng,
                                          VolatilityMode::state_dependent(), {100, false});
    if (grid.empty()) grid = tr.times;
    std::vector<double> inc;
    for (std::size_t i = 1; i < tr.size(); ++i)
      inc.push_back(std::exp(2 * mu * tr.times[i]) * tr.f_gap[i] -
                    std::exp(2 * mu * tr.times[i - 1]) * tr.f_gap[i - 1]);
    return inc;
  };
  const VectorStats st = ensemble_reduce(sampler, 400, 11, 1);
  ASSERT_EQ(st.mean.size() + 1, grid.size());
  for (std::size_t i = 0; i < st.mean.size(); ++i) {
    const double term =
        inject * (std::exp(2 * mu * grid[i + 1]) - std::exp(2 * mu * grid[i])) / (2 * mu);
    EXPECT_LE(st.mean[i], term + 3.0 * st.se(i)) << "interval " << i;
  }
}

TEST(Harness, DoublingPathsHalvesSquaredError) {
  auto p = make_isotropic_quadratic(2, 2.0, 0.1);
  const auto adj = AdjustmentSchedule::constant(0.01);
  auto sampler = [&](std::size_t, Rng& rng) {
    const Trajectory tr = run_mb_sgd(*p, adj, BatchSchedule::constant(1.0), Vector::Ones(2), 200,
                                     rng, {200, false});
    return std::vector<double>{tr.f_gap.back()};
  };
  const auto a = ensemble_reduce(sampler, 4000, 1);
  const auto b = ensemble_reduce(sampler, 8000, 2);
  EXPECT_NEAR(a.se(0) * a.se(0) / (b.se(0) * b.se(0)), 2.0, 0.4);
}

}  // namespace
