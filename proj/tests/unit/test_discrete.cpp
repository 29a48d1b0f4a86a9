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
#include <cstring>
#include <vector>

#include "pgflow/discrete.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/estimators.hpp"
#include "pgflow/experiments.hpp"
#include "pgflow/harness.hpp"
#include "pgflow/problems.hpp"
#include "pgflow/rng.hpp"

namespace {

using namespace pgflow;

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

const auto kConst = BatchSchedule::constant(1.0);

TEST(Discrete, LinearRecursionExample) {
  auto p = make_perturbed_quadratic(vec({1.0}), vec({0.0}), {vec({0.0})});
  Rng rng(1);
  const Trajectory tr = run_mb_sgd(*p, AdjustmentSchedule::constant(0.1), kConst, vec({1.0}), 50,
                                   rng, {1, true});
  ASSERT_EQ(tr.size(), 51u);
  for (std::size_t k = 0; k <= 50; ++k) {
    EXPECT_NEAR(tr.states[k][0], std::pow(0.9, static_cast<double>(k)), 1e-14);
    EXPECT_NEAR(tr.times[k], 0.1 * static_cast<double>(k), 1e-14);
  }
}

TEST(Discrete, ZeroNoiseMonotoneDescent) {
  auto p = make_perturbed_quadratic(vec({0.5, 2.0, 1.0}), vec({1, 2, 3}), {Vector::Zero(3)});
  Rng rng(2);
  for (const auto& adj : {AdjustmentSchedule::constant(0.5), AdjustmentSchedule::power(0.5, 0.7)}) {
    const Trajectory tr = run_mb_sgd(*p, adj, kConst, vec({-1, 4, 0}), 200, rng);
    for (std::size_t k = 1; k < tr.size(); ++k) EXPECT_LE(tr.f_gap[k], tr.f_gap[k - 1]);
  }
}

TEST(Discrete, PgdWithoutNoiseIsGradientDescent) {
  auto p = make_perturbed_quadratic(vec({0.5, 2.0}), vec({1, -1}), {Vector::Zero(2)});
  Rng r1(3), r2(4);
  const auto adj = AdjustmentSchedule::power(0.3, 0.5);
  const Trajectory a = run_pgd(*p, adj, kConst, vec({2, 2}), 100, r1, {1, true});
  const Trajectory b = run_mb_sgd(*p, adj, kConst, vec({2, 2}), 100, r2, {1, true});
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE((a.states[k] - b.states[k]).norm(), 1e-14);
}

TEST(Discrete, PgdFirstStepMoments) {
  auto p = make_svrg_problem();
  const Vector x0 = vec({0.5, 0.5});
  const double h = 0.05;
  const std::size_t b = 2;
  const auto adj = AdjustmentSchedule::constant(h);
  const auto batch = BatchSchedule::constant(static_cast<double>(b));
  const int n = 100000;
  Vector m_pgd = Vector::Zero(2), m_sgd = Vector::Zero(2);
  Matrix s_pgd = Matrix::Zero(2, 2), s_sgd = Matrix::Zero(2, 2);
  for (int i = 0; i < n; ++i) {
    Rng r1 = Rng::for_path(5, static_cast<std::uint64_t>(i));
    Rng r2 = Rng::for_path(6, static_cast<std::uint64_t>(i));
    const Vector a = run_pgd(*p, adj, batch, x0, 1, r1, {1, true}).states.back();
    const Vector c = run_mb_sgd(*p, adj, batch, x0, 1, r2, {1, true}).states.back();
    m_pgd += a;
    m_sgd += c;
    s_pgd += a * a.transpose();
    s_sgd += c * c.transpose();
  }
  m_pgd /= n;
  m_sgd /= n;
  const Matrix c_pgd = s_pgd / n - m_pgd * m_pgd.transpose();
  const Matrix c_sgd = s_sgd / n - m_sgd * m_sgd.transpose();
  const Vector mean = x0 - h * full_gradient(*p, x0);
  const Matrix cov = h * h * sigma_mb_matrix(*p, x0) / static_cast<double>(b);
  for (Eigen::Index j = 0; j < 2; ++j) {
    EXPECT_NEAR(m_pgd[j], mean[j], 4.0 * std::sqrt(cov(j, j) / n));
    EXPECT_NEAR(m_sgd[j], mean[j], 4.0 * std::sqrt(cov(j, j) / n));
  }
  EXPECT_LE((c_pgd - cov).norm(), 0.03 * cov.norm());
  EXPECT_LE((c_sgd - cov).norm(), 0.03 * cov.norm());
}

TEST(Discrete, PgdStationaryLevel) {
  // Tail of E f under constant psi at small h sits at h d s^2 / 4.
  auto p = make_isotropic_quadratic(2, 2.0, 0.1);
  const double h = 1e-3;
  const std::size_t n_steps = 5000;  // t = 5
  auto sampler = [&](std::size_t, Rng& rng) -> std::vector<double> {
    const Trajectory tr =
        run_pgd(*p, AdjustmentSchedule::constant(h), kConst, p->x_star(), n_steps, rng, {10, false});
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      if (tr.times[i] >= 2.5) {
        acc += tr.f_gap[i];
        ++n;
      }
    return {acc / static_cast<double>(n)};
  };
  const VectorStats st = ensemble_reduce(sampler, 400, 7);
  EXPECT_NEAR(st.mean[0], h * 2 * 0.1 / 4, 0.1 * h * 2 * 0.1 / 4);
}

TEST(Discrete, SingleComponentSvrgIsGradientDescentWithRewinds) {
  auto p = make_perturbed_quadratic(vec({1.0, 2.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  Rng rng(8);
  const double h = 0.1;
  const std::size_t m = 5;
  const Trajectory tr = run_svrg_option2(*p, h, m, 4, vec({1.0, 1.0}), rng, {1, true});
  // Replay: within an epoch the steps are plain GD; epoch starts are rewinds.
  std::size_t jumps = 0;
  for (std::size_t k = 0; k + 1 < tr.size(); ++k) {
    const Vector& x = tr.states[k];
    const Vector& nx = tr.states[k + 1];
    if (tr.jump[k + 1]) {
      ++jumps;
      continue;
    }
    const Vector gd = x - h * full_gradient(*p, x);
    EXPECT_LE((nx - gd).norm(), 1e-14) << k;
  }
  // One jump per finished epoch, the last one producing the final state.
  EXPECT_EQ(jumps, 4u);
  EXPECT_EQ(tr.jump_offsets.size(), 4u);
}

TEST(Discrete, SvrgEpochFlagsAndDeterminism) {
  auto p = make_svrg_problem();
  Rng r1(9), r2(9);
  const Trajectory a = run_svrg_option2(*p, 0.01, 20, 3, vec({2.0, 0.0}), r1, {1, true});
  const Trajectory b = run_svrg_option2(*p, 0.01, 20, 3, vec({2.0, 0.0}), r2, {1, true});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    ASSERT_EQ(std::memcmp(a.states[i].data(), b.states[i].data(), 2 * sizeof(double)), 0);
  std::size_t starts = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.flags[i] & kFlagEpochStart) {
      ++starts;
      EXPECT_NEAR(a.times[i], 0.01 * 20 * static_cast<double>(starts - 1), 1e-12);
    }
  // x_0, x_m, x_2m and the final x_3m.
  EXPECT_EQ(starts, 4u);
}

TEST(Discrete, SvrgJumpPositionsUniform) {
  auto p = make_svrg_problem();
  const std::size_t m = 8;
  std::vector<double> count(m, 0.0);
  std::size_t total = 0;
  for (std::uint64_t path = 0; path < 2000; ++path) {
    Rng rng = Rng::for_path(10, path);
    const Trajectory tr = run_svrg_option2(*p, 0.01, m, 5, vec({1.0, 1.0}), rng, {m, false});
    for (auto off : tr.jump_offsets) {
      ASSERT_LT(off, m);
      count[off] += 1.0;
      ++total;
    }
  }
  double chi2 = 0.0;
  const double e = static_cast<double>(total) / static_cast<double>(m);
  for (double c : count) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 18.48);  // chi2(7) upper 1% point
}

TEST(Discrete, LyapunovDescentPerStep) {
  // E f_{k+1} <= (1 - mu h psi_k) E f_k + L d s^2 h^2 psi_k^2 / (2 b).
  auto p = make_canonical_pl_problem();
  const auto adj = AdjustmentSchedule::power(0.4, 0.5);
  const std::size_t n = 200;
  EnsembleOptions opt;
  const EnsembleStats st = ensemble_run(
      [&](std::size_t, Rng& rng) { return run_mb_sgd(*p, adj, kConst, canonical_pl_start(), n, rng); },
      500, 11, opt);
  const auto& m = st.mean_of("f_gap");
  const auto se = st.standard_error("f_gap");
  const double mu = 1.0, L = 2.0, d = 2.0, s2 = 0.625, h = adj.h;
  for (std::size_t k = 0; k < n; ++k) {
    const double psi = adj.psi_k(k);
    const double rhs = (1 - mu * h * psi) * m[k] + L * d * s2 * h * h * psi * psi / 2.0;
    EXPECT_LE(m[k + 1], rhs + 3.0 * (se[k + 1] + se[k])) << k;
  }
}

TEST(Discrete, TrajectoryInvariants) {
  auto p = make_canonical_pl_problem();
  Rng rng(12);
  const Trajectory tr = run_mb_sgd(*p, AdjustmentSchedule::constant(0.1), BatchSchedule::linear(1, 0.5),
                                   canonical_pl_start(), 300, rng, {7, true});
  ASSERT_EQ(tr.size(), recorded_rows(300, 7));
  EXPECT_EQ(tr.states.size(), tr.size());
  EXPECT_EQ(tr.f_gap.size(), tr.size());
  EXPECT_DOUBLE_EQ(tr.times.back(), 30.0);
  for (std::size_t i = 1; i < tr.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
  for (std::size_t i = 0; i < tr.size(); i += tr.size() / 10) {
    const Vector& x = tr.states[i];
    EXPECT_NEAR(tr.f_gap[i], f_gap(*p, x), 1e-12 * std::max(1.0, tr.f_gap[i]));
    EXPECT_NEAR(tr.grad_norm_sq[i], full_gradient(*p, x).squaredNorm(), 1e-12 * std::max(1.0, tr.grad_norm_sq[i]));
    EXPECT_NEAR(tr.dist_sq[i], (x - p->x_star()).squaredNorm(), 1e-12 * std::max(1.0, tr.dist_sq[i]));
  }
}

TEST(Discrete, DivergenceIsFlaggedNotThrown) {
  auto p = make_canonical_pl_problem();
  Rng rng(13);
  const Trajectory tr = run_mb_sgd(*p, AdjustmentSchedule::constant(5.0), kConst,
                                   canonical_pl_start(), 100000, rng);
  EXPECT_TRUE(tr.diverged);
  EXPECT_LT(tr.size(), 100001u);
  EXPECT_TRUE(tr.flags.back() & kFlagDiverged);
}

TEST(Discrete, StartPointDimensionChecked) {
  auto p = make_canonical_pl_problem();
  Rng rng(14);
  EXPECT_THROW(run_mb_sgd(*p, AdjustmentSchedule::constant(0.1), kConst, vec({1.0}), 10, rng),
               ContractViolation);
}

}  // namespace
