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

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles/oracles.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/rng.hpp"
#include "pgflow/schedules.hpp"

namespace {

using namespace pgflow;

std::vector<AdjustmentSchedule> schedules() {
  return {AdjustmentSchedule::constant(0.1), AdjustmentSchedule::power(0.1, 0.3),
          AdjustmentSchedule::power(0.1, 0.5), AdjustmentSchedule::power(0.1, 0.8),
          AdjustmentSchedule::power(0.1, 1.0)};
}

TEST(Schedules, PsiShape) {
  for (const auto& s : schedules()) {
    EXPECT_EQ(s.psi(0.0), 1.0);
    double prev = 1.0;
    for (int i = 1; i < 200; ++i) {
      const double v = s.psi(0.37 * i);
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(Schedules, DiscreteMatchesContinuousOnGrid) {
  for (const auto& s : schedules())
    for (std::size_t k = 0; k < 1000; ++k) ASSERT_EQ(s.psi_k(k), s.psi(s.h * static_cast<double>(k)));
}

TEST(Schedules, Validation) {
  EXPECT_THROW(AdjustmentSchedule::constant(0.0), PreconditionError);
  EXPECT_THROW(AdjustmentSchedule::constant(-1.0), PreconditionError);
  EXPECT_THROW(AdjustmentSchedule::power(0.1, 0.0), PreconditionError);
  EXPECT_THROW(AdjustmentSchedule::power(0.1, 1.5), PreconditionError);
  EXPECT_THROW(BatchSchedule::constant(0.5), PreconditionError);
  EXPECT_THROW(BatchSchedule::linear(1.0, -0.1), PreconditionError);
}

TEST(Schedules, PhiExamples) {
  for (const auto& s : schedules()) EXPECT_EQ(phi(s, 0.0), 0.0);
  const auto p1 = AdjustmentSchedule::power(1.0, 1.0);
  for (double t : {0.5, 1.0, 10.0, 1e4}) EXPECT_NEAR(phi(p1, t), std::log1p(t), 1e-14 * t);
  EXPECT_NEAR(phi(AdjustmentSchedule::power(1.0, 0.5), 3.0), 2.0, 1e-14);
  EXPECT_DOUBLE_EQ(phi(AdjustmentSchedule::constant(0.3), 2.5), 2.5);
}

TEST(Schedules, PhiMatchesIndependentQuadrature) {
  for (const auto& s : schedules())
    for (double t : {0.1, 1.0, 7.5, 40.0}) {
      const double ref = oracle::simpson([&](double u) { return s.psi(u); }, 0.0, t);
      EXPECT_NEAR(phi(s, t), ref, 1e-10 * std::max(1.0, ref)) << s.describe() << " t=" << t;
    }
}

TEST(Schedules, PhiInverseExamplesAndRoundTrip) {
  const auto p1 = AdjustmentSchedule::power(1.0, 1.0);
  for (double v : {0.0, 0.5, 2.0, 5.0}) EXPECT_NEAR(phi_inverse(p1, v), std::expm1(v), 1e-12 * std::exp(v));
  Rng rng(1);
  for (const auto& s : schedules()) {
    EXPECT_EQ(phi_inverse(s, 0.0), 0.0);
    for (int i = 0; i < 100; ++i) {
      const double v = 20.0 * rng.uniform();
      EXPECT_NEAR(phi(s, phi_inverse(s, v)), v, 1e-10 * std::max(1.0, v)) << s.describe();
      const double t = 50.0 * rng.uniform();
      EXPECT_NEAR(phi_inverse(s, phi(s, t)), t, 1e-10 * std::max(1.0, t)) << s.describe();
    }
  }
}

TEST(Schedules, PhiAndInverseStrictlyIncreasing) {
  for (const auto& s : schedules()) {
    double prev_phi = -1.0, prev_tau = -1.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.25 * i;
      const double f = phi(s, t), tau = phi_inverse(s, t);
      EXPECT_GT(f, prev_phi);
      EXPECT_GT(tau, prev_tau);
      prev_phi = f;
      prev_tau = tau;
    }
  }
}

TEST(Schedules, DiscretePhiExamples) {
  EXPECT_DOUBLE_EQ(discrete_phi(AdjustmentSchedule::constant(1.0), 9), 10.0);
  EXPECT_DOUBLE_EQ(discrete_phi(AdjustmentSchedule::power(1.0, 1.0), 1), 1.5);
  const auto s = AdjustmentSchedule::power(1e-3, 0.5);
  for (std::size_t k = 0; k <= 10000; k += 97)
    EXPECT_LE(std::abs(s.h * discrete_phi(s, k) - phi(s, s.h * static_cast<double>(k + 1))),
              2.0 * s.h);
}

TEST(Schedules, RandomizedIndexFrequencies) {
  Rng rng(2);
  const int n = 100000;
  const auto p1 = AdjustmentSchedule::power(1.0, 1.0);
  int zero = 0;
  for (int i = 0; i < n; ++i) zero += randomized_index(p1, 1, rng) == 0;
  EXPECT_NEAR(static_cast<double>(zero) / n, 2.0 / 3.0, 3.0 * std::sqrt(2.0 / 9.0 / n));

  const auto c = AdjustmentSchedule::constant(1.0);
  std::vector<double> count(5, 0.0);
  for (int i = 0; i < n; ++i) count[randomized_index(c, 4, rng)] += 1.0;
  double chi2 = 0.0;
  for (double v : count) chi2 += (v - n / 5.0) * (v - n / 5.0) / (n / 5.0);
  EXPECT_LT(chi2, 18.47);  // chi2(4), p = 0.001
}

TEST(Schedules, RandomizedTimeKolmogorovSmirnov) {
  Rng rng(3);
  const auto s = AdjustmentSchedule::power(1.0, 0.5);
  const double t = 10.0;
  std::vector<double> draws(100000);
  for (auto& v : draws) v = randomized_time(s, t, rng);
  std::sort(draws.begin(), draws.end());
  const double total = phi(s, t);
  double ks = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    ASSERT_GE(draws[i], 0.0);
    ASSERT_LE(draws[i], t);
    const double cdf = phi(s, draws[i]) / total;
    const double n = static_cast<double>(draws.size());
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                   std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(Schedules, Sawtooth) {
  const StalenessSchedule st{10, 0.1};
  EXPECT_DOUBLE_EQ(st.period(), 1.0);
  for (int j = 1; j <= 5; ++j) {
    EXPECT_EQ(st.xi(j * st.period()), 0.0);
    EXPECT_NEAR(st.xi(j * st.period() - 1e-9), st.period(), 1e-8);
  }
  EXPECT_EQ(st.xi_k(23), 3u);
}

TEST(Schedules, BatchRounding) {
  const auto lin = BatchSchedule::linear(1.0, 0.25);
  EXPECT_DOUBLE_EQ(lin.b(2.0), 1.5);
  EXPECT_EQ(lin.b_k(2, 1.0), 2u);  // 1.5 rounds half up
  EXPECT_EQ(lin.b_k(1, 1.0), 1u);  // 1.25
  EXPECT_EQ(BatchSchedule::constant(4.0).b_k(100, 0.1), 4u);
  EXPECT_TRUE(BatchSchedule::constant(3.0).is_constant());
  EXPECT_FALSE(lin.is_constant());
}

}  // namespace
