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

#include "oracles/oracles.hpp"
#include "pgflow/bounds.hpp"
#include "pgflow/errors.hpp"
#include "pgflow/experiments.hpp"
#include "pgflow/problems.hpp"

namespace {

using namespace pgflow;

BoundInputs base(AdjustmentSchedule adj = AdjustmentSchedule::constant(0.1),
                 BatchSchedule batch = BatchSchedule::constant(1.0)) {
  BoundInputs in;
  in.L = 2.0;
  in.mu = 1.0;
  in.mu_rsi = 2.0;
  in.tau = 1.0;
  in.sigma_star_sq = 0.5;
  in.d = 3;
  in.f0_gap = 4.0;
  in.dist0_sq = 3.0;
  in.adj = adj;
  in.batch = batch;
  return in;
}

BoundInputs noiseless(BoundInputs in) {
  in.sigma_star_sq = 0.0;
  return in;
}

std::vector<AdjustmentSchedule> psis(double h) {
  return {AdjustmentSchedule::constant(h), AdjustmentSchedule::power(h, 0.3),
          AdjustmentSchedule::power(h, 0.5), AdjustmentSchedule::power(h, 2.0 / 3.0),
          AdjustmentSchedule::power(h, 1.0)};
}

TEST(Bounds, KindNamesRoundTrip) {
  for (BoundKind k : {BoundKind::SMOOTH_CT, BoundKind::WQC_W1, BoundKind::WQC_W2, BoundKind::PL_CT,
                      BoundKind::VR_CT, BoundKind::SMOOTH_DT, BoundKind::WQC_DT_RAND,
                      BoundKind::WQC_DT_LAST, BoundKind::PL_DT, BoundKind::VR_DT})
    EXPECT_EQ(bound_kind_from_string(to_string(k)), k);
  EXPECT_ANY_THROW(bound_kind_from_string("NOPE"));
}

TEST(Bounds, SmoothContinuousExamples) {
  const BoundInputs in = base();
  for (double t : {0.5, 1.0, 10.0}) {
    const double expect = (in.f0_gap + in.adj.h * 3 * 2.0 * 0.5 * t / 2.0) / t;
    EXPECT_NEAR(bound_smooth_ct(in, t), expect, 1e-14 * expect);
  }
  const auto adj = AdjustmentSchedule::power(0.1, 0.5);
  const BoundInputs nl = noiseless(base(adj));
  for (double t : {0.5, 3.0, 100.0}) EXPECT_NEAR(bound_smooth_ct(nl, t), 4.0 / phi(adj, t), 1e-14);
}

TEST(Bounds, SmoothPowerHalfHasLogOverSqrtShape) {
  BoundInputs in = base(AdjustmentSchedule::power(0.1, 0.5));
  in.f0_gap = 0.0;
  const double c = 0.1 * 3 * 0.5 * in.L / 4.0;
  for (double t : {1e8, 1e12})
    EXPECT_NEAR(bound_smooth_ct(in, t) * std::sqrt(t) / std::log(t), c, 1e-3 * c);
}

TEST(Bounds, WqcExamples) {
  for (const auto& adj : psis(0.1)) {
    const BoundInputs in = noiseless(base(adj));
    for (double t : {0.3, 2.0, 50.0}) {
      const double expect = in.dist0_sq / (2.0 * phi(adj, t));
      EXPECT_NEAR(bound_wqc(in, t, WqcVariant::kW1Randomized), expect, 1e-13 * expect);
      EXPECT_NEAR(bound_wqc(in, t, WqcVariant::kW2LastIterate), expect, 1e-13 * expect);
    }
  }
  const BoundInputs in = base();
  for (double t : {0.3, 2.0, 50.0}) {
    const double poly = in.L * in.tau * t * t / 2.0 + t;
    const double expect = in.dist0_sq / (2.0 * t) + 0.1 * 3 * 0.5 / (2.0 * t) * poly;
    EXPECT_NEAR(bound_wqc(in, t, WqcVariant::kW2LastIterate), expect, 1e-13 * expect);
  }
}

TEST(Bounds, RandomizedWqcBelowLastIterate) {
  for (const auto& adj : psis(0.2))
    for (double t : {0.1, 1.0, 10.0, 300.0}) {
      const BoundInputs in = base(adj);
      EXPECT_LE(bound_wqc(in, t, WqcVariant::kW1Randomized),
                bound_wqc(in, t, WqcVariant::kW2LastIterate));
    }
}

TEST(Bounds, PlContinuousExamples) {
  const BoundInputs in = base();
  EXPECT_DOUBLE_EQ(bound_pl_ct(in, 0.0), in.f0_gap);
  EXPECT_NEAR(bound_pl_ct(in, 1e3), ball_limit_continuous(in), 1e-15);
  EXPECT_NEAR(ball_limit_continuous(in), 0.1 * 3 * 2.0 * 0.5 / 4.0, 1e-16);

  // Isotropic mu = L: the bound's limit equals the exact OU level.
  auto p = make_isotropic_quadratic(2, 2.0, 0.1);
  const BoundInputs iso = BoundInputs::from_problem(*p, p->x_star(), AdjustmentSchedule::constant(1e-4),
                                                    BatchSchedule::constant(1.0));
  ASSERT_GT(iso.sigma_star_sq, 0.0);
  const double ou = expected_value_ou(*p, p->x_star(), 1e-4, iso.sigma_star_sq, 50.0);
  EXPECT_NEAR(bound_pl_ct(iso, 50.0), ou, 1e-12 * ou);
}

TEST(Bounds, CanonicalPlCurveFrozen) {
  auto p = make_canonical_pl_problem();
  const BoundInputs in = BoundInputs::from_problem(*p, canonical_pl_start(),
                                                   AdjustmentSchedule::constant(0.25),
                                                   BatchSchedule::constant(1.0));
  const double ts[3] = {0.0, 1.0, 10.0};
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(bound_pl_ct(in, ts[i]), oracle::kPlCtCanonical[i], 1e-14 * oracle::kPlCtCanonical[i]);
}

TEST(Bounds, VrRhoExamples) {
  BoundInputs in;
  in.L = 1.0;
  in.mu_rsi = 10.0;
  in.adj = AdjustmentSchedule::constant(0.01);
  in.m = 100;
  in.dist0_sq = 2.0;
  EXPECT_NEAR(vr_rho(in, VrMode::kContinuous), oracle::kRhoDeclared, 1e-15);
  EXPECT_NEAR(vr_rho(in, VrMode::kDiscrete), vr_rho(in, VrMode::kContinuous), 1e-15);
  EXPECT_DOUBLE_EQ(bound_vr(in, 0, VrMode::kDiscrete), 2.0);
  EXPECT_NEAR(bound_vr(in, 3, VrMode::kDiscrete), 2.0 * std::pow(oracle::kRhoDeclared, 3), 1e-15);
  in.L = 9.0;
  in.mu_rsi = 12.0;
  EXPECT_NEAR(vr_rho(in, VrMode::kDiscrete), oracle::kRhoSvrgProblem, 1e-15);
}

TEST(Bounds, DiscretePlMatchesRecursion) {
  for (const auto& adj : psis(0.25)) {
    const BoundInputs in = base(adj, BatchSchedule::constant(2.0));
    const auto curve = bound_discrete_curve(in, 500, BoundKind::PL_DT);
    for (std::size_t k : {0u, 1u, 10u, 499u}) {
      const double ref = oracle::pl_dt_recursion(
          in.f0_gap, in.mu, in.L, 3.0, 0.5, adj.h, 2.0,
          [&](std::size_t i) { return adj.psi_k(i); }, k);
      EXPECT_NEAR(curve[k], ref, 1e-13 * ref) << adj.describe() << " k=" << k;
      EXPECT_EQ(bound_discrete(in, k, BoundKind::PL_DT), curve[k]);
    }
  }
}

TEST(Bounds, DiscretePlWithGrowingBatch) {
  const auto adj = AdjustmentSchedule::power(0.25, 0.5);
  const BoundInputs in = base(adj, BatchSchedule::linear(1.0, 0.3));
  const auto curve = bound_discrete_curve(in, 300, BoundKind::PL_DT);
  double e = in.f0_gap;
  for (std::size_t i = 0; i < 300; ++i) {
    const double p = adj.psi_k(i);
    const double b = static_cast<double>(in.batch.b_k(i, adj.h));
    e = (1 - in.mu * adj.h * p) * e + in.L * 3.0 * 0.5 * adj.h * adj.h * p * p / (2 * b);
    EXPECT_NEAR(curve[i], e, 1e-13 * e);
  }
}

TEST(Bounds, DiscretePlNoiselessIsGeometric) {
  const BoundInputs in = noiseless(base(AdjustmentSchedule::constant(0.1)));
  for (std::size_t k : {0u, 5u, 100u})
    EXPECT_NEAR(bound_discrete(in, k, BoundKind::PL_DT),
                std::pow(0.9, static_cast<double>(k + 1)) * in.f0_gap, 1e-14);
}

TEST(Bounds, DiscreteBallIsTwiceContinuousBall) {
  const BoundInputs in = base(AdjustmentSchedule::constant(0.01));
  EXPECT_NEAR(ball_limit_discrete(in) / ball_limit_continuous(in), 2.0, 1e-15);
  const double lim = bound_discrete(in, 200000, BoundKind::PL_DT);
  // The recursion's fixed point is hdLs^2 / (2 mu b) exactly.
  EXPECT_NEAR(lim, ball_limit_discrete(in), 1e-12 * lim);
  EXPECT_NEAR(bound_pl_ct(in, 1e4), ball_limit_continuous(in), 1e-15);
}

TEST(Bounds, SmoothDiscreteVersusContinuousRatio) {
  // Leading factor 2 vs 1: the ratio tends to 2 as h -> 0.
  for (double h : {1e-2, 1e-3, 1e-4}) {
    BoundInputs in = base(AdjustmentSchedule::constant(h));
    const std::size_t k = static_cast<std::size_t>(5.0 / h);
    const double r = bound_discrete(in, k, BoundKind::SMOOTH_DT) /
                     bound_smooth_ct(in, h * static_cast<double>(k + 1));
    EXPECT_NEAR(r, 2.0, 1e-9);
  }
}

TEST(Bounds, QuadratureAgreesWithClosedForms) {
  for (const auto& adj : psis(0.1)) {
    const BoundInputs in = base(adj);
    for (double t : {0.1, 1.0, 17.0, 400.0}) {
      const double a = integral_psi2_b(in, t), qa = integral_psi2_b_quadrature(in, t);
      EXPECT_NEAR(a, qa, 1e-8 * std::abs(a)) << adj.describe() << " t=" << t;
      const double b = integral_w2(in, t), qb = integral_w2_quadrature(in, t);
      EXPECT_NEAR(b, qb, 1e-8 * std::abs(b)) << adj.describe() << " t=" << t;
      if (adj.family == PsiFamily::kConstant) {
        const double c = integral_pl(in, t), qc = integral_pl_quadrature(in, t);
        EXPECT_NEAR(c, qc, 1e-8 * std::abs(c)) << t;
      }
    }
  }
}

TEST(Bounds, QuadratureAgreesWithIndependentRule) {
  const BoundInputs in = base(AdjustmentSchedule::power(0.1, 0.5), BatchSchedule::linear(1.0, 0.2));
  for (double t : {1.0, 8.0}) {
    const double ref = oracle::simpson(
        [&](double s) {
          const double q = in.adj.psi(s);
          return q * q / in.batch.b(s) * std::exp(-2.0 * in.mu * (phi(in.adj, t) - phi(in.adj, s)));
        },
        0.0, t, 200000);
    EXPECT_NEAR(integral_pl(in, t), ref, 1e-9 * ref);
  }
}

TEST(Bounds, NonincreasingWithoutNoise) {
  for (const auto& adj : psis(0.2)) {
    const BoundInputs in = noiseless(base(adj));
    double prev[4] = {INFINITY, INFINITY, INFINITY, INFINITY};
    for (int i = 1; i <= 200; ++i) {
      const double t = 0.1 * i;
      const double v[4] = {bound_smooth_ct(in, t), bound_wqc(in, t, WqcVariant::kW1Randomized),
                           bound_wqc(in, t, WqcVariant::kW2LastIterate), bound_pl_ct(in, t)};
      for (int j = 0; j < 4; ++j) {
        EXPECT_LE(v[j], prev[j] * (1 + 1e-14));
        prev[j] = v[j];
      }
    }
    for (BoundKind k : {BoundKind::SMOOTH_DT, BoundKind::WQC_DT_RAND, BoundKind::WQC_DT_LAST,
                        BoundKind::PL_DT}) {
      if (!is_admissible(in, k)) continue;
      const auto c = bound_discrete_curve(in, 300, k);
      for (std::size_t i = 1; i < c.size(); ++i) EXPECT_LE(c[i], c[i - 1] * (1 + 1e-14)) << to_string(k);
    }
  }
}

TEST(Bounds, AdmissibilityNamesCondition) {
  BoundInputs in = base(AdjustmentSchedule::constant(0.9));  // L = 2: h > 1/L
  try {
    check_admissible(in, BoundKind::PL_DT);
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    EXPECT_EQ(e.condition(), "h <= 1/L");
  }
  EXPECT_FALSE(is_admissible(in, BoundKind::SMOOTH_DT));
  in.adj = AdjustmentSchedule::constant(0.3);
  EXPECT_FALSE(is_admissible(in, BoundKind::WQC_DT_RAND));  // tau/(2L) = 0.25
  in.tau = 0.4;
  EXPECT_FALSE(is_admissible(in, BoundKind::WQC_DT_LAST));  // 2/L - 1/(tau L) < 0
  in.mu_rsi = 0.1;
  EXPECT_THROW(vr_rho(in, VrMode::kDiscrete), AdmissibilityError);
  in.mu = 0.0;
  EXPECT_THROW(RateBound(BoundKind::PL_CT, in), AdmissibilityError);
}

TEST(Bounds, AsymptoticExponentTable) {
  using F = RateDescriptor::Form;
  EXPECT_EQ(asymptotic_exponent(0.3, RateClass::kPl).beta, 0.3);
  const auto w = asymptotic_exponent(0.55, RateClass::kWqcLast);
  EXPECT_EQ(w.form, F::kPower);
  EXPECT_NEAR(w.beta, 0.1, 1e-15);
  EXPECT_EQ(asymptotic_exponent(0.5, RateClass::kSmoothRand).form, F::kLogOverPower);
  EXPECT_NEAR(asymptotic_exponent(0.5, RateClass::kSmoothRand).beta, 0.5, 1e-15);
  EXPECT_EQ(asymptotic_exponent(0.4, RateClass::kWqcLast).form, F::kNone);
  EXPECT_EQ(asymptotic_exponent(2.0 / 3.0, RateClass::kWqcLast).form, F::kLogOverPower);
  EXPECT_NEAR(asymptotic_exponent(0.8, RateClass::kWqcLast).beta, 0.2, 1e-15);
  EXPECT_EQ(asymptotic_exponent(1.0, RateClass::kWqcRand).form, F::kInverseLog);
  EXPECT_NEAR(asymptotic_exponent(0.3, RateClass::kWqcRand).beta, 0.3, 1e-15);
  EXPECT_NEAR(asymptotic_exponent(0.7, RateClass::kSmoothRand).beta, 0.3, 1e-15);
  EXPECT_THROW(asymptotic_exponent(0.0, RateClass::kPl), PreconditionError);
}

TEST(Bounds, LyapunovEnergyExamples) {
  auto p = make_canonical_pl_problem();
  const auto adj = AdjustmentSchedule::power(0.1, 0.5);
  const Vector x = canonical_pl_start();
  EXPECT_NEAR(lyapunov_energy(EnergyKind::kSmooth, *p, p->x_star(), 3.0, adj), 0.0, 1e-15);
  EXPECT_NEAR(lyapunov_energy(EnergyKind::kPl, *p, x, 0.0, adj), f_gap(*p, x), 1e-15);
  EXPECT_NEAR(lyapunov_energy(EnergyKind::kRsi, *p, x, 2.0, adj), 0.5 * x.squaredNorm(), 1e-15);
}

TEST(Bounds, LandscapeStretchExamples) {
  EXPECT_DOUBLE_EQ(landscape_stretch_reference(1.0, 1.0, 1.0), 0.5);
  EXPECT_NEAR(landscape_stretch_reference(-0.5, 2.0, 8.0), 6.0, 1e-14);
  for (double lambda : {1.0, 2.0, -0.5, 0.3})
    for (int i = 0; i < 100; ++i) {
      const double t = 0.1 * i, u0 = lambda > 0 ? 1.5 : -0.7;
      const double deriv = -lambda * std::pow(1.0 + t, -lambda - 1.0) * u0;
      const double u = landscape_stretch_reference(lambda, u0, t);
      EXPECT_NEAR(equivalent_gradient_rhs(lambda, u0, u), deriv, 1e-9);
    }
  EXPECT_THROW(equivalent_gradient_rhs(0.0, 1.0, 1.0), PreconditionError);
}

}  // namespace
