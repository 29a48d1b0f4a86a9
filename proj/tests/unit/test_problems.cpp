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
#include "pgflow/errors.hpp"
#include "pgflow/experiments.hpp"
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

Vector random_point(Rng& rng, std::size_t d, double scale = 2.0) {
  Vector x(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = scale * (2.0 * rng.uniform() - 1.0);
  return x;
}

std::vector<ProblemPtr> registered_problems() {
  Matrix half(3, 2);
  half << 0.3, -0.2, 0.1, 0.5, -0.4, 0.2;
  return {make_canonical_pl_problem(),
          make_isotropic_quadratic(3, 2.0, 0.1),
          make_perturbed_quadratic(vec({1.0, 2.0, -0.5}), vec({0.5, 0.0, -1.0}),
                                   {vec({1, 0, 1}), vec({-1, 0, -1})}),
          make_svrg_problem(),
          make_logcosh_problem(vec({0.1, -0.2, 0.3}), half)};
}

TEST(Problems, IsotropicGradientExample) {
  auto p = make_isotropic_quadratic(2, 3.0, 0.0);
  EXPECT_TRUE(full_gradient(*p, vec({1.0, 0.0})).isApprox(vec({3.0, 0.0})));
}

TEST(Problems, GradientVanishesAtMinimiser) {
  for (const auto& p : registered_problems())
    EXPECT_LE(full_gradient(*p, p->x_star()).norm(), 1e-10) << p->family();
}

TEST(Problems, TwoComponentHandExample) {
  // f_1 = 1/2 (x-1)^2, f_2 = 1/2 (x+1)^2 is lambda = 1 with c = (-1, +1).
  auto p = make_perturbed_quadratic(vec({1.0}), vec({0.0}), {vec({-1.0}), vec({1.0})});
  EXPECT_NEAR(full_gradient(*p, vec({0.0}))[0], 0.0, 1e-15);
  Vector g(1);
  p->component_gradient(0, vec({0.0}), g);
  EXPECT_DOUBLE_EQ(g[0], -1.0);
  p->component_gradient(1, vec({0.0}), g);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
}

TEST(Problems, FiniteDifferenceGradients) {
  Rng rng(1);
  for (const auto& p : registered_problems()) {
    for (int s = 0; s < 100; ++s) {
      const Vector x = random_point(rng, p->dim());
      const Vector g = full_gradient(*p, x);
      Vector fd(g.size());
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        Vector xp = x, xm = x;
        xp[i] += 1e-6;
        xm[i] -= 1e-6;
        fd[i] = (p->value(xp) - p->value(xm)) / 2e-6;
      }
      ASSERT_LE((g - fd).norm(), 1e-5 * (1.0 + g.norm())) << p->family();
    }
  }
}

TEST(Problems, ComponentMeanIsHessianTimesOffset) {
  const Vector lambda = vec({1.0, 2.0});
  const Vector xs = vec({0.3, -0.7});
  auto p = make_perturbed_quadratic(lambda, xs, {vec({1, .5}), vec({-1, -.5}), vec({.5, -1}),
                                                 vec({-.5, 1})});
  Rng rng(2);
  for (int s = 0; s < 10; ++s) {
    const Vector x = random_point(rng, 2);
    Vector mean = Vector::Zero(2), g(2);
    for (std::size_t i = 0; i < p->n_components(); ++i) {
      p->component_gradient(i, x, g);
      mean += g;
    }
    mean /= static_cast<double>(p->n_components());
    const Vector expect = lambda.cwiseProduct(x - xs);
    EXPECT_LE((mean - expect).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Problems, ComponentGradientsLipschitz) {
  Rng rng(3);
  for (const auto& p : registered_problems()) {
    const double L = p->constants().L;
    Vector gx(p->dim()), gy(p->dim());
    for (int s = 0; s < 50; ++s) {
      const Vector x = random_point(rng, p->dim()), y = random_point(rng, p->dim());
      for (std::size_t i = 0; i < p->n_components(); ++i) {
        p->component_gradient(i, x, gx);
        p->component_gradient(i, y, gy);
        ASSERT_LE((gx - gy).norm(), L * (x - y).norm() * (1.0 + 1e-9)) << p->family();
      }
    }
  }
}

TEST(Problems, ZeroNoiseIsDeterministic) {
  auto p = make_perturbed_quadratic(vec({2.0, 2.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  ASSERT_TRUE(p->constants().sigma_star_sq.has_value());
  EXPECT_EQ(*p->constants().sigma_star_sq, 0.0);
}

TEST(Problems, ScalarCovarianceFromPair) {
  const double s = 0.7;
  auto p = make_perturbed_quadratic(vec({1.0}), vec({0.0}), {vec({s}), vec({-s})});
  ASSERT_NE(p->quadratic(), nullptr);
  EXPECT_NEAR(p->quadratic()->sigma(0, 0), s * s, 1e-15);
  EXPECT_NEAR(*p->constants().sigma_star_sq, s * s, 1e-15);
}

TEST(Problems, SaddleHasNoPlConstant) {
  auto p = make_perturbed_quadratic(vec({1.0, 2.0, -0.5}), Vector::Zero(3), {Vector::Zero(3)});
  EXPECT_FALSE(p->constants().mu_pl.has_value());
  EXPECT_DOUBLE_EQ(p->constants().L, 2.0);
}

TEST(Problems, NoiseMustSumToZero) {
  EXPECT_THROW(make_perturbed_quadratic(vec({1.0}), vec({0.0}), {vec({1.0}), vec({0.5})}),
               ContractViolation);
}

TEST(Problems, ConstantsValidation) {
  ProblemConstants c;
  c.L = 1.0;
  c.mu_pl = 2.0;
  EXPECT_THROW(c.validate(), PreconditionError);  // mu > L
  c.mu_pl = 0.5;
  EXPECT_NO_THROW(c.validate());
  c.mu_pl.reset();
  c.mu_rsi = 0.5;
  EXPECT_THROW(c.validate(), PreconditionError);  // RSI without PL
  c.mu_pl = 0.5;
  c.tau_wqc = -1.0;
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(Problems, ExpectedValueOuExamples) {
  auto p = make_isotropic_quadratic(2, 2.0, 0.1);
  const Vector x0 = vec({1.0, 0.0});  // f(x0) - f* = 1
  EXPECT_DOUBLE_EQ(expected_value_ou(*p, x0, 1e-4, 0.1, 0.0), 1.0);
  EXPECT_NEAR(expected_value_ou(*p, x0, 1e-4, 0.1, 1.0), oracle::kOuAtOne, 1e-15);
  EXPECT_NEAR(expected_value_ou(*p, p->x_star(), 1e-4, 0.1, 1e3), 5e-6, 1e-18);
}

TEST(Problems, ExpectedValueOuMonotone) {
  auto p = make_isotropic_quadratic(2, 2.0, 0.1);
  const double level = 1e-4 * 2 * 0.1 / 4;
  for (double scale : {1e-4, 1e-3, 1.0}) {
    const Vector x0 = vec({scale, 0.0});
    const bool above = f_gap(*p, x0) > level;
    double prev = expected_value_ou(*p, x0, 1e-4, 0.1, 0.0);
    for (int i = 1; i <= 50; ++i) {
      const double v = expected_value_ou(*p, x0, 1e-4, 0.1, 0.1 * i);
      if (above)
        EXPECT_LE(v, prev);
      else
        EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Problems, VerifyClassExamples) {
  Rng rng(5);
  auto iso = make_isotropic_quadratic(3, 2.0, 0.1);
  const ClassReport pl = verify_class(*iso, FunctionClass::kPl, 200, 3.0, rng);
  EXPECT_TRUE(pl.passed);
  EXPECT_NEAR(pl.worst_slack, 0.0, 1e-9);

  auto convex = make_perturbed_quadratic(vec({1.0, 3.0}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  auto c = convex->constants();
  c.tau_wqc = 1.0;
  convex = with_constants(convex, c);
  EXPECT_TRUE(verify_class(*convex, FunctionClass::kWqc, 200, 3.0, rng).passed);

  // Saddle, gap measured from the stationary point: along the negative
  // eigendirection the gap is negative, so the PL inequality holds there for
  // any admissible constant; the WQC inequality is what breaks along it.
  auto saddle = make_perturbed_quadratic(vec({1.0, -0.5}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  auto sc = saddle->constants();
  sc.mu_pl = 1.0;
  sc.tau_wqc = 1.0;
  saddle = with_constants(saddle, sc);
  EXPECT_TRUE(verify_class(*saddle, FunctionClass::kPl, 200, 3.0, rng).passed);
  const ClassReport bad = verify_class(*saddle, FunctionClass::kWqc, 200, 3.0, rng);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(std::abs(bad.worst_point[1]), std::abs(bad.worst_point[0]));
  // PL claimed beyond the positive curvature fails along the positive direction.
  auto tilted = make_perturbed_quadratic(vec({1.0, 0.1}), vec({0.0, 0.0}), {vec({0.0, 0.0})});
  auto tc = tilted->constants();
  tc.mu_pl = 0.5;
  tilted = with_constants(tilted, tc);
  const ClassReport bad_pl = verify_class(*tilted, FunctionClass::kPl, 200, 3.0, rng);
  EXPECT_FALSE(bad_pl.passed);
  EXPECT_GT(std::abs(bad_pl.worst_point[1]), std::abs(bad_pl.worst_point[0]));
}

TEST(Problems, RsiConstantOfSvrgProblem) {
  Rng rng(6);
  auto p = make_svrg_problem();
  EXPECT_DOUBLE_EQ(p->constants().L, 9.0);
  EXPECT_DOUBLE_EQ(*p->constants().mu_rsi, 12.0);
  EXPECT_TRUE(verify_class(*p, FunctionClass::kRsi, 300, 2.0, rng).passed);
  // The inequality itself holds for mu = 10 (mean Hessian 6 I gives slack
  // 1 |x - x*|^2), but the pair mu = 10, L = 1 is impossible: RSI in this form
  // forces mu <= 2L, and the component gradients are 9-Lipschitz, not 1.
  ProblemConstants c = p->constants();
  c.mu_rsi = 10.0;
  EXPECT_TRUE(verify_class(*with_constants(p, c), FunctionClass::kRsi, 300, 2.0, rng).passed);
  c.mu_rsi = 12.5;
  EXPECT_FALSE(verify_class(*with_constants(p, c), FunctionClass::kRsi, 300, 2.0, rng).passed);
  const Vector x = vec({0.0, 0.0}), y = vec({1.0, 0.0});
  Vector gx(2), gy(2);
  double worst = 0.0;
  for (std::size_t i = 0; i < p->n_components(); ++i) {
    p->component_gradient(i, x, gx);
    p->component_gradient(i, y, gy);
    worst = std::max(worst, (gx - gy).norm() / (x - y).norm());
  }
  EXPECT_GT(worst, 1.0);
  EXPECT_NEAR(worst, 9.0, 1e-12);
}

TEST(Problems, CloneIsIndependentCopy) {
  auto p = make_canonical_pl_problem();
  auto q = p->clone();
  const Vector x = vec({0.3, -1.2});
  EXPECT_EQ(p->value(x), q->value(x));
  EXPECT_EQ(q->family(), p->family());
}

}  // namespace
