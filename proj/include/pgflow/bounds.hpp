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


#ifndef PGFLOW_BOUNDS_HPP
#define PGFLOW_BOUNDS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "pgflow/problems.hpp"
#include "pgflow/schedules.hpp"

namespace pgflow {

enum class BoundKind {
  SMOOTH_CT,
  WQC_W1,
  WQC_W2,
  PL_CT,
  VR_CT,
  SMOOTH_DT,
  WQC_DT_RAND,
  WQC_DT_LAST,
  PL_DT,
  VR_DT
};

std::string to_string(BoundKind k);
BoundKind bound_kind_from_string(const std::string& s);
bool is_discrete(BoundKind k);

/// Everything a rate bound depends on.
struct BoundInputs {
  double L = 1.0;
  double mu = 0.0;      // PL constant
  double mu_rsi = 0.0;  // RSI constant (VR bounds)
  double tau = 1.0;     // WQC constant
  double sigma_star_sq = 0.0;
  std::size_t d = 1;
  double f0_gap = 0.0;
  double dist0_sq = 0.0;
  AdjustmentSchedule adj;
  BatchSchedule batch;
  std::size_t m = 1;        // VR epoch length in steps
  double epoch_time = 0.0;  // VR period; 0 means m h

  /// Fills constants from the problem (missing optional constants stay 0 / 1)
  /// and the initial quantities from x0.
  static BoundInputs from_problem(const FiniteSumProblem& p, const Vector& x0,
                                  const AdjustmentSchedule& adj, const BatchSchedule& batch);
  double period() const { return epoch_time > 0.0 ? epoch_time : static_cast<double>(m) * adj.h; }
};

// Time integrals appearing in the continuous bounds. Closed forms where the
// schedule allows one, adaptive quadrature otherwise.
double integral_psi2_b(const BoundInputs& in, double t);        // int psi^2 / b
double integral_w2(const BoundInputs& in, double t);            // int (L tau phi + 1) psi^2 / b
double integral_pl(const BoundInputs& in, double t);            // int psi^2/b e^{-2 mu (phi(t)-phi(s))}
double integral_psi2_b_quadrature(const BoundInputs& in, double t);
double integral_w2_quadrature(const BoundInputs& in, double t);
double integral_pl_quadrature(const BoundInputs& in, double t);

/// E||grad f(X(t~))||^2 with t~ ~ psi / phi(t).
double bound_smooth_ct(const BoundInputs& in, double t);

enum class WqcVariant { kW1Randomized, kW2LastIterate };
double bound_wqc(const BoundInputs& in, double t, WqcVariant v);

double bound_pl_ct(const BoundInputs& in, double t);

enum class VrMode { kContinuous, kDiscrete };
/// Per-epoch contraction factor; throws AdmissibilityError unless mu - 2 h L^2 > 0.
double vr_rho(const BoundInputs& in, VrMode mode);
double bound_vr(const BoundInputs& in, std::size_t j, VrMode mode);

/// Discrete-time bounds. SMOOTH_DT and WQC_DT_RAND bound the randomized
/// iterate over {0..k}; WQC_DT_LAST and PL_DT bound iterate k+1.
double bound_discrete(const BoundInputs& in, std::size_t k, BoundKind kind);
/// Same, for k = 0..n-1 in one pass.
std::vector<double> bound_discrete_curve(const BoundInputs& in, std::size_t n, BoundKind kind);

/// Noise-floor limits for psi = 1 and constant batch.
double ball_limit_continuous(const BoundInputs& in);  // h d L s^2 / (4 mu b)
double ball_limit_discrete(const BoundInputs& in);    // h d L s^2 / (2 mu b)

/// Throws AdmissibilityError naming the violated condition, if any.
void check_admissible(const BoundInputs& in, BoundKind kind);
bool is_admissible(const BoundInputs& in, BoundKind kind);

/// Evaluable t (continuous kinds) or k / epoch j (discrete kinds) -> bound.
class RateBound {
 public:
  RateBound(BoundKind kind, BoundInputs in);
  BoundKind kind() const { return kind_; }
  const BoundInputs& inputs() const { return in_; }
  double operator()(double t_or_k) const;

 private:
  BoundKind kind_;
  BoundInputs in_;
};

enum class RateClass { kPl, kWqcLast, kWqcRand, kSmoothRand };

/// Asymptotic order O(shape(t)) of a bound under psi ~ t^{-a}.
struct RateDescriptor {
  enum class Form {
    kPower,         // t^{-beta}
    kLogOverPower,  // log(t) t^{-beta}
    kInverseLog,    // 1 / log(t)
    kNone           // no convergence guarantee
  };
  Form form = Form::kPower;
  double beta = 0.0;
  std::string describe() const;
};

RateDescriptor asymptotic_exponent(double a, RateClass cls);

enum class EnergyKind { kSmooth, kWqc1, kWqc2, kPl, kRsi };
double lyapunov_energy(EnergyKind kind, const FiniteSumProblem& p, const Vector& x, double t,
                       const AdjustmentSchedule& adj);

/// (1 + t)^{-lambda} u0: mean coordinate under psi = 1/(1+t).
double landscape_stretch_reference(double lambda, double u0, double t);
/// Autonomous right-hand side reproducing the curve above:
///   -lambda u0^{-1/lambda} u^{1+1/lambda}, evaluated sign-safely.
double equivalent_gradient_rhs(double lambda, double u0, double u);

}  // namespace pgflow

#endif  // PGFLOW_BOUNDS_HPP
