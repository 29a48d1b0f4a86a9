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


#ifndef PGFLOW_PROBLEMS_HPP
#define PGFLOW_PROBLEMS_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pgflow/linalg.hpp"

namespace pgflow {

class Rng;

/// Regularity constants. They are declared by whoever builds the problem and
/// spot-checked with verify_class; nothing here is inferred automatically
/// except by the factories for the quadratic family.
struct ProblemConstants {
  double L = 0.0;
  std::optional<double> mu_pl;
  std::optional<double> mu_rsi;
  std::optional<double> tau_wqc;
  std::optional<double> sigma_star_sq;
  double f_star = 0.0;

  /// Throws PreconditionError on non-positive constants, mu_pl > L, or an RSI
  /// constant without a PL constant.
  void validate() const;
};

/// Extra structure of the separable quadratic family
///   f_i(x) = 1/2 <x - x*, D_i (x - x*)> + <c_i, x>,
/// with diagonal D_i whose mean is diag(lambda) and sum_i c_i = 0.
struct QuadraticStructure {
  Vector lambda;         // diagonal of the mean Hessian H
  Matrix offsets;        // d x N, column i is c_i
  Matrix comp_hess;      // d x N diagonals of D_i; empty when D_i = H for all i
  Matrix sigma;          // constant covariance (only when comp_hess is empty)
  Matrix sigma_sqrt;
  bool sigma_diagonal = false;

  bool constant_covariance() const { return comp_hess.size() == 0; }
  bool isotropic() const;
};

class FiniteSumProblem {
 public:
  virtual ~FiniteSumProblem() = default;

  std::size_t dim() const { return static_cast<std::size_t>(x_star_.size()); }
  std::size_t n_components() const { return n_; }
  const Vector& x_star() const { return x_star_; }
  const ProblemConstants& constants() const { return constants_; }
  const std::string& family() const { return family_; }

  virtual double component_value(std::size_t i, const Vector& x) const = 0;
  /// g <- grad f_i(x); g must already have length d.
  virtual void component_gradient(std::size_t i, const Vector& x, Vector& g) const = 0;

  virtual double value(const Vector& x) const;
  /// g <- grad f(x); g must already have length d.
  virtual void gradient(const Vector& x, Vector& g) const;

  virtual const QuadraticStructure* quadratic() const { return nullptr; }
  virtual std::shared_ptr<FiniteSumProblem> clone() const = 0;

  void set_constants(const ProblemConstants& c) {
    c.validate();
    constants_ = c;
  }

 protected:
  FiniteSumProblem(std::string family, std::size_t n, Vector x_star, ProblemConstants c)
      : family_(std::move(family)), n_(n), x_star_(std::move(x_star)), constants_(c) {}

 private:
  std::string family_;
  std::size_t n_;
  Vector x_star_;
  ProblemConstants constants_;
};

using ProblemPtr = std::shared_ptr<const FiniteSumProblem>;

/// (1/N) sum_i grad f_i(x). Throws ContractViolation on dimension mismatch.
Vector full_gradient(const FiniteSumProblem& p, const Vector& x);

/// f(x) - f*.
double f_gap(const FiniteSumProblem& p, const Vector& x);

/// f_i(x) = 1/2 <x-x*, H(x-x*)> + <c_i, x>, H = diag(lambda). `noise` holds
/// the N vectors c_i (at least one); their sum must vanish.
ProblemPtr make_perturbed_quadratic(const Vector& lambda, const Vector& x_star,
                                    const std::vector<Vector>& noise);

/// f = mu/2 ||x - x*||^2 with covariance sigma_sq * I, realised by the 2d
/// offsets +-sqrt(d sigma_sq) e_j. x* defaults to the origin.
ProblemPtr make_isotropic_quadratic(std::size_t d, double mu, double sigma_sq,
                                    std::optional<Vector> x_star = std::nullopt);

/// Quadratic family with per-component diagonal curvature. comp_hess and
/// offsets are d x N; the mean of comp_hess columns becomes H, which must be
/// positive definite for the factory to set PL/RSI constants.
ProblemPtr make_varied_quadratic(const Matrix& comp_hess, const Vector& x_star,
                                 const Matrix& offsets);

/// Smooth convex non-quadratic family: f_i(x) = sum_j log cosh(x_j - x*_j - a_ij)
/// with offsets supplied in +- pairs (columns i and i + N/2 negated), so x* is
/// the minimiser. L = 1, tau_wqc = 1, state-dependent covariance.
ProblemPtr make_logcosh_problem(const Vector& x_star, const Matrix& half_offsets);

/// Copy of `p` with its constants replaced (validated).
ProblemPtr with_constants(const ProblemPtr& p, const ProblemConstants& c);

/// Exact E[f(X(t)) - f*] for the MB-PGF model with psi = 1 on an isotropic
/// quadratic with isotropic constant covariance:
///   gap0 e^{-2 mu t} + h d sigma_sq / (4 b) (1 - e^{-2 mu t}).
double expected_value_ou(const FiniteSumProblem& p, const Vector& x0, double h,
                         double sigma_star_sq, double t, double b = 1.0);

enum class FunctionClass { kWqc, kPl, kRsi };

struct ClassReport {
  FunctionClass cls;
  double worst_slack = 0.0;
  Vector worst_point;
  std::size_t n_samples = 0;
  bool passed = false;
};

/// Samples points uniformly in the ball of `radius` around x* and reports the
/// worst slack of the class inequality. Passes iff slack >= -1e-9.
ClassReport verify_class(const FiniteSumProblem& p, FunctionClass cls,
                         std::size_t n_samples, double radius, Rng& rng);

}  // namespace pgflow

#endif  // PGFLOW_PROBLEMS_HPP
