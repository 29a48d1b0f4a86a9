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


#include "pgflow/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pgflow/errors.hpp"
#include "pgflow/estimators.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {

void ProblemConstants::validate() const {
  auto positive = [](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw PreconditionError(std::string("constant ") + name + " must be finite and > 0");
  };
  positive("L", L);
  if (mu_pl) positive("mu_pl", *mu_pl);
  if (mu_rsi) positive("mu_rsi", *mu_rsi);
  if (tau_wqc) positive("tau_wqc", *tau_wqc);
  if (sigma_star_sq && !(*sigma_star_sq >= 0.0))
    throw PreconditionError("constant sigma_star_sq must be >= 0");
  if (mu_pl && *mu_pl > L * (1.0 + 1e-12))
    throw PreconditionError("mu_pl must not exceed L");
  if (mu_rsi && !mu_pl) throw PreconditionError("mu_rsi requires mu_pl (RSI implies PL)");
}

bool QuadraticStructure::isotropic() const {
  if (!constant_covariance()) return false;
  const double l0 = lambda[0];
  for (Eigen::Index j = 1; j < lambda.size(); ++j)
    if (std::abs(lambda[j] - l0) > 1e-14 * std::abs(l0)) return false;
  const double s0 = sigma(0, 0);
  const double tol = 1e-12 * std::max(1.0, std::abs(s0));
  for (Eigen::Index i = 0; i < sigma.rows(); ++i)
    for (Eigen::Index j = 0; j < sigma.cols(); ++j)
      if (std::abs(sigma(i, j) - (i == j ? s0 : 0.0)) > tol) return false;
  return true;
}

double FiniteSumProblem::value(const Vector& x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) acc += component_value(i, x);
  return acc / static_cast<double>(n_);
}

void FiniteSumProblem::gradient(const Vector& x, Vector& g) const {
  Vector gi(dim());
  g.setZero();
  for (std::size_t i = 0; i < n_; ++i) {
    component_gradient(i, x, gi);
    g += gi;
  }
  g /= static_cast<double>(n_);
}

namespace {

void check_dim(const FiniteSumProblem& p, const Vector& x, const char* what) {
  if (static_cast<std::size_t>(x.size()) != p.dim()) {
    std::ostringstream os;
    os << what << ": expected length " << p.dim() << ", got " << x.size();
    throw ContractViolation(os.str());
  }
}

class QuadraticProblem final : public FiniteSumProblem {
 public:
  QuadraticProblem(std::string family, QuadraticStructure q, Vector x_star, ProblemConstants c)
      : FiniteSumProblem(std::move(family), static_cast<std::size_t>(q.offsets.cols()),
                         std::move(x_star), c),
        q_(std::move(q)) {}

  double component_value(std::size_t i, const Vector& x) const override {
    const Vector e = x - x_star();
    const auto ci = q_.offsets.col(static_cast<Eigen::Index>(i));
    const double quad = q_.constant_covariance()
                            ? e.dot(q_.lambda.cwiseProduct(e))
                            : e.dot(q_.comp_hess.col(static_cast<Eigen::Index>(i)).cwiseProduct(e));
    return 0.5 * quad + ci.dot(x);
  }

  void component_gradient(std::size_t i, const Vector& x, Vector& g) const override {
    const auto col = static_cast<Eigen::Index>(i);
    if (q_.constant_covariance())
      g = q_.lambda.cwiseProduct(x - x_star()) + q_.offsets.col(col);
    else
      g = q_.comp_hess.col(col).cwiseProduct(x - x_star()) + q_.offsets.col(col);
  }

  double value(const Vector& x) const override {
    const Vector e = x - x_star();
    return 0.5 * e.dot(q_.lambda.cwiseProduct(e)) + mean_offset_.dot(x);
  }

  void gradient(const Vector& x, Vector& g) const override {
    g = q_.lambda.cwiseProduct(x - x_star()) + mean_offset_;
  }

  const QuadraticStructure* quadratic() const override { return &q_; }

  std::shared_ptr<FiniteSumProblem> clone() const override {
    return std::make_shared<QuadraticProblem>(*this);
  }

  void finalize() { mean_offset_ = q_.offsets.rowwise().mean(); }

 private:
  QuadraticStructure q_;
  Vector mean_offset_;
};

class LogCoshProblem final : public FiniteSumProblem {
 public:
  LogCoshProblem(Vector x_star, Matrix offsets, ProblemConstants c)
      : FiniteSumProblem("logcosh", static_cast<std::size_t>(offsets.cols()),
                         std::move(x_star), c),
        a_(std::move(offsets)) {}

  static double log_cosh(double z) {
    const double az = std::abs(z);
    return az + std::log1p(std::exp(-2.0 * az)) - std::log(2.0);
  }

  double component_value(std::size_t i, const Vector& x) const override {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j)
      acc += log_cosh(x[j] - x_star()[j] - a_(j, static_cast<Eigen::Index>(i)));
    return acc;
  }

  void component_gradient(std::size_t i, const Vector& x, Vector& g) const override {
    for (Eigen::Index j = 0; j < x.size(); ++j)
      g[j] = std::tanh(x[j] - x_star()[j] - a_(j, static_cast<Eigen::Index>(i)));
  }

  std::shared_ptr<FiniteSumProblem> clone() const override {
    return std::make_shared<LogCoshProblem>(*this);
  }

 private:
  Matrix a_;
};

void check_offsets_sum(const Matrix& offsets) {
  const double scale = std::max(1.0, offsets.cwiseAbs().maxCoeff() *
                                         static_cast<double>(offsets.cols()));
  const double resid = offsets.rowwise().sum().cwiseAbs().maxCoeff();
  if (resid > 1e-12 * scale) {
    std::ostringstream os;
    os << "noise vectors must sum to zero (residual " << resid << ")";
    throw ContractViolation(os.str());
  }
}

ProblemConstants quadratic_constants(const Vector& lambda, double max_curv) {
  ProblemConstants c;
  c.L = max_curv > 0.0 ? max_curv : 1.0;  // L must be positive even for H = 0
  const double lmin = lambda.minCoeff();
  if (lmin > 0.0) {
    c.mu_pl = lmin;
    c.mu_rsi = 2.0 * lmin;
    c.tau_wqc = 1.0;
  }
  c.f_star = 0.0;
  return c;
}

}  // namespace

Vector full_gradient(const FiniteSumProblem& p, const Vector& x) {
  check_dim(p, x, "full_gradient");
  Vector g(p.dim());
  p.gradient(x, g);
  return g;
}

double f_gap(const FiniteSumProblem& p, const Vector& x) {
  check_dim(p, x, "f_gap");
  return p.value(x) - p.constants().f_star;
}

ProblemPtr make_perturbed_quadratic(const Vector& lambda, const Vector& x_star,
                                    const std::vector<Vector>& noise) {
  const Eigen::Index d = lambda.size();
  if (d < 1) throw ContractViolation("perturbed quadratic: empty eigenvalue vector");
  if (x_star.size() != d) throw ContractViolation("perturbed quadratic: x_star length mismatch");
  if (noise.empty()) throw ContractViolation("perturbed quadratic: need at least one component");
  if (!lambda.allFinite()) throw ContractViolation("perturbed quadratic: non-finite eigenvalue");
  QuadraticStructure q;
  q.lambda = lambda;
  q.offsets.resize(d, static_cast<Eigen::Index>(noise.size()));
  for (std::size_t i = 0; i < noise.size(); ++i) {
    if (noise[i].size() != d) throw ContractViolation("perturbed quadratic: noise vector length mismatch");
    q.offsets.col(static_cast<Eigen::Index>(i)) = noise[i];
  }
  check_offsets_sum(q.offsets);
  q.sigma = q.offsets * q.offsets.transpose() / static_cast<double>(noise.size());
  q.sigma = 0.5 * (q.sigma + q.sigma.transpose());
  q.sigma_diagonal = q.sigma.isDiagonal(0.0);
  q.sigma_sqrt = q.sigma_diagonal ? Matrix(q.sigma.diagonal().cwiseSqrt().asDiagonal())
                                  : principal_sqrt(q.sigma);
  ProblemConstants c = quadratic_constants(lambda, lambda.cwiseAbs().maxCoeff());
  c.sigma_star_sq = std::max(0.0, Eigen::SelfAdjointEigenSolver<Matrix>(q.sigma,
                                      Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
  c.validate();
  auto p = std::make_shared<QuadraticProblem>("perturbed_quadratic", std::move(q), x_star, c);
  p->finalize();
  return p;
}

ProblemPtr make_isotropic_quadratic(std::size_t d, double mu, double sigma_sq,
                                    std::optional<Vector> x_star) {
  if (d < 1) throw ContractViolation("isotropic quadratic: d must be >= 1");
  if (!(mu > 0.0)) throw PreconditionError("isotropic quadratic: mu must be > 0");
  if (!(sigma_sq >= 0.0)) throw PreconditionError("isotropic quadratic: sigma_sq must be >= 0");
  const auto n = static_cast<Eigen::Index>(d);
  const Vector xs = x_star ? *x_star : Vector::Zero(n);
  const double s = std::sqrt(static_cast<double>(d) * sigma_sq);
  std::vector<Vector> noise;
  for (Eigen::Index j = 0; j < n; ++j) {
    Vector c = Vector::Zero(n);
    c[j] = s;
    noise.push_back(c);
    noise.push_back(-c);
  }
  auto base = make_perturbed_quadratic(Vector::Constant(n, mu), xs, noise);
  auto copy = base->clone();
  ProblemConstants c = copy->constants();
  c.sigma_star_sq = sigma_sq;  // exact by construction; avoids eigen round-off
  copy->set_constants(c);
  return copy;
}

ProblemPtr make_varied_quadratic(const Matrix& comp_hess, const Vector& x_star,
                                 const Matrix& offsets) {
  const Eigen::Index d = x_star.size();
  if (d < 1 || comp_hess.rows() != d || offsets.rows() != d ||
      comp_hess.cols() != offsets.cols() || offsets.cols() < 1)
    throw ContractViolation("varied quadratic: inconsistent shapes");
  check_offsets_sum(offsets);
  QuadraticStructure q;
  q.lambda = comp_hess.rowwise().mean();
  q.offsets = offsets;
  q.comp_hess = comp_hess;
  ProblemConstants c = quadratic_constants(q.lambda, comp_hess.cwiseAbs().maxCoeff());
  c.validate();
  auto p = std::make_shared<QuadraticProblem>("varied_quadratic", std::move(q), x_star, c);
  p->finalize();
  return p;
}

ProblemPtr make_logcosh_problem(const Vector& x_star, const Matrix& half_offsets) {
  const Eigen::Index d = x_star.size();
  if (d < 1 || half_offsets.rows() != d || half_offsets.cols() < 1)
    throw ContractViolation("logcosh problem: inconsistent shapes");
  const Eigen::Index m = half_offsets.cols();
  Matrix a(d, 2 * m);
  a.leftCols(m) = half_offsets;
  a.rightCols(m) = -half_offsets;
  ProblemConstants c;
  c.L = 1.0;
  c.tau_wqc = 1.0;
  auto p = std::make_shared<LogCoshProblem>(x_star, a, c);
  c.f_star = p->value(x_star);
  p->set_constants(c);
  return p;
}

ProblemPtr with_constants(const ProblemPtr& p, const ProblemConstants& c) {
  auto copy = p->clone();
  copy->set_constants(c);
  return copy;
}

double expected_value_ou(const FiniteSumProblem& p, const Vector& x0, double h,
                         double sigma_star_sq, double t, double b) {
  const QuadraticStructure* q = p.quadratic();
  if (!q || !q->isotropic())
    throw UnsupportedProblem("expected_value_ou needs an isotropic quadratic with constant isotropic covariance");
  if (t < 0.0) throw PreconditionError("expected_value_ou: t must be >= 0");
  const double mu = q->lambda[0];
  const double decay = std::exp(-2.0 * mu * t);
  const double d = static_cast<double>(p.dim());
  return f_gap(p, x0) * decay + h * d * sigma_star_sq / (4.0 * b) * (1.0 - decay);
}

ClassReport verify_class(const FiniteSumProblem& p, FunctionClass cls,
                         std::size_t n_samples, double radius, Rng& rng) {
  const ProblemConstants& c = p.constants();
  double k = 0.0;
  switch (cls) {
    case FunctionClass::kWqc:
      if (!c.tau_wqc) throw PreconditionError("verify_class(WQC): tau_wqc not declared");
      k = *c.tau_wqc;
      break;
    case FunctionClass::kPl:
      if (!c.mu_pl) throw PreconditionError("verify_class(PL): mu_pl not declared");
      k = *c.mu_pl;
      break;
    case FunctionClass::kRsi:
      if (!c.mu_rsi) throw PreconditionError("verify_class(RSI): mu_rsi not declared");
      k = *c.mu_rsi;
      break;
  }
  const std::size_t d = p.dim();
  ClassReport rep;
  rep.cls = cls;
  rep.n_samples = n_samples;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  Vector dir(d), g(d);
  for (std::size_t s = 0; s < n_samples; ++s) {
    rng.normals({dir.data(), d});
    const double nrm = dir.norm();
    if (nrm == 0.0) continue;
    const double r = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    const Vector x = p.x_star() + (r / nrm) * dir;
    const Vector e = x - p.x_star();
    p.gradient(x, g);
    const double gap = p.value(x) - c.f_star;
    double slack = 0.0;
    switch (cls) {
      case FunctionClass::kWqc: slack = g.dot(e) - k * gap; break;
      case FunctionClass::kPl: slack = g.squaredNorm() - 2.0 * k * gap; break;
      case FunctionClass::kRsi: slack = g.dot(e) - 0.5 * k * e.squaredNorm(); break;
    }
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_point = x;
    }
  }
  rep.passed = rep.worst_slack >= -1e-9;
  return rep;
}

}  // namespace pgflow
