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


#include "pgflow/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pgflow/errors.hpp"
#include "pgflow/rng.hpp"

namespace pgflow {
namespace {

void check_len(const FiniteSumProblem& p, const Vector& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != p.dim()) {
    std::ostringstream os;
    os << what << ": expected length " << p.dim() << ", got " << v.size();
    throw ContractViolation(os.str());
  }
}

void check_batch(std::size_t b) {
  if (b == 0) throw PreconditionError("batch size must be >= 1");
}

CovarianceReport make_report(Matrix s) {
  CovarianceReport r;
  r.sigma_matrix = std::move(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es(r.sigma_matrix);
  r.spectral_norm = std::max(0.0, es.eigenvalues().maxCoeff());
  r.sqrt_matrix = principal_sqrt(r.sigma_matrix);
  return r;
}

}  // namespace

void mb_estimate_into(const FiniteSumProblem& p, const Vector& x, std::size_t b, Rng& rng,
                      Vector& out, Vector& scratch) {
  const std::size_t n = p.n_components();
  out.setZero();
  for (std::size_t s = 0; s < b; ++s) {
    p.component_gradient(rng.index(n), x, scratch);
    out += scratch;
  }
  out /= static_cast<double>(b);
}

GradientEstimate mb_estimate(const FiniteSumProblem& p, const Vector& x, std::size_t b, Rng& rng) {
  check_batch(b);
  check_len(p, x, "mb_estimate");
  GradientEstimate est;
  est.value = Vector::Zero(x.size());
  est.batch_indices.reserve(b);
  Vector g(x.size());
  for (std::size_t s = 0; s < b; ++s) {
    const std::size_t i = rng.index(p.n_components());
    est.batch_indices.push_back(i);
    p.component_gradient(i, x, g);
    est.value += g;
  }
  est.value /= static_cast<double>(b);
  return est;
}

void vr_estimate_into(const FiniteSumProblem& p, const Vector& x, const Vector& pivot,
                      const Vector& pivot_full_grad, std::size_t b, Rng& rng, Vector& out,
                      Vector& scratch) {
  const std::size_t n = p.n_components();
  out.setZero();
  for (std::size_t s = 0; s < b; ++s) {
    const std::size_t i = rng.index(n);
    p.component_gradient(i, x, scratch);
    out += scratch;
    p.component_gradient(i, pivot, scratch);
    out -= scratch;
  }
  out /= static_cast<double>(b);
  out += pivot_full_grad;
}

GradientEstimate vr_estimate(const FiniteSumProblem& p, const Vector& x, const Vector& pivot,
                             std::size_t b, Rng& rng) {
  check_batch(b);
  check_len(p, x, "vr_estimate");
  check_len(p, pivot, "vr_estimate pivot");
  GradientEstimate est;
  est.value = Vector::Zero(x.size());
  est.batch_indices.reserve(b);
  Vector gx(x.size()), gy(x.size());
  for (std::size_t s = 0; s < b; ++s) {
    const std::size_t i = rng.index(p.n_components());
    est.batch_indices.push_back(i);
    p.component_gradient(i, x, gx);
    p.component_gradient(i, pivot, gy);
    est.value += gx - gy;
  }
  est.value /= static_cast<double>(b);
  est.value += full_gradient(p, pivot);
  return est;
}

Matrix sigma_mb_matrix(const FiniteSumProblem& p, const Vector& x) {
  check_len(p, x, "sigma_mb");
  const Vector g = full_gradient(p, x);
  Matrix s = Matrix::Zero(x.size(), x.size());
  Vector gi(x.size());
  for (std::size_t i = 0; i < p.n_components(); ++i) {
    p.component_gradient(i, x, gi);
    const Vector e = g - gi;
    s.selfadjointView<Eigen::Lower>().rankUpdate(e);
  }
  s = s.selfadjointView<Eigen::Lower>();
  return s / static_cast<double>(p.n_components());
}

CovarianceReport sigma_mb(const FiniteSumProblem& p, const Vector& x) {
  return make_report(sigma_mb_matrix(p, x));
}

Matrix sigma_vr_matrix(const FiniteSumProblem& p, const Vector& x, const Vector& y) {
  check_len(p, x, "sigma_vr");
  check_len(p, y, "sigma_vr pivot");
  // Per-index estimator term is grad f_i(x) - grad f_i(y) + grad f(y); its
  // deviation from grad f(x) is (grad f_i(x) - grad f_i(y)) - (grad f(x) - grad f(y)).
  const Vector mean = full_gradient(p, x) - full_gradient(p, y);
  Matrix s = Matrix::Zero(x.size(), x.size());
  Vector gx(x.size()), gy(x.size());
  for (std::size_t i = 0; i < p.n_components(); ++i) {
    p.component_gradient(i, x, gx);
    p.component_gradient(i, y, gy);
    const Vector e = gx - gy - mean;
    s.selfadjointView<Eigen::Lower>().rankUpdate(e);
  }
  s = s.selfadjointView<Eigen::Lower>();
  return s / static_cast<double>(p.n_components());
}

CovarianceReport sigma_vr(const FiniteSumProblem& p, const Vector& x, const Vector& y) {
  return make_report(sigma_vr_matrix(p, x, y));
}

Matrix principal_sqrt(const Matrix& a) {
  if (a.rows() != a.cols()) throw ContractViolation("principal_sqrt: matrix must be square");
  if (a.size() == 0) return a;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw ContractViolation("principal_sqrt: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  Vector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-8 * scale) {
      std::ostringstream os;
      os << "principal_sqrt: eigenvalue " << ev[i] << " is negative";
      throw NotPsdError(os.str());
    }
    ev[i] = std::sqrt(std::max(0.0, ev[i]));
  }
  const Matrix& v = es.eigenvectors();
  Matrix s = v * ev.asDiagonal() * v.transpose();
  return 0.5 * (s + s.transpose());
}

double estimate_sigma_star_sq(const FiniteSumProblem& p, const std::vector<Vector>& points) {
  if (points.empty()) throw PreconditionError("estimate_sigma_star_sq: no sample points");
  double best = 0.0;
  for (const Vector& x : points) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_mb_matrix(p, x), Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

}  // namespace pgflow
