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


#ifndef PGFLOW_ESTIMATORS_HPP
#define PGFLOW_ESTIMATORS_HPP

#include <cstddef>
#include <vector>

#include "pgflow/linalg.hpp"
#include "pgflow/problems.hpp"

namespace pgflow {

class Rng;

struct GradientEstimate {
  Vector value;
  /// Sampled component indices, with multiplicity.
  std::vector<std::size_t> batch_indices;
};

struct CovarianceReport {
  Matrix sigma_matrix;
  Matrix sqrt_matrix;
  /// Largest eigenvalue of sigma_matrix (= ||sigma sigma^T||_2).
  double spectral_norm = 0.0;
};

/// Mini-batch estimator: mean of b component gradients drawn uniformly with
/// replacement.
GradientEstimate mb_estimate(const FiniteSumProblem& p, const Vector& x, std::size_t b, Rng& rng);

/// SVRG estimator with control variate at `pivot`.
GradientEstimate vr_estimate(const FiniteSumProblem& p, const Vector& x, const Vector& pivot,
                             std::size_t b, Rng& rng);

/// Allocation-free forms used by the integrators. `scratch` must have length d.
void mb_estimate_into(const FiniteSumProblem& p, const Vector& x, std::size_t b, Rng& rng,
                      Vector& out, Vector& scratch);
void vr_estimate_into(const FiniteSumProblem& p, const Vector& x, const Vector& pivot,
                      const Vector& pivot_full_grad, std::size_t b, Rng& rng, Vector& out,
                      Vector& scratch);

/// Exact one-sample covariance (1/N) sum_i (grad f - grad f_i)(...)^T.
CovarianceReport sigma_mb(const FiniteSumProblem& p, const Vector& x);
Matrix sigma_mb_matrix(const FiniteSumProblem& p, const Vector& x);

/// Exact covariance of the VR estimator with pivot y; zero when y = x.
CovarianceReport sigma_vr(const FiniteSumProblem& p, const Vector& x, const Vector& y);
Matrix sigma_vr_matrix(const FiniteSumProblem& p, const Vector& x, const Vector& y);

/// Principal square root through a symmetric eigendecomposition. Eigenvalues
/// in [-1e-8, 0) are clamped to zero; anything more negative raises
/// NotPsdError. Both tolerances scale with max(1, max|A_ij|).
Matrix principal_sqrt(const Matrix& a);

/// max over the points of lambda_max(Sigma_MB(x)).
double estimate_sigma_star_sq(const FiniteSumProblem& p, const std::vector<Vector>& points);

}  // namespace pgflow

#endif  // PGFLOW_ESTIMATORS_HPP
