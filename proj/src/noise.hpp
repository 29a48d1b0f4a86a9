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


#ifndef PGFLOW_NOISE_HPP
#define PGFLOW_NOISE_HPP

// Internal: evaluation of the volatility factor sigma(x) used by PGD and the
// continuous integrators, and its application to a Gaussian vector.

#include <optional>

#include "pgflow/estimators.hpp"
#include "pgflow/problems.hpp"
#include "pgflow/simd/kernels.hpp"

namespace pgflow::detail {

/// y <- y + scale * S z for a symmetric factor S, using the diagonal kernel when
/// S is diagonal.
inline void apply_factor(const Matrix& s, bool diagonal, const Vector& z, double scale, Vector& y,
                         Vector& diag_scratch) {
  const auto& k = simd::kernels();
  const std::size_t n = static_cast<std::size_t>(y.size());
  if (diagonal) {
    diag_scratch = s.diagonal().cwiseProduct(z);
    k.axpy(scale, diag_scratch.data(), y.data(), n);
  } else {
    k.gemv_acc(s.data(), z.data(), scale, y.data(), n);
  }
}

/// Supplies sigma_MB(x): cached when the problem's covariance is constant or a
/// fixed factor was supplied, otherwise recomputed exactly.
class MbVolatility {
 public:
  MbVolatility(const FiniteSumProblem& p, const std::optional<Matrix>& fixed) : p_(p) {
    if (fixed) {
      cached_ = *fixed;
    } else if (const QuadraticStructure* q = p.quadratic(); q && q->constant_covariance()) {
      cached_ = q->sigma_sqrt;
    }
    if (cached_) diagonal_ = cached_->isDiagonal(0.0);
  }

  bool constant() const { return cached_.has_value(); }
  bool diagonal() const { return diagonal_; }

  const Matrix& at(const Vector& x) {
    if (cached_) return *cached_;
    work_ = principal_sqrt(sigma_mb_matrix(p_, x));
    return work_;
  }

 private:
  const FiniteSumProblem& p_;
  std::optional<Matrix> cached_;
  bool diagonal_ = false;
  Matrix work_;
};

}  // namespace pgflow::detail

#endif  // PGFLOW_NOISE_HPP
