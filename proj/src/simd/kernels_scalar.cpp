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


#include "pgflow/simd/kernels.hpp"
#include "simd/gaussian_math.hpp"

#include <cmath>

namespace pgflow::simd {
namespace {

using detail::log_unit;
using detail::sincos_turn;
using detail::unit_interval_plus_one;
using detail::xoshiro_next;

void normal_blocks_scalar(GaussianLanes& lanes, double* out, std::size_t blocks) {
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    double* o = out + blk * kNormalsPerBlock;
    for (int l = 0; l < static_cast<int>(kLanes); ++l) {
      const double u1 = 2.0 - unit_interval_plus_one(xoshiro_next(lanes.s, l));
      const double u2 = unit_interval_plus_one(xoshiro_next(lanes.s, l)) - 1.0;
      const double r = std::sqrt(-2.0 * log_unit(u1));
      double c, s;
      sincos_turn(u2, c, s);
      o[l] = r * c;
      o[kLanes + l] = r * s;
    }
  }
}

void relax_step_scalar(double* x, const double* center, const double* rate,
                       double drift_scale, const double* amp, double noise_scale,
                       const double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = rate[i] * (x[i] - center[i]);
    double xi = x[i] - drift_scale * g;
    xi = xi + noise_scale * (amp[i] * z[i]);
    x[i] = xi;
  }
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void gemv_acc_scalar(const double* a, const double* z, double scale, double* y,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc = acc + a[j * n + i] * z[j];
    y[i] = y[i] + scale * acc;
  }
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void quadratic_observables_scalar(const double* x, const double* center,
                                  const double* rate, std::size_t n, double* out3) {
  double f = 0.0, g = 0.0, e2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = x[i] - center[i];
    const double re = rate[i] * e;
    f += re * e;
    g += re * re;
    e2 += e * e;
  }
  out3[0] = 0.5 * f;
  out3[1] = g;
  out3[2] = e2;
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet k{"scalar",        normal_blocks_scalar, relax_step_scalar,
                           axpy_scalar,     gemv_acc_scalar,      dot_scalar,
                           quadratic_observables_scalar};
  return k;
}

}  // namespace pgflow::simd
