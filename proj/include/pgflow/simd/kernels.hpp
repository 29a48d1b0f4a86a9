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

#ifndef PGFLOW_SIMD_KERNELS_HPP
#define PGFLOW_SIMD_KERNELS_HPP

// Data-parallel inner loops used by the integrators and the Gaussian
// generator. Every kernel has a portable scalar reference and, on x86-64, an
// AVX2 variant; the variant is chosen once at runtime.
//
// Element-wise kernels (normal_blocks, relax_step, axpy, gemv_acc) produce
// bit-identical results across variants: both evaluate the same operation
// sequence without fused multiply-add. Reductions (dot,
// quadratic_observables) differ only in summation order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace pgflow::simd {

/// Number of xoshiro256+ lanes advanced together by the Gaussian generator.
inline constexpr std::size_t kLanes = 4;
/// Normals produced per generator block (two per lane, Box-Muller).
inline constexpr std::size_t kNormalsPerBlock = 2 * kLanes;

/// Four independent xoshiro256+ states, stored word-major so one state word
/// of all lanes fits a 256-bit register.
struct GaussianLanes {
  alignas(32) std::uint64_t s[4][kLanes];
};

struct KernelSet {
  std::string_view name;

  /// Writes `blocks * kNormalsPerBlock` standard normals to `out`.
  void (*normal_blocks)(GaussianLanes& lanes, double* out, std::size_t blocks);

  /// x_i <- x_i - drift_scale * rate_i * (x_i - center_i) + noise_scale * amp_i * z_i
  void (*relax_step)(double* x, const double* center, const double* rate,
                     double drift_scale, const double* amp, double noise_scale,
                     const double* z, std::size_t n);

  /// y <- y + a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);

  /// y <- y + scale * A z, with A an n x n column-major matrix.
  void (*gemv_acc)(const double* a, const double* z, double scale, double* y,
                   std::size_t n);

  double (*dot)(const double* x, const double* y, std::size_t n);

  /// For e = x - center: out = {0.5 sum rate e^2, sum (rate e)^2, sum e^2}.
  void (*quadratic_observables)(const double* x, const double* center,
                                const double* rate, std::size_t n,
                                double* out3);
};

enum class KernelChoice { kAuto, kScalar, kAvx2 };

const KernelSet& scalar_kernels();

/// AVX2 variant, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelSet* avx2_kernels();

/// Kernel set in use. Defaults to the best available; the environment
/// variable PGFLOW_KERNELS=scalar|avx2 overrides the automatic choice.
const KernelSet& kernels();

/// Forces a variant. Returns false (and changes nothing) if unavailable.
bool select_kernels(KernelChoice choice);

/// Seeds all lanes from one 64-bit value via splitmix64.
GaussianLanes seed_lanes(std::uint64_t seed);

/// Convenience wrapper: fills `out` (any length) using whole blocks, dropping
/// the unused tail of the last block.
void fill_normals(const KernelSet& k, GaussianLanes& lanes, std::span<double> out);

}  // namespace pgflow::simd

#endif  // PGFLOW_SIMD_KERNELS_HPP
