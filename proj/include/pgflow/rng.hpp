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


#ifndef PGFLOW_RNG_HPP
#define PGFLOW_RNG_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "pgflow/simd/kernels.hpp"

namespace pgflow {

std::uint64_t splitmix64(std::uint64_t& state);

/// Per-path random stream: xoshiro256++ for uniforms and index draws, plus a
/// four-lane Gaussian generator whose output is independent of which kernel
/// variant is active.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Stream for path `index` of an ensemble; depends only on (master, index).
  static Rng for_path(std::uint64_t master, std::uint64_t index);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on {0, ..., n-1}; n >= 1.
  std::size_t index(std::size_t n);
  double normal();
  void normals(std::span<double> out);

 private:
  std::uint64_t s_[4];
  simd::GaussianLanes lanes_;
  std::array<double, simd::kNormalsPerBlock> buf_{};
  std::size_t buf_pos_ = simd::kNormalsPerBlock;
};

}  // namespace pgflow

#endif  // PGFLOW_RNG_HPP
