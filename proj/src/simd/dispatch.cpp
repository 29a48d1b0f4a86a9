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

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string_view>

namespace pgflow::simd {

#if defined(PGFLOW_HAVE_AVX2)
const KernelSet& avx2_kernel_table();
#endif

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const KernelSet* initial_choice() {
  const char* env = std::getenv("PGFLOW_KERNELS");
  const std::string_view want = env ? env : "";
  if (want == "scalar") return &scalar_kernels();
  if (const KernelSet* v = avx2_kernels()) return v;
  return &scalar_kernels();
}

std::atomic<const KernelSet*>& active() {
  static std::atomic<const KernelSet*> a{initial_choice()};
  return a;
}

}  // namespace

const KernelSet* avx2_kernels() {
#if defined(PGFLOW_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& kernels() { return *active().load(std::memory_order_acquire); }

bool select_kernels(KernelChoice choice) {
  const KernelSet* k = nullptr;
  switch (choice) {
    case KernelChoice::kScalar: k = &scalar_kernels(); break;
    case KernelChoice::kAvx2: k = avx2_kernels(); break;
    case KernelChoice::kAuto: k = avx2_kernels() ? avx2_kernels() : &scalar_kernels(); break;
  }
  if (!k) return false;
  active().store(k, std::memory_order_release);
  return true;
}

GaussianLanes seed_lanes(std::uint64_t seed) {
  GaussianLanes g{};
  std::uint64_t st = seed;
  for (std::size_t l = 0; l < kLanes; ++l)
    for (int w = 0; w < 4; ++w) g.s[w][l] = splitmix64(st);
  return g;
}

void fill_normals(const KernelSet& k, GaussianLanes& lanes, std::span<double> out) {
  const std::size_t full = out.size() / kNormalsPerBlock;
  if (full) k.normal_blocks(lanes, out.data(), full);
  const std::size_t rest = out.size() - full * kNormalsPerBlock;
  if (rest) {
    double tmp[kNormalsPerBlock];
    k.normal_blocks(lanes, tmp, 1);
    std::copy_n(tmp, rest, out.data() + full * kNormalsPerBlock);
  }
}

}  // namespace pgflow::simd
