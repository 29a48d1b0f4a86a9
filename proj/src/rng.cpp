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


#include "pgflow/rng.hpp"

#include <algorithm>

namespace pgflow {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {
inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t st = seed;
  for (auto& w : s_) w = splitmix64(st);
  lanes_ = simd::seed_lanes(splitmix64(st));
}

Rng Rng::for_path(std::uint64_t master, std::uint64_t index) {
  std::uint64_t st = master;
  std::uint64_t base = splitmix64(st);
  std::uint64_t st2 = base ^ (index * 0xD1B54A32D192ED03ULL);
  return Rng(splitmix64(st2));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
  // Lemire's nearly-divisionless bounded draw.
  const std::uint64_t range = n;
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
  std::uint64_t low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t thresh = (0 - range) % range;
    while (low < thresh) {
      m = static_cast<unsigned __int128>(next_u64()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double Rng::normal() {
  if (buf_pos_ == buf_.size()) {
    simd::kernels().normal_blocks(lanes_, buf_.data(), 1);
    buf_pos_ = 0;
  }
  return buf_[buf_pos_++];
}

void Rng::normals(std::span<double> out) {
  std::size_t i = 0;
  while (i < out.size() && buf_pos_ < buf_.size()) out[i++] = buf_[buf_pos_++];
  const std::size_t blocks = (out.size() - i) / simd::kNormalsPerBlock;
  if (blocks) {
    simd::kernels().normal_blocks(lanes_, out.data() + i, blocks);
    i += blocks * simd::kNormalsPerBlock;
  }
  while (i < out.size()) out[i++] = normal();
}

}  // namespace pgflow
