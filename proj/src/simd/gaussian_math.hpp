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

#ifndef PGFLOW_SRC_SIMD_GAUSSIAN_MATH_HPP
#define PGFLOW_SRC_SIMD_GAUSSIAN_MATH_HPP

// Box-Muller building blocks shared by the scalar and vector kernels. The
// vector code must mirror these operation sequences exactly.

#include <bit>
#include <cmath>
#include <cstdint>

namespace pgflow::simd::detail {

inline constexpr std::uint64_t kOneBits = 0x3FF0000000000000ULL;
inline constexpr std::uint64_t kMantissaMask = 0x000FFFFFFFFFFFFFULL;
inline constexpr std::uint64_t kTwo52Bits = 0x4330000000000000ULL;
inline constexpr double kTwo52 = 4503599627370496.0;
inline constexpr double kExponentBias = 1023.0;
inline constexpr double kSqrt2 = 1.4142135623730950488;
inline constexpr double kLn2Hi = 0x1.62e42fee00000p-1;
inline constexpr double kLn2Lo = 0x1.a39ef35793c76p-33;
inline constexpr double kTwoPi = 6.283185307179586476925;

// atanh series 1 + z/3 + z^2/5 + ... + z^10/21, highest first.
inline constexpr double kLogSeries[11] = {
    1.0 / 21.0, 1.0 / 19.0, 1.0 / 17.0, 1.0 / 15.0, 1.0 / 13.0, 1.0 / 11.0,
    1.0 / 9.0,  1.0 / 7.0,  1.0 / 5.0,  1.0 / 3.0,  1.0};

// sin(a) = a + a * a2 * P(a2), P coefficients highest first.
inline constexpr double kSinSeries[8] = {
    1.0 / 355687428096000.0,  -1.0 / 1307674368000.0, 1.0 / 6227020800.0,
    -1.0 / 39916800.0,        1.0 / 362880.0,         -1.0 / 5040.0,
    1.0 / 120.0,              -1.0 / 6.0};

// cos(a) = 1 + a2 * Q(a2), Q coefficients highest first.
inline constexpr double kCosSeries[9] = {
    -1.0 / 6402373705728000.0, 1.0 / 20922789888000.0, -1.0 / 87178291200.0,
    1.0 / 479001600.0,         -1.0 / 3628800.0,       1.0 / 40320.0,
    -1.0 / 720.0,              1.0 / 24.0,             -1.0 / 2.0};

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

/// xoshiro256+ step on lane `l` of word-major state `s`.
inline std::uint64_t xoshiro_next(std::uint64_t (&s)[4][4], int l) {
  const std::uint64_t result = s[0][l] + s[3][l];
  const std::uint64_t t = s[1][l] << 17;
  s[2][l] ^= s[0][l];
  s[3][l] ^= s[1][l];
  s[1][l] ^= s[2][l];
  s[0][l] ^= s[3][l];
  s[2][l] ^= t;
  s[3][l] = rotl(s[3][l], 45);
  return result;
}

/// Bits -> double in [1, 2).
inline double unit_interval_plus_one(std::uint64_t bits) {
  return std::bit_cast<double>((bits >> 12) | kOneBits);
}

/// Natural log for x in [2^-52, 1].
inline double log_unit(double x) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  double e = std::bit_cast<double>((bits >> 52) | kTwo52Bits) - kTwo52;
  e = e - kExponentBias;
  double m = std::bit_cast<double>((bits & kMantissaMask) | kOneBits);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double s = (m - 1.0) / (m + 1.0);
  const double z = s * s;
  double p = kLogSeries[0];
  for (int i = 1; i < 11; ++i) p = p * z + kLogSeries[i];
  const double log_m = (2.0 * s) * p;
  return e * kLn2Hi + (e * kLn2Lo + log_m);
}

/// cos and sin of 2*pi*u for u in [0, 1).
inline void sincos_turn(double u, double& c, double& s) {
  const double q = std::nearbyint(4.0 * u);
  const double r = u - 0.25 * q;
  const double a = r * kTwoPi;
  const double a2 = a * a;
  double ps = kSinSeries[0];
  for (int i = 1; i < 8; ++i) ps = ps * a2 + kSinSeries[i];
  double pc = kCosSeries[0];
  for (int i = 1; i < 9; ++i) pc = pc * a2 + kCosSeries[i];
  const double sa = a + a * (a2 * ps);
  const double ca = 1.0 + a2 * pc;
  const bool swap = (q == 1.0) || (q == 3.0);
  double cc = swap ? sa : ca;
  double ss = swap ? ca : sa;
  if (q == 1.0 || q == 2.0) cc = -cc;
  if (q == 2.0 || q == 3.0) ss = -ss;
  c = cc;
  s = ss;
}

}  // namespace pgflow::simd::detail

#endif  // PGFLOW_SRC_SIMD_GAUSSIAN_MATH_HPP
