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


// AVX2 variants. Each mirrors the scalar operation sequence in
// gaussian_math.hpp / kernels_scalar.cpp lane by lane; no FMA is used.

#include "pgflow/simd/kernels.hpp"
#include "simd/gaussian_math.hpp"

#include <immintrin.h>

namespace pgflow::simd {
namespace {

namespace d = detail;

inline __m256i rotl45(__m256i x) {
  return _mm256_or_si256(_mm256_slli_epi64(x, 45), _mm256_srli_epi64(x, 19));
}

struct LaneState {
  __m256i s0, s1, s2, s3;

  __m256i next() {
    const __m256i result = _mm256_add_epi64(s0, s3);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl45(s3);
    return result;
  }
};

inline __m256d plus_one(__m256i bits) {
  const __m256i one = _mm256_set1_epi64x(static_cast<long long>(d::kOneBits));
  return _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 12), one));
}

inline __m256d log_unit(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i two52 = _mm256_set1_epi64x(static_cast<long long>(d::kTwo52Bits));
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 52), two52)),
      _mm256_set1_pd(d::kTwo52));
  e = _mm256_sub_pd(e, _mm256_set1_pd(d::kExponentBias));
  const __m256i mant = _mm256_and_si256(
      bits, _mm256_set1_epi64x(static_cast<long long>(d::kMantissaMask)));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      mant, _mm256_set1_epi64x(static_cast<long long>(d::kOneBits))));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(d::kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(d::kLogSeries[0]);
  for (int i = 1; i < 11; ++i)
    p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(d::kLogSeries[i]));
  const __m256d log_m = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), s), p);
  return _mm256_add_pd(
      _mm256_mul_pd(e, _mm256_set1_pd(d::kLn2Hi)),
      _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(d::kLn2Lo)), log_m));
}

inline void sincos_turn(__m256d u, __m256d& c, __m256d& s) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(_mm256_set1_pd(4.0), u),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d r = _mm256_sub_pd(u, _mm256_mul_pd(_mm256_set1_pd(0.25), q));
  const __m256d a = _mm256_mul_pd(r, _mm256_set1_pd(d::kTwoPi));
  const __m256d a2 = _mm256_mul_pd(a, a);
  __m256d ps = _mm256_set1_pd(d::kSinSeries[0]);
  for (int i = 1; i < 8; ++i)
    ps = _mm256_add_pd(_mm256_mul_pd(ps, a2), _mm256_set1_pd(d::kSinSeries[i]));
  __m256d pc = _mm256_set1_pd(d::kCosSeries[0]);
  for (int i = 1; i < 9; ++i)
    pc = _mm256_add_pd(_mm256_mul_pd(pc, a2), _mm256_set1_pd(d::kCosSeries[i]));
  const __m256d sa = _mm256_add_pd(a, _mm256_mul_pd(a, _mm256_mul_pd(a2, ps)));
  const __m256d ca = _mm256_add_pd(_mm256_set1_pd(1.0), _mm256_mul_pd(a2, pc));

  const __m256d is1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is1, is3);
  __m256d cc = _mm256_blendv_pd(ca, sa, swap);
  __m256d ss = _mm256_blendv_pd(sa, ca, swap);
  const __m256d sign = _mm256_set1_pd(-0.0);
  cc = _mm256_xor_pd(cc, _mm256_and_pd(sign, _mm256_or_pd(is1, is2)));
  ss = _mm256_xor_pd(ss, _mm256_and_pd(sign, _mm256_or_pd(is2, is3)));
  c = cc;
  s = ss;
}

void normal_blocks_avx2(GaussianLanes& lanes, double* out, std::size_t blocks) {
  LaneState st{_mm256_load_si256(reinterpret_cast<const __m256i*>(lanes.s[0])),
               _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes.s[1])),
               _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes.s[2])),
               _mm256_load_si256(reinterpret_cast<const __m256i*>(lanes.s[3]))};
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);
  for (std::size_t blk = 0; blk < blocks; ++blk) {
    const __m256d u1 = _mm256_sub_pd(two, plus_one(st.next()));
    const __m256d u2 = _mm256_sub_pd(plus_one(st.next()), one);
    const __m256d r =
        _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log_unit(u1)));
    __m256d c, s;
    sincos_turn(u2, c, s);
    double* o = out + blk * kNormalsPerBlock;
    _mm256_storeu_pd(o, _mm256_mul_pd(r, c));
    _mm256_storeu_pd(o + kLanes, _mm256_mul_pd(r, s));
  }
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.s[0]), st.s0);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.s[1]), st.s1);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.s[2]), st.s2);
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes.s[3]), st.s3);
}

void relax_step_avx2(double* x, const double* center, const double* rate,
                     double drift_scale, const double* amp, double noise_scale,
                     const double* z, std::size_t n) {
  const __m256d ds = _mm256_set1_pd(drift_scale);
  const __m256d ns = _mm256_set1_pd(noise_scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d g = _mm256_mul_pd(_mm256_loadu_pd(rate + i),
                                    _mm256_sub_pd(xv, _mm256_loadu_pd(center + i)));
    __m256d xi = _mm256_sub_pd(xv, _mm256_mul_pd(ds, g));
    xi = _mm256_add_pd(
        xi, _mm256_mul_pd(ns, _mm256_mul_pd(_mm256_loadu_pd(amp + i),
                                            _mm256_loadu_pd(z + i))));
    _mm256_storeu_pd(x + i, xi);
  }
  for (; i < n; ++i) {
    const double g = rate[i] * (x[i] - center[i]);
    double xi = x[i] - drift_scale * g;
    xi = xi + noise_scale * (amp[i] * z[i]);
    x[i] = xi;
  }
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                                          _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void gemv_acc_avx2(const double* a, const double* z, double scale, double* y,
                   std::size_t n) {
  const __m256d sc = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n; ++j)
      acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + j * n + i),
                                             _mm256_set1_pd(z[j])));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(sc, acc)));
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc = acc + a[j * n + i] * z[j];
    y[i] = y[i] + scale * acc;
  }
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  double r = hsum(acc);
  for (; i < n; ++i) r += x[i] * y[i];
  return r;
}

void quadratic_observables_avx2(const double* x, const double* center,
                                const double* rate, std::size_t n, double* out3) {
  __m256d f = _mm256_setzero_pd(), g = _mm256_setzero_pd(), e2 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(center + i));
    const __m256d re = _mm256_mul_pd(_mm256_loadu_pd(rate + i), e);
    f = _mm256_add_pd(f, _mm256_mul_pd(re, e));
    g = _mm256_add_pd(g, _mm256_mul_pd(re, re));
    e2 = _mm256_add_pd(e2, _mm256_mul_pd(e, e));
  }
  double fs = hsum(f), gs = hsum(g), es = hsum(e2);
  for (; i < n; ++i) {
    const double e = x[i] - center[i];
    const double re = rate[i] * e;
    fs += re * e;
    gs += re * re;
    es += e * e;
  }
  out3[0] = 0.5 * fs;
  out3[1] = gs;
  out3[2] = es;
}

}  // namespace

const KernelSet& avx2_kernel_table() {
  static const KernelSet k{"avx2",    normal_blocks_avx2, relax_step_avx2,
                           axpy_avx2, gemv_acc_avx2,      dot_avx2,
                           quadratic_observables_avx2};
  return k;
}

}  // namespace pgflow::simd
