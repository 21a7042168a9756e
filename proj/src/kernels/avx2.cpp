#include <immintrin.h>

#include <cmath>
#include <limits>

#include "bayesic/kernels.hpp"
#include "exp_limits.hpp"

namespace bayesic::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  double m = lanes[0];
  for (int i = 1; i < 4; ++i) {
    if (lanes[i] > m) m = lanes[i];
  }
  return m;
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// 2^n for integral-valued n in [-1022, 1023].
inline __m256d pow2i(__m256d n) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 2^52 + 2^51
  const __m256i bits = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(n, magic)),
                                        _mm256_castpd_si256(magic));
  const __m256i biased = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(biased, 52));
}

// exp(d) by Cody-Waite reduction d = k ln2 + r, |r| <= ln2/2, and a
// degree-12 Taylor polynomial for exp(r).
inline __m256d exp_pd(__m256d d) {
  const __m256d lo_bound = _mm256_set1_pd(detail::kExpFlushBelow);
  const __m256d hi_bound = _mm256_set1_pd(detail::kExpOverflowAbove);
  const __m256d flush = _mm256_cmp_pd(d, lo_bound, _CMP_LT_OQ);
  const __m256d overflow = _mm256_cmp_pd(d, hi_bound, _CMP_GT_OQ);
  const __m256d is_nan = _mm256_cmp_pd(d, d, _CMP_UNORD_Q);

  const __m256d x = _mm256_max_pd(_mm256_min_pd(d, hi_bound), lo_bound);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93145751953125e-1), x);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.42860682030941723212e-6), r);

  __m256d p = _mm256_set1_pd(1.0 / 479001600.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Split the scale so k = 1024 near the overflow bound stays representable.
  const __m256d k1 = _mm256_floor_pd(_mm256_mul_pd(k, _mm256_set1_pd(0.5)));
  const __m256d k2 = _mm256_sub_pd(k, k1);
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(k1)), pow2i(k2));

  result = _mm256_andnot_pd(flush, result);
  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                            overflow);
  return _mm256_blendv_pd(result, d, is_nan);
}

}  // namespace

double sum(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(p + i + 4));
  }
  for (; i + 4 <= n; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(p + i));
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += p[i];
  return acc;
}

double sum_sq(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d v0 = _mm256_loadu_pd(p + i);
    const __m256d v1 = _mm256_loadu_pd(p + i + 4);
    a0 = _mm256_fmadd_pd(v0, v0, a0);
    a1 = _mm256_fmadd_pd(v1, v1, a1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(p + i);
    a0 = _mm256_fmadd_pd(v, v, a0);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += p[i] * p[i];
  return acc;
}

double sum_abs_dev(std::span<const double> x, double center) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const __m256d c = _mm256_set1_pd(center);
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(p + i), c)));
    a1 = _mm256_add_pd(a1, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(p + i + 4), c)));
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_add_pd(a0, abs_pd(_mm256_sub_pd(_mm256_loadu_pd(p + i), c)));
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += std::fabs(p[i] - center);
  return acc;
}

double max_value(std::span<const double> x) {
  const double* p = x.data();
  const std::size_t n = x.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();
  __m256d m = _mm256_set1_pd(neg_inf);
  std::size_t i = 0;
  // max_pd returns its second operand when the first is NaN, so NaNs drop out.
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(_mm256_loadu_pd(p + i), m);
  double acc = hmax(m);
  for (; i < n; ++i) {
    if (p[i] > acc) acc = p[i];
  }
  return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() < b.size() ? a.size() : b.size();
  const double* pa = a.data();
  const double* pb = b.data();
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i + 4), _mm256_loadu_pd(pb + i + 4), a1);
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), a0);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += pa[i] * pb[i];
  return acc;
}

double exp_shifted(std::span<const double> x, double shift, std::span<double> out) {
  const std::size_t n = x.size();
  const __m256d s = _mm256_set1_pd(shift);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x.data() + i), s));
    _mm256_storeu_pd(out.data() + i, e);
    acc = _mm256_add_pd(acc, e);
  }
  if (i < n) {
    // Pad the tail so every element goes through the same vector path.
    alignas(32) double in[4] = {0.0, 0.0, 0.0, 0.0};
    alignas(32) double res[4];
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 4; ++j) in[j] = i + j < n ? x[i + j] - shift : neg_inf;
    const __m256d e = exp_pd(_mm256_load_pd(in));
    _mm256_store_pd(res, e);
    acc = _mm256_add_pd(acc, e);
    for (std::size_t j = 0; i + j < n; ++j) out[i + j] = res[j];
  }
  return hsum(acc);
}

void scale(std::span<double> x, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  const std::size_t n = x.size();
  double* p = x.data();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(p + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), f));
  for (; i < n; ++i) p[i] *= factor;
}

}  // namespace bayesic::kernels::avx2
