// AVX2 variants of the math kernels. Built only on x86-64 with -mavx2;
// selected at runtime after a cpuid check. Reduction order matches the
// scalar table exactly (see kernels.hpp), no FMA.

#include "hilonet/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace hilonet::kern {

namespace {

inline double reduce_lanes(__m256d acc) {
  // (l0 + l2) + (l1 + l3)
  const __m128d lo = _mm256_castpd256_pd128(acc);       // l0, l1
  const __m128d hi = _mm256_extractf128_pd(acc, 1);     // l2, l3
  const __m128d sum2 = _mm_add_pd(lo, hi);              // l0+l2, l1+l3
  return _mm_cvtsd_f64(sum2) + _mm_cvtsd_f64(_mm_unpackhi_pd(sum2, sum2));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
  }
  double s = reduce_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) {
    s += a[i] * b[i];
  }
  return s;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = reduce_lanes(acc);
  for (std::size_t i = n4; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d va = _mm256_set1_pd(alpha);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (std::size_t i = n4; i < n; ++i) {
    y[i] = y[i] + alpha * x[i];
  }
}

void mix_avx2(double* t, const double* o, double tau, std::size_t n) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d vkeep = _mm256_set1_pd(1.0 - tau);
  const __m256d vtau = _mm256_set1_pd(tau);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d kept = _mm256_mul_pd(vkeep, _mm256_loadu_pd(t + i));
    const __m256d mixed = _mm256_mul_pd(vtau, _mm256_loadu_pd(o + i));
    _mm256_storeu_pd(t + i, _mm256_add_pd(kept, mixed));
  }
  const double keep = 1.0 - tau;
  for (std::size_t i = n4; i < n; ++i) {
    t[i] = keep * t[i] + tau * o[i];
  }
}

void adam_avx2(double* p, const double* g, double* m, double* v, std::size_t n,
               double lr, double b1, double b2, double eps, double c1, double c2) {
  const std::size_t n4 = n & ~std::size_t{3};
  const __m256d vb1 = _mm256_set1_pd(b1);
  const __m256d vb2 = _mm256_set1_pd(b2);
  const __m256d vk1 = _mm256_set1_pd(1.0 - b1);
  const __m256d vk2 = _mm256_set1_pd(1.0 - b2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  for (std::size_t i = 0; i < n4; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    const __m256d vm =
        _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(vk1, vg));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(vk2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vv, vc2)), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, _mm256_mul_pd(vm, vc1)), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  const double k1 = 1.0 - b1;
  const double k2 = 1.0 - b2;
  for (std::size_t i = n4; i < n; ++i) {
    m[i] = b1 * m[i] + k1 * g[i];
    v[i] = b2 * v[i] + k2 * (g[i] * g[i]);
    p[i] = p[i] - lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

const KernelTable kAvx2 = {
    "avx2", dot_avx2, sq_dist_avx2, axpy_avx2, mix_avx2, adam_avx2,
};

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable* table =
      __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
  return table;
}

}  // namespace hilonet::kern
