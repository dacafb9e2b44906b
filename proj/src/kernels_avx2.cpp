// AVX2 + FMA variants of the vector kernels. Compiled with -mavx2 -mfma;
// only dispatched to after a runtime cpuid check.

#include "distill/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstring>

namespace distill::kernels {
namespace {

inline double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  m = _mm_max_sd(m, _mm_unpackhi_pd(m, m));
  return _mm_cvtsd_f64(m);
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  s = _mm_add_sd(s, _mm_unpackhi_pd(s, s));
  return _mm_cvtsd_f64(s);
}

double avx2_reduce_max(const double* x, std::size_t n) {
  std::size_t i = 0;
  double m = x[0];
  if (n >= 4) {
    __m256d vm = _mm256_loadu_pd(x);
    for (i = 4; i + 4 <= n; i += 4) {
      vm = _mm256_max_pd(vm, _mm256_loadu_pd(x + i));
    }
    m = hmax(vm);
  }
  for (; i < n; ++i) {
    if (x[i] > m) m = x[i];
  }
  return m;
}

double avx2_reduce_sum(const double* x, std::size_t n) {
  // Per-lane Neumaier compensation, folded scalar at the end.
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();
  const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d t = _mm256_add_pd(s, v);
    __m256d abs_s = _mm256_and_pd(s, absmask);
    __m256d abs_v = _mm256_and_pd(v, absmask);
    __m256d big_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
    __m256d big_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
    __m256d corr = _mm256_blendv_pd(big_v, big_s, _mm256_cmp_pd(abs_s, abs_v, _CMP_GE_OQ));
    c = _mm256_add_pd(c, corr);
    s = t;
  }
  alignas(32) double sl[4], cl[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(cl, c);
  double sum = 0.0, comp = 0.0;
  auto acc = [&](double v) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  };
  for (int k = 0; k < 4; ++k) acc(sl[k]);
  for (; i < n; ++i) acc(x[i]);
  return sum + comp + cl[0] + cl[1] + cl[2] + cl[3];
}

double avx2_dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void avx2_axpy(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void avx2_scale(double a, double* x, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= a;
}

void avx2_matvec(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = avx2_dot(w + r * cols, x, cols);
  }
}

void avx2_matvec_t(const double* w, std::size_t rows, std::size_t cols,
                   const double* x, double* y) {
  std::memset(y, 0, cols * sizeof(double));
  for (std::size_t r = 0; r < rows; ++r) {
    avx2_axpy(x[r], w + r * cols, y, cols);
  }
}

void avx2_ger(const double* g, std::size_t rows, const double* x,
              std::size_t cols, double* w) {
  for (std::size_t r = 0; r < rows; ++r) {
    avx2_axpy(g[r], x, w + r * cols, cols);
  }
}

const Ops kAvx2Ops = {
    "avx2",      avx2_reduce_max, avx2_reduce_sum,
    avx2_dot,    avx2_axpy,       avx2_scale,
    avx2_matvec, avx2_matvec_t,   avx2_ger,
};

}  // namespace

const Ops& avx2_ops() { return kAvx2Ops; }

}  // namespace distill::kernels

#else

namespace distill::kernels {
// Non-x86 build: never dispatched to (avx2_available() is false).
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace distill::kernels

#endif
