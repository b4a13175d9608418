#include "netgs/kernels.hpp"

#include <cmath>

#ifdef NETGS_BUILD_AVX2
#include <immintrin.h>
#endif

// AVX2 kernel variants. This TU is the only one compiled with -mavx2/-mfma;
// callers reach these through the dispatch table after a cpuid check, so the
// vector paths never execute on hardware without AVX2.

namespace netgs::kern::avx2 {

#ifdef NETGS_BUILD_AVX2

bool available() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
} // namespace

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double nrm2sq(const double* x, std::size_t n) { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= a;
}

void abs_inplace(double* x, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = std::fabs(x[i]);
}

double max_abs(const double* x, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d vm = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    vm = _mm256_max_pd(vm, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  __m128d lo = _mm_max_pd(_mm256_castpd256_pd128(vm), _mm256_extractf128_pd(vm, 1));
  double m = _mm_cvtsd_f64(_mm_max_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::int32_t nrows,
              const double* x, double* y) {
  for (std::int32_t r = 0; r < nrows; ++r) {
    const std::int32_t b = rowptr[r], e = rowptr[r + 1];
    __m256d acc = _mm256_setzero_pd();
    std::int32_t k = b;
    for (; k + 4 <= e; k += 4) {
      __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
      __m256d xv = _mm256_i32gather_pd(x, idx, 8);
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < e; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

#else // !NETGS_BUILD_AVX2: no vector ISA on this target; dispatch never selects these.

bool available() { return false; }
double dot(const double* x, const double* y, std::size_t n) { return ref::dot(x, y, n); }
double nrm2sq(const double* x, std::size_t n) { return ref::nrm2sq(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { ref::axpy(a, x, y, n); }
void scal(double a, double* x, std::size_t n) { ref::scal(a, x, n); }
void abs_inplace(double* x, std::size_t n) { ref::abs_inplace(x, n); }
double max_abs(const double* x, std::size_t n) { return ref::max_abs(x, n); }
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col, const double* val,
              std::int32_t nrows, const double* x, double* y) {
  ref::csr_spmv(rowptr, col, val, nrows, x, y);
}

#endif

} // namespace netgs::kern::avx2
