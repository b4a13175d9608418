#include "netgs/kernels.hpp"

#include <atomic>
#include <cmath>

namespace netgs::kern {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double nrm2sq(const double* x, std::size_t n) { return dot(x, x, n); }

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void abs_inplace(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::fabs(x[i]);
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::int32_t nrows,
              const double* x, double* y) {
  for (std::int32_t r = 0; r < nrows; ++r) {
    double s = 0.0;
    for (std::int32_t k = rowptr[r]; k < rowptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

} // namespace ref

// AVX2 variants, defined in kernels_avx2.cpp when the TU is built with -mavx2.
namespace avx2 {
bool available();
double dot(const double*, const double*, std::size_t);
double nrm2sq(const double*, std::size_t);
void axpy(double, const double*, double*, std::size_t);
void scal(double, double*, std::size_t);
void abs_inplace(double*, std::size_t);
double max_abs(const double*, std::size_t);
void csr_spmv(const std::int32_t*, const std::int32_t*, const double*, std::int32_t,
              const double*, double*);
}

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t);
  double (*nrm2sq)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scal)(double, double*, std::size_t);
  void (*abs_inplace)(double*, std::size_t);
  double (*max_abs)(const double*, std::size_t);
  void (*csr_spmv)(const std::int32_t*, const std::int32_t*, const double*, std::int32_t,
                   const double*, double*);
  const char* name;
};

constexpr Table kScalar = {ref::dot, ref::nrm2sq, ref::axpy, ref::scal,
                           ref::abs_inplace, ref::max_abs, ref::csr_spmv, "scalar"};
const Table kAvx2 = {avx2::dot, avx2::nrm2sq, avx2::axpy, avx2::scal,
                     avx2::abs_inplace, avx2::max_abs, avx2::csr_spmv, "avx2"};

const Table* detect() { return avx2::available() ? &kAvx2 : &kScalar; }

std::atomic<const Table*> g_active{nullptr};

const Table& active() {
  const Table* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = detect();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

} // namespace

double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
double nrm2sq(const double* x, std::size_t n) { return active().nrm2sq(x, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
void scal(double a, double* x, std::size_t n) { active().scal(a, x, n); }
void abs_inplace(double* x, std::size_t n) { active().abs_inplace(x, n); }
double max_abs(const double* x, std::size_t n) { return active().max_abs(x, n); }
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::int32_t nrows,
              const double* x, double* y) {
  active().csr_spmv(rowptr, col, val, nrows, x, y);
}

const char* backend() { return active().name; }

void force_scalar(bool on) {
  g_active.store(on ? &kScalar : detect(), std::memory_order_release);
}

} // namespace netgs::kern
