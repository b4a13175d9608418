#pragma once
#include <cstddef>
#include <cstdint>

// Runtime-dispatched double-precision kernels. Every kernel has a scalar
// reference implementation and (on x86-64 with AVX2) a vectorized variant;
// the active backend is chosen once from cpuid and can be pinned to scalar
// for equivalence testing.

namespace netgs::kern {

double dot(const double* x, const double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);     // y += a*x
void scal(double a, double* x, std::size_t n);                      // x *= a
void abs_inplace(double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
// y = A*x for CSR A with int32 indices; rowptr has nrows+1 entries.
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::int32_t nrows,
              const double* x, double* y);

const char* backend();          // "avx2" or "scalar"
void force_scalar(bool on);     // test hook; resets to cpuid choice when off

// scalar reference implementations, always available (used by equivalence tests)
namespace ref {
double dot(const double* x, const double* y, std::size_t n);
double nrm2sq(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scal(double a, double* x, std::size_t n);
void abs_inplace(double* x, std::size_t n);
double max_abs(const double* x, std::size_t n);
void csr_spmv(const std::int32_t* rowptr, const std::int32_t* col,
              const double* val, std::int32_t nrows,
              const double* x, double* y);
}

} // namespace netgs::kern
