#pragma once
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "netgs/kernels.hpp"

namespace netgs {

// Symmetric sparse matrix in CSR form with int32 indices. Assembled from
// (row, col, value) triplets; duplicate entries are summed.
struct Csr {
  std::int32_t n = 0;
  std::vector<std::int32_t> rowptr;  // size n+1
  std::vector<std::int32_t> col;
  std::vector<double> val;

  void spmv(const double* x, double* y) const {
    kern::csr_spmv(rowptr.data(), col.data(), val.data(), n, x, y);
  }
  void spmv(const std::vector<double>& x, std::vector<double>& y) const {
    if ((std::int32_t)x.size() != n) throw std::runtime_error("csr: spmv size mismatch");
    y.resize(n);
    spmv(x.data(), y.data());
  }
  // x'Ay without forming Ay when y==x workspace is undesirable
  double quad(const std::vector<double>& x, std::vector<double>& work) const {
    spmv(x, work);
    return kern::dot(x.data(), work.data(), x.size());
  }
  double at(std::int32_t r, std::int32_t c) const {
    for (std::int32_t k = rowptr[r]; k < rowptr[r + 1]; ++k)
      if (col[k] == c) return val[k];
    return 0.0;
  }
};

Csr csr_from_triplets(std::int32_t n,
                      std::vector<std::int32_t> rows,
                      std::vector<std::int32_t> cols,
                      std::vector<double> vals);

} // namespace netgs
