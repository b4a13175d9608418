#pragma once
#include <vector>

#include "netgs/assembly.hpp"

namespace netgs {

struct EigenResult {
  double lambda = 0;
  std::vector<double> w;     // M-normalized eigenvector
  double residual = 0;       // |Aw - lambda Mw| with |w| = 1 in M
  int iterations = 0;
};

// Smallest generalized eigenvalue of (K, M) by shift-inverted power
// iteration with a deterministic all-ones start.
EigenResult bottom_eigen(const Forms& f, double tol = 1e-10);

// Smallest eigenvalue of the rank-one-perturbed pencil (K - alpha e_v e_v', M),
// the linear point-defect baseline. v is a graph vertex id.
EigenResult delta_eigen(const Forms& f, double alpha, std::int32_t v, double tol = 1e-10);

} // namespace netgs
