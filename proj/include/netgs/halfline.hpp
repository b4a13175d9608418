#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "netgs/assembly.hpp"
#include "netgs/energy.hpp"

namespace netgs {

// Comparison weight for the reduced half-line problem: 4 on [0,1], then
// 4(2x-1), continuous at the breakpoint. Dominated by the grid annulus
// counts: g(x) <= 4(2n+1) on [n, n+1].
double weight_g(double x);

// Weighted P1 forms on [0, L] with a Dirichlet cut at L. The interval is a
// two-edge graph so the weight breakpoint at x = 1 is always a node; the
// origin carries the point defect of strength alpha.
struct WeightedForms {
  Forms forms;
  double length = 0;
  double h = 0;
  double alpha = 0;
  std::int32_t origin_dof = -1;
};

WeightedForms assemble_weighted_halfline(double length, double h, double alpha);

struct ReducedElResidual {
  double form = 0;  // max row residual of the weighted equation, pointwise
  double flux = 0;  // |4 v'(0+) + alpha |v(0)|^{q-2} v(0)|, one-sided O(h)
};

// Residual of the reduced optimality system at multiplier lambda in the
// decaying-state convention (positive for bound states); the discrete pencil
// carries the opposite sign, so the form residual is K v - b(v) + lambda M v.
ReducedElResidual reduced_el_residual(const WeightedForms& wf,
                                      const std::vector<double>& v,
                                      double lambda, double q);

// Identity residual |L - R| / max(|L|, |R|) for
//   L = alpha^2/16 |v(0)|^{2q-2},
//   R = lambda v(0)^2 + lambda mu - 4 lambda int_0^1 v^2 dx
// (the inner integral is unweighted). Only derivable for lambda > 0; throws
// otherwise.
double pohozaev_residual(const WeightedForms& wf, const std::vector<double>& v,
                         double lambda, double q, double mu);

// Best member of the two-parameter trial family v = A e^{-beta x}, with A
// fixed by the mass constraint; both weighted norms close in closed form:
// |v|_g^2 = 4 A^2 (1/a + 2 e^{-a}/a^2) with a = 2 beta, and the kinetic
// term is beta^2 times that. Serves as an independent check on the solver
// and as its initializer.
struct ExpScan {
  double amp = 0;     // A at the mass constraint
  double beta = 0;
  double energy = 0;  // reduced energy of the best member
};
ExpScan reduced_exp_scan(double q, double alpha, double mu, int nbeta = 240,
                         double beta_lo = 1e-3, double beta_hi = 64.0);

struct ReducedResult {
  std::vector<double> v;
  double energy = 0;
  double mass = 0;
  double lambda = 0;        // decaying-state convention; positive when E < 0
  double origin_value = 0;
  double form_residual = 0;
  double flux_residual = 0;
  double identity_residual = 0;  // NaN when lambda <= 0
  std::string certificate;       // "negative" or "nonnegative-consistent"
  bool converged = false;
  GroundStateResult raw;
};

// Minimizes the reduced energy over the equality sphere |v|_g^2 = mu. The
// inequality-constrained set only ever produces smaller energies at full
// mass, so negative minima found here are genuine; when nothing negative
// turns up we report consistency with a zero infimum, never positivity.
ReducedResult reduced_minimize(double q, double alpha, double mu,
                               double length = 50.0, double h = 0.01,
                               double delta_disc = 1e-8,
                               const SolverOptions& opts = {});

// Comparison record between a radial grid profile (uniform samples of the
// ring means, spacing dx from the center) and its reading as a half-line
// function in the weighted space. The weighted norms must be dominated by
// the grid norms, and the origin value must match the center value.
struct RadialCompare {
  double halfline_mass = 0, grid_mass = 0;
  double halfline_kinetic = 0, grid_kinetic = 0;
  double origin = 0, center = 0;
  double reduced_energy = 0;  // kinetic/2 - (d/q) |v(0)|^q
  bool mass_ok = false, kinetic_ok = false, center_ok = false;
};

RadialCompare radial_compare(const std::vector<double>& samples, double dx,
                             double q, double n_defects, double grid_mass,
                             double grid_kinetic, double center_value,
                             double tol = 1e-9);

} // namespace netgs
