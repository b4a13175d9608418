#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "netgs/assembly.hpp"
#include "netgs/graph.hpp"

namespace netgs {

// One member of an explicit test-function family. The closed-form totals are
// values on the infinite graph (or exact finite-graph values for compactly
// supported members); window truncation is reported through tail_mass and
// tail_kinetic rather than folded into the totals. Fields flagged as bounds
// keep the energy an upper bound: an underestimated defect sum or an
// overestimated kinetic term can only make the reported energy larger than
// the true one.
struct FamilyEval {
  std::string family;
  double param = 0;     // eps, M, or n, depending on the family
  double q = 0;

  double mass = 0;      // |u|_2^2; midpoint of [mass_lo, mass_hi] when inexact
  double kinetic = 0;   // |u'|_2^2 without the 1/2
  double vsum = 0;      // sum over defects of w_v |u(v)|^q
  double energy = 0;    // kinetic/2 - vsum/q

  bool mass_exact = true;         // else [mass_lo, mass_hi] brackets the mass
  double mass_lo = 0, mass_hi = 0;
  bool kinetic_is_upper = false;  // kinetic is an upper bound, not exact
  bool vsum_is_lower = false;     // vsum is a lower bound (from a partial sum)

  double center_value = 0;        // u at the vertex the construction centers on

  // What the infinite-graph integrals carry outside the window the
  // interpolant lives on. Exact remainders where the geometry allows,
  // otherwise upper bounds; zero for compactly supported members.
  double tail_mass = 0;
  double tail_kinetic = 0;

  // Rayleigh-type diagnostic for the eigenvalue families: an upper bound on
  // the quadratic-form quotient (kinetic - alpha |u(v)|^2) / mass.
  bool has_rayleigh = false;
  double rayleigh_bound = 0;

  std::vector<double> u;          // dof-space interpolant; empty without forms
};

// Exponential profile on a star of n_halflines half-lines glued at one
// vertex, constant on a compact core of total length core_len, with
// n_defects point defects all sitting where u = eps^2. Closed forms:
// mass = (n/2 + core_len eps^q) eps^{4-q}, energy = (n/4) eps^{q+4}
// - (n_defects/q) eps^{2q}. When forms over a star window are supplied the
// interpolant samples u = eps^2 e^{-eps^q x} along each arm.
FamilyEval star_exp_family(double eps, double q, int n_halflines,
                           double core_len, int n_defects,
                           const Forms* f = nullptr);

// Tent of height big_m * ell at a defect of degree n_incident: u = big_m
// (ell - x) on each incident edge, zero elsewhere. Exact and representable
// in the nodal space whenever ell equals the incident edge length, so
// quadrature must reproduce these numbers to rounding. center picks the
// defect vertex when forms are supplied (-1 = first defect).
FamilyEval tent_family(double big_m, double ell, int n_incident, double q,
                       const Forms* f = nullptr, std::int32_t center = -1);

// Decaying profile on a pasted periodic window: exponential in the axis
// coordinate on the l-initial segments of the edges leaving D, constant on
// the rest of each cell. Requires forms built over a window that carries the
// cell metadata. mass = m eps^{4-q} + ktilde_len coth(l eps^q) eps^4 and
// kinetic = m eps^{q+4} are exact on the infinite graph; the defect carries
// u = eps^2.
FamilyEval zper_exp_family(double eps, double q, const Forms& f);

// Restriction of k e^{-eps(|x|+|y|)} to the grid, scaled so the full-grid
// mass is exactly mu (and the kinetic term exactly mu eps^2). The defect sum
// is exact for explicit defect lists and a closed-form geometric lower bound
// for row- and lattice-periodic defect sets, so the energy stays an upper
// bound for the infinite-graph energy in every case.
FamilyEval grid_exp_family(double eps, double mu, double q, const Forms& f,
                           const DefectSpec& spec);

// Logarithmic cap n^{-2} f_n(d(x, center)) on the grid, where f_n = log n on
// [0,1], log n - log x on [1,n], 0 beyond. Mass is bracketed two-sided,
// kinetic is bounded above by 12 n^{-4} log n, the center value n^{-2} log n
// is exact. Supported inside the ball of radius n, so no window tail.
FamilyEval grid_log_family(int n, double q, const Forms& f,
                           std::int32_t center);

// Unscaled cap f_n(d(x, center)) used for the point-perturbed eigenvalue
// bound: reports (12 log n - alpha log^2 n) / mass as rayleigh_bound, a
// valid upper bound on the bottom of the quadratic-form quotient.
FamilyEval appendix_loglinear(int n, double alpha, const Forms& f,
                              std::int32_t center);

// Plateau member: 1 on a block of the graph, linear ramp to 0 across one
// layer. On the grid the block is an (n+1) x (n+1) square of vertices with
// kinetic = 4(n+1) and mass = 2n(n+1) + 4(n+1)/3, both exact; on a pasted
// periodic window the block is the copies |i| <= n and the kinetic term is a
// cell constant independent of n. Edge-linear, so quadrature is exact.
FamilyEval appendix_plateau(int n, const Forms& f);

// Mass-matched rescaling: evaluates the energy of t*u at the target mass,
// E(t u) with t = sqrt(mu_target / mass), using only the closed-form fields.
// Keeps upper-bound semantics when the mass is bracketed: the kinetic term
// is scaled by mu/mass_lo and the defect term by (mu/mass_hi)^{q/2}.
double rescaled_energy(const FamilyEval& fe, double mu_target);

} // namespace netgs
