#pragma once
#include <cstdint>
#include <vector>

#include "netgs/assembly.hpp"

namespace netgs {

// Ring-by-ring view of a grid function around a center vertex. Annulus n
// collects the 4(2n+1) edges between lattice distance n and n+1; every edge
// is sampled on a shared parameter grid with parameter 0 at its endpoint
// closer to the center, so matched parameters sit at equal distance.
struct RadialProfile {
  std::int32_t center = -1;
  std::int32_t ncells = 0;  // cells per edge, shared across all annuli
  struct Annulus {
    std::int32_t n = 0;
    std::int32_t edges = 0;          // 4(2n+1)
    std::vector<double> mean;        // ncells+1 samples
    std::vector<double> variance;    // population variance across edges
  };
  std::vector<Annulus> annuli;
};

// Samples u over every annulus that fits strictly inside the window. The
// support must be confined to those annuli; a radial function profiles with
// zero variance everywhere.
RadialProfile radial_profile(const Forms& f, const std::vector<double>& u,
                             std::int32_t center);

// Spherical-mean rearrangement: interior points of annulus n receive the
// plain mean of the 4(2n+1) edge values at the matched parameter, and ring
// vertices receive the unweighted mean over the 4m sphere vertices (the two
// one-sided edge means disagree at a vertex for non-radial input, so the
// vertex rule is what makes the result a continuous field; the center value
// is kept). Requires u >= 0. Mass and kinetic energy never increase.
std::vector<double> spherical_mean(const Forms& f, const std::vector<double>& u,
                                   std::int32_t center);

struct MonotoneCheck {
  bool monotone = true;
  std::int32_t annulus = -1;  // first offending annulus
  std::int32_t index = -1;    // sample index where the rise happens
  double rise = 0;            // size of the first increase beyond tol
};

// True when the profile means are nonincreasing in the radial parameter,
// stepping through annuli in order and across their shared ring samples.
MonotoneCheck monotone_check(const RadialProfile& p, double tol);

// Flattened radial samples on [0, #annuli] at spacing 1/ncells; consecutive
// annuli share their ring sample, which is kept once.
std::vector<double> profile_samples(const RadialProfile& p);

// Mass recomputed from the profile alone: sum over annuli of 4(2n+1) times
// the P1 integral of the squared means. Equals the quadrature mass exactly
// when the input was radial.
double profile_mass(const RadialProfile& p);

// Dirichlet integral of the profile means: sum over annuli of 4(2n+1) times
// the P1 kinetic integral of the mean samples. Equals the quadrature kinetic
// energy of the field exactly when the input was radial, which is how the
// rearranged output reports its kinetic term.
double profile_kinetic(const RadialProfile& p);

} // namespace netgs
