#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "netgs/graph.hpp"
#include "netgs/mesh.hpp"
#include "netgs/rearrange.hpp"

namespace {

struct GridSetup {
  netgs::MetricGraph g;
  netgs::Forms f;
  std::int32_t center = -1;
};

GridSetup grid_setup(std::int32_t radius, double h) {
  GridSetup s;
  s.g = netgs::gen_grid_window(radius);
  s.center = netgs::grid_vertex_at(s.g, 0, 0);
  s.g.defects = {s.center};
  auto mesh = std::make_shared<netgs::MeshedGraph>(netgs::build_mesh(s.g, h));
  s.f = netgs::assemble(mesh);
  return s;
}

double l1(const netgs::EdgePoint& p) { return std::abs(p.x) + std::abs(p.y); }

} // namespace

TEST_SUITE("rearrange") {

TEST_CASE("radial input profiles with zero variance") {
  GridSetup s = grid_setup(5, 0.5);
  std::vector<double> u = netgs::interpolate(s.f, [](const netgs::EdgePoint& p) {
    return std::max(0.0, 3.0 - l1(p));
  });

  netgs::RadialProfile p = netgs::radial_profile(s.f, u, s.center);
  CHECK(p.center == s.center);
  CHECK(p.ncells == 2);
  REQUIRE(p.annuli.size() >= 3);
  for (std::size_t n = 0; n < p.annuli.size(); ++n) {
    CHECK(p.annuli[n].n == (std::int32_t)n);
    CHECK(p.annuli[n].edges == 4 * (2 * (std::int32_t)n + 1));
    for (double v : p.annuli[n].variance) CHECK(v <= 1e-24);
  }
  // cone in the lattice distance: means walk down in steps of h
  REQUIRE(p.annuli[0].mean.size() == 3);
  CHECK(p.annuli[0].mean[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(p.annuli[0].mean[1] == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(p.annuli[2].mean[2] == doctest::Approx(0.0).epsilon(1e-14));

  // profile integrals reproduce the quadrature values for radial input
  netgs::Functionals fn = netgs::functionals(s.f, u);
  CHECK(netgs::profile_mass(p) == doctest::Approx(fn.mass).epsilon(1e-13));
  CHECK(netgs::profile_kinetic(p) == doctest::Approx(fn.kinetic).epsilon(1e-13));

  netgs::MonotoneCheck mc = netgs::monotone_check(p, 0.0);
  CHECK(mc.monotone);

  // flattened samples: shared ring values kept once
  std::vector<double> flat = netgs::profile_samples(p);
  CHECK(flat.size() == p.annuli.size() * 2 + 1);
  CHECK(flat[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(flat[1] == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(flat[2] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("spherical mean flattens asymmetry without raising energy") {
  GridSetup s = grid_setup(5, 0.5);
  // lopsided cone: heavier on the x > 0 half, still nonnegative
  std::vector<double> u = netgs::interpolate(s.f, [](const netgs::EdgePoint& p) {
    const double base = std::max(0.0, 3.0 - l1(p));
    return base * (p.x > 0 ? 1.3 : 1.0);
  });

  std::vector<double> v = netgs::spherical_mean(s.f, u, s.center);
  netgs::Functionals fu = netgs::functionals(s.f, u);
  netgs::Functionals fv = netgs::functionals(s.f, v);
  CHECK(fv.mass <= fu.mass + 1e-12);
  CHECK(fv.kinetic <= fu.kinetic + 1e-12);

  // center value kept, result radial and idempotent
  const std::int32_t cdof = s.f.dof_of_node[(std::size_t)s.center];
  REQUIRE(cdof >= 0);
  CHECK(v[(std::size_t)cdof] == doctest::Approx(u[(std::size_t)cdof]).epsilon(1e-15));

  // averaging mixes values of order one, so the ring variances land at the
  // square of roundoff rather than at zero
  netgs::RadialProfile pv = netgs::radial_profile(s.f, v, s.center);
  for (const auto& a : pv.annuli)
    for (double var : a.variance) CHECK(var <= 1e-12);

  std::vector<double> vv = netgs::spherical_mean(s.f, v, s.center);
  double drift = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    drift = std::max(drift, std::abs(vv[i] - v[i]));
  CHECK(drift <= 1e-13);

  // radial input passes through unchanged
  std::vector<double> r = netgs::interpolate(s.f, [](const netgs::EdgePoint& p) {
    return std::max(0.0, 3.0 - l1(p));
  });
  std::vector<double> rr = netgs::spherical_mean(s.f, r, s.center);
  double dr = 0;
  for (std::size_t i = 0; i < r.size(); ++i)
    dr = std::max(dr, std::abs(rr[i] - r[i]));
  CHECK(dr <= 1e-13);
}

TEST_CASE("monotone check localizes the first rise") {
  GridSetup s = grid_setup(5, 0.5);
  // ridge at lattice distance 2: rises through annulus 1
  std::vector<double> u = netgs::interpolate(s.f, [](const netgs::EdgePoint& p) {
    return std::max(0.0, 1.0 - std::abs(l1(p) - 2.0));
  });
  netgs::RadialProfile p = netgs::radial_profile(s.f, u, s.center);
  netgs::MonotoneCheck mc = netgs::monotone_check(p, 0.0);
  CHECK_FALSE(mc.monotone);
  CHECK(mc.annulus == 1);
  CHECK(mc.index == 1);
  CHECK(mc.rise == doctest::Approx(0.5).epsilon(1e-13));

  // a tolerance above the step size accepts the same profile
  CHECK(netgs::monotone_check(p, 0.6).monotone);
}

TEST_CASE("input validation") {
  GridSetup s = grid_setup(4, 0.5);
  std::vector<double> u((std::size_t)s.f.ndof, 0.0);

  CHECK_THROWS_WITH_AS(netgs::radial_profile(s.f, u, 99999),
                       "rearrange: center must be a lattice vertex",
                       std::invalid_argument);
  std::vector<double> wrong(3, 0.0);
  CHECK_THROWS_WITH_AS(netgs::radial_profile(s.f, wrong, s.center),
                       "rearrange: coefficient size mismatch",
                       std::invalid_argument);

  // support touching the rim is rejected rather than silently clipped
  std::vector<double> wide = netgs::interpolate(s.f, [](const netgs::EdgePoint&) {
    return 1.0;
  });
  CHECK_THROWS_WITH_AS(netgs::radial_profile(s.f, wide, s.center),
                       "rearrange: support reaches the window boundary",
                       std::invalid_argument);

  std::vector<double> neg = netgs::interpolate(s.f, [](const netgs::EdgePoint& p) {
    return std::max(0.0, 2.0 - l1(p)) * (p.x > 0 ? -1.0 : 1.0);
  });
  CHECK_THROWS_WITH_AS(netgs::spherical_mean(s.f, neg, s.center),
                       "rearrange: input must be nonnegative",
                       std::invalid_argument);
}

} // TEST_SUITE
