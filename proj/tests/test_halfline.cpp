#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "netgs/halfline.hpp"

TEST_SUITE("halfline") {

TEST_CASE("comparison weight") {
  CHECK(netgs::weight_g(0.0) == 4.0);
  CHECK(netgs::weight_g(0.5) == 4.0);
  CHECK(netgs::weight_g(1.0) == 4.0);   // continuous at the breakpoint
  CHECK(netgs::weight_g(2.0) == 12.0);
  CHECK(netgs::weight_g(3.5) == 24.0);
  // dominated by the annulus count 4(2n+1) on [n, n+1], with equality at
  // the right endpoint
  for (int n = 0; n < 6; ++n)
    CHECK(netgs::weight_g(n + 1.0) == 4.0 * (2 * n + 1));
  CHECK_THROWS_AS(netgs::weight_g(-0.1), std::invalid_argument);
}

TEST_CASE("weighted interval forms") {
  const double L = 25.0, h = 0.02, alpha = 4.0;
  netgs::WeightedForms wf = netgs::assemble_weighted_halfline(L, h, alpha);
  CHECK(wf.origin_dof >= 0);
  CHECK(wf.alpha == alpha);

  // the weight breakpoint sits on a node because [0,1] is its own edge
  const netgs::MetricGraph& g = wf.forms.mesh->graph;
  REQUIRE(g.ne() == 2);
  CHECK(g.edges[0].length == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.edges[1].length == doctest::Approx(L - 1.0).epsilon(1e-15));

  // weighted mass of the all-ones field: integral of g over [0, L] minus
  // the down-ramp on the last cell forced by the pinned far end
  std::vector<double> ones((std::size_t)wf.forms.ndof, 1.0), work;
  const double full = 4.0 * L * L - 4.0 * L + 4.0;
  const double ramp = (2.0 / 3.0) * (8.0 * L - 4.0) * h - 2.0 * h * h;
  CHECK(wf.forms.M.quad(ones, work) == doctest::Approx(full - ramp).epsilon(1e-12));
}

TEST_CASE("constant fields isolate the defect terms") {
  netgs::WeightedForms wf = netgs::assemble_weighted_halfline(10.0, 0.05, 2.0);
  // natural flux of a constant is zero, so the defect contribution survives
  // unchanged: |4 v'(0) + alpha v(0)^{q-1}| = alpha
  std::vector<double> v((std::size_t)wf.forms.ndof, 1.0);
  netgs::ReducedElResidual r = netgs::reduced_el_residual(wf, v, 0.0, 3.0);
  CHECK(r.flux == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.form > 0);  // the origin row cannot be stationary for constants

  CHECK_THROWS_WITH_AS(netgs::pohozaev_residual(wf, v, 0.0, 3.0, 1.0),
                       "halfline: identity requires a positive multiplier",
                       std::invalid_argument);
}

TEST_CASE("exponential family scan closes in closed form") {
  const double q = 3.0, alpha = 4.0, mu = 4.0;
  netgs::ExpScan sc = netgs::reduced_exp_scan(q, alpha, mu);

  // mass constraint and energy of the reported member, recomputed from the
  // closed forms |v|_g^2 = 4 A^2 (1/a + 2 e^-a / a^2), a = 2 beta
  const double a = 2.0 * sc.beta;
  const double s = 4.0 * (1.0 / a + 2.0 * std::exp(-a) / (a * a));
  CHECK(sc.amp * sc.amp * s == doctest::Approx(mu).epsilon(1e-12));
  const double want =
      0.5 * sc.beta * sc.beta * mu - (alpha / q) * std::pow(sc.amp, q);
  CHECK(sc.energy == doctest::Approx(want).epsilon(1e-12));

  // frozen location of the minimum for this parameter point
  CHECK(sc.energy < -2.4);
  CHECK(sc.beta > 1.5);
  CHECK(sc.beta < 3.0);

  // at small mass the whole family stays positive
  CHECK(netgs::reduced_exp_scan(q, alpha, 1.0).energy > 0);

  CHECK_THROWS_AS(netgs::reduced_exp_scan(2.0, alpha, mu), std::invalid_argument);
  CHECK_THROWS_AS(netgs::reduced_exp_scan(q, -1.0, mu), std::invalid_argument);
}

TEST_CASE("reduced minimizer satisfies its optimality system") {
  const double q = 3.0, alpha = 4.0, mu = 4.0;
  netgs::ReducedResult res = netgs::reduced_minimize(q, alpha, mu, 25.0, 0.02);

  CHECK(res.converged);
  CHECK(res.certificate == "negative");
  CHECK(res.mass == doctest::Approx(mu).epsilon(1e-10));
  CHECK(res.energy < -2.4);
  CHECK(res.energy > -3.0);
  CHECK(res.lambda > 0);

  // descent starts from the scan member, so it can only improve on it
  netgs::ExpScan sc = netgs::reduced_exp_scan(q, alpha, mu);
  CHECK(res.energy <= sc.energy + 1e-9);

  CHECK(res.form_residual < 5e-3);
  CHECK(res.identity_residual < 5e-3);
  // the one-sided flux reading converges at first order only
  const double flux_scale = alpha * std::pow(std::abs(res.origin_value), q - 1);
  CHECK(res.flux_residual < 0.05 * flux_scale);
}

TEST_CASE("small mass stays consistent with a zero infimum") {
  netgs::ReducedResult res = netgs::reduced_minimize(3.0, 1.0, 0.25, 20.0, 0.05);
  CHECK(res.certificate == "nonnegative-consistent");
  CHECK(res.energy >= -1e-6);
}

TEST_CASE("radial profiles read into the weighted space") {
  std::vector<double> samples = {1.0, 0.5, 0.25, 0.125, 0.0};
  const double q = 3.0, d = 4.0;
  netgs::RadialCompare rc =
      netgs::radial_compare(samples, 1.0, q, d, 100.0, 100.0, 1.0);
  CHECK(rc.origin == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rc.center == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rc.center_ok);
  CHECK(rc.halfline_mass > 0);
  CHECK(rc.halfline_kinetic > 0);
  CHECK(rc.mass_ok);     // 100 dominates the weighted reading
  CHECK(rc.kinetic_ok);
  CHECK(rc.reduced_energy ==
        doctest::Approx(0.5 * rc.halfline_kinetic - d / q).epsilon(1e-12));

  // domination flags flip when the grid numbers are too small
  netgs::RadialCompare bad =
      netgs::radial_compare(samples, 1.0, q, d, 1e-6, 1e-6, 0.5);
  CHECK_FALSE(bad.mass_ok);
  CHECK_FALSE(bad.kinetic_ok);
  CHECK_FALSE(bad.center_ok);

  CHECK_THROWS_WITH_AS(netgs::radial_compare({1.0}, 1.0, q, d, 1.0, 1.0, 1.0),
                       "halfline: profile needs at least two samples",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      netgs::radial_compare({1.0, 0.5}, 1.0, q, d, 1.0, 1.0, 1.0),
      "halfline: profile does not vanish at its outer end",
      std::invalid_argument);
}

} // TEST_SUITE
