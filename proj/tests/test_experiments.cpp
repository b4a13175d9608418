#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "netgs/experiments.hpp"
#include "netgs/graph.hpp"
#include "netgs/mesh.hpp"

namespace {

netgs::Forms make_forms(netgs::MetricGraph g, double h) {
  auto mesh = std::make_shared<netgs::MeshedGraph>(netgs::build_mesh(g, h));
  return netgs::assemble(mesh);
}

netgs::FormsFactory star_factory(int arms) {
  return [arms](int level) {
    const double len = level == 0 ? 8.0 : 12.0;
    const double h = level == 0 ? 0.1 : 0.05;
    return make_forms(netgs::gen_star(arms, len, true), h);
  };
}

netgs::DefectSpec full_lattice() {
  netgs::DefectSpec spec;
  spec.kind = netgs::DefectSpec::Kind::z2_lattice;
  spec.vx = 1;
  spec.v2y = 1;
  return spec;
}

netgs::FormsFactory lattice_factory(const netgs::DefectSpec& spec) {
  // level 0 must span radius 8 so the n = 6 logarithmic witness fits; the
  // witnesses are edge-linear, so the unit mesh width loses nothing
  return [spec](int level) {
    netgs::MetricGraph g = netgs::gen_grid_window(level == 0 ? 8 : 10);
    netgs::resolve_defects(g, spec);
    return make_forms(std::move(g), level == 0 ? 1.0 : 0.5);
  };
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("discrimination threshold") {
  CHECK(netgs::delta_disc(0.1) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(netgs::delta_disc(0.1, 8.0) == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(netgs::delta_disc(0.1, 0.5) == doctest::Approx(0.005).epsilon(1e-15));
  CHECK(netgs::delta_disc(1e-6) == 1e-8);  // floor
  CHECK_THROWS_AS(netgs::delta_disc(0.0), std::runtime_error);
}

TEST_CASE("exact star ground state") {
  netgs::StarExact e = netgs::star_exact(2, 3.0, 2.0);
  CHECK(e.energy == doctest::Approx(-1.0 / 12.0).epsilon(1e-14));
  CHECK(e.s == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(e.c == doctest::Approx(1.0).epsilon(1e-14));

  // defining relations at a generic parameter point
  netgs::StarExact g = netgs::star_exact(3, 2.5, 1.0);
  CHECK(std::pow(g.c, 0.5) == doctest::Approx(3.0 * g.s).epsilon(1e-12));
  CHECK(3.0 * g.c * g.c / (2.0 * g.s) == doctest::Approx(1.0).epsilon(1e-12));
  const double kinetic = 3.0 * g.c * g.c * g.s / 2.0;
  const double vsum = std::pow(g.c, 2.5);
  CHECK(g.energy == doctest::Approx(0.5 * kinetic - vsum / 2.5).epsilon(1e-12));

  CHECK_THROWS_AS(netgs::star_exact(0, 3.0, 1.0), std::runtime_error);
  CHECK_THROWS_AS(netgs::star_exact(2, 4.0, 1.0), std::runtime_error);
}

TEST_CASE("family bounds sit above the exact energy") {
  netgs::Forms f = make_forms(netgs::gen_star(2, 20.0, true), 0.1);
  netgs::Certificate cert = netgs::best_family_bound(f, 3.0, 2.0);
  CHECK(cert.source == "family:star_exp");
  CHECK(cert.energy >= -1.0 / 12.0 - 1e-9);
  CHECK(cert.energy <= -0.07);  // the decay grid lands near the true rate

  // no construction covers a bare interval without defects
  netgs::MetricGraph plain;
  plain.vertices.resize(2);
  plain.vertices[1].boundary = true;
  plain.edges.push_back({0, 1, 5.0, 0});
  netgs::Forms fp = make_forms(std::move(plain), 0.25);
  netgs::Certificate none = netgs::best_family_bound(fp, 3.0, 1.0);
  CHECK(none.source == "none");
  CHECK(std::isinf(none.energy));
}

TEST_CASE("energy curve shape diagnostics") {
  netgs::Forms f = make_forms(netgs::gen_star(2, 20.0, true), 0.1);
  netgs::CurveOptions opts;
  opts.delta = 1e-6;
  netgs::EnergyCurve curve =
      netgs::energy_curve(f, 3.0, {0.5, 1.0, 2.0, 3.0}, opts);

  REQUIRE(curve.points.size() == 4);
  CHECK(curve.slope_ok);
  CHECK(curve.concave_ok);
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const netgs::CurvePoint& p = curve.points[i];
    CHECK(p.certified);
    CHECK(p.energy < 0);
    // the infinite-graph value -mu^3/96 must stay below every upper bound
    CHECK(p.energy >= -std::pow(p.mu, 3.0) / 96.0 - 1e-9);
    if (i > 0) CHECK(p.energy < curve.points[i - 1].energy);
  }

  CHECK_THROWS_WITH_AS(netgs::energy_curve(f, 3.0, {}, opts),
                       "experiments: empty mass grid", std::runtime_error);
  CHECK_THROWS_WITH_AS(netgs::energy_curve(f, 3.0, {2.0, 1.0}, opts),
                       "experiments: mass grid must ascend", std::runtime_error);
  netgs::CurveOptions off;
  off.use_solver = false;
  off.use_families = false;
  CHECK_THROWS_WITH_AS(netgs::energy_curve(f, 3.0, {1.0}, off),
                       "experiments: every energy source is disabled",
                       std::runtime_error);
}

TEST_CASE("critical mass bracketing on the three-arm star") {
  // with delta = 0.005 * 8 the certified crossing of -2 mu^3 / 2187 sits at
  // (2187 delta / 2)^{1/3} ~ 3.5234; the bracket must trap it
  netgs::FormsFactory make = star_factory(3);
  netgs::CurveOptions opts;
  opts.delta = netgs::delta_disc(0.1, 8.0);
  // a dense decay grid pins the closed-form envelope to the exact curve, so
  // the level-0 threshold sits within a hair of the true crossing and the
  // refinement pass cannot flip either bracket end: every certificate is an
  // upper bound, so nothing certifies below the true crossing, and the upper
  // end keeps its mesh-independent closed-form certificate
  for (double e = 0.05; e <= 1.0; e += 0.002) opts.eps_grid.push_back(e);
  netgs::ThresholdEstimate est = netgs::critical_mass(make, 3.0, 1.0, 8.0, 0.02, opts);

  CHECK_FALSE(est.degenerate_zero);
  CHECK(est.mu_lo < 3.524);
  CHECK(est.mu_hi > 3.523);
  CHECK(est.mu_lo > 3.2);
  CHECK(est.mu_hi < 3.9);
  CHECK(est.mu_hi - est.mu_lo <= 0.02 * est.mu_hi + 1e-12);
  CHECK(est.refined_hi);
  CHECK_FALSE(est.refined_lo);
  CHECK(est.refined_ok);

  // the stock decay grid is coarse; its envelope overshoots the crossing by
  // more than the bracket width, the finer level-1 window then certifies at
  // the lower end, and the estimate reports itself discretization-limited
  netgs::CurveOptions coarse;
  coarse.delta = opts.delta;
  netgs::ThresholdEstimate lim = netgs::critical_mass(make, 3.0, 1.0, 8.0, 0.02, coarse);
  CHECK(lim.refined_hi);
  CHECK(lim.refined_lo);
  CHECK_FALSE(lim.refined_ok);
  CHECK(lim.notes ==
        "lower end certified at the refined level; estimate is discretization-limited");

  // already certified at the bottom: degenerate bracket [0, mu_lo]
  netgs::ThresholdEstimate deg = netgs::critical_mass(make, 3.0, 6.0, 8.0, 0.02, opts);
  CHECK(deg.degenerate_zero);
  CHECK(deg.mu_lo == 0.0);
  CHECK(deg.mu_hi == 6.0);

  // no certificate at the top is a hard error, not a silent bracket
  CHECK_THROWS_WITH_AS(
      netgs::critical_mass(make, 3.0, 0.1, 0.5, 0.02, opts),
      "experiments: no negative certificate at the top of the mass bracket",
      std::runtime_error);
}

TEST_CASE("threshold scan over the exponent grid") {
  netgs::FormsFactory make = star_factory(3);
  netgs::CurveOptions opts;
  opts.delta = netgs::delta_disc(0.1, 8.0);
  netgs::QScan scan = netgs::qstar_scan(make, {2.5, 3.0, 3.5}, 0.5, 8.0, 0.05, opts);

  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.downset_ok);
  for (const netgs::ThresholdEstimate& r : scan.rows) {
    CHECK(r.mu_lo < r.mu_hi);
    CHECK(r.mu_hi <= 8.0);
  }
  // thresholds grow with the exponent on this star
  CHECK(scan.rows[0].mu_mid() < scan.rows[1].mu_mid());
  CHECK(scan.rows[1].mu_mid() < scan.rows[2].mu_mid());
}

TEST_CASE("small exponent witnesses") {
  CHECK(netgs::small_q_display(8.0) > 0);    // desk sizes stay positive
  CHECK(netgs::small_q_display(1e6) < 0);    // the asymptotic sign takes over
  CHECK(netgs::small_q_display(1e6) == doctest::Approx(-0.1513).epsilon(2e-3));
  CHECK_THROWS_AS(netgs::small_q_display(1.0), std::runtime_error);

  netgs::DefectSpec spec = full_lattice();
  netgs::FormsFactory make = lattice_factory(spec);
  netgs::CurveOptions opts;
  opts.delta = 1e-4;
  opts.use_solver = false;  // family certificates carry the thresholds here
  opts.spec = &spec;
  netgs::SmallQReport rep = netgs::small_q_limit(make, {2, 6}, 1e-3, 4.0, opts);

  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].q == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(rep.rows[1].q == doctest::Approx(2.0 + 1.0 / 6.0).epsilon(1e-15));
  for (const netgs::SmallQRow& r : rep.rows) {
    CHECK(r.mass_lo <= r.mass_hi);
    CHECK(r.display > 0);
    // closed-form certificates are window-independent, so the refinement
    // pass can never disagree with level 0
    CHECK(r.threshold.refined_ok);
    CHECK_FALSE(r.threshold.degenerate_zero);
  }
  // the n = 2 witness is too small to beat the quadrature threshold; n = 6
  // clears it against the full defect lattice
  CHECK_FALSE(rep.rows[0].witness_negative);
  CHECK(rep.rows[1].witness_negative);
  CHECK(rep.rows[1].witness_energy < -0.001);
  // every mass is supercritical on the full lattice in the exact model; at a
  // fixed discrimination level the estimated thresholds instead shrink hard
  // toward zero as the exponent drops toward 2
  CHECK(rep.thresholds_decreasing);
  CHECK(rep.rows[0].threshold.mu_mid() > 5.0 * rep.rows[1].threshold.mu_mid());
  CHECK(rep.rows[0].threshold.mu_hi < 0.2);
  CHECK(rep.rows[1].threshold.mu_hi < 0.02);
}

TEST_CASE("translation rules out gapped-row minimizers") {
  // kinetic and defect terms scale together on a defect row at q = 3, so the
  // row binds only past a fixed mass; mu = 64 settles into a state steep
  // enough that its numerical support clears two block translations
  netgs::MetricGraph g = netgs::gen_grid_window(40);
  netgs::DefectSpec spec;
  spec.kind = netgs::DefectSpec::Kind::gap_row;
  spec.gap_max = 40;
  netgs::resolve_defects(g, spec);
  netgs::Forms f = make_forms(std::move(g), 1.0);

  netgs::NonexistenceReport rep = netgs::nonexistence_demo(f, 3.0, 64.0);
  REQUIRE(rep.centers.size() >= 3);
  CHECK(rep.centers[0] == 4);
  CHECK(rep.centers[1] == 9);
  CHECK(rep.centers[2] == 16);
  CHECK(rep.ok);
  CHECK(rep.strict_decreases >= 2);
  CHECK(rep.zero_shift_drift == 0.0);  // translation by zero is the identity
  CHECK(rep.energies[0] < -20.0);      // genuinely bound, not a rim artifact
  for (std::size_t i = 1; i < rep.energies.size(); ++i)
    CHECK(rep.energies[i] < rep.energies[i - 1]);

  // a window that cannot host two decreases refuses to certify
  netgs::MetricGraph tiny = netgs::gen_grid_window(24);
  netgs::DefectSpec tspec;
  tspec.kind = netgs::DefectSpec::Kind::gap_row;
  tspec.gap_max = 24;
  netgs::resolve_defects(tiny, tspec);
  netgs::Forms ft = make_forms(std::move(tiny), 1.0);
  CHECK_THROWS_WITH_AS(
      netgs::nonexistence_demo(ft, 3.0, 64.0),
      "experiments: window exhausted before two strict energy decreases",
      std::runtime_error);
}

TEST_CASE("frozen corpus reproduces its anchors") {
  std::vector<netgs::CorpusEntry> corpus = netgs::build_gn_corpus();
  REQUIRE(corpus.size() == 8);
  CHECK(corpus[0].graph == "star:3:8");
  CHECK(corpus[0].fn == "exp:0.4");
  CHECK(corpus[0].p == 2.5);
  CHECK(corpus[0].ratios.gn1d ==
        doctest::Approx(0.7511028704593583).epsilon(1e-12));
  CHECK(corpus[0].ratios.subgraph ==
        doctest::Approx(5.498331963226272).epsilon(1e-12));
  for (const netgs::CorpusEntry& e : corpus) {
    CHECK(e.ratios.gn1d_def);
    CHECK(e.ratios.gninf_def);
    CHECK(e.ratios.vertex_def);
  }
}

TEST_CASE("module invariant sweep") {
  // the corpus regression row only joins when frozen entries are supplied,
  // which the io suite covers through the data file
  std::vector<netgs::VerifyCheck> checks = netgs::verify_all(nullptr);
  CHECK(checks.size() == 14);
  for (const netgs::VerifyCheck& c : checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.pass);
  }
}

} // TEST_SUITE
