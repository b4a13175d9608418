#include "netgs/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "netgs/mesh.hpp"

namespace netgs {

double weight_g(double x) {
  if (x < 0) throw std::invalid_argument("halfline: weight argument must be >= 0");
  return x <= 1.0 ? 4.0 : 4.0 * (2.0 * x - 1.0);
}

WeightedForms assemble_weighted_halfline(double length, double h, double alpha) {
  if (!(length > 1.0))
    throw std::invalid_argument("halfline: truncation length must exceed 1");
  if (!(h > 0)) throw std::invalid_argument("halfline: spacing must be positive");
  if (!(alpha > 0))
    throw std::invalid_argument("halfline: defect strength must be positive");

  // Two edges keep the weight breakpoint at x = 1 on a node for every h.
  MetricGraph g;
  g.vertices.resize(3);
  g.vertices[2].boundary = true;
  g.edges.push_back({0, 1, 1.0, 0});
  g.edges.push_back({1, 2, length - 1.0, 0});
  g.defects = {0};

  auto mesh = std::make_shared<MeshedGraph>(build_mesh(g, h));
  std::vector<double> gn((std::size_t)mesh->nnodes, 0.0);
  for (std::int32_t e = 0; e < 2; ++e)
    for (std::int32_t j = 0; j <= mesh->medges[e].ncells; ++j) {
      const double x = (e == 0 ? 0.0 : 1.0) + node_arclen(*mesh, e, j);
      gn[(std::size_t)mesh->node(e, j)] = weight_g(x);
    }

  WeightedForms wf;
  wf.forms = assemble_weighted(mesh, gn);
  wf.forms.defect_weights = {alpha};
  wf.length = length;
  wf.h = mesh->medges[0].h;
  wf.alpha = alpha;
  wf.origin_dof = wf.forms.defect_dofs[0];
  return wf;
}

ReducedElResidual reduced_el_residual(const WeightedForms& wf,
                                      const std::vector<double>& v,
                                      double lambda, double q) {
  ReducedElResidual out;
  const ElResidual r = el_residual(wf.forms, v, -lambda, q);
  out.form = std::max({r.max_defect, r.max_kirchhoff, r.interior});

  const double v0 = v[(std::size_t)wf.origin_dof];
  const std::int32_t n1 = wf.forms.mesh->node(0, 1);
  const std::int32_t d1 = wf.forms.dof_of_node[(std::size_t)n1];
  const double v1 = d1 >= 0 ? v[(std::size_t)d1] : 0.0;
  const double slope = (v1 - v0) / wf.forms.mesh->medges[0].h;
  out.flux = std::fabs(4.0 * slope +
                       wf.alpha * std::pow(std::fabs(v0), q - 2.0) * v0);
  return out;
}

double pohozaev_residual(const WeightedForms& wf, const std::vector<double>& v,
                         double lambda, double q, double mu) {
  if (!(lambda > 0))
    throw std::invalid_argument("halfline: identity requires a positive multiplier");
  const double v0 = std::fabs(v[(std::size_t)wf.origin_dof]);
  const double lhs = wf.alpha * wf.alpha / 16.0 * std::pow(v0, 2.0 * q - 2.0);
  const double inner = lp_integral_on(wf.forms, v, 2.0, {0});
  const double rhs = lambda * (v0 * v0 + mu - 4.0 * inner);
  const double scale = std::max(std::fabs(lhs), std::fabs(rhs));
  return scale > 0 ? std::fabs(lhs - rhs) / scale : 0.0;
}

ExpScan reduced_exp_scan(double q, double alpha, double mu, int nbeta,
                         double beta_lo, double beta_hi) {
  if (!(q > 2.0 && q < 4.0))
    throw std::invalid_argument("halfline: exponent must lie in (2,4)");
  if (!(alpha > 0) || !(mu > 0))
    throw std::invalid_argument("halfline: strength and mass must be positive");
  if (nbeta < 2 || !(beta_lo > 0) || !(beta_hi > beta_lo))
    throw std::invalid_argument("halfline: bad scan range");

  ExpScan best;
  best.energy = std::numeric_limits<double>::infinity();
  const double step = std::log(beta_hi / beta_lo) / (nbeta - 1);
  for (int i = 0; i < nbeta; ++i) {
    const double beta = beta_lo * std::exp(step * i);
    const double a = 2.0 * beta;
    const double s = 4.0 * (1.0 / a + 2.0 * std::exp(-a) / (a * a));
    const double amp = std::sqrt(mu / s);
    const double energy = 0.5 * beta * beta * mu - alpha / q * std::pow(amp, q);
    if (energy < best.energy) best = {amp, beta, energy};
  }
  return best;
}

ReducedResult reduced_minimize(double q, double alpha, double mu, double length,
                               double h, double delta_disc,
                               const SolverOptions& opts) {
  WeightedForms wf = assemble_weighted_halfline(length, h, alpha);

  SolverOptions o = opts;
  const ExpScan scan = reduced_exp_scan(q, alpha, mu);
  o.initializers.push_back(interpolate(wf.forms, [&](const EdgePoint& p) {
    const double x = (p.edge == 0 ? 0.0 : 1.0) + p.s;
    return scan.amp * std::exp(-scan.beta * x);
  }));

  ReducedResult out;
  out.raw = minimize(wf.forms, q, mu, o);
  out.v = out.raw.u;
  out.energy = out.raw.energy;
  out.mass = out.raw.mass;
  out.lambda = out.raw.lagrange;
  out.origin_value = out.v[(std::size_t)wf.origin_dof];
  out.converged = out.raw.converged;

  const ReducedElResidual r = reduced_el_residual(wf, out.v, out.lambda, q);
  out.form_residual = r.form;
  out.flux_residual = r.flux;
  out.identity_residual =
      out.lambda > 0 ? pohozaev_residual(wf, out.v, out.lambda, q, out.mass)
                     : std::numeric_limits<double>::quiet_NaN();
  out.certificate =
      out.energy < -delta_disc ? "negative" : "nonnegative-consistent";
  return out;
}

RadialCompare radial_compare(const std::vector<double>& samples, double dx,
                             double q, double n_defects, double grid_mass,
                             double grid_kinetic, double center_value,
                             double tol) {
  if (samples.size() < 2 || !(dx > 0))
    throw std::invalid_argument("halfline: profile needs at least two samples");
  double sup = 0;
  for (double s : samples) sup = std::max(sup, std::fabs(s));
  if (!(sup > 0)) throw std::invalid_argument("halfline: profile must be nonzero");
  if (std::fabs(samples.back()) > 1e-12 * sup)
    throw std::invalid_argument("halfline: profile does not vanish at its outer end");

  // 2-point Gauss per cell, evaluating the weight at the quadrature points;
  // exact whenever the breakpoint x = 1 falls on a sample, which it does for
  // profiles taken from unit-length grid edges.
  static constexpr double kGaussA = 0.211324865405187118;
  static constexpr double kGaussB = 0.788675134594812882;
  double mass = 0, kinetic = 0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double x0 = dx * (double)i;
    const double v0 = samples[i], v1 = samples[i + 1];
    const double ga = weight_g(x0 + kGaussA * dx);
    const double gb = weight_g(x0 + kGaussB * dx);
    const double va = v0 + kGaussA * (v1 - v0);
    const double vb = v0 + kGaussB * (v1 - v0);
    mass += 0.5 * dx * (ga * va * va + gb * vb * vb);
    const double slope = (v1 - v0) / dx;
    kinetic += 0.5 * dx * slope * slope * (ga + gb);
  }

  RadialCompare out;
  out.halfline_mass = mass;
  out.grid_mass = grid_mass;
  out.halfline_kinetic = kinetic;
  out.grid_kinetic = grid_kinetic;
  out.origin = samples[0];
  out.center = center_value;
  out.reduced_energy =
      0.5 * kinetic - n_defects / q * std::pow(std::fabs(samples[0]), q);
  out.mass_ok = mass <= grid_mass + tol * std::max(1.0, std::fabs(grid_mass));
  out.kinetic_ok =
      kinetic <= grid_kinetic + tol * std::max(1.0, std::fabs(grid_kinetic));
  out.center_ok = std::fabs(samples[0] - center_value) <=
                  tol * std::max(1.0, std::fabs(center_value));
  return out;
}

} // namespace netgs
