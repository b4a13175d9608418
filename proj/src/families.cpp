#include "netgs/families.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netgs/mesh.hpp"

namespace netgs {

namespace {

void check_q(double q) {
  if (!(q > 2.0 && q < 4.0))
    throw std::invalid_argument("family: exponent must lie in (2,4)");
}

// Fills a dof vector by visiting every node once; value_at(e, j) must agree
// across edges sharing a vertex (all constructions here are continuous).
template <class F>
std::vector<double> fill_nodes(const Forms& f, F&& value_at) {
  const MeshedGraph& mg = *f.mesh;
  std::vector<double> u((std::size_t)f.ndof, 0.0);
  std::vector<char> seen((std::size_t)mg.nnodes, 0);
  for (std::int32_t e = 0; e < (std::int32_t)mg.medges.size(); ++e) {
    for (std::int32_t j = 0; j <= mg.medges[e].ncells; ++j) {
      const std::int32_t nd = mg.node(e, j);
      if (seen[(std::size_t)nd]) continue;
      seen[(std::size_t)nd] = 1;
      const std::int32_t d = f.dof_of_node[(std::size_t)nd];
      if (d >= 0) u[(std::size_t)d] = value_at(e, j);
    }
  }
  return u;
}

// Lattice offsets of a vertex relative to the window center.
void lattice_offset(const MetricGraph& g, std::int32_t v, std::int64_t& dx,
                    std::int64_t& dy) {
  const Vertex& vv = g.vertices[(std::size_t)v];
  if (!vv.lattice)
    throw std::invalid_argument("family: vertex carries no lattice coordinates");
  dx = vv.lx - g.grid->cx;
  dy = vv.ly - g.grid->cy;
}

double l1_from(const MetricGraph& g, std::int32_t v, std::int64_t cx,
               std::int64_t cy) {
  const Vertex& vv = g.vertices[(std::size_t)v];
  return (double)(std::llabs(vv.lx - cx) + std::llabs(vv.ly - cy));
}

// Cap profile used by the logarithmic families.
double cap_fn(double d, int n, double ln_n) {
  if (d <= 1.0) return ln_n;
  if (d >= (double)n) return 0.0;
  return ln_n - std::log(d);
}

// Two-sided bracket ingredient: the exact value of the radial integral
// int_1^n t (log n - log t)^2 dt.
double cap_radial_integral(int n, double ln_n) {
  return 0.25 * (double)n * (double)n - 0.5 * ln_n * ln_n - 0.5 * ln_n - 0.25;
}

void require_cap_fits(const MetricGraph& g, std::int32_t center, int n) {
  if (!g.grid)
    throw std::invalid_argument("family: forms are not over a grid window");
  std::int64_t ox = 0, oy = 0;
  lattice_offset(g, center, ox, oy);
  const std::int64_t r = g.grid->radius;
  if (std::max(std::llabs(ox), std::llabs(oy)) + n > r)
    throw std::invalid_argument("family: window smaller than the cap");
}

} // namespace

FamilyEval star_exp_family(double eps, double q, int n_halflines,
                           double core_len, int n_defects, const Forms* f) {
  if (eps <= 0) throw std::invalid_argument("family: eps must be positive");
  check_q(q);
  if (n_halflines < 1)
    throw std::invalid_argument("family: star needs at least one half-line");
  if (core_len < 0 || n_defects < 0)
    throw std::invalid_argument("family: negative core length or defect count");

  FamilyEval fe;
  fe.family = "star_exp";
  fe.param = eps;
  fe.q = q;
  const double eq = std::pow(eps, q);
  fe.mass = (0.5 * n_halflines + core_len * eq) * std::pow(eps, 4.0 - q);
  fe.kinetic = 0.5 * n_halflines * std::pow(eps, 4.0 + q);
  fe.vsum = n_defects * std::pow(eps, 2.0 * q);
  fe.energy = 0.5 * fe.kinetic - fe.vsum / q;
  fe.center_value = eps * eps;

  if (f) {
    const MetricGraph& g = f->mesh->graph;
    if (!g.star)
      throw std::invalid_argument("family: forms are not over a star window");
    if (g.star->n_edges != n_halflines)
      throw std::invalid_argument("family: window arm count differs");
    if (core_len != 0)
      throw std::invalid_argument("family: star windows carry no compact core");
    const double len = g.star->length;
    const double decay = std::exp(-2.0 * eq * len);
    fe.tail_mass = 0.5 * n_halflines * std::pow(eps, 4.0 - q) * decay;
    fe.tail_kinetic = 0.5 * n_halflines * std::pow(eps, 4.0 + q) * decay;
    // Arms run center to leaf, so arclength from node index is the distance
    // from the junction.
    fe.u = fill_nodes(*f, [&](std::int32_t e, std::int32_t j) {
      return eps * eps * std::exp(-eq * (double)j * f->mesh->medges[e].h);
    });
  }
  return fe;
}

FamilyEval tent_family(double big_m, double ell, int n_incident, double q,
                       const Forms* f, std::int32_t center) {
  if (big_m <= 0)
    throw std::invalid_argument("family: tent height must be positive");
  if (ell <= 0)
    throw std::invalid_argument("family: tent foot must be positive");
  if (n_incident < 1)
    throw std::invalid_argument("family: tent needs an incident edge");
  check_q(q);

  FamilyEval fe;
  fe.family = "tent";
  fe.param = big_m;
  fe.q = q;
  fe.mass = n_incident * big_m * big_m * ell * ell * ell / 3.0;
  fe.kinetic = n_incident * big_m * big_m * ell;
  fe.vsum = std::pow(big_m * ell, q);
  fe.energy = 0.5 * fe.kinetic - fe.vsum / q;
  fe.center_value = big_m * ell;

  if (f) {
    const MetricGraph& g = f->mesh->graph;
    if (center < 0) {
      if (f->defect_vertices.empty())
        throw std::invalid_argument("family: no defect vertex to center the tent on");
      center = f->defect_vertices[0];
    }
    int deg = 0;
    for (const Edge& e : g.edges) {
      if (e.a != center && e.b != center) continue;
      ++deg;
      if (e.length < ell - 1e-12)
        throw std::invalid_argument("family: tent foot exceeds an incident edge");
    }
    if (deg != n_incident)
      throw std::invalid_argument("family: tent degree differs from the vertex degree");
    fe.u = fill_nodes(*f, [&](std::int32_t e, std::int32_t j) {
      const Edge& ed = g.edges[(std::size_t)e];
      const MeshedGraph::MEdge& me = f->mesh->medges[(std::size_t)e];
      double t;
      if (ed.a == center)
        t = (double)j * me.h;
      else if (ed.b == center)
        t = (double)(me.ncells - j) * me.h;
      else
        return 0.0;
      return std::max(0.0, big_m * (ell - t));
    });
  }
  return fe;
}

FamilyEval zper_exp_family(double eps, double q, const Forms& f) {
  if (eps <= 0) throw std::invalid_argument("family: eps must be positive");
  check_q(q);
  const MetricGraph& g = f.mesh->graph;
  if (!g.zwindow)
    throw std::invalid_argument("family: forms are not over a pasted periodic window");
  const ZWindowInfo& zw = *g.zwindow;

  FamilyEval fe;
  fe.family = "zper_exp";
  fe.param = eps;
  fe.q = q;
  const double eq = std::pow(eps, q);
  const double l = zw.l;
  const double m = (double)zw.m;
  fe.mass = m * std::pow(eps, 4.0 - q) +
            zw.ktilde_len * std::pow(eps, 4.0) / std::tanh(l * eq);
  fe.kinetic = m * std::pow(eps, 4.0 + q);
  fe.vsum = std::pow(eps, 2.0 * q);
  fe.energy = 0.5 * fe.kinetic - fe.vsum / q;
  fe.center_value = eps * eps;

  // Copies beyond +-n are missing from the window. The sloped parts give an
  // exact remainder; the flat parts are bounded by replacing the slightly
  // shifted constants on D-to-D edges with the larger of the two rates.
  const int n = zw.half_copies;
  const double r1 = std::exp(-2.0 * n * l * eq);
  const double r2 = std::exp(-2.0 * (n + 1) * l * eq);
  fe.tail_mass = 0.5 * m * std::pow(eps, 4.0 - q) * (r1 + r2) +
                 zw.ktilde_len * std::pow(eps, 4.0) * (r1 + r2) /
                     (1.0 - std::exp(-2.0 * l * eq));
  fe.tail_kinetic = 0.5 * m * std::pow(eps, 4.0 + q) * (r1 + r2);

  fe.u = fill_nodes(f, [&](std::int32_t e, std::int32_t j) {
    const ZWindowEdge& meta = zw.edge_meta[(std::size_t)e];
    const double i = (double)meta.cell;
    const double e2 = eps * eps;
    switch (meta.kind) {
      case ZWindowEdge::lk: {
        const MeshedGraph::MEdge& me = f.mesh->medges[(std::size_t)e];
        const double t = meta.d_at_a ? (double)j * me.h
                                     : (double)(me.ncells - j) * me.h;
        if (t >= l) return e2 * std::exp(-eq * std::fabs(i) * l);
        return e2 * std::exp(-eq * std::fabs((i + 1.0) * l - t));
      }
      case ZWindowEdge::dd:
        return e2 * std::exp(-eq * std::fabs(i + 1.0) * l);
      default:
        return e2 * std::exp(-eq * std::fabs(i) * l);
    }
  });
  return fe;
}

FamilyEval grid_exp_family(double eps, double mu, double q, const Forms& f,
                           const DefectSpec& spec) {
  if (eps <= 0) throw std::invalid_argument("family: eps must be positive");
  if (mu <= 0) throw std::invalid_argument("family: mass must be positive");
  check_q(q);
  const MetricGraph& g = f.mesh->graph;
  if (!g.grid)
    throw std::invalid_argument("family: forms are not over a grid window");
  const std::int64_t cx = g.grid->cx, cy = g.grid->cy;

  FamilyEval fe;
  fe.family = "grid_exp";
  fe.param = eps;
  fe.q = q;
  const double keps = std::sqrt(0.5 * eps * mu * std::tanh(eps));
  fe.mass = mu;
  fe.kinetic = mu * eps * eps;
  fe.center_value = keps;

  switch (spec.kind) {
    case DefectSpec::Kind::z_row: {
      const double big_r = (double)(std::llabs(spec.vx) + std::llabs(spec.vy));
      if (big_r <= 0)
        throw std::invalid_argument("family: row period must be nonzero");
      fe.vsum = std::pow(keps, q) / (1.0 - std::exp(-eps * q * big_r));
      fe.vsum_is_lower = true;
      break;
    }
    case DefectSpec::Kind::z2_lattice: {
      const double r1 = (double)(std::llabs(spec.vx) + std::llabs(spec.vy));
      const std::int64_t shift =
          min_disjoint_shift(spec.vx, spec.vy, spec.v2x, spec.v2y);
      const double r2 =
          (double)shift * (double)(std::llabs(spec.v2x) + std::llabs(spec.v2y));
      if (r1 <= 0 || r2 <= 0)
        throw std::invalid_argument("family: lattice periods must be nonzero");
      fe.vsum = std::pow(keps, q) /
                ((1.0 - std::exp(-eps * q * r1)) * (1.0 - std::exp(-eps * q * r2)));
      fe.vsum_is_lower = true;
      break;
    }
    default: {
      // Finite in-window defect sets: the sum is exact. For the gapped row it
      // is still only a partial sum of the infinite-graph defect term.
      double s = 0;
      for (std::size_t i = 0; i < f.defect_vertices.size(); ++i) {
        const double d = l1_from(g, f.defect_vertices[i], cx, cy);
        const double w = i < f.defect_weights.size() ? f.defect_weights[i] : 1.0;
        s += w * std::pow(keps * std::exp(-eps * d), q);
      }
      fe.vsum = s;
      fe.vsum_is_lower = spec.kind == DefectSpec::Kind::gap_row;
      break;
    }
  }
  fe.energy = 0.5 * fe.kinetic - fe.vsum / q;

  // Per-edge integrals of the squared profile are elementary (the distance
  // to the center changes by exactly one along each edge), so the window
  // remainder comes out exact.
  double win_mass = 0;
  for (const Edge& e : g.edges) {
    const double da = l1_from(g, e.a, cx, cy);
    const double db = l1_from(g, e.b, cx, cy);
    win_mass += keps * keps *
                std::fabs(std::exp(-2.0 * eps * da) - std::exp(-2.0 * eps * db)) /
                (2.0 * eps);
  }
  fe.tail_mass = std::max(0.0, mu - win_mass);
  fe.tail_kinetic = eps * eps * fe.tail_mass;

  fe.u = fill_nodes(f, [&](std::int32_t e, std::int32_t j) {
    const Edge& ed = g.edges[(std::size_t)e];
    const MeshedGraph::MEdge& me = f.mesh->medges[(std::size_t)e];
    const double da = l1_from(g, ed.a, cx, cy);
    const double db = l1_from(g, ed.b, cx, cy);
    const double s = (double)j / (double)me.ncells;
    return keps * std::exp(-eps * (da + s * (db - da)));
  });
  return fe;
}

FamilyEval grid_log_family(int n, double q, const Forms& f,
                           std::int32_t center) {
  if (n < 2) throw std::invalid_argument("family: cap needs n >= 2");
  check_q(q);
  const MetricGraph& g = f.mesh->graph;
  require_cap_fits(g, center, n);

  FamilyEval fe;
  fe.family = "grid_log";
  fe.param = (double)n;
  fe.q = q;
  const double ln_n = std::log((double)n);
  const double radial = cap_radial_integral(n, ln_n);
  const double n4 = std::pow((double)n, 4.0);
  fe.mass_exact = false;
  fe.mass_lo = 4.0 * (ln_n * ln_n + radial) / n4;
  fe.mass_hi = 4.0 * (ln_n * ln_n + 3.0 * radial) / n4;
  fe.mass = 0.5 * (fe.mass_lo + fe.mass_hi);
  fe.kinetic = 12.0 * ln_n / n4;
  fe.kinetic_is_upper = true;
  fe.center_value = ln_n / ((double)n * (double)n);

  double w_center = 1.0;
  for (std::size_t i = 0; i < f.defect_vertices.size(); ++i)
    if (f.defect_vertices[i] == center && i < f.defect_weights.size())
      w_center = f.defect_weights[i];
  fe.vsum = w_center * std::pow(fe.center_value, q);
  fe.vsum_is_lower = f.defect_vertices.size() > 1;
  fe.energy = 0.5 * fe.kinetic - fe.vsum / q;

  const Vertex& cv = g.vertices[(std::size_t)center];
  fe.u = fill_nodes(f, [&](std::int32_t e, std::int32_t j) {
    const Edge& ed = g.edges[(std::size_t)e];
    const MeshedGraph::MEdge& me = f.mesh->medges[(std::size_t)e];
    const double da = l1_from(g, ed.a, cv.lx, cv.ly);
    const double db = l1_from(g, ed.b, cv.lx, cv.ly);
    const double d = da + ((double)j / (double)me.ncells) * (db - da);
    return cap_fn(d, n, ln_n) / ((double)n * (double)n);
  });
  return fe;
}

FamilyEval appendix_loglinear(int n, double alpha, const Forms& f,
                              std::int32_t center) {
  if (n < 2) throw std::invalid_argument("family: cap needs n >= 2");
  if (alpha <= 0)
    throw std::invalid_argument("family: defect strength must be positive");
  const MetricGraph& g = f.mesh->graph;
  require_cap_fits(g, center, n);

  FamilyEval fe;
  fe.family = "appendix_loglinear";
  fe.param = (double)n;
  fe.q = 2.0;
  const double ln_n = std::log((double)n);
  const double radial = cap_radial_integral(n, ln_n);
  fe.mass_exact = false;
  fe.mass_lo = 4.0 * (ln_n * ln_n + radial);
  fe.mass_hi = 4.0 * (ln_n * ln_n + 3.0 * radial);
  fe.mass = 0.5 * (fe.mass_lo + fe.mass_hi);
  fe.kinetic = 12.0 * ln_n;
  fe.kinetic_is_upper = true;
  fe.center_value = ln_n;
  fe.vsum = alpha * ln_n * ln_n;
  fe.energy = 0.5 * (fe.kinetic - fe.vsum);

  // Quadratic-form quotient: dividing a nonnegative numerator by the mass
  // lower bound (or a negative one by the upper bound) keeps this above the
  // true quotient, hence above the bottom eigenvalue.
  const double num = fe.kinetic - fe.vsum;
  fe.has_rayleigh = true;
  fe.rayleigh_bound = num >= 0 ? num / fe.mass_lo : num / fe.mass_hi;

  const Vertex& cv = g.vertices[(std::size_t)center];
  fe.u = fill_nodes(f, [&](std::int32_t e, std::int32_t j) {
    const Edge& ed = g.edges[(std::size_t)e];
    const MeshedGraph::MEdge& me = f.mesh->medges[(std::size_t)e];
    const double da = l1_from(g, ed.a, cv.lx, cv.ly);
    const double db = l1_from(g, ed.b, cv.lx, cv.ly);
    const double d = da + ((double)j / (double)me.ncells) * (db - da);
    return cap_fn(d, n, ln_n);
  });
  return fe;
}

FamilyEval appendix_plateau(int n, const Forms& f) {
  if (n < 1) throw std::invalid_argument("family: plateau needs n >= 1");
  const MetricGraph& g = f.mesh->graph;

  std::vector<double> vval((std::size_t)g.nv(), 0.0);
  if (g.grid) {
    const std::int64_t r = g.grid->radius;
    if ((std::int64_t)n + 2 > 2 * r)
      throw std::invalid_argument("family: window too small for the plateau");
    // Center the block: support spans n+2 lattice units per axis.
    const std::int64_t ox = 1 - ((std::int64_t)n + 3) / 2;
    for (std::int32_t v = 0; v < g.nv(); ++v) {
      std::int64_t dx = 0, dy = 0;
      lattice_offset(g, v, dx, dy);
      if (dx >= ox && dx <= ox + n && dy >= ox && dy <= ox + n) vval[(std::size_t)v] = 1.0;
    }
  } else if (g.zwindow) {
    const ZWindowInfo& zw = *g.zwindow;
    if (zw.half_copies < n + 1)
      throw std::invalid_argument("family: window too small for the plateau");
    // A vertex belongs to the innermost copy it touches, so the two pasted
    // copies at a seam resolve to the smaller index on both sides.
    std::vector<std::int32_t> minabs((std::size_t)g.nv(), zw.half_copies + 1);
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
      const std::int32_t c = std::abs(zw.edge_meta[e].cell);
      minabs[(std::size_t)g.edges[e].a] = std::min(minabs[(std::size_t)g.edges[e].a], c);
      minabs[(std::size_t)g.edges[e].b] = std::min(minabs[(std::size_t)g.edges[e].b], c);
    }
    for (std::int32_t v = 0; v < g.nv(); ++v)
      if (minabs[(std::size_t)v] <= n) vval[(std::size_t)v] = 1.0;
  } else {
    throw std::invalid_argument("family: plateau needs a grid or pasted periodic window");
  }

  FamilyEval fe;
  fe.family = "appendix_plateau";
  fe.param = (double)n;
  fe.q = 2.0;
  // Edge-linear between vertex values, so both forms reduce to sums over
  // edges and the closed forms are exact for any mesh spacing.
  for (const Edge& e : g.edges) {
    const double va = vval[(std::size_t)e.a], vb = vval[(std::size_t)e.b];
    fe.kinetic += (vb - va) * (vb - va) / e.length;
    fe.mass += e.length * (va * va + va * vb + vb * vb) / 3.0;
  }
  fe.energy = 0.5 * fe.kinetic;
  fe.center_value = 1.0;
  fe.has_rayleigh = true;
  fe.rayleigh_bound = fe.kinetic / fe.mass;

  fe.u = fill_nodes(f, [&](std::int32_t e, std::int32_t j) {
    const Edge& ed = g.edges[(std::size_t)e];
    const double s = (double)j / (double)f.mesh->medges[(std::size_t)e].ncells;
    return vval[(std::size_t)ed.a] + s * (vval[(std::size_t)ed.b] - vval[(std::size_t)ed.a]);
  });
  return fe;
}

double rescaled_energy(const FamilyEval& fe, double mu_target) {
  if (mu_target <= 0)
    throw std::invalid_argument("family: target mass must be positive");
  const double lo = fe.mass_exact ? fe.mass : fe.mass_lo;
  const double hi = fe.mass_exact ? fe.mass : fe.mass_hi;
  if (!(lo > 0)) throw std::invalid_argument("family: member has zero mass");
  return 0.5 * (mu_target / lo) * fe.kinetic -
         std::pow(mu_target / hi, 0.5 * fe.q) * fe.vsum / fe.q;
}

} // namespace netgs
