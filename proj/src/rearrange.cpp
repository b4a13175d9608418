#include "netgs/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netgs/graph.hpp"
#include "netgs/mesh.hpp"

namespace netgs {

namespace {

struct RingSetup {
  std::int32_t nmax = -1;                  // outermost annulus strictly inside
  std::vector<std::int64_t> ring;          // lattice distance per vertex
  std::vector<std::vector<AnnulusEdge>> annuli;
  std::int32_t ncells = 0;
  double sup = 0;
};

RingSetup setup_rings(const Forms& f, const std::vector<double>& u,
                      std::int32_t center) {
  const MetricGraph& g = f.mesh->graph;
  if (!g.grid)
    throw std::invalid_argument("rearrange: grid windows only");
  if (center < 0 || center >= g.nv() || !g.vertices[(std::size_t)center].lattice)
    throw std::invalid_argument("rearrange: center must be a lattice vertex");
  if ((std::int32_t)u.size() != f.ndof)
    throw std::invalid_argument("rearrange: coefficient size mismatch");

  RingSetup rs;
  const Vertex& c = g.vertices[(std::size_t)center];
  rs.ring.resize((std::size_t)g.nv());
  for (std::int32_t v = 0; v < g.nv(); ++v) {
    const Vertex& vv = g.vertices[(std::size_t)v];
    rs.ring[(std::size_t)v] = std::llabs(vv.lx - c.lx) + std::llabs(vv.ly - c.ly);
  }
  const std::int64_t off = std::max(std::llabs(c.lx - g.grid->cx),
                                    std::llabs(c.ly - g.grid->cy));
  rs.nmax = (std::int32_t)(g.grid->radius - off - 2);
  if (rs.nmax < 0)
    throw std::invalid_argument("rearrange: window leaves no room around the center");

  for (double x : u) rs.sup = std::max(rs.sup, std::fabs(x));
  const double clip = 1e-12 * rs.sup;

  // Any edge whose nearer endpoint lies beyond the last full annulus is
  // outside the profiled region, so the function must vanish there.
  for (std::int32_t e = 0; e < g.ne(); ++e) {
    const Edge& ed = g.edges[(std::size_t)e];
    if (std::min(rs.ring[(std::size_t)ed.a], rs.ring[(std::size_t)ed.b]) <= rs.nmax)
      continue;
    for (std::int32_t j = 0; j <= f.mesh->medges[(std::size_t)e].ncells; ++j) {
      const std::int32_t d = f.dof_of_node[(std::size_t)f.mesh->node(e, j)];
      if (d >= 0 && std::fabs(u[(std::size_t)d]) > clip)
        throw std::invalid_argument("rearrange: support reaches the window boundary");
    }
  }

  rs.annuli.resize((std::size_t)rs.nmax + 1);
  rs.ncells = -1;
  for (std::int32_t n = 0; n <= rs.nmax; ++n) {
    rs.annuli[(std::size_t)n] = annulus_edges(g, center, n);
    for (const AnnulusEdge& ae : rs.annuli[(std::size_t)n]) {
      const std::int32_t nc = f.mesh->medges[(std::size_t)ae.edge].ncells;
      if (rs.ncells < 0) rs.ncells = nc;
      if (nc != rs.ncells)
        throw std::invalid_argument("rearrange: annulus edges must share one mesh");
    }
  }
  return rs;
}

double value_at(const Forms& f, const std::vector<double>& u,
                const AnnulusEdge& ae, std::int32_t ncells, std::int32_t j) {
  const std::int32_t local = ae.near_is_a ? j : ncells - j;
  const std::int32_t d = f.dof_of_node[(std::size_t)f.mesh->node(ae.edge, local)];
  return d >= 0 ? u[(std::size_t)d] : 0.0;
}

} // namespace

RadialProfile radial_profile(const Forms& f, const std::vector<double>& u,
                             std::int32_t center) {
  const RingSetup rs = setup_rings(f, u, center);
  RadialProfile p;
  p.center = center;
  p.ncells = rs.ncells;
  p.annuli.resize((std::size_t)rs.nmax + 1);
  for (std::int32_t n = 0; n <= rs.nmax; ++n) {
    RadialProfile::Annulus& an = p.annuli[(std::size_t)n];
    an.n = n;
    an.edges = (std::int32_t)rs.annuli[(std::size_t)n].size();
    an.mean.assign((std::size_t)rs.ncells + 1, 0.0);
    an.variance.assign((std::size_t)rs.ncells + 1, 0.0);
    for (std::int32_t j = 0; j <= rs.ncells; ++j) {
      double s = 0, s2 = 0;
      for (const AnnulusEdge& ae : rs.annuli[(std::size_t)n]) {
        const double v = value_at(f, u, ae, rs.ncells, j);
        s += v;
        s2 += v * v;
      }
      const double m = s / an.edges;
      an.mean[(std::size_t)j] = m;
      an.variance[(std::size_t)j] = std::max(0.0, s2 / an.edges - m * m);
    }
  }
  return p;
}

std::vector<double> spherical_mean(const Forms& f, const std::vector<double>& u,
                                   std::int32_t center) {
  const RingSetup rs = setup_rings(f, u, center);
  const double clip = 1e-12 * rs.sup;
  for (double x : u)
    if (x < -clip)
      throw std::invalid_argument("rearrange: input must be nonnegative");

  const MetricGraph& g = f.mesh->graph;
  std::vector<double> w((std::size_t)f.ndof, 0.0);

  // Sphere means over the 4m vertices of each ring; ring 0 is the center.
  std::vector<double> ringsum((std::size_t)rs.nmax + 2, 0.0);
  std::vector<std::int64_t> ringcnt((std::size_t)rs.nmax + 2, 0);
  for (std::int32_t v = 0; v < g.nv(); ++v) {
    const std::int64_t m = rs.ring[(std::size_t)v];
    if (m > rs.nmax + 1) continue;
    const std::int32_t d = f.dof_of_node[(std::size_t)v];
    ringsum[(std::size_t)m] += d >= 0 ? u[(std::size_t)d] : 0.0;
    ringcnt[(std::size_t)m] += 1;
  }
  for (std::int64_t m = 0; m <= rs.nmax + 1; ++m) {
    const std::int64_t expect = m == 0 ? 1 : 4 * m;
    if (ringcnt[(std::size_t)m] != expect)
      throw std::invalid_argument("rearrange: ring is cut by the window");
  }
  for (std::int32_t v = 0; v < g.nv(); ++v) {
    const std::int64_t m = rs.ring[(std::size_t)v];
    if (m > rs.nmax + 1) continue;
    const std::int32_t d = f.dof_of_node[(std::size_t)v];
    if (d >= 0) w[(std::size_t)d] = ringsum[(std::size_t)m] / (double)ringcnt[(std::size_t)m];
  }

  // Interior nodes take the matched-parameter mean over their annulus.
  for (std::int32_t n = 0; n <= rs.nmax; ++n) {
    const auto& aedges = rs.annuli[(std::size_t)n];
    for (std::int32_t j = 1; j < rs.ncells; ++j) {
      double s = 0;
      for (const AnnulusEdge& ae : aedges) s += value_at(f, u, ae, rs.ncells, j);
      const double m = s / (double)aedges.size();
      for (const AnnulusEdge& ae : aedges) {
        const std::int32_t local = ae.near_is_a ? j : rs.ncells - j;
        const std::int32_t d =
            f.dof_of_node[(std::size_t)f.mesh->node(ae.edge, local)];
        if (d >= 0) w[(std::size_t)d] = m;
      }
    }
  }
  return w;
}

MonotoneCheck monotone_check(const RadialProfile& p, double tol) {
  MonotoneCheck out;
  double prev = 0;
  bool have_prev = false;
  for (const auto& an : p.annuli) {
    for (std::int32_t j = 0; j < (std::int32_t)an.mean.size(); ++j) {
      const double v = an.mean[(std::size_t)j];
      if (have_prev && v > prev + tol) {
        out.monotone = false;
        out.annulus = an.n;
        out.index = j;
        out.rise = v - prev;
        return out;
      }
      prev = v;
      have_prev = true;
    }
  }
  return out;
}

std::vector<double> profile_samples(const RadialProfile& p) {
  std::vector<double> s;
  for (std::size_t a = 0; a < p.annuli.size(); ++a) {
    const auto& mean = p.annuli[a].mean;
    for (std::size_t j = a == 0 ? 0 : 1; j < mean.size(); ++j)
      s.push_back(mean[j]);
  }
  return s;
}

double profile_mass(const RadialProfile& p) {
  double total = 0;
  const double h = 1.0 / (double)p.ncells;
  for (const auto& an : p.annuli) {
    double cell = 0;
    for (std::int32_t j = 0; j < p.ncells; ++j) {
      const double a = an.mean[(std::size_t)j], b = an.mean[(std::size_t)j + 1];
      cell += h * (a * a + a * b + b * b) / 3.0;
    }
    total += (double)an.edges * cell;
  }
  return total;
}

double profile_kinetic(const RadialProfile& p) {
  double total = 0;
  const double h = 1.0 / (double)p.ncells;
  for (const auto& an : p.annuli) {
    double cell = 0;
    for (std::int32_t j = 0; j < p.ncells; ++j) {
      const double d = an.mean[(std::size_t)j + 1] - an.mean[(std::size_t)j];
      cell += d * d / h;
    }
    total += (double)an.edges * cell;
  }
  return total;
}

} // namespace netgs
