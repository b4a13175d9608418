#include "netgs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "netgs/kernels.hpp"

namespace netgs {

namespace {

void check_q(double q) {
  if (!(q > 2.0 && q < 4.0))
    throw std::runtime_error("energy: exponent must lie in (2,4)");
}

void check_u(const Forms& f, const std::vector<double>& u) {
  if ((std::int32_t)u.size() != f.ndof)
    throw std::runtime_error("energy: dof vector length mismatch");
}

double vsum_q(const Forms& f, const double* u, double q) {
  double s = 0;
  for (std::size_t i = 0; i < f.defect_dofs.size(); ++i) {
    std::int32_t d = f.defect_dofs[i];
    if (d >= 0) s += f.defect_weights[i] * std::pow(std::abs(u[d]), q);
  }
  return s;
}

} // namespace

double energy(const Forms& f, const std::vector<double>& u, double q) {
  check_q(q);
  check_u(f, u);
  std::vector<double> work;
  double kin = f.K.quad(u, work);
  return 0.5 * kin - vsum_q(f, u.data(), q) / q;
}

std::vector<double> energy_gradient(const Forms& f, const std::vector<double>& u, double q) {
  check_q(q);
  check_u(f, u);
  std::vector<double> g;
  f.K.spmv(u, g);
  for (std::size_t i = 0; i < f.defect_dofs.size(); ++i) {
    std::int32_t d = f.defect_dofs[i];
    if (d < 0) continue;
    double v = u[d];
    if (v != 0) g[d] -= f.defect_weights[i] * std::pow(std::abs(v), q - 2) * v;
  }
  return g;
}

double lagrange_multiplier(const Forms& f, const std::vector<double>& u, double q,
                           double mu) {
  check_q(q);
  check_u(f, u);
  if (!(mu > 0)) throw std::runtime_error("energy: mass must be positive");
  std::vector<double> work;
  double kin = f.K.quad(u, work);
  return (vsum_q(f, u.data(), q) - kin) / mu;
}

ElResidual el_residual(const Forms& f, const std::vector<double>& u, double lambda_op,
                       double q) {
  check_q(q);
  check_u(f, u);
  std::vector<double> r, mu_vec;
  f.K.spmv(u, r);
  f.M.spmv(u, mu_vec);
  kern::axpy(-lambda_op, mu_vec.data(), r.data(), r.size());
  std::vector<char> is_defect(f.ndof, 0);
  for (std::size_t i = 0; i < f.defect_dofs.size(); ++i) {
    std::int32_t d = f.defect_dofs[i];
    if (d < 0) continue;
    double v = u[d];
    if (v != 0) r[d] -= f.defect_weights[i] * std::pow(std::abs(v), q - 2) * v;
    is_defect[d] = 1;
  }
  // local length weight: row sums of M equal the lumped nodal measure
  std::vector<double> ones(f.ndof, 1.0), lw;
  f.M.spmv(ones, lw);

  ElResidual out;
  const std::int32_t nv = f.mesh->graph.nv();
  for (std::int32_t d = 0; d < f.ndof; ++d) {
    double val = std::abs(r[d]) / lw[d];
    if (is_defect[d])
      out.max_defect = std::max(out.max_defect, val);
    else if (f.node_of_dof[d] < nv)
      out.max_kirchhoff = std::max(out.max_kirchhoff, val);
    else
      out.interior = std::max(out.interior, val);
  }
  return out;
}

namespace {

// one descent phase of projected gradient with BB steps; updates u in place
// and returns the final energy
struct DescentOut {
  double energy = 0;
  double grad_norm = 0;
  int iters = 0;
  bool converged = false;
};

DescentOut descend(const Forms& f, double q, double mu, const SolverOptions& opts,
                   int budget, std::vector<double>& u) {
  const std::size_t n = u.size();
  std::vector<double> work, g, mu_vec, trial, u_prev(n), pg_prev(n);
  DescentOut out;

  double mass = f.M.quad(u, work);
  if (!(mass > 0)) throw std::runtime_error("energy: initializer has zero mass");
  kern::scal(std::sqrt(mu / mass), u.data(), n);

  std::vector<double> ku;
  f.K.spmv(u, ku);
  double kin = kern::dot(u.data(), ku.data(), n);
  double vs = vsum_q(f, u.data(), q);
  double e = 0.5 * kin - vs / q;
  double alpha = 0;
  bool have_prev = false;

  for (int it = 0; it < budget; ++it) {
    out.iters = it + 1;
    // gradient and its projection along Mu
    g = ku;
    for (std::size_t i = 0; i < f.defect_dofs.size(); ++i) {
      std::int32_t d = f.defect_dofs[i];
      if (d < 0) continue;
      double v = u[d];
      if (v != 0) g[d] -= f.defect_weights[i] * std::pow(std::abs(v), q - 2) * v;
    }
    f.M.spmv(u, mu_vec);
    double theta = kern::dot(u.data(), g.data(), n) / mu;
    kern::axpy(-theta, mu_vec.data(), g.data(), n);  // g is now the projected gradient
    double gn = std::sqrt(kern::nrm2sq(g.data(), n));
    out.grad_norm = gn;

    double scale = (kin + vs + 1e-300) / std::sqrt(mu);
    if (gn <= opts.tol * scale) {
      out.converged = true;
      break;
    }

    if (have_prev) {
      // BB1 from the last accepted move
      double ss = 0, sy = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double si = u[i] - u_prev[i];
        ss += si * si;
        sy += si * (g[i] - pg_prev[i]);
      }
      alpha = sy > 0 ? ss / sy : 0;
    }
    double unorm = std::sqrt(kern::nrm2sq(u.data(), n));
    if (!(alpha > 0)) alpha = 0.1 * (unorm + 1e-300) / (gn + 1e-300);
    alpha = std::min(alpha, 1e3 * unorm / (gn + 1e-300));

    u_prev = u;
    pg_prev = g;

    bool accepted = false;
    double a = alpha;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      trial = u;
      kern::axpy(-a, g.data(), trial.data(), n);
      double m_trial = f.M.quad(trial, work);
      if (m_trial > 0) {
        kern::scal(std::sqrt(mu / m_trial), trial.data(), n);
        std::vector<double> ku_trial;
        f.K.spmv(trial, ku_trial);
        double kin_t = kern::dot(trial.data(), ku_trial.data(), n);
        double vs_t = vsum_q(f, trial.data(), q);
        double e_t = 0.5 * kin_t - vs_t / q;
        if (e_t <= e - opts.armijo_c * a * gn * gn) {
          u = std::move(trial);
          ku = std::move(ku_trial);
          kin = kin_t;
          vs = vs_t;
          e = e_t;
          accepted = true;
          break;
        }
      }
      a *= 0.5;
    }
    if (!accepted) break;  // line search exhausted; report the current iterate
    have_prev = true;
  }
  out.energy = e;
  return out;
}

std::vector<double> tent_vector(const Forms& f, const std::vector<std::int32_t>& centers,
                                double radius) {
  const MeshedGraph& m = *f.mesh;
  const MetricGraph& g = m.graph;
  std::vector<double> val(f.ndof, 0.0);
  for (std::int32_t c : centers) {
    std::vector<double> dist = graph_distance(g, c);
    for (std::int32_t e = 0; e < g.ne(); ++e) {
      const Edge& ed = g.edges[e];
      const MeshedGraph::MEdge& me = m.medges[e];
      for (std::int32_t j = 0; j <= me.ncells; ++j) {
        std::int32_t d = f.dof_of_node[m.node(e, j)];
        if (d < 0) continue;
        double s = me.h * j;
        double dd = std::min(dist[ed.a] + s, dist[ed.b] + (ed.length - s));
        val[d] += std::max(0.0, 1.0 - dd / radius);
      }
    }
  }
  return val;
}

std::vector<double> random_smoothed(const Forms& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> w(f.ndof);
  for (double& x : w) x = uni(rng);
  // a couple of mass-matrix averaging sweeps to take out the mesh-scale noise
  std::vector<double> ones(f.ndof, 1.0), lw, tmp;
  f.M.spmv(ones, lw);
  for (int pass = 0; pass < 2; ++pass) {
    f.M.spmv(w, tmp);
    for (std::int32_t i = 0; i < f.ndof; ++i) w[i] = tmp[i] / lw[i];
  }
  return w;
}

} // namespace

GroundStateResult minimize(const Forms& f, double q, double mu, const SolverOptions& opts) {
  check_q(q);
  if (!(mu > 0)) throw std::runtime_error("energy: mass must be positive");
  if (!(opts.tol > 0)) throw std::runtime_error("energy: tolerance must be positive");

  std::vector<std::vector<double>> starts = opts.initializers;
  if (!(opts.only_injected && !starts.empty())) {
    std::vector<std::int32_t> live_defects;
    for (std::size_t i = 0; i < f.defect_dofs.size(); ++i)
      if (f.defect_dofs[i] >= 0) live_defects.push_back(f.defect_vertices[i]);
    if (!live_defects.empty()) {
      double radius = std::min(2.0, 0.5 * total_length(f.mesh->graph));
      starts.push_back(tent_vector(f, {live_defects[0]}, radius));
      if (live_defects.size() > 1) starts.push_back(tent_vector(f, live_defects, radius));
    }
    for (int r = 0; r < opts.n_random; ++r)
      starts.push_back(random_smoothed(f, opts.seed + 1000 * (std::uint64_t)(r + 1)));
  }
  if (starts.empty()) throw std::runtime_error("energy: no usable initializer");

  GroundStateResult best;
  bool have = false;
  for (std::size_t si = 0; si < starts.size(); ++si) {
    std::vector<double> u = starts[si];
    if ((std::int32_t)u.size() != f.ndof)
      throw std::runtime_error("energy: initializer length mismatch");
    std::vector<double> work;
    if (!(f.M.quad(u, work) > 0)) continue;

    int budget = opts.max_iters;
    DescentOut da = descend(f, q, mu, opts, budget, u);
    int used = da.iters;
    if (opts.polish_abs) {
      kern::abs_inplace(u.data(), u.size());
      DescentOut db =
          descend(f, q, mu, opts, std::max(budget / 4, budget - used), u);
      used += db.iters;
      da.energy = db.energy;
      da.grad_norm = db.grad_norm;
      da.converged = db.converged;
    }

    bool better = !have;
    if (have) {
      double tol_tie = 1e-12 * (std::abs(best.energy) + std::abs(da.energy) + 1e-300);
      if (da.energy < best.energy - tol_tie)
        better = true;
      else if (da.energy <= best.energy + tol_tie && da.grad_norm < best.grad_norm)
        better = true;
    }
    if (better) {
      best.u = std::move(u);
      best.energy = da.energy;
      best.grad_norm = da.grad_norm;
      best.iterations = used;
      best.winner = (int)si;
      best.converged = da.converged;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("energy: every initializer had zero mass");

  std::vector<double> work;
  best.mass = f.M.quad(best.u, work);
  best.lagrange = lagrange_multiplier(f, best.u, q, mu);
  best.residual = el_residual(f, best.u, -best.lagrange, q);
  return best;
}

std::vector<double> grid_translate_function(const Forms& f, const std::vector<double>& u,
                                            std::int64_t dx, std::int64_t dy) {
  check_u(f, u);
  const MeshedGraph& m = *f.mesh;
  const MetricGraph& g = m.graph;
  if (!g.grid) throw std::runtime_error("translation: grid windows only");

  std::vector<std::int32_t> vmap = grid_translate_vertices(g, dx, dy);
  std::unordered_map<std::int64_t, std::int32_t> edge_of;
  edge_of.reserve(g.ne() * 2);
  for (std::int32_t e = 0; e < g.ne(); ++e)
    edge_of[(std::int64_t)g.edges[e].a * g.nv() + g.edges[e].b] = e;

  // reverse map: interior node -> (edge, local index)
  std::vector<std::int32_t> node_edge(m.nnodes, -1), node_j(m.nnodes, 0);
  for (std::int32_t e = 0; e < g.ne(); ++e)
    for (std::int32_t j = 1; j < m.medges[e].ncells; ++j) {
      node_edge[m.node(e, j)] = e;
      node_j[m.node(e, j)] = j;
    }

  const double clip = 1e-13 * (kern::max_abs(u.data(), u.size()) + 1e-300);
  std::vector<double> w(f.ndof, 0.0);
  for (std::int32_t d = 0; d < f.ndof; ++d) {
    double val = u[d];
    if (std::abs(val) <= clip) continue;
    std::int32_t node = f.node_of_dof[d];
    std::int32_t img_node;
    if (node < g.nv()) {
      std::int32_t iv = vmap[node];
      if (iv < 0) throw std::runtime_error("translation: support leaves the window");
      img_node = iv;
    } else {
      std::int32_t e = node_edge[node];
      std::int32_t ia = vmap[g.edges[e].a], ib = vmap[g.edges[e].b];
      if (ia < 0 || ib < 0)
        throw std::runtime_error("translation: support leaves the window");
      auto it = edge_of.find((std::int64_t)ia * g.nv() + ib);
      if (it == edge_of.end())
        throw std::runtime_error("translation: image edge missing from the window");
      std::int32_t e2 = it->second;
      if (m.medges[e2].ncells != m.medges[e].ncells)
        throw std::runtime_error("translation: image edge meshed differently");
      img_node = m.node(e2, node_j[node]);
    }
    std::int32_t d2 = f.dof_of_node[img_node];
    if (d2 < 0)
      throw std::runtime_error("translation: support lands on a pinned boundary node");
    w[d2] = val;
  }
  return w;
}

TranslationProbe translation_probe(const Forms& f, const std::vector<double>& u, double q,
                                   std::int64_t dx, std::int64_t dy) {
  TranslationProbe out;
  out.e_before = energy(f, u, q);
  std::vector<double> w = grid_translate_function(f, u, dx, dy);
  out.e_after = energy(f, w, q);
  out.decreased = out.e_after < out.e_before;
  return out;
}

} // namespace netgs
