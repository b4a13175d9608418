#include "netgs/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace netgs {

Csr csr_from_triplets(std::int32_t n,
                      std::vector<std::int32_t> rows,
                      std::vector<std::int32_t> cols,
                      std::vector<double> vals) {
  if (rows.size() != cols.size() || rows.size() != vals.size())
    throw std::runtime_error("csr: triplet arrays differ in length");
  const std::size_t nnz_in = rows.size();
  std::vector<std::size_t> order(nnz_in);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (rows[i] != rows[j]) return rows[i] < rows[j];
    return cols[i] < cols[j];
  });

  Csr a;
  a.n = n;
  a.rowptr.assign(n + 1, 0);
  a.col.reserve(nnz_in);
  a.val.reserve(nnz_in);
  // rowptr[r+1] holds the running entry count of row r while filling; sorted
  // order makes duplicates adjacent, so merging only needs the last entry
  for (std::size_t k = 0; k < nnz_in; ++k) {
    std::int32_t r = rows[order[k]], c = cols[order[k]];
    if (r < 0 || r >= n || c < 0 || c >= n)
      throw std::runtime_error("csr: triplet index out of range");
    double v = vals[order[k]];
    if (a.rowptr[r + 1] > 0 && a.col.back() == c) {
      a.val.back() += v;
    } else {
      a.col.push_back(c);
      a.val.push_back(v);
      a.rowptr[r + 1]++;
    }
  }
  for (std::int32_t r = 0; r < n; ++r) a.rowptr[r + 1] += a.rowptr[r];
  return a;
}

namespace {

struct Builder {
  std::vector<std::int32_t> rows, cols;
  std::vector<double> vals;
  void add(std::int32_t r, std::int32_t c, double v) {
    rows.push_back(r);
    cols.push_back(c);
    vals.push_back(v);
  }
};

Forms assemble_impl(std::shared_ptr<const MeshedGraph> mesh,
                    const std::vector<double>* g_nodal, bool lumped) {
  const MeshedGraph& m = *mesh;
  const MetricGraph& g = m.graph;

  Forms f;
  f.mesh = std::move(mesh);
  f.lumped = lumped;
  f.dof_of_node.assign(m.nnodes, -1);

  const bool dirichlet = g.truncation == Truncation::dirichlet;
  std::int32_t nd = 0;
  for (std::int32_t v = 0; v < g.nv(); ++v)
    if (!(dirichlet && g.vertices[v].boundary)) f.dof_of_node[v] = nd++;
  for (std::int32_t i = g.nv(); i < m.nnodes; ++i) f.dof_of_node[i] = nd++;
  f.ndof = nd;
  f.node_of_dof.resize(nd);
  for (std::int32_t i = 0; i < m.nnodes; ++i)
    if (f.dof_of_node[i] >= 0) f.node_of_dof[f.dof_of_node[i]] = i;

  Builder bk, bm;
  for (std::int32_t e = 0; e < g.ne(); ++e) {
    const MeshedGraph::MEdge& me = m.medges[e];
    const double h = me.h;
    for (std::int32_t c = 0; c < me.ncells; ++c) {
      std::int32_t n0 = m.node(e, c), n1 = m.node(e, c + 1);
      std::int32_t d0 = f.dof_of_node[n0], d1 = f.dof_of_node[n1];
      double k00, k01, k11, m00, m01, m11;
      if (g_nodal) {
        // weight linear on the cell: g u' w' integrates the mean of g,
        // g u w picks up the exact cubic moments
        const double g0 = (*g_nodal)[n0], g1 = (*g_nodal)[n1];
        const double gm = 0.5 * (g0 + g1);
        k00 = gm / h; k01 = -gm / h; k11 = gm / h;
        m00 = h * (g0 / 4 + g1 / 12);
        m01 = h * (g0 / 12 + g1 / 12);
        m11 = h * (g0 / 12 + g1 / 4);
      } else {
        k00 = 1.0 / h; k01 = -1.0 / h; k11 = 1.0 / h;
        m00 = h / 3; m01 = h / 6; m11 = h / 3;
      }
      if (lumped) {
        m00 += m01; m11 += m01; m01 = 0;
      }
      if (d0 >= 0) { bk.add(d0, d0, k00); bm.add(d0, d0, m00); }
      if (d1 >= 0) { bk.add(d1, d1, k11); bm.add(d1, d1, m11); }
      if (d0 >= 0 && d1 >= 0) {
        bk.add(d0, d1, k01); bk.add(d1, d0, k01);
        if (m01 != 0) { bm.add(d0, d1, m01); bm.add(d1, d0, m01); }
      }
    }
  }
  f.K = csr_from_triplets(nd, std::move(bk.rows), std::move(bk.cols), std::move(bk.vals));
  f.M = csr_from_triplets(nd, std::move(bm.rows), std::move(bm.cols), std::move(bm.vals));

  f.defect_vertices = g.defects;
  f.defect_dofs.reserve(g.defects.size());
  for (std::int32_t v : g.defects) f.defect_dofs.push_back(f.dof_of_node[v]);
  f.defect_weights.assign(g.defects.size(), 1.0);
  return f;
}

} // namespace

Forms assemble(std::shared_ptr<const MeshedGraph> mesh, bool lumped) {
  return assemble_impl(std::move(mesh), nullptr, lumped);
}

Forms assemble_weighted(std::shared_ptr<const MeshedGraph> mesh,
                        const std::vector<double>& g_nodal, bool lumped) {
  if ((std::int32_t)g_nodal.size() != mesh->nnodes)
    throw std::runtime_error("assembly: weight vector length mismatch");
  return assemble_impl(std::move(mesh), &g_nodal, lumped);
}

std::vector<double> interpolate(const Forms& f, const NodeFn& fn) {
  const MeshedGraph& m = *f.mesh;
  const MetricGraph& g = m.graph;
  std::vector<double> u(f.ndof, 0.0);
  std::vector<char> seen(m.nnodes, 0);
  for (std::int32_t e = 0; e < g.ne(); ++e) {
    const Edge& ed = g.edges[e];
    const Vertex& va = g.vertices[ed.a];
    const Vertex& vb = g.vertices[ed.b];
    const bool xy = va.has_xy && vb.has_xy;
    const MeshedGraph::MEdge& me = m.medges[e];
    for (std::int32_t j = 0; j <= me.ncells; ++j) {
      std::int32_t node = m.node(e, j);
      if (seen[node]) continue;
      seen[node] = 1;
      std::int32_t d = f.dof_of_node[node];
      if (d < 0) continue;
      EdgePoint p;
      p.edge = e;
      p.s = me.h * j;
      p.t = p.s / ed.length;
      p.has_xy = xy;
      if (xy) {
        p.x = va.x + (vb.x - va.x) * p.t;
        p.y = va.y + (vb.y - va.y) * p.t;
      }
      u[d] = fn(p);
    }
  }
  return u;
}

std::vector<double> to_nodes(const Forms& f, const std::vector<double>& u) {
  if ((std::int32_t)u.size() != f.ndof)
    throw std::runtime_error("assembly: dof vector length mismatch");
  std::vector<double> w(f.mesh->nnodes, 0.0);
  for (std::int32_t d = 0; d < f.ndof; ++d) w[f.node_of_dof[d]] = u[d];
  return w;
}

Functionals functionals(const Forms& f, const std::vector<double>& u) {
  if ((std::int32_t)u.size() != f.ndof)
    throw std::runtime_error("assembly: dof vector length mismatch");
  Functionals out;
  std::vector<double> work;
  out.kinetic = f.K.quad(u, work);
  out.mass = f.M.quad(u, work);
  out.sup_norm = kern::max_abs(u.data(), u.size());
  out.vertex_values.reserve(f.defect_dofs.size());
  for (std::int32_t d : f.defect_dofs)
    out.vertex_values.push_back(d >= 0 ? u[d] : 0.0);
  return out;
}

double vertex_sum_q(const Forms& f, const std::vector<double>& u, double q) {
  double s = 0;
  for (std::size_t i = 0; i < f.defect_dofs.size(); ++i) {
    std::int32_t d = f.defect_dofs[i];
    if (d >= 0) s += f.defect_weights[i] * std::pow(std::abs(u[d]), q);
  }
  return s;
}

namespace {

// 2-point Gauss nodes on [0,1]
constexpr double kGaussA = 0.211324865405187118;  // (1 - 1/sqrt(3)) / 2
constexpr double kGaussB = 0.788675134594812882;

double lp_cells(const Forms& f, const std::vector<double>& u, double p,
                const std::vector<std::int32_t>* sub_edges) {
  const MeshedGraph& m = *f.mesh;
  std::vector<double> w = to_nodes(f, u);
  double total = 0;
  auto do_edge = [&](std::int32_t e) {
    if (e < 0 || e >= m.graph.ne())
      throw std::out_of_range("assembly: subgraph edge id out of range");
    const MeshedGraph::MEdge& me = m.medges[e];
    double acc = 0;
    for (std::int32_t c = 0; c < me.ncells; ++c) {
      const double u0 = w[m.node(e, c)], u1 = w[m.node(e, c + 1)];
      const double va = u0 + (u1 - u0) * kGaussA;
      const double vb = u0 + (u1 - u0) * kGaussB;
      acc += 0.5 * (std::pow(std::abs(va), p) + std::pow(std::abs(vb), p));
    }
    total += acc * me.h;
  };
  if (sub_edges) {
    for (std::int32_t e : *sub_edges) do_edge(e);
  } else {
    for (std::int32_t e = 0; e < m.graph.ne(); ++e) do_edge(e);
  }
  return total;
}

} // namespace

double lp_integral(const Forms& f, const std::vector<double>& u, double p) {
  return lp_cells(f, u, p, nullptr);
}

double lp_norm(const Forms& f, const std::vector<double>& u, double p) {
  return std::pow(lp_integral(f, u, p), 1.0 / p);
}

double lp_integral_on(const Forms& f, const std::vector<double>& u, double p,
                      const std::vector<std::int32_t>& sub_edges) {
  return lp_cells(f, u, p, &sub_edges);
}

GnRatios gn_ratios(const Forms& f, const std::vector<double>& u, double p, double q,
                   const std::vector<std::int32_t>* sub_edges) {
  GnRatios r;
  r.p = p;
  r.q = q;
  Functionals fn = functionals(f, u);
  const double l2 = std::sqrt(fn.mass);
  const double dl2 = std::sqrt(std::max(fn.kinetic, 0.0));
  if (l2 == 0 || dl2 == 0) return r;  // constants carry no derivative information

  const double lppow = lp_integral(f, u, p);
  const double lqpow = lp_integral(f, u, q);

  r.gn1d = lppow / (std::pow(l2, p / 2 + 1) * std::pow(dl2, p / 2 - 1));
  r.gn1d_def = true;
  r.gninf = fn.sup_norm * fn.sup_norm / (l2 * dl2);
  r.gninf_def = true;
  if (f.mesh->graph.grid) {
    r.gn2d = lppow / (l2 * l2 * std::pow(dl2, p - 2));
    r.gn2d_def = true;
  }
  double vden = lqpow + std::pow(l2, q / 2) * std::pow(dl2, q / 2);
  if (vden > 0) {
    double vsum = 0;
    for (double v : fn.vertex_values) vsum += std::pow(std::abs(v), q);
    r.vertex = vsum / vden;
    r.vertex_def = true;
  }
  if (sub_edges) {
    r.subgraph = lp_integral_on(f, u, q, *sub_edges) / (l2 * std::pow(dl2, q - 1));
    r.subgraph_def = true;
  }
  return r;
}

} // namespace netgs
