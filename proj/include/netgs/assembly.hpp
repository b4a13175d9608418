#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "netgs/csr.hpp"
#include "netgs/mesh.hpp"

namespace netgs {

// A point on the metric graph, handed to interpolation callbacks. s is the
// arclength from endpoint a of the edge, t = s/length. Planar coordinates are
// filled in when both endpoints carry them (linear along the edge, which is
// exact for straight lattice edges).
struct EdgePoint {
  std::int32_t edge = 0;
  double s = 0;
  double t = 0;
  double x = 0, y = 0;
  bool has_xy = false;
};

using NodeFn = std::function<double(const EdgePoint&)>;

// P1 forms over a meshed graph: uKu = integral of u'^2, uMu = integral of u^2
// (both exact for P1 fields). Dirichlet truncation eliminates boundary-vertex
// DOFs, so every coefficient vector implicitly vanishes at the cut.
struct Forms {
  std::shared_ptr<const MeshedGraph> mesh;
  Csr K, M;
  std::vector<std::int32_t> dof_of_node;   // -1 for eliminated nodes
  std::vector<std::int32_t> node_of_dof;
  std::int32_t ndof = 0;
  std::vector<std::int32_t> defect_vertices;  // copied from the graph
  std::vector<std::int32_t> defect_dofs;      // -1 when pinned by the truncation
  std::vector<double> defect_weights;         // per-defect strength, default 1
  bool lumped = false;
};

Forms assemble(std::shared_ptr<const MeshedGraph> mesh, bool lumped = false);

// Same layout but with a piecewise-linear weight g (nodal values) multiplying
// both forms: uKu = integral g u'^2, uMu = integral g u^2. Exact for P1 u and
// P1 g. Used by the reduced half-line problem.
Forms assemble_weighted(std::shared_ptr<const MeshedGraph> mesh,
                        const std::vector<double>& g_nodal, bool lumped = false);

// Nodal interpolant as a DOF vector; eliminated nodes are skipped.
std::vector<double> interpolate(const Forms& f, const NodeFn& fn);

// Expand a DOF vector to all mesh nodes (eliminated nodes read zero).
std::vector<double> to_nodes(const Forms& f, const std::vector<double>& u);

struct Functionals {
  double mass = 0;
  double kinetic = 0;
  double sup_norm = 0;                 // max nodal |u|, exact for P1
  std::vector<double> vertex_values;   // u at each defect vertex
};

Functionals functionals(const Forms& f, const std::vector<double>& u);

// sum of w_i |u(v_i)|^q over the defect list
double vertex_sum_q(const Forms& f, const std::vector<double>& u, double q);

// integral of |u|^p by 2-point Gauss per cell (exact for p=2), and the norm
double lp_integral(const Forms& f, const std::vector<double>& u, double p);
double lp_norm(const Forms& f, const std::vector<double>& u, double p);

// lp integral restricted to an edge subset
double lp_integral_on(const Forms& f, const std::vector<double>& u, double p,
                      const std::vector<std::int32_t>& sub_edges);

// Ratios of the interpolation-type inequalities used throughout: each bound
// says the numerator is controlled by the denominator up to a constant, so
// the observed ratio across a corpus is an empirical value for that constant.
// A ratio is undefined (flag false) when its denominator vanishes, which for
// nonzero u happens exactly when the derivative term does.
struct GnRatios {
  double p = 0, q = 0;
  double gn1d = 0;      // |u|_p^p / (|u|_2^{p/2+1} |u'|_2^{p/2-1})
  double gninf = 0;     // |u|_inf^2 / (|u|_2 |u'|_2)
  double gn2d = 0;      // |u|_p^p / (|u|_2^2 |u'|_2^{p-2}), grid windows only
  double vertex = 0;    // sum_V |u(v)|^q / (|u|_q^q + |u|_2^{q/2} |u'|_2^{q/2})
  double subgraph = 0;  // |u|_{q,G'}^q / (|u|_2 |u'|_2^{q-1})
  bool gn1d_def = false, gninf_def = false, gn2d_def = false;
  bool vertex_def = false, subgraph_def = false;
};

GnRatios gn_ratios(const Forms& f, const std::vector<double>& u, double p, double q,
                   const std::vector<std::int32_t>* sub_edges = nullptr);

} // namespace netgs
