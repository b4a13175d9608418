#include "netgs/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace netgs {

MeshedGraph build_mesh(const MetricGraph& g, double h) {
  if (!(h > 0)) throw std::runtime_error("mesh: spacing must be positive");
  MeshedGraph m;
  m.graph = g;
  m.medges.resize(g.ne());
  std::int32_t next = g.nv();
  for (std::int32_t e = 0; e < g.ne(); ++e) {
    const Edge& ed = g.edges[e];
    std::int32_t nc = ed.ncells_hint;
    if (nc <= 0) {
      nc = (std::int32_t)std::ceil(ed.length / h - 1e-12);
      if (nc < 1) nc = 1;
    }
    MeshedGraph::MEdge& me = m.medges[e];
    me.ncells = nc;
    me.h = ed.length / nc;
    me.first_interior = next;
    next += nc - 1;
  }
  m.nnodes = next;
  return m;
}

} // namespace netgs
