#pragma once
#include <cstdint>
#include <memory>
#include <vector>

#include "netgs/graph.hpp"

namespace netgs {

// Uniform P1 mesh over a metric graph. Node numbering: graph vertices keep
// their ids as the first nv nodes (one shared node per vertex, which is what
// enforces continuity across edges), then each edge appends its ncells-1
// interior nodes in order from endpoint a to endpoint b.
struct MeshedGraph {
  struct MEdge {
    std::int32_t ncells = 0;
    double h = 0;
    std::int32_t first_interior = 0;  // global id of the node nearest endpoint a
  };

  MetricGraph graph;
  std::vector<MEdge> medges;
  std::int32_t nnodes = 0;

  // global node id of local node j on edge e, j in [0, ncells]
  std::int32_t node(std::int32_t e, std::int32_t j) const {
    const MEdge& m = medges[e];
    if (j == 0) return graph.edges[e].a;
    if (j == m.ncells) return graph.edges[e].b;
    return m.first_interior + (j - 1);
  }
};

// Split every edge into ceil(length/h) uniform cells (at least one), unless
// the edge carries a positive ncells_hint, which wins.
MeshedGraph build_mesh(const MetricGraph& g, double h);

// Arc-length position of node j on edge e, measured from endpoint a.
inline double node_arclen(const MeshedGraph& m, std::int32_t e, std::int32_t j) {
  return m.medges[e].h * j;
}

} // namespace netgs
