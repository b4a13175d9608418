#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netgs {

// How a window stands in for the infinite graph at its cut vertices.
// Dirichlet pins cut DOFs to zero (window energies are then rigorous upper
// bounds for the infinite graph by zero-extension); natural keeps them free.
enum class Truncation { dirichlet, natural };

struct Vertex {
  double x = 0, y = 0;
  bool has_xy = false;
  std::int64_t lx = 0, ly = 0;   // exact lattice coordinates when lattice=true
  bool lattice = false;
  bool boundary = false;         // truncation cut point
};

struct Edge {
  std::int32_t a = 0, b = 0;
  double length = 1.0;
  std::int32_t ncells_hint = 0;  // 0 = let the mesher pick
};

struct GridInfo {
  std::int32_t radius = 0;       // window is [cx-r, cx+r] x [cy-r, cy+r]
  std::int64_t cx = 0, cy = 0;
};

struct StarInfo {
  int n_edges = 0;
  double length = 0;
  std::int32_t center = 0;
};

// Periodicity cell for pasted Z-periodic graphs. sigma maps each vertex of D
// to its partner in R of the next copy; D and R must be disjoint.
struct ZCell {
  struct CEdge { std::int32_t a, b; double length; };
  std::int32_t nv = 0;
  std::vector<CEdge> edges;
  std::vector<std::int32_t> D, R;
  std::vector<std::int32_t> sigma;       // size nv, sigma[d]=r for d in D, else -1
  std::int32_t defect_vertex = -1;       // in copy 0; must not lie in D; -1 = pick first
};

struct ZWindowEdge {
  std::int32_t cell = 0;                  // copy index, -n..n
  enum Kind : std::uint8_t { lk, dd, plain } kind = plain;
  bool d_at_a = false;                    // for lk edges: which endpoint is the D vertex
};

struct ZWindowInfo {
  std::int32_t half_copies = 0;           // n; 2n+1 copies total
  double l = 0;                           // min length over edges incident at exactly one D vertex
  std::int32_t m = 0;                     // count of such edges per cell
  double cell_len = 0;                    // |K|
  double ktilde_len = 0;                  // |K| - m*l
  std::vector<ZWindowEdge> edge_meta;     // parallel to MetricGraph::edges
  std::int32_t defect_vertex = -1;        // global id of the copy-0 defect vertex
};

struct MetricGraph {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::int32_t> defects;      // sorted, unique vertex ids
  Truncation truncation = Truncation::dirichlet;
  std::optional<GridInfo> grid;
  std::optional<StarInfo> star;
  std::optional<ZWindowInfo> zwindow;

  std::int32_t nv() const { return (std::int32_t)vertices.size(); }
  std::int32_t ne() const { return (std::int32_t)edges.size(); }
};

// Structural checks in the spirit of the admissible-graph class: nonempty,
// connected, positive finite edge lengths, bounded degree, ids in range,
// defects on existing vertices. Throws with a message naming the offender.
void validate(const MetricGraph& g);

std::vector<std::int32_t> degrees(const MetricGraph& g);
double total_length(const MetricGraph& g);

MetricGraph gen_star(int n_edges, double length, bool defect_at_center);
MetricGraph gen_grid_window(std::int32_t radius, std::int64_t cx = 0, std::int64_t cy = 0);
MetricGraph gen_zperiodic_window(const ZCell& cell, std::int32_t half_copies);

// helper cells used by tests and the CLI
ZCell make_chain_cell(double length = 1.0);
ZCell make_ladder_cell(double rail = 1.0, double rung = 1.0);

// shortest path metric from a source vertex (Dijkstra over edge lengths)
std::vector<double> graph_distance(const MetricGraph& g, std::int32_t source);

std::int32_t grid_vertex_at(const MetricGraph& g, std::int64_t ix, std::int64_t iy);

struct AnnulusEdge {
  std::int32_t edge;
  bool near_is_a;   // endpoint a is the one at distance n from the center
};
// Edges between lattice distance n and n+1 from a center vertex; full ring
// count is 4(2n+1). Throws if the ring is not strictly inside the window.
std::vector<AnnulusEdge> annulus_edges(const MetricGraph& g, std::int32_t center,
                                       std::int32_t n);

struct DefectSpec {
  enum class Kind { explicit_list, z_row, z2_lattice, gap_row } kind = Kind::explicit_list;
  std::vector<std::int32_t> ids;                   // explicit_list
  std::int64_t vx = 0, vy = 0;                     // z_row period vector
  std::int64_t v2x = 0, v2y = 0;                   // z2 second period vector
  std::vector<std::pair<std::int64_t, std::int64_t>> base;  // lattice offsets from center
  std::int64_t gap_max = 0;                        // gap_row: exclude i=n(n+1) <= gap_max
};

// Fills g.defects. Lattice specs take offsets relative to the grid center and
// keep every orbit point that lands inside the window.
void resolve_defects(MetricGraph& g, const DefectSpec& spec);

// Lattice translation of vertices by (dx,dy): result[v] = target vertex id or
// -1 when the image leaves the window. Grid windows only.
std::vector<std::int32_t> grid_translate_vertices(const MetricGraph& g,
                                                  std::int64_t dx, std::int64_t dy);

// Smallest k >= 1 such that the L-shaped lattice path 0 -> v1 (horizontal then
// vertical) and its translate by k*v2 share no lattice point. Used by the
// two-dimensional periodic defect-sum bound.
std::int64_t min_disjoint_shift(std::int64_t v1x, std::int64_t v1y,
                                std::int64_t v2x, std::int64_t v2y);

} // namespace netgs
