#include "netgs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace netgs {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error("graph: " + msg); }
}

std::vector<std::int32_t> degrees(const MetricGraph& g) {
  std::vector<std::int32_t> d(g.nv(), 0);
  for (const Edge& e : g.edges) { d[e.a]++; d[e.b]++; }
  return d;
}

double total_length(const MetricGraph& g) {
  double s = 0;
  for (const Edge& e : g.edges) s += e.length;
  return s;
}

void validate(const MetricGraph& g) {
  if (g.vertices.empty()) fail("no vertices");
  if (g.edges.empty()) fail("no edges");
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const Edge& e = g.edges[i];
    if (e.a < 0 || e.a >= g.nv() || e.b < 0 || e.b >= g.nv())
      fail("edge " + std::to_string(i) + " references missing vertex");
    if (e.a == e.b) fail("edge " + std::to_string(i) + " is a loop");
    if (!(e.length > 0) || !std::isfinite(e.length))
      fail("edge " + std::to_string(i) + " has non-positive length");
  }
  // connectivity
  std::vector<std::vector<std::int32_t>> adj(g.nv());
  for (const Edge& e : g.edges) { adj[e.a].push_back(e.b); adj[e.b].push_back(e.a); }
  std::vector<char> seen(g.nv(), 0);
  std::queue<std::int32_t> q;
  q.push(0); seen[0] = 1;
  std::int32_t reached = 1;
  while (!q.empty()) {
    std::int32_t v = q.front(); q.pop();
    for (std::int32_t w : adj[v]) if (!seen[w]) { seen[w] = 1; reached++; q.push(w); }
  }
  if (reached != g.nv()) {
    for (std::int32_t v = 0; v < g.nv(); ++v)
      if (!seen[v]) fail("vertex " + std::to_string(v) + " is disconnected");
  }
  for (std::int32_t v = 0; v < g.nv(); ++v)
    if (adj[v].empty()) fail("vertex " + std::to_string(v) + " is isolated");
  std::set<std::int32_t> ds(g.defects.begin(), g.defects.end());
  if (ds.size() != g.defects.size()) fail("duplicate defect vertex");
  for (std::int32_t v : g.defects)
    if (v < 0 || v >= g.nv()) fail("defect vertex " + std::to_string(v) + " does not exist");
}

MetricGraph gen_star(int n_edges, double length, bool defect_at_center) {
  if (n_edges < 1) fail("star needs at least one edge");
  if (!(length > 0)) fail("star edge length must be positive");
  MetricGraph g;
  g.vertices.resize(1 + n_edges);
  g.vertices[0].has_xy = true;  // center at origin, leaves on a circle (plots only)
  for (int k = 0; k < n_edges; ++k) {
    Vertex& v = g.vertices[1 + k];
    double th = 2.0 * M_PI * k / n_edges;
    v.x = length * std::cos(th);
    v.y = length * std::sin(th);
    v.has_xy = true;
    v.boundary = true;
    g.edges.push_back({0, (std::int32_t)(1 + k), length, 0});
  }
  if (defect_at_center) g.defects = {0};
  g.star = StarInfo{n_edges, length, 0};
  return g;
}

MetricGraph gen_grid_window(std::int32_t radius, std::int64_t cx, std::int64_t cy) {
  if (radius < 1) fail("grid window radius must be >= 1");
  MetricGraph g;
  const std::int64_t w = 2 * (std::int64_t)radius + 1;
  g.vertices.resize(w * w);
  auto id = [&](std::int64_t ix, std::int64_t iy) {
    return (std::int32_t)((ix - cx + radius) * w + (iy - cy + radius));
  };
  for (std::int64_t ix = cx - radius; ix <= cx + radius; ++ix)
    for (std::int64_t iy = cy - radius; iy <= cy + radius; ++iy) {
      Vertex& v = g.vertices[id(ix, iy)];
      v.lx = ix; v.ly = iy; v.lattice = true;
      v.x = (double)ix; v.y = (double)iy; v.has_xy = true;
      v.boundary = (std::max(std::llabs(ix - cx), std::llabs(iy - cy)) == radius);
      if (ix < cx + radius) g.edges.push_back({id(ix, iy), id(ix + 1, iy), 1.0, 0});
      if (iy < cy + radius) g.edges.push_back({id(ix, iy), id(ix, iy + 1), 1.0, 0});
    }
  g.grid = GridInfo{radius, cx, cy};
  return g;
}

namespace {
void validate_cell(const ZCell& c) {
  if (c.nv < 1) fail("cell has no vertices");
  if (c.edges.empty()) fail("cell has no edges");
  for (const auto& e : c.edges) {
    if (e.a < 0 || e.a >= c.nv || e.b < 0 || e.b >= c.nv) fail("cell edge references missing vertex");
    if (!(e.length > 0)) fail("cell edge has non-positive length");
  }
  std::set<std::int32_t> D(c.D.begin(), c.D.end()), R(c.R.begin(), c.R.end());
  if (D.size() != c.D.size() || R.size() != c.R.size()) fail("duplicate vertex in D or R");
  if (D.size() != R.size()) fail("D and R must have equal size");
  if (D.empty()) fail("D must be nonempty");
  for (std::int32_t v : c.D) if (R.count(v)) fail("D and R must be disjoint (vertex " + std::to_string(v) + ")");
  if ((std::int32_t)c.sigma.size() != c.nv) fail("sigma must have one entry per cell vertex");
  std::set<std::int32_t> image;
  for (std::int32_t v = 0; v < c.nv; ++v) {
    bool inD = D.count(v) > 0;
    if (inD) {
      if (c.sigma[v] < 0 || !R.count(c.sigma[v])) fail("sigma must map D onto R");
      if (!image.insert(c.sigma[v]).second) fail("sigma must be injective");
    } else if (c.sigma[v] != -1) {
      fail("sigma defined outside D");
    }
  }
}
} // namespace

ZCell make_chain_cell(double length) {
  ZCell c;
  c.nv = 2;
  c.edges = {{0, 1, length}};
  c.D = {1};
  c.R = {0};
  c.sigma = {-1, 0};
  c.defect_vertex = 0;
  return c;
}

ZCell make_ladder_cell(double rail, double rung) {
  // vertices: 0 = a_left, 1 = b_left, 2 = a_right, 3 = b_right
  ZCell c;
  c.nv = 4;
  c.edges = {{0, 1, rung}, {0, 2, rail}, {1, 3, rail}};
  c.D = {2, 3};
  c.R = {0, 1};
  c.sigma = {-1, -1, 0, 1};
  c.defect_vertex = 0;
  return c;
}

MetricGraph gen_zperiodic_window(const ZCell& cell, std::int32_t half_copies) {
  validate_cell(cell);
  if (half_copies < 0) fail("half_copies must be >= 0");
  std::vector<char> inD(cell.nv, 0), inR(cell.nv, 0);
  for (auto v : cell.D) inD[v] = 1;
  for (auto v : cell.R) inR[v] = 1;
  std::vector<std::int32_t> sigma_inv(cell.nv, -1);
  for (std::int32_t v = 0; v < cell.nv; ++v)
    if (inD[v]) sigma_inv[cell.sigma[v]] = v;

  // family geometry: edges incident at exactly one D vertex
  double l = std::numeric_limits<double>::infinity();
  std::int32_t m = 0;
  for (const auto& e : cell.edges) {
    int nd = (inD[e.a] ? 1 : 0) + (inD[e.b] ? 1 : 0);
    if (nd == 1) { m++; l = std::min(l, e.length); }
  }
  if (m == 0) fail("cell has no edge incident at exactly one D vertex");

  const std::int32_t n = half_copies;
  MetricGraph g;
  ZWindowInfo info;
  info.half_copies = n;
  info.l = l;
  info.m = m;
  info.cell_len = 0;
  for (const auto& e : cell.edges) info.cell_len += e.length;
  info.ktilde_len = info.cell_len - m * l;

  // global ids: copy i vertex v; R vertices of copy i>-n alias sigma^{-1} in copy i-1
  std::vector<std::vector<std::int32_t>> gid(2 * n + 1, std::vector<std::int32_t>(cell.nv, -1));
  for (std::int32_t ci = 0; ci <= 2 * n; ++ci) {
    for (std::int32_t v = 0; v < cell.nv; ++v) {
      if (inR[v] && ci > 0) {
        gid[ci][v] = gid[ci - 1][sigma_inv[v]];
      } else {
        gid[ci][v] = (std::int32_t)g.vertices.size();
        g.vertices.push_back({});
      }
    }
  }
  for (std::int32_t ci = 0; ci <= 2 * n; ++ci) {
    const std::int32_t cell_index = ci - n;
    for (const auto& e : cell.edges) {
      g.edges.push_back({gid[ci][e.a], gid[ci][e.b], e.length, 0});
      ZWindowEdge meta;
      meta.cell = cell_index;
      int nd = (inD[e.a] ? 1 : 0) + (inD[e.b] ? 1 : 0);
      meta.kind = (nd == 0) ? ZWindowEdge::plain : (nd == 1 ? ZWindowEdge::lk : ZWindowEdge::dd);
      meta.d_at_a = inD[e.a];
      info.edge_meta.push_back(meta);
    }
  }
  // cut points: R side of the leftmost copy, D side of the rightmost copy
  for (std::int32_t v = 0; v < cell.nv; ++v) {
    if (inR[v]) g.vertices[gid[0][v]].boundary = true;
    if (inD[v]) g.vertices[gid[2 * n][v]].boundary = true;
  }
  std::int32_t dv = cell.defect_vertex;
  if (dv < 0) {
    for (std::int32_t v = 0; v < cell.nv && dv < 0; ++v)
      if (!inD[v]) dv = v;
  }
  if (dv < 0 || dv >= cell.nv || inD[dv])
    fail("cell defect vertex must exist and lie outside D");
  info.defect_vertex = gid[n][dv];
  g.defects = {info.defect_vertex};
  g.zwindow = std::move(info);
  return g;
}

std::vector<double> graph_distance(const MetricGraph& g, std::int32_t source) {
  if (source < 0 || source >= g.nv()) fail("distance source vertex does not exist");
  std::vector<std::vector<std::pair<std::int32_t, double>>> adj(g.nv());
  for (const Edge& e : g.edges) {
    adj[e.a].push_back({e.b, e.length});
    adj[e.b].push_back({e.a, e.length});
  }
  std::vector<double> dist(g.nv(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::int32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[source] = 0;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, v] = pq.top(); pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : adj[v])
      if (d + len < dist[w]) { dist[w] = d + len; pq.push({dist[w], w}); }
  }
  return dist;
}

std::int32_t grid_vertex_at(const MetricGraph& g, std::int64_t ix, std::int64_t iy) {
  if (!g.grid) fail("grid lookup on a non-grid graph");
  const auto& gi = *g.grid;
  if (std::llabs(ix - gi.cx) > gi.radius || std::llabs(iy - gi.cy) > gi.radius) return -1;
  const std::int64_t w = 2 * (std::int64_t)gi.radius + 1;
  return (std::int32_t)((ix - gi.cx + gi.radius) * w + (iy - gi.cy + gi.radius));
}

std::vector<AnnulusEdge> annulus_edges(const MetricGraph& g, std::int32_t center, std::int32_t n) {
  if (!g.grid) fail("annulus_edges requires a grid window");
  if (center < 0 || center >= g.nv()) fail("annulus center does not exist");
  const Vertex& c = g.vertices[center];
  if (!c.lattice) fail("annulus center is not a lattice vertex");
  if (n < 0) fail("annulus index must be >= 0");
  const auto& gi = *g.grid;
  const std::int64_t off = std::max(std::llabs(c.lx - gi.cx), std::llabs(c.ly - gi.cy));
  if (off + n + 1 >= gi.radius)
    fail("annulus " + std::to_string(n) + " touches the window boundary (radius " +
         std::to_string(gi.radius) + ")");
  std::vector<AnnulusEdge> out;
  for (std::int32_t ei = 0; ei < g.ne(); ++ei) {
    const Edge& e = g.edges[ei];
    const Vertex& va = g.vertices[e.a];
    const Vertex& vb = g.vertices[e.b];
    std::int64_t da = std::llabs(va.lx - c.lx) + std::llabs(va.ly - c.ly);
    std::int64_t db = std::llabs(vb.lx - c.lx) + std::llabs(vb.ly - c.ly);
    if (std::min(da, db) == n && std::max(da, db) == n + 1)
      out.push_back({ei, da < db});
  }
  return out;
}

void resolve_defects(MetricGraph& g, const DefectSpec& spec) {
  std::set<std::int32_t> out;
  auto add_lattice_point = [&](std::int64_t ix, std::int64_t iy) {
    std::int32_t v = grid_vertex_at(g, ix, iy);
    if (v >= 0) out.insert(v);
    return v >= 0;
  };
  switch (spec.kind) {
    case DefectSpec::Kind::explicit_list: {
      for (std::int32_t v : spec.ids) {
        if (v < 0 || v >= g.nv())
          fail("defect vertex " + std::to_string(v) + " does not exist");
        out.insert(v);
      }
      break;
    }
    case DefectSpec::Kind::z_row: {
      if (!g.grid) fail("periodic defects require a grid window");
      if (spec.vx == 0 && spec.vy == 0) fail("periodic defect vector must be nonzero");
      auto base = spec.base.empty()
                      ? std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 0}}
                      : spec.base;
      // orbit b + k*v; window is finite so the loop terminates on both sides
      const std::int64_t reach = 4LL * g.grid->radius + 4;
      for (auto [bx, by] : base)
        for (std::int64_t k = -reach; k <= reach; ++k)
          add_lattice_point(g.grid->cx + bx + k * spec.vx, g.grid->cy + by + k * spec.vy);
      if (out.empty()) fail("periodic defect set misses the window entirely");
      break;
    }
    case DefectSpec::Kind::z2_lattice: {
      if (!g.grid) fail("periodic defects require a grid window");
      if ((spec.vx == 0 && spec.vy == 0) || (spec.v2x == 0 && spec.v2y == 0))
        fail("periodic defect vectors must be nonzero");
      if (spec.vx * spec.v2y - spec.vy * spec.v2x == 0)
        fail("periodic defect vectors must be independent");
      auto base = spec.base.empty()
                      ? std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 0}}
                      : spec.base;
      const std::int64_t reach = 4LL * g.grid->radius + 4;
      for (auto [bx, by] : base)
        for (std::int64_t k = -reach; k <= reach; ++k)
          for (std::int64_t j = -reach; j <= reach; ++j)
            add_lattice_point(g.grid->cx + bx + k * spec.vx + j * spec.v2x,
                              g.grid->cy + by + k * spec.vy + j * spec.v2y);
      if (out.empty()) fail("periodic defect set misses the window entirely");
      break;
    }
    case DefectSpec::Kind::gap_row: {
      if (!g.grid) fail("gap-row defects require a grid window");
      // one-sided exclusions i = n(n+1) for n >= 0, up to gap_max
      std::set<std::int64_t> excl;
      for (std::int64_t k = 0;; ++k) {
        std::int64_t a = k * (k + 1);
        if (a > spec.gap_max) break;
        excl.insert(a);
      }
      for (std::int64_t i = -(std::int64_t)g.grid->radius; i <= g.grid->radius; ++i)
        if (!excl.count(i)) add_lattice_point(g.grid->cx + i, g.grid->cy);
      break;
    }
  }
  g.defects.assign(out.begin(), out.end());
}

std::vector<std::int32_t> grid_translate_vertices(const MetricGraph& g,
                                                  std::int64_t dx, std::int64_t dy) {
  if (!g.grid) fail("translation requires a grid window");
  std::vector<std::int32_t> map(g.nv(), -1);
  for (std::int32_t v = 0; v < g.nv(); ++v)
    map[v] = grid_vertex_at(g, g.vertices[v].lx + dx, g.vertices[v].ly + dy);
  return map;
}

std::int64_t min_disjoint_shift(std::int64_t v1x, std::int64_t v1y,
                                std::int64_t v2x, std::int64_t v2y) {
  if (v2x == 0 && v2y == 0) fail("shift vector must be nonzero");
  std::set<std::pair<std::int64_t, std::int64_t>> path;
  std::int64_t sx = v1x >= 0 ? 1 : -1, sy = v1y >= 0 ? 1 : -1;
  for (std::int64_t x = 0; x != v1x + sx; x += sx) path.insert({x, 0});
  for (std::int64_t y = 0; y != v1y + sy; y += sy) path.insert({v1x, y});
  for (std::int64_t k = 1;; ++k) {
    bool hit = false;
    for (auto [x, y] : path)
      if (path.count({x + k * v2x, y + k * v2y})) { hit = true; break; }
    if (!hit) return k;
    if (k > (std::int64_t)path.size() + 2) fail("no disjoint shift found");
  }
}

} // namespace netgs
