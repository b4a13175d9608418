#include <algorithm>
#include <set>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "netgs/graph.hpp"

TEST_SUITE("graph") {

TEST_CASE("star generator shape") {
  netgs::MetricGraph g = netgs::gen_star(3, 8.0, true);
  CHECK(g.nv() == 4);
  CHECK(g.ne() == 3);
  REQUIRE(g.star.has_value());
  CHECK(g.star->n_edges == 3);
  CHECK(g.star->length == 8.0);
  CHECK(g.defects == std::vector<std::int32_t>{g.star->center});
  CHECK(netgs::total_length(g) == 24.0);

  std::vector<std::int32_t> deg = netgs::degrees(g);
  CHECK(deg[(std::size_t)g.star->center] == 3);
  int leaves = 0;
  for (std::int32_t d : deg)
    if (d == 1) leaves++;
  CHECK(leaves == 3);
  CHECK_NOTHROW(netgs::validate(g));

  std::vector<double> dist = netgs::graph_distance(g, g.star->center);
  double far = 0;
  for (double d : dist) far = std::max(far, d);
  CHECK(far == 8.0);
}

TEST_CASE("grid window counts and annuli") {
  netgs::MetricGraph g = netgs::gen_grid_window(3);
  const std::int32_t side = 7;
  CHECK(g.nv() == side * side);
  CHECK(g.ne() == 2 * side * (side - 1));
  CHECK_NOTHROW(netgs::validate(g));

  int rim = 0;
  for (const netgs::Vertex& v : g.vertices)
    if (v.boundary) rim++;
  CHECK(rim == 4 * (side - 1));

  const std::int32_t c = netgs::grid_vertex_at(g, 0, 0);
  CHECK(netgs::annulus_edges(g, c, 0).size() == 4);
  CHECK(netgs::annulus_edges(g, c, 1).size() == 12);
  // ring 2 ends on the rim, no longer strictly inside
  CHECK_THROWS_AS(netgs::annulus_edges(g, c, 2), std::runtime_error);

  // the graph metric from the center is the l1 lattice distance
  std::vector<double> dist = netgs::graph_distance(g, c);
  CHECK(dist[(std::size_t)netgs::grid_vertex_at(g, 2, -1)] == 3.0);
  CHECK(dist[(std::size_t)netgs::grid_vertex_at(g, -3, 3)] == 6.0);
}

TEST_CASE("validate rejects malformed graphs") {
  netgs::MetricGraph g;
  CHECK_THROWS_WITH_AS(netgs::validate(g), "graph: no vertices", std::runtime_error);

  g.vertices.resize(2);
  g.edges.push_back({0, 0, 1.0, 0});
  CHECK_THROWS_WITH_AS(netgs::validate(g), "graph: edge 0 is a loop", std::runtime_error);

  g.edges[0] = {0, 1, -1.0, 0};
  CHECK_THROWS_WITH_AS(netgs::validate(g), "graph: edge 0 has non-positive length",
                       std::runtime_error);

  g.edges[0] = {0, 1, 1.0, 0};
  g.vertices.resize(3);
  CHECK_THROWS_WITH_AS(netgs::validate(g), "graph: vertex 2 is disconnected",
                       std::runtime_error);

  g.vertices.resize(2);
  g.defects = {5};
  CHECK_THROWS_WITH_AS(netgs::validate(g), "graph: defect vertex 5 does not exist",
                       std::runtime_error);
}

TEST_CASE("row and lattice defect resolution") {
  netgs::MetricGraph g = netgs::gen_grid_window(3);

  netgs::DefectSpec row;
  row.kind = netgs::DefectSpec::Kind::z_row;
  row.vx = 1;
  netgs::resolve_defects(g, row);
  CHECK(g.defects.size() == 7);  // the whole center row

  row.vx = 2;
  netgs::resolve_defects(g, row);
  CHECK(g.defects.size() == 3);  // columns -2, 0, 2
  std::set<std::int32_t> got(g.defects.begin(), g.defects.end());
  CHECK(got.count(netgs::grid_vertex_at(g, 2, 0)) == 1);
  CHECK(got.count(netgs::grid_vertex_at(g, 1, 0)) == 0);

  netgs::DefectSpec lat;
  lat.kind = netgs::DefectSpec::Kind::z2_lattice;
  lat.vx = 1;
  lat.vy = 0;
  lat.v2x = 0;
  lat.v2y = 1;
  netgs::resolve_defects(g, lat);
  CHECK(g.defects.size() == (std::size_t)g.nv());  // every lattice point

  netgs::DefectSpec bad;
  bad.kind = netgs::DefectSpec::Kind::z_row;
  bad.vx = 0;
  bad.vy = 0;
  CHECK_THROWS_WITH_AS(netgs::resolve_defects(g, bad),
                       "graph: periodic defect vector must be nonzero",
                       std::runtime_error);
}

TEST_CASE("gapped row skips the one-sided sparse positions") {
  netgs::MetricGraph g = netgs::gen_grid_window(6);
  netgs::DefectSpec spec;
  spec.kind = netgs::DefectSpec::Kind::gap_row;
  spec.gap_max = 6;
  netgs::resolve_defects(g, spec);

  // full row has 13 vertices; i = n(n+1) gaps out 0, 2 and 6, one-sided
  CHECK(g.defects.size() == 10);
  std::set<std::int32_t> got(g.defects.begin(), g.defects.end());
  CHECK(got.count(netgs::grid_vertex_at(g, 0, 0)) == 0);
  CHECK(got.count(netgs::grid_vertex_at(g, 2, 0)) == 0);
  CHECK(got.count(netgs::grid_vertex_at(g, 6, 0)) == 0);
  CHECK(got.count(netgs::grid_vertex_at(g, -2, 0)) == 1);
  CHECK(got.count(netgs::grid_vertex_at(g, -6, 0)) == 1);
  CHECK(got.count(netgs::grid_vertex_at(g, 1, 0)) == 1);
}

TEST_CASE("lattice translations map vertices and drop the rim") {
  netgs::MetricGraph g = netgs::gen_grid_window(2);
  std::vector<std::int32_t> to = netgs::grid_translate_vertices(g, 1, 0);
  CHECK(to[(std::size_t)netgs::grid_vertex_at(g, 0, 0)] ==
        netgs::grid_vertex_at(g, 1, 0));
  CHECK(to[(std::size_t)netgs::grid_vertex_at(g, -2, 1)] ==
        netgs::grid_vertex_at(g, -1, 1));
  CHECK(to[(std::size_t)netgs::grid_vertex_at(g, 2, 0)] == -1);
}

TEST_CASE("disjoint shift of translated lattice paths") {
  // horizontal-then-vertical path to v1, translated by k*v2
  CHECK(netgs::min_disjoint_shift(1, 0, 0, 1) == 1);
  CHECK(netgs::min_disjoint_shift(3, 0, 1, 0) == 4);
  CHECK(netgs::min_disjoint_shift(2, 2, 1, 1) == 3);
  CHECK(netgs::min_disjoint_shift(0, 2, 1, 0) == 1);
}

TEST_CASE("periodic cells and pasted windows") {
  netgs::ZCell chain = netgs::make_chain_cell(1.0);
  netgs::MetricGraph gc = netgs::gen_zperiodic_window(chain, 3);
  CHECK_NOTHROW(netgs::validate(gc));
  REQUIRE(gc.zwindow.has_value());
  CHECK(gc.zwindow->half_copies == 3);
  CHECK(gc.zwindow->m == 1);
  CHECK(gc.zwindow->cell_len == 1.0);
  CHECK(gc.zwindow->ktilde_len == 0.0);
  CHECK(gc.zwindow->defect_vertex >= 0);

  netgs::ZCell ladder = netgs::make_ladder_cell(1.0, 1.0);
  netgs::MetricGraph gl = netgs::gen_zperiodic_window(ladder, 2);
  CHECK_NOTHROW(netgs::validate(gl));
  REQUIRE(gl.zwindow.has_value());
  CHECK(gl.zwindow->m == 2);
  CHECK(gl.zwindow->cell_len == 3.0);
  CHECK(gl.zwindow->ktilde_len == 1.0);
  CHECK(gl.zwindow->l == 1.0);

  // boundary cut vertices exist on both ends of the pasted window
  int rim = 0;
  for (const netgs::Vertex& v : gl.vertices)
    if (v.boundary) rim++;
  CHECK(rim > 0);

  netgs::ZCell bad = chain;
  bad.sigma.clear();
  CHECK_THROWS_AS(netgs::gen_zperiodic_window(bad, 1), std::runtime_error);
}

} // TEST_SUITE
