#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "netgs/experiments.hpp"
#include "netgs/graph.hpp"
#include "netgs/mesh.hpp"

namespace netgs {

// Graph document schema:
//   { "vertices": [{"id", "x"?, "y"?, "boundary"?}],
//     "edges":    [{"a", "b", "length", "ncells"?}],
//     "defects":  <defect spec object> }
// Vertex ids must be 0..nv-1 in order. Unknown fields anywhere in the
// document are rejected, so typos fail loudly instead of silently changing
// the run. The parsed graph is validated before it is returned.
MetricGraph parse_graph_document(const std::string& text);
MetricGraph load_graph_file(const std::string& path);
std::string graph_document(const MetricGraph& g);

// Defect spec object:
//   { "kind": "explicit_list" | "z_row" | "z2_lattice" | "gap_row",
//     "ids"?, "vx"?, "vy"?, "v2x"?, "v2y"?, "base"?, "gap_max"? }
// with the same unknown-field policy.
DefectSpec parse_defect_spec(const std::string& text);
std::string defect_spec_document(const DefectSpec& spec);

// Frozen functional-inequality corpus (JSON array of tagged entries).
void save_gn_corpus(const std::string& path, const std::vector<CorpusEntry>& entries);
std::vector<CorpusEntry> load_gn_corpus(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// RFC-4180-style output with round-trip double formatting, so rewriting the
// same table is byte-identical.
std::string csv_to_string(const CsvTable& t);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a over the mesh structure (edge endpoints, lengths, cell counts),
// hex-encoded; identifies the discretization a coefficient vector lives on.
std::string mesh_hash(const MeshedGraph& m);

// version string embedded into every output record
std::string code_version();

// Minimal line-plot renderer: polylines over an auto-scaled frame with axis
// ticks and a legend. No external plotting dependency.
struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};
std::string render_svg_plot(const std::string& title,
                            const std::vector<SvgSeries>& series,
                            int width = 720, int height = 480);

} // namespace netgs
