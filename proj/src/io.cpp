#include "netgs/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace netgs {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("io: invalid ") + what + ": " + e.what());
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* context) {
  if (!obj.is_object())
    throw std::runtime_error(std::string("io: ") + context + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::runtime_error(std::string("io: unknown field '") + it.key() +
                               "' in " + context);
  }
}

double num_field(const json& obj, const char* key, const char* context) {
  if (!obj.contains(key))
    throw std::runtime_error(std::string("io: missing field '") + key + "' in " +
                             context);
  const json& v = obj.at(key);
  if (!v.is_number())
    throw std::runtime_error(std::string("io: field '") + key + "' in " + context +
                             " must be a number");
  return v.get<double>();
}

std::int64_t int_field(const json& obj, const char* key, const char* context) {
  if (!obj.contains(key))
    throw std::runtime_error(std::string("io: missing field '") + key + "' in " +
                             context);
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw std::runtime_error(std::string("io: field '") + key + "' in " + context +
                             " must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t int_or(const json& obj, const char* key, std::int64_t dflt,
                    const char* context) {
  return obj.contains(key) ? int_field(obj, key, context) : dflt;
}

DefectSpec defect_spec_from_json(const json& d) {
  DefectSpec spec;
  if (!d.is_object() || !d.contains("kind"))
    throw std::runtime_error("io: defect spec needs a 'kind' field");
  const std::string kind = d.at("kind").is_string() ? d.at("kind").get<std::string>()
                                                    : std::string();
  if (kind == "explicit_list") {
    check_keys(d, {"kind", "ids"}, "defect spec");
    spec.kind = DefectSpec::Kind::explicit_list;
    if (!d.contains("ids") || !d.at("ids").is_array())
      throw std::runtime_error("io: explicit defect spec needs an 'ids' array");
    for (const json& v : d.at("ids")) {
      if (!v.is_number_integer())
        throw std::runtime_error("io: defect ids must be integers");
      spec.ids.push_back((std::int32_t)v.get<std::int64_t>());
    }
  } else if (kind == "z_row" || kind == "z2_lattice") {
    spec.kind = kind == "z_row" ? DefectSpec::Kind::z_row : DefectSpec::Kind::z2_lattice;
    if (kind == "z_row")
      check_keys(d, {"kind", "vx", "vy", "base"}, "defect spec");
    else
      check_keys(d, {"kind", "vx", "vy", "v2x", "v2y", "base"}, "defect spec");
    spec.vx = int_field(d, "vx", "defect spec");
    spec.vy = int_or(d, "vy", 0, "defect spec");
    if (kind == "z2_lattice") {
      spec.v2x = int_or(d, "v2x", 0, "defect spec");
      spec.v2y = int_field(d, "v2y", "defect spec");
    }
    if (d.contains("base")) {
      if (!d.at("base").is_array())
        throw std::runtime_error("io: defect base must be an array of [bx, by] pairs");
      for (const json& b : d.at("base")) {
        if (!b.is_array() || b.size() != 2 || !b[0].is_number_integer() ||
            !b[1].is_number_integer())
          throw std::runtime_error("io: defect base must be an array of [bx, by] pairs");
        spec.base.emplace_back(b[0].get<std::int64_t>(), b[1].get<std::int64_t>());
      }
    }
  } else if (kind == "gap_row") {
    check_keys(d, {"kind", "gap_max"}, "defect spec");
    spec.kind = DefectSpec::Kind::gap_row;
    spec.gap_max = int_field(d, "gap_max", "defect spec");
  } else {
    throw std::runtime_error("io: unknown defect kind '" + kind + "'");
  }
  return spec;
}

json defect_spec_to_json(const DefectSpec& spec) {
  json d;
  switch (spec.kind) {
    case DefectSpec::Kind::explicit_list:
      d["kind"] = "explicit_list";
      d["ids"] = spec.ids;
      break;
    case DefectSpec::Kind::z_row:
      d["kind"] = "z_row";
      d["vx"] = spec.vx;
      d["vy"] = spec.vy;
      break;
    case DefectSpec::Kind::z2_lattice:
      d["kind"] = "z2_lattice";
      d["vx"] = spec.vx;
      d["vy"] = spec.vy;
      d["v2x"] = spec.v2x;
      d["v2y"] = spec.v2y;
      break;
    case DefectSpec::Kind::gap_row:
      d["kind"] = "gap_row";
      d["gap_max"] = spec.gap_max;
      break;
  }
  if (!spec.base.empty()) {
    json arr = json::array();
    for (auto [bx, by] : spec.base) arr.push_back(json::array({bx, by}));
    d["base"] = arr;
  }
  return d;
}

std::string num_str(double v) { return json(v).dump(); }

} // namespace

MetricGraph parse_graph_document(const std::string& text) {
  const json doc = parse_json(text, "graph document");
  check_keys(doc, {"vertices", "edges", "defects"}, "graph document");
  if (!doc.contains("vertices") || !doc.at("vertices").is_array())
    throw std::runtime_error("io: graph document needs a 'vertices' array");
  if (!doc.contains("edges") || !doc.at("edges").is_array())
    throw std::runtime_error("io: graph document needs an 'edges' array");
  if (!doc.contains("defects"))
    throw std::runtime_error("io: graph document needs a 'defects' field");

  MetricGraph g;
  std::int32_t next_id = 0;
  for (const json& v : doc.at("vertices")) {
    check_keys(v, {"id", "x", "y", "boundary"}, "vertex");
    if (int_field(v, "id", "vertex") != next_id)
      throw std::runtime_error("io: vertex ids must run 0..nv-1 in order");
    ++next_id;
    Vertex vv;
    const bool hx = v.contains("x"), hy = v.contains("y");
    if (hx != hy) throw std::runtime_error("io: a vertex needs both coordinates or none");
    if (hx) {
      vv.x = num_field(v, "x", "vertex");
      vv.y = num_field(v, "y", "vertex");
      vv.has_xy = true;
    }
    if (v.contains("boundary")) {
      if (!v.at("boundary").is_boolean())
        throw std::runtime_error("io: vertex field 'boundary' must be a boolean");
      vv.boundary = v.at("boundary").get<bool>();
    }
    g.vertices.push_back(vv);
  }
  for (const json& e : doc.at("edges")) {
    check_keys(e, {"a", "b", "length", "ncells"}, "edge");
    Edge ee;
    ee.a = (std::int32_t)int_field(e, "a", "edge");
    ee.b = (std::int32_t)int_field(e, "b", "edge");
    ee.length = num_field(e, "length", "edge");
    ee.ncells_hint = (std::int32_t)int_or(e, "ncells", 0, "edge");
    g.edges.push_back(ee);
  }
  resolve_defects(g, defect_spec_from_json(doc.at("defects")));
  validate(g);
  return g;
}

MetricGraph load_graph_file(const std::string& path) {
  return parse_graph_document(read_text_file(path));
}

std::string graph_document(const MetricGraph& g) {
  json doc;
  json verts = json::array();
  for (std::int32_t i = 0; i < g.nv(); ++i) {
    const Vertex& v = g.vertices[(std::size_t)i];
    json jv;
    jv["id"] = i;
    if (v.has_xy) {
      jv["x"] = v.x;
      jv["y"] = v.y;
    }
    if (v.boundary) jv["boundary"] = true;
    verts.push_back(jv);
  }
  doc["vertices"] = verts;
  json edges = json::array();
  for (const Edge& e : g.edges) {
    json je;
    je["a"] = e.a;
    je["b"] = e.b;
    je["length"] = e.length;
    if (e.ncells_hint > 0) je["ncells"] = e.ncells_hint;
    edges.push_back(je);
  }
  doc["edges"] = edges;
  DefectSpec spec;
  spec.kind = DefectSpec::Kind::explicit_list;
  spec.ids = g.defects;
  doc["defects"] = defect_spec_to_json(spec);
  return doc.dump(2) + "\n";
}

DefectSpec parse_defect_spec(const std::string& text) {
  return defect_spec_from_json(parse_json(text, "defect spec"));
}

std::string defect_spec_document(const DefectSpec& spec) {
  return defect_spec_to_json(spec).dump(2) + "\n";
}

void save_gn_corpus(const std::string& path, const std::vector<CorpusEntry>& entries) {
  json doc;
  doc["version"] = 1;
  json arr = json::array();
  for (const CorpusEntry& e : entries) {
    json je;
    je["graph"] = e.graph;
    je["fn"] = e.fn;
    je["p"] = e.p;
    je["q"] = e.q;
    json r;
    r["gn1d"] = e.ratios.gn1d;
    r["gn1d_def"] = e.ratios.gn1d_def;
    r["gninf"] = e.ratios.gninf;
    r["gninf_def"] = e.ratios.gninf_def;
    r["gn2d"] = e.ratios.gn2d;
    r["gn2d_def"] = e.ratios.gn2d_def;
    r["vertex"] = e.ratios.vertex;
    r["vertex_def"] = e.ratios.vertex_def;
    r["subgraph"] = e.ratios.subgraph;
    r["subgraph_def"] = e.ratios.subgraph_def;
    je["ratios"] = r;
    arr.push_back(je);
  }
  doc["entries"] = arr;
  write_text_file(path, doc.dump(2) + "\n");
}

std::vector<CorpusEntry> load_gn_corpus(const std::string& path) {
  const json doc = parse_json(read_text_file(path), "corpus file");
  check_keys(doc, {"version", "entries"}, "corpus file");
  if (int_field(doc, "version", "corpus file") != 1)
    throw std::runtime_error("io: unsupported corpus version");
  std::vector<CorpusEntry> out;
  for (const json& je : doc.at("entries")) {
    check_keys(je, {"graph", "fn", "p", "q", "ratios"}, "corpus entry");
    CorpusEntry e;
    e.graph = je.at("graph").get<std::string>();
    e.fn = je.at("fn").get<std::string>();
    e.p = num_field(je, "p", "corpus entry");
    e.q = num_field(je, "q", "corpus entry");
    const json& r = je.at("ratios");
    check_keys(r,
               {"gn1d", "gn1d_def", "gninf", "gninf_def", "gn2d", "gn2d_def", "vertex",
                "vertex_def", "subgraph", "subgraph_def"},
               "corpus ratios");
    e.ratios.gn1d = num_field(r, "gn1d", "corpus ratios");
    e.ratios.gn1d_def = r.at("gn1d_def").get<bool>();
    e.ratios.gninf = num_field(r, "gninf", "corpus ratios");
    e.ratios.gninf_def = r.at("gninf_def").get<bool>();
    e.ratios.gn2d = num_field(r, "gn2d", "corpus ratios");
    e.ratios.gn2d_def = r.at("gn2d_def").get<bool>();
    e.ratios.vertex = num_field(r, "vertex", "corpus ratios");
    e.ratios.vertex_def = r.at("vertex_def").get<bool>();
    e.ratios.subgraph = num_field(r, "subgraph", "corpus ratios");
    e.ratios.subgraph_def = r.at("subgraph_def").get<bool>();
    out.push_back(e);
  }
  return out;
}

std::string csv_to_string(const CsvTable& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (i) os << ',';
    os << t.header[i];
  }
  os << '\n';
  for (const std::vector<double>& row : t.rows) {
    if (row.size() != t.header.size())
      throw std::runtime_error("io: csv row width differs from the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << num_str(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("io: write failed for " + path);
}

std::string mesh_hash(const MeshedGraph& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const unsigned char* b = (const unsigned char*)p;
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t nn = m.nnodes;
  mix(&nn, sizeof nn);
  for (std::int32_t e = 0; e < m.graph.ne(); ++e) {
    const Edge& ed = m.graph.edges[(std::size_t)e];
    mix(&ed.a, sizeof ed.a);
    mix(&ed.b, sizeof ed.b);
    mix(&ed.length, sizeof ed.length);
    mix(&m.medges[(std::size_t)e].ncells, sizeof(std::int32_t));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

std::string code_version() { return "netgs 0.1.0"; }

} // namespace netgs
