// Command-line driver: graph setup from a JSON config, subcommands over the
// library, JSON/CSV/SVG outputs with the resolved config embedded for
// provenance. Unknown config fields are rejected everywhere.
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "netgs/assembly.hpp"
#include "netgs/energy.hpp"
#include "netgs/experiments.hpp"
#include "netgs/families.hpp"
#include "netgs/graph.hpp"
#include "netgs/io.hpp"
#include "netgs/mesh.hpp"
#include "netgs/spectral.hpp"

namespace {

using nlohmann::json;

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!obj.is_object())
    throw std::runtime_error("cli: " + context + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw std::runtime_error("cli: unknown field '" + it.key() + "' in " + context);
  }
}

double jnum(const json& obj, const char* key, double dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_number())
    throw std::runtime_error(std::string("cli: field '") + key + "' must be a number");
  return obj.at(key).get<double>();
}

// "delta" accepts a positive number, the string "auto", or null; anything
// else is a config error. auto_value is the mesh-derived default.
double jdelta(const json& obj, double auto_value) {
  if (!obj.contains("delta") || obj.at("delta").is_null()) return auto_value;
  const json& v = obj.at("delta");
  if (v.is_string() && v.get<std::string>() == "auto") return auto_value;
  if (!v.is_number())
    throw std::runtime_error("cli: delta must be a positive number or \"auto\"");
  const double d = v.get<double>();
  if (!(d > 0))
    throw std::runtime_error("cli: delta must be a positive number or \"auto\"");
  return d;
}

std::int64_t jint(const json& obj, const char* key, std::int64_t dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_number_integer())
    throw std::runtime_error(std::string("cli: field '") + key + "' must be an integer");
  return obj.at(key).get<std::int64_t>();
}

bool jbool(const json& obj, const char* key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_boolean())
    throw std::runtime_error(std::string("cli: field '") + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

std::string jstr(const json& obj, const char* key, const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_string())
    throw std::runtime_error(std::string("cli: field '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> number_list(const json& v, const char* what) {
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const json& x : v) {
      if (!x.is_number())
        throw std::runtime_error(std::string("cli: ") + what + " must hold numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw std::runtime_error(std::string("cli: ") + what +
                             " must be a number or an array of numbers");
  }
  if (out.empty()) throw std::runtime_error(std::string("cli: ") + what + " is empty");
  return out;
}

std::string iso_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct GraphSetup {
  netgs::MetricGraph g;
  std::shared_ptr<const netgs::MeshedGraph> mesh;
  netgs::Forms forms;
  double h = 0.05;
  std::optional<netgs::DefectSpec> spec;  // present when the config gave one
  json resolved;                          // graph/defects/mesh with defaults filled
};

// Builds graph + forms at a refinement level: level k scales the mesh width
// by h_factor^k and the window by window_factor^k.
GraphSetup make_setup(const json& cfg, int level, double h_factor,
                      double window_factor) {
  if (!cfg.contains("graph"))
    throw std::runtime_error("cli: config needs a 'graph' object");
  const json& gj = cfg.at("graph");
  const double wscale = std::pow(window_factor, level);

  GraphSetup s;
  json rg;
  if (gj.contains("file")) {
    require_keys(gj, {"file"}, "graph");
    if (level > 0 && window_factor != 1.0)
      throw std::runtime_error("cli: file graphs cannot grow their window");
    const std::string path = jstr(gj, "file", "");
    s.g = netgs::load_graph_file(path);
    rg["file"] = path;
  } else {
    const std::string gen = jstr(gj, "generator", "");
    const std::string trunc = jstr(gj, "truncation", "dirichlet");
    if (trunc != "dirichlet" && trunc != "natural")
      throw std::runtime_error("cli: truncation must be 'dirichlet' or 'natural'");
    if (gen == "star") {
      require_keys(gj, {"generator", "arms", "length", "center_defect", "truncation"},
                   "graph");
      const int arms = (int)jint(gj, "arms", 1);
      const double length = jnum(gj, "length", 20.0) * wscale;
      const bool cd = jbool(gj, "center_defect", true);
      s.g = netgs::gen_star(arms, length, cd);
      rg = {{"generator", "star"}, {"arms", arms}, {"length", length},
            {"center_defect", cd}};
    } else if (gen == "grid") {
      require_keys(gj, {"generator", "radius", "truncation"}, "graph");
      const auto radius =
          (std::int32_t)std::llround(std::ceil((double)jint(gj, "radius", 20) * wscale));
      s.g = netgs::gen_grid_window(radius);
      rg = {{"generator", "grid"}, {"radius", radius}};
    } else if (gen == "zladder" || gen == "zchain") {
      require_keys(gj, {"generator", "half_copies", "rail", "rung", "length", "truncation"},
                   "graph");
      const auto hc =
          (std::int32_t)std::llround(std::ceil((double)jint(gj, "half_copies", 20) * wscale));
      netgs::ZCell cell = gen == "zladder"
                              ? netgs::make_ladder_cell(jnum(gj, "rail", 1.0),
                                                        jnum(gj, "rung", 1.0))
                              : netgs::make_chain_cell(jnum(gj, "length", 1.0));
      s.g = netgs::gen_zperiodic_window(cell, hc);
      rg = {{"generator", gen}, {"half_copies", hc}};
      if (gen == "zladder") {
        rg["rail"] = jnum(gj, "rail", 1.0);
        rg["rung"] = jnum(gj, "rung", 1.0);
      } else {
        rg["length"] = jnum(gj, "length", 1.0);
      }
    } else {
      throw std::runtime_error("cli: unknown graph generator '" + gen + "'");
    }
    s.g.truncation = trunc == "natural" ? netgs::Truncation::natural
                                        : netgs::Truncation::dirichlet;
    rg["truncation"] = trunc;
  }

  // "defects": null keeps whatever defect set the generator or file installed
  if (cfg.contains("defects") && !cfg.at("defects").is_null()) {
    s.spec = netgs::parse_defect_spec(cfg.at("defects").dump());
    if (s.spec->kind == netgs::DefectSpec::Kind::explicit_list && level > 0 &&
        window_factor != 1.0)
      throw std::runtime_error(
          "cli: explicit defect ids need a fixed window across levels");
    netgs::resolve_defects(s.g, *s.spec);
  }
  netgs::validate(s.g);

  double h = 0.05;
  if (cfg.contains("mesh")) {
    require_keys(cfg.at("mesh"), {"h"}, "mesh");
    h = jnum(cfg.at("mesh"), "h", 0.05);
  }
  s.h = h * std::pow(h_factor, level);
  s.mesh = std::make_shared<netgs::MeshedGraph>(netgs::build_mesh(s.g, s.h));
  s.forms = netgs::assemble(s.mesh);

  s.resolved["graph"] = rg;
  if (cfg.contains("defects")) s.resolved["defects"] = cfg.at("defects");
  s.resolved["mesh"] = {{"h", s.h}};
  return s;
}

netgs::SolverOptions solver_from(const json& cfg, std::uint64_t seed_override,
                                 bool has_seed, json& resolved) {
  netgs::SolverOptions so;
  if (cfg.contains("solver")) {
    const json& sj = cfg.at("solver");
    require_keys(sj,
                 {"max_iters", "tol", "armijo_c", "max_backtracks", "n_random", "seed",
                  "polish_abs"},
                 "solver");
    so.max_iters = (int)jint(sj, "max_iters", so.max_iters);
    so.tol = jnum(sj, "tol", so.tol);
    so.armijo_c = jnum(sj, "armijo_c", so.armijo_c);
    so.max_backtracks = (int)jint(sj, "max_backtracks", so.max_backtracks);
    so.n_random = (int)jint(sj, "n_random", so.n_random);
    so.seed = (std::uint64_t)jint(sj, "seed", (std::int64_t)so.seed);
    so.polish_abs = jbool(sj, "polish_abs", so.polish_abs);
  }
  if (has_seed) so.seed = seed_override;
  resolved["solver"] = {{"max_iters", so.max_iters},
                        {"tol", so.tol},
                        {"armijo_c", so.armijo_c},
                        {"max_backtracks", so.max_backtracks},
                        {"n_random", so.n_random},
                        {"seed", so.seed},
                        {"polish_abs", so.polish_abs}};
  return so;
}

json residual_json(const netgs::ElResidual& r) {
  return {{"defect", r.max_defect}, {"kirchhoff", r.max_kirchhoff},
          {"interior", r.interior}};
}

std::string window_kind(const netgs::MetricGraph& g) {
  if (g.star) return "star";
  if (g.grid) return "grid";
  if (g.zwindow) return "zwindow";
  return "file";
}

double window_size(const netgs::MetricGraph& g) {
  if (g.star) return g.star->length;
  if (g.grid) return (double)g.grid->radius;
  if (g.zwindow) return (double)g.zwindow->half_copies;
  return netgs::total_length(g);
}

json window_json(const GraphSetup& s) {
  return {{"kind", window_kind(s.g)},
          {"size", window_size(s.g)},
          {"truncation",
           s.g.truncation == netgs::Truncation::natural ? "natural" : "dirichlet"},
          {"vertices", s.g.nv()},
          {"edges", s.g.ne()},
          {"defects", (std::int64_t)s.g.defects.size()}};
}

json envelope(const std::string& command, json resolved_cfg, const json& result) {
  resolved_cfg["command"] = command;
  json doc;
  doc["meta"] = {{"timestamp", iso_now()}, {"version", netgs::code_version()}};
  doc["config"] = resolved_cfg;
  doc["result"] = result;
  return doc;
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int threads = 1;
  std::string format = "json";
};

json load_config(const CommonFlags& fl) {
  if (fl.config_path.empty()) throw std::runtime_error("cli: --config is required");
  try {
    return json::parse(netgs::read_text_file(fl.config_path));
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("cli: invalid config: ") + e.what());
  }
}

void write_output(const CommonFlags& fl, const std::string& name,
                  const std::string& content) {
  std::filesystem::create_directories(fl.out_dir);
  netgs::write_text_file(fl.out_dir + "/" + name, content);
}

template <class Fn>
void parallel_for(int n, int threads, const Fn& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs((std::size_t)threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&, t]() {
      try {
        for (int i; (i = next.fetch_add(1)) < n;) fn(i);
      } catch (...) {
        errs[(std::size_t)t] = std::current_exception();
      }
    });
  for (std::thread& th : pool) th.join();
  for (const std::exception_ptr& e : errs)
    if (e) std::rethrow_exception(e);
}

// profile rows (edge, s, x, y, u); coordinates blank when the edge has none
std::string profile_csv(const netgs::Forms& f, const std::vector<double>& u) {
  const netgs::MeshedGraph& m = *f.mesh;
  const netgs::MetricGraph& g = m.graph;
  std::ostringstream os;
  os << "edge,s,x,y,u\n";
  const std::vector<double> nodes = netgs::to_nodes(f, u);
  for (std::int32_t e = 0; e < g.ne(); ++e) {
    const netgs::Vertex& va = g.vertices[(std::size_t)g.edges[e].a];
    const netgs::Vertex& vb = g.vertices[(std::size_t)g.edges[e].b];
    const bool xy = va.has_xy && vb.has_xy;
    for (std::int32_t j = 0; j <= m.medges[(std::size_t)e].ncells; ++j) {
      const double t =
          (double)j / (double)m.medges[(std::size_t)e].ncells;
      os << e << ',' << json(netgs::node_arclen(m, e, j)).dump() << ',';
      if (xy)
        os << json(va.x + t * (vb.x - va.x)).dump() << ','
           << json(va.y + t * (vb.y - va.y)).dump();
      else
        os << ',';
      os << ',' << json(nodes[(std::size_t)m.node(e, j)]).dump() << '\n';
    }
  }
  return os.str();
}

int cmd_solve(const CommonFlags& fl) {
  const json cfg = load_config(fl);
  require_keys(cfg,
               {"graph", "defects", "mesh", "q", "mu", "solver", "delta",
                "embed_profile", "profile_csv"},
               "config");
  GraphSetup s = make_setup(cfg, 0, 0.5, 1.0);
  json resolved = s.resolved;
  const double q = jnum(cfg, "q", 3.0);
  const double mu = jnum(cfg, "mu", 1.0);
  netgs::SolverOptions so = solver_from(cfg, fl.seed, fl.has_seed, resolved);
  const double delta = jdelta(cfg, netgs::delta_disc(s.h, mu));
  resolved["q"] = q;
  resolved["mu"] = mu;
  resolved["delta"] = delta;
  const bool embed = jbool(cfg, "embed_profile", false);
  const bool want_profile = jbool(cfg, "profile_csv", fl.format == "csv");
  resolved["embed_profile"] = embed;
  resolved["profile_csv"] = want_profile;

  netgs::GroundStateResult r = netgs::minimize(s.forms, q, mu, so);
  netgs::Certificate fam = netgs::best_family_bound(
      s.forms, q, mu, s.spec ? &*s.spec : nullptr);

  json res;
  res["energy"] = r.energy;
  res["mass"] = r.mass;
  res["lambda"] = r.lagrange;
  res["residual"] = residual_json(r.residual);
  res["grad_norm"] = r.grad_norm;
  res["iterations"] = r.iterations;
  res["initializer"] = r.winner;
  res["converged"] = r.converged;
  res["certified"] = r.energy < -delta;
  res["family_bound"] = {{"source", fam.source},
                         {"energy", std::isfinite(fam.energy) ? json(fam.energy) : json()},
                         {"param", fam.param}};
  res["mesh"] = {{"h", s.h}, {"ndof", s.forms.ndof}, {"hash", netgs::mesh_hash(*s.mesh)}};
  res["window"] = window_json(s);
  if (embed)
    res["profile"] = {{"mesh_hash", netgs::mesh_hash(*s.mesh)}, {"u", r.u}};

  write_output(fl, "solve.json", envelope("solve", resolved, res).dump(2) + "\n");
  if (want_profile) write_output(fl, "solve_profile.csv", profile_csv(s.forms, r.u));
  std::cout << "solve: energy " << r.energy << ", lambda " << r.lagrange
            << (r.energy < -delta ? ", certified negative" : ", not certified") << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& fl) {
  const json cfg = load_config(fl);
  require_keys(cfg, {"graph", "defects", "mesh", "q", "mu", "solver", "delta",
                     "use_families"},
               "config");
  GraphSetup s = make_setup(cfg, 0, 0.5, 1.0);
  json resolved = s.resolved;
  if (!cfg.contains("mu")) throw std::runtime_error("cli: sweep needs a 'mu' list");
  const std::vector<double> mus = number_list(cfg.at("mu"), "mu");
  const std::vector<double> qs =
      cfg.contains("q") ? number_list(cfg.at("q"), "q") : std::vector<double>{3.0};
  netgs::SolverOptions so = solver_from(cfg, fl.seed, fl.has_seed, resolved);
  const double delta = jdelta(cfg, netgs::delta_disc(s.h, mus.back()));
  const bool fams = jbool(cfg, "use_families", true);
  resolved["q"] = qs;
  resolved["mu"] = mus;
  resolved["delta"] = delta;
  resolved["use_families"] = fams;

  struct Point {
    double q, mu;
    netgs::GroundStateResult r;
    netgs::Certificate fam;
  };
  std::vector<Point> pts((std::size_t)(qs.size() * mus.size()));
  for (std::size_t iq = 0; iq < qs.size(); ++iq)
    for (std::size_t im = 0; im < mus.size(); ++im) {
      pts[iq * mus.size() + im].q = qs[iq];
      pts[iq * mus.size() + im].mu = mus[im];
    }
  parallel_for((int)pts.size(), fl.threads, [&](int i) {
    Point& p = pts[(std::size_t)i];
    p.r = netgs::minimize(s.forms, p.q, p.mu, so);
    if (fams)
      p.fam = netgs::best_family_bound(s.forms, p.q, p.mu, s.spec ? &*s.spec : nullptr);
    else
      p.fam = {"none", std::numeric_limits<double>::infinity(), 0};
  });

  netgs::CsvTable t;
  t.header = {"q", "mu", "energy", "lambda", "residual", "grad_norm", "iterations",
              "converged", "certified", "family_energy"};
  json records = json::array();
  for (const Point& p : pts) {
    const double resid = std::max({p.r.residual.max_defect, p.r.residual.max_kirchhoff,
                                   p.r.residual.interior});
    const double best = std::min(p.r.energy, p.fam.energy);
    t.rows.push_back({p.q, p.mu, p.r.energy, p.r.lagrange, resid, p.r.grad_norm,
                      (double)p.r.iterations, p.r.converged ? 1.0 : 0.0,
                      best < -delta ? 1.0 : 0.0,
                      std::isfinite(p.fam.energy) ? p.fam.energy : 0.0});
    json rec;
    rec["q"] = p.q;
    rec["mu"] = p.mu;
    rec["energy"] = p.r.energy;
    rec["lambda"] = p.r.lagrange;
    rec["residual"] = residual_json(p.r.residual);
    rec["iterations"] = p.r.iterations;
    rec["initializer"] = p.r.winner;
    rec["converged"] = p.r.converged;
    rec["certified"] = best < -delta;
    rec["family_bound"] = {{"source", p.fam.source},
                           {"energy", std::isfinite(p.fam.energy) ? json(p.fam.energy)
                                                                  : json()}};
    records.push_back(rec);
  }
  json res;
  res["records"] = records;
  res["mesh"] = {{"h", s.h}, {"ndof", s.forms.ndof}, {"hash", netgs::mesh_hash(*s.mesh)}};
  res["window"] = window_json(s);
  write_output(fl, "sweep.json", envelope("sweep", resolved, res).dump(2) + "\n");
  write_output(fl, "sweep.csv", netgs::csv_to_string(t));
  if (fl.format == "svg") {
    std::vector<netgs::SvgSeries> series;
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
      netgs::SvgSeries se;
      se.label = "q=" + json(qs[iq]).dump();
      for (std::size_t im = 0; im < mus.size(); ++im) {
        se.x.push_back(mus[im]);
        se.y.push_back(pts[iq * mus.size() + im].r.energy);
      }
      series.push_back(se);
    }
    write_output(fl, "sweep.svg", netgs::render_svg_plot("energy vs mass", series));
  }
  std::cout << "sweep: " << pts.size() << " points written\n";
  return 0;
}

// threshold and qscan share the level factory and option plumbing
struct ThresholdCtx {
  json cfg;
  json resolved;
  std::optional<netgs::DefectSpec> spec;
  netgs::FormsFactory make;
  netgs::CurveOptions opts;
  double mu_lo = 0, mu_hi = 0, rel_width = 0;
};

ThresholdCtx threshold_ctx(const CommonFlags& fl) {
  ThresholdCtx c;
  c.cfg = load_config(fl);
  require_keys(c.cfg, {"graph", "defects", "mesh", "q", "mu_lo", "mu_hi", "rel_width",
                       "solver", "delta", "use_families", "use_solver", "refine"},
               "config");
  double h_factor = 0.5, window_factor = 1.0;
  if (c.cfg.contains("refine")) {
    require_keys(c.cfg.at("refine"), {"h_factor", "window_factor"}, "refine");
    h_factor = jnum(c.cfg.at("refine"), "h_factor", 0.5);
    window_factor = jnum(c.cfg.at("refine"), "window_factor", 1.0);
  }
  GraphSetup probe = make_setup(c.cfg, 0, h_factor, window_factor);
  c.resolved = probe.resolved;
  c.resolved["refine"] = {{"h_factor", h_factor}, {"window_factor", window_factor}};
  c.spec = probe.spec;

  c.mu_lo = jnum(c.cfg, "mu_lo", 1e-3);
  c.mu_hi = jnum(c.cfg, "mu_hi", 100.0);
  c.rel_width = jnum(c.cfg, "rel_width", 0.01);
  c.resolved["mu_lo"] = c.mu_lo;
  c.resolved["mu_hi"] = c.mu_hi;
  c.resolved["rel_width"] = c.rel_width;

  c.opts.solver = solver_from(c.cfg, fl.seed, fl.has_seed, c.resolved);
  c.opts.use_solver = jbool(c.cfg, "use_solver", true);
  c.opts.use_families = jbool(c.cfg, "use_families", true);
  const double delta = jdelta(c.cfg, netgs::delta_disc(probe.h, c.mu_hi));
  c.opts.delta = delta;
  c.resolved["delta"] = delta;
  c.resolved["use_solver"] = c.opts.use_solver;
  c.resolved["use_families"] = c.opts.use_families;
  // the spec must outlive the CurveOptions pointer; park it on the heap and
  // keep it alive through the factory capture
  auto spec_holder = std::make_shared<std::optional<netgs::DefectSpec>>(c.spec);
  if (*spec_holder) c.opts.spec = &**spec_holder;
  json cfg_copy = c.cfg;
  c.make = [cfg_copy, h_factor, window_factor, spec_holder](int level) {
    return make_setup(cfg_copy, level, h_factor, window_factor).forms;
  };
  return c;
}

json threshold_json(const netgs::ThresholdEstimate& t) {
  json j;
  j["q"] = t.q;
  j["mu_lo"] = t.mu_lo;
  j["mu_hi"] = std::isfinite(t.mu_hi) ? json(t.mu_hi) : json();
  j["delta"] = t.delta;
  j["degenerate_zero"] = t.degenerate_zero;
  j["refined_lo"] = t.refined_lo;
  j["refined_hi"] = t.refined_hi;
  j["refined_ok"] = t.refined_ok;
  j["notes"] = t.notes;
  return j;
}

int cmd_threshold(const CommonFlags& fl) {
  ThresholdCtx c = threshold_ctx(fl);
  const double q = jnum(c.cfg, "q", 3.0);
  c.resolved["q"] = q;
  netgs::ThresholdEstimate t =
      netgs::critical_mass(c.make, q, c.mu_lo, c.mu_hi, c.rel_width, c.opts);
  write_output(fl, "threshold.json",
               envelope("threshold", c.resolved, threshold_json(t)).dump(2) + "\n");
  std::ostringstream md;
  md << "# critical mass\n\nq = " << q << ": bracket [" << t.mu_lo << ", " << t.mu_hi
     << "]";
  if (t.degenerate_zero) md << " (certified at the smallest probed mass)";
  md << "; refinement " << (t.refined_ok ? "confirms" : "disagrees") << ".\n";
  if (!t.notes.empty()) md << "\n" << t.notes << "\n";
  write_output(fl, "threshold.md", md.str());
  std::cout << "threshold: q " << q << " bracket [" << t.mu_lo << ", " << t.mu_hi
            << "]\n";
  return 0;
}

int cmd_qscan(const CommonFlags& fl) {
  ThresholdCtx c = threshold_ctx(fl);
  if (!c.cfg.contains("q")) throw std::runtime_error("cli: qscan needs a 'q' list");
  const std::vector<double> qs = number_list(c.cfg.at("q"), "q");
  c.resolved["q"] = qs;
  netgs::QScan scan =
      netgs::qstar_scan(c.make, qs, c.mu_lo, c.mu_hi, c.rel_width, c.opts);

  json rows = json::array();
  netgs::CsvTable t;
  t.header = {"q", "mu_lo", "mu_hi", "degenerate_zero", "refined_ok"};
  for (const netgs::ThresholdEstimate& r : scan.rows) {
    rows.push_back(threshold_json(r));
    t.rows.push_back({r.q, r.mu_lo, std::isfinite(r.mu_hi) ? r.mu_hi : -1.0,
                      r.degenerate_zero ? 1.0 : 0.0, r.refined_ok ? 1.0 : 0.0});
  }
  json res;
  res["rows"] = rows;
  res["downset_ok"] = scan.downset_ok;
  write_output(fl, "qscan.json", envelope("qscan", c.resolved, res).dump(2) + "\n");
  write_output(fl, "qscan.csv", netgs::csv_to_string(t));
  std::ostringstream md;
  md << "# exponent scan\n\n| q | bracket | degenerate |\n|---|---|---|\n";
  for (const netgs::ThresholdEstimate& r : scan.rows)
    md << "| " << r.q << " | [" << r.mu_lo << ", " << r.mu_hi << "] | "
       << (r.degenerate_zero ? "yes" : "no") << " |\n";
  md << "\nzero-threshold set is a down-set: " << (scan.downset_ok ? "yes" : "no")
     << "\n";
  write_output(fl, "qscan.md", md.str());
  if (fl.format == "svg") {
    netgs::SvgSeries se;
    se.label = "threshold mid";
    for (const netgs::ThresholdEstimate& r : scan.rows)
      if (std::isfinite(r.mu_hi)) {
        se.x.push_back(r.q);
        se.y.push_back(r.mu_mid());
      }
    if (!se.x.empty())
      write_output(fl, "qscan.svg",
                   netgs::render_svg_plot("critical mass vs exponent", {se}));
  }
  std::cout << "qscan: " << scan.rows.size() << " rows, downset "
            << (scan.downset_ok ? "ok" : "violated") << "\n";
  return 0;
}

int cmd_spectrum(const CommonFlags& fl) {
  const json cfg = load_config(fl);
  require_keys(cfg, {"graph", "defects", "mesh", "alpha", "vertex", "tol", "rayleigh_n"},
               "config");
  GraphSetup s = make_setup(cfg, 0, 0.5, 1.0);
  json resolved = s.resolved;
  const double alpha = jnum(cfg, "alpha", 1.0);
  const double tol = jnum(cfg, "tol", 1e-10);
  resolved["alpha"] = alpha;
  resolved["tol"] = tol;

  std::int32_t v = -1;
  if (cfg.contains("vertex") && cfg.at("vertex").is_number_integer()) {
    v = (std::int32_t)jint(cfg, "vertex", 0);
  } else {
    const std::string vsel = jstr(cfg, "vertex", "center");
    if (vsel != "center")
      throw std::runtime_error("cli: vertex must be an integer id or \"center\"");
    if (s.g.grid)
      v = netgs::grid_vertex_at(s.g, s.g.grid->cx, s.g.grid->cy);
    else if (s.g.star)
      v = s.g.star->center;
    else if (s.g.zwindow)
      v = s.g.zwindow->defect_vertex;
    else if (!s.g.defects.empty())
      v = s.g.defects.front();
    else
      v = 0;
  }
  resolved["vertex"] = v;

  json res;
  if (alpha == 0.0) {
    netgs::EigenResult er = netgs::bottom_eigen(s.forms, tol);
    res["lambda"] = er.lambda;
    res["residual"] = er.residual;
    res["iterations"] = er.iterations;
  } else {
    netgs::EigenResult er = netgs::delta_eigen(s.forms, alpha, v, tol);
    res["lambda"] = er.lambda;
    res["residual"] = er.residual;
    res["iterations"] = er.iterations;
    if (s.g.grid) {
      json rb = json::array();
      std::vector<int> ns;
      if (cfg.contains("rayleigh_n")) {
        // an explicitly empty list skips the variational table
        if (!cfg.at("rayleigh_n").is_array() || !cfg.at("rayleigh_n").empty())
          for (double x : number_list(cfg.at("rayleigh_n"), "rayleigh_n"))
            ns.push_back((int)x);
      } else {
        for (int n = 2; n <= s.g.grid->radius; n *= 2) ns.push_back(n);
      }
      for (int n : ns) {
        try {
          netgs::FamilyEval fe = netgs::appendix_loglinear(n, alpha, s.forms, v);
          rb.push_back({{"n", n}, {"bound", fe.rayleigh_bound}});
        } catch (const std::exception&) {
          break;
        }
      }
      res["rayleigh_bounds"] = rb;
    }
  }
  res["mesh"] = {{"h", s.h}, {"ndof", s.forms.ndof}, {"hash", netgs::mesh_hash(*s.mesh)}};
  res["window"] = window_json(s);
  write_output(fl, "spectrum.json", envelope("spectrum", resolved, res).dump(2) + "\n");
  std::cout << "spectrum: lambda " << res["lambda"].get<double>() << "\n";
  return 0;
}

int cmd_construct(const CommonFlags& fl) {
  const json cfg = load_config(fl);
  require_keys(cfg, {"graph", "defects", "mesh", "family", "q", "mu", "eps", "n",
                     "alpha", "big_m", "ell"},
               "config");
  GraphSetup s = make_setup(cfg, 0, 0.5, 1.0);
  json resolved = s.resolved;
  const std::string family = jstr(cfg, "family", "grid_exp");
  const double q = jnum(cfg, "q", 3.0);
  const double mu = jnum(cfg, "mu", 1.0);
  resolved["family"] = family;
  resolved["q"] = q;

  std::vector<double> params;
  if (family == "grid_exp" || family == "star_exp" || family == "zper_exp") {
    if (!cfg.contains("eps")) throw std::runtime_error("cli: family needs an 'eps' list");
    params = number_list(cfg.at("eps"), "eps");
    resolved["eps"] = params;
  } else if (family == "grid_log" || family == "loglinear" || family == "plateau") {
    if (!cfg.contains("n")) throw std::runtime_error("cli: family needs an 'n' list");
    params = number_list(cfg.at("n"), "n");
    resolved["n"] = params;
  } else if (family == "tent") {
    params = {jnum(cfg, "big_m", 1.0)};
    resolved["big_m"] = params[0];
    resolved["ell"] = jnum(cfg, "ell", 1.0);
  } else {
    throw std::runtime_error("cli: unknown family '" + family + "'");
  }
  const double alpha = jnum(cfg, "alpha", 1.0);
  if (family == "grid_exp") resolved["mu"] = mu;
  if (family == "loglinear") resolved["alpha"] = alpha;

  netgs::DefectSpec local;
  const netgs::DefectSpec* spec = s.spec ? &*s.spec : nullptr;
  if (!spec && s.g.grid) {
    local.kind = netgs::DefectSpec::Kind::explicit_list;
    local.ids = s.g.defects;
    spec = &local;
  }
  std::int32_t center = -1;
  if (s.g.grid) center = netgs::grid_vertex_at(s.g, s.g.grid->cx, s.g.grid->cy);

  netgs::CsvTable t;
  t.header = {"param", "mass", "mass_lo", "mass_hi", "kinetic", "vsum",
              "energy", "center_value", "tail_mass", "tail_kinetic"};
  if (family == "grid_exp") t.header.push_back("kinetic_over_mu");
  if (family == "loglinear") t.header.push_back("rayleigh");

  json rows = json::array();
  for (double p : params) {
    netgs::FamilyEval fe;
    if (family == "grid_exp") {
      if (!spec) throw std::runtime_error("cli: grid_exp needs a grid window");
      fe = netgs::grid_exp_family(p, mu, q, s.forms, *spec);
    } else if (family == "star_exp") {
      if (!s.g.star) throw std::runtime_error("cli: star_exp needs a star window");
      fe = netgs::star_exp_family(p, q, s.g.star->n_edges, 0.0, 1, &s.forms);
    } else if (family == "zper_exp") {
      fe = netgs::zper_exp_family(p, q, s.forms);
    } else if (family == "grid_log") {
      fe = netgs::grid_log_family((int)p, q, s.forms, center);
    } else if (family == "loglinear") {
      fe = netgs::appendix_loglinear((int)p, alpha, s.forms, center);
    } else if (family == "plateau") {
      fe = netgs::appendix_plateau((int)p, s.forms);
    } else {
      fe = netgs::tent_family(p, jnum(cfg, "ell", 1.0),
                              s.g.star ? s.g.star->n_edges : 4, q, &s.forms);
    }
    std::vector<double> row = {fe.param,       fe.mass,     fe.mass_lo,
                               fe.mass_hi,     fe.kinetic,  fe.vsum,
                               fe.energy,      fe.center_value,
                               fe.tail_mass,   fe.tail_kinetic};
    if (family == "grid_exp") row.push_back(fe.kinetic / mu);
    if (family == "loglinear") row.push_back(fe.rayleigh_bound);
    t.rows.push_back(row);
    json jr;
    jr["param"] = fe.param;
    jr["mass"] = fe.mass;
    jr["kinetic"] = fe.kinetic;
    jr["vsum"] = fe.vsum;
    jr["energy"] = fe.energy;
    rows.push_back(jr);
  }
  json res;
  res["rows"] = rows;
  res["mesh"] = {{"h", s.h}, {"ndof", s.forms.ndof}, {"hash", netgs::mesh_hash(*s.mesh)}};
  res["window"] = window_json(s);
  write_output(fl, "construct.json", envelope("construct", resolved, res).dump(2) + "\n");
  write_output(fl, "construct.csv", netgs::csv_to_string(t));
  if (fl.format == "svg") {
    netgs::SvgSeries se;
    se.label = family;
    for (const std::vector<double>& row : t.rows) {
      se.x.push_back(row[0]);
      se.y.push_back(row[6]);
    }
    write_output(fl, "construct.svg",
                 netgs::render_svg_plot("family energy vs parameter", {se}));
  }
  std::cout << "construct: " << t.rows.size() << " members of " << family << "\n";
  return 0;
}

int cmd_verify(const CommonFlags& fl) {
  std::string corpus_path;
  json resolved;
  if (!fl.config_path.empty()) {
    const json cfg = load_config(fl);
    require_keys(cfg, {"corpus"}, "config");
    corpus_path = jstr(cfg, "corpus", "");
  } else if (std::filesystem::exists("data/gn_corpus.json")) {
    corpus_path = "data/gn_corpus.json";
  }
  resolved["corpus"] = corpus_path;

  std::vector<netgs::VerifyCheck> checks;
  std::vector<netgs::CorpusEntry> corpus;
  bool corpus_failed = false;
  if (!corpus_path.empty()) {
    try {
      corpus = netgs::load_gn_corpus(corpus_path);
    } catch (const std::exception& ex) {
      netgs::VerifyCheck c;
      c.name = "corpus/load";
      c.pass = false;
      c.detail = ex.what();
      checks.push_back(c);
      corpus_failed = true;
    }
  }
  std::vector<netgs::VerifyCheck> suite =
      netgs::verify_all(!corpus_path.empty() && !corpus_failed ? &corpus : nullptr);
  checks.insert(checks.end(), suite.begin(), suite.end());

  bool all = true;
  json rows = json::array();
  for (const netgs::VerifyCheck& c : checks) {
    all = all && c.pass;
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " (" << c.detail
              << ")\n";
    rows.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  json res;
  res["checks"] = rows;
  res["all_pass"] = all;
  write_output(fl, "verify.json", envelope("verify", resolved, res).dump(2) + "\n");
  std::cout << (all ? "verify: all checks passed" : "verify: FAILURES present") << "\n";
  return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized ground states with nonlinear point defects on metric graphs"};
  app.require_subcommand(1);

  CommonFlags fl;
  std::string command;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    CLI::Option* c = sub->add_option("--config", fl.config_path, "config file (JSON)");
    if (config_required) c->required();
    sub->add_option("--out", fl.out_dir, "output directory");
    sub->add_option("--seed", fl.seed, "override the solver seed")
        ->each([&](const std::string&) { fl.has_seed = true; });
    sub->add_option("--threads", fl.threads, "worker threads for sweeps");
    sub->add_option("--format", fl.format, "json|csv|svg")
        ->check(CLI::IsMember({"json", "csv", "svg"}));
    sub->callback([&, sub]() { command = sub->get_name(); });
  };
  add_common(app.add_subcommand("solve", "one ground-state run"), true);
  add_common(app.add_subcommand("sweep", "solver sweep over q and mass grids"), true);
  add_common(app.add_subcommand("threshold", "critical-mass bisection"), true);
  add_common(app.add_subcommand("qscan", "thresholds over an exponent grid"), true);
  add_common(app.add_subcommand("spectrum", "linear bottom eigenvalue"), true);
  add_common(app.add_subcommand("construct", "closed-form family sweep"), true);
  add_common(app.add_subcommand("verify", "run the invariant suite"), false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (command == "solve") return cmd_solve(fl);
    if (command == "sweep") return cmd_sweep(fl);
    if (command == "threshold") return cmd_threshold(fl);
    if (command == "qscan") return cmd_qscan(fl);
    if (command == "spectrum") return cmd_spectrum(fl);
    if (command == "construct") return cmd_construct(fl);
    if (command == "verify") return cmd_verify(fl);
    throw std::runtime_error("cli: no subcommand selected");
  } catch (const std::exception& ex) {
    json err;
    err["error"] = {{"message", ex.what()}};
    std::cerr << err.dump() << "\n";
    const std::string what = ex.what();
    const bool config_side = what.rfind("cli:", 0) == 0 || what.rfind("io:", 0) == 0;
    return config_side ? 2 : 1;
  }
}
