#include "fraclab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fraclab/csv.hpp"

namespace fraclab {

namespace {

using Keys = std::set<std::string>;

void reject_unknown(const ojson& obj, const Keys& known, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

double number(const ojson& obj, const char* key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
  return d;
}

Point point(const ojson& v, const std::string& where) {
  if (!v.is_array() || v.empty() || v.size() > 2)
    throw ConfigError(where + " must be an array of 1 or 2 numbers");
  Point p = Point::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ConfigError(where + " must contain numbers");
    p[static_cast<int>(i)] = v[i].get<double>();
  }
  return p;
}

std::vector<double> number_list(const ojson& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + " must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

RectangleShape rectangle(const ojson& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown(obj, {"lo", "hi", "shape"}, where);
  if (!obj.contains("lo") || !obj.contains("hi")) throw ConfigError(where + " needs lo and hi");
  RectangleShape r{point(obj["lo"], where + ".lo"), point(obj["hi"], where + ".hi")};
  if (!(r.lo.array() < r.hi.array()).all()) throw ConfigError(where + " needs lo < hi");
  return r;
}

DomainSpec parse_domain(const ojson& d, const std::filesystem::path& base) {
  if (!d.is_object()) throw ConfigError("domain must be an object");
  if (!d.contains("shape") || !d["shape"].is_string()) throw ConfigError("domain.shape missing");
  DomainSpec s;
  s.shape = d["shape"].get<std::string>();
  if (s.shape == "interval") {
    reject_unknown(d, {"shape", "a", "b"}, "domain");
    s.interval = {number(d, "a", "domain"), number(d, "b", "domain")};
    if (!(s.interval.a < s.interval.b)) throw ConfigError("domain needs a < b");
  } else if (s.shape == "disk") {
    reject_unknown(d, {"shape", "center", "radius"}, "domain");
    s.disk.center = d.contains("center") ? point(d["center"], "domain.center") : Point::Zero();
    s.disk.radius = number(d, "radius", "domain");
    if (!(s.disk.radius > 0.0)) throw ConfigError("domain.radius must be positive");
  } else if (s.shape == "rectangle") {
    s.rectangle = rectangle(d, "domain");
  } else if (s.shape == "union") {
    reject_unknown(d, {"shape", "rectangles"}, "domain");
    const auto& rs = d.at("rectangles");
    if (!rs.is_array() || rs.empty()) throw ConfigError("domain.rectangles must be a non-empty array");
    for (std::size_t i = 0; i < rs.size(); ++i)
      s.rectangles.push_back(rectangle(rs[i], "domain.rectangles[" + std::to_string(i) + "]"));
  } else if (s.shape == "mask") {
    reject_unknown(d, {"shape", "path"}, "domain");
    if (!d.contains("path") || !d["path"].is_string()) throw ConfigError("domain.path missing");
    s.mask_path = d["path"].get<std::string>();
    if (s.mask_path.is_relative()) s.mask_path = base / s.mask_path;
    if (!std::filesystem::exists(s.mask_path))
      throw ConfigError("mask file not found: " + s.mask_path.string());
  } else {
    throw ConfigError("unknown domain.shape '" + s.shape + "'");
  }
  return s;
}

SolverOptions parse_solver(const ojson& s) {
  if (!s.is_object()) throw ConfigError("solver must be an object");
  reject_unknown(s, {"max_iters", "tol_rel_q", "tol_grad", "step0", "backtrack_factor", "init", "seed"},
                 "solver");
  SolverOptions o;
  if (s.contains("max_iters")) {
    if (!s["max_iters"].is_number_integer()) throw ConfigError("solver.max_iters must be an integer");
    o.max_iters = s["max_iters"].get<int>();
  }
  if (s.contains("tol_rel_q")) o.tol_rel_q = number(s, "tol_rel_q", "solver");
  if (s.contains("tol_grad")) o.tol_grad = number(s, "tol_grad", "solver");
  if (s.contains("step0")) o.step0 = number(s, "step0", "solver");
  if (s.contains("backtrack_factor")) o.backtrack_factor = number(s, "backtrack_factor", "solver");
  if (s.contains("init")) {
    const std::string m = s["init"].get<std::string>();
    if (m == "distance") o.init_mode = InitMode::kDistance;
    else if (m == "random") o.init_mode = InitMode::kRandom;
    else throw ConfigError("solver.init must be 'distance' or 'random'");
  }
  if (s.contains("seed")) {
    const auto& v = s["seed"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw ConfigError("solver.seed must be a non-negative integer");
    o.seed = s["seed"].get<std::uint64_t>();
  }
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  return o;
}

bool on_lattice_box(const Point& q, const RectangleShape& r) {
  return q.x() > r.lo.x() && q.x() < r.hi.x() && q.y() > r.lo.y() && q.y() < r.hi.y();
}

GridDomain build_from_mask(const RunConfig& cfg, double h) {
  std::ifstream in(cfg.domain.mask_path);
  if (!in) throw ConfigError("cannot read mask file " + cfg.domain.mask_path.string());
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,y,inside", 0) != 0) throw ConfigError("mask file must start with header x,y,inside");
  std::set<std::pair<long, long>> cells;
  Box b{Point::Constant(1e300), Point::Constant(-1e300)};
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[3];
    for (auto& s : f) {
      if (!std::getline(ss, s, ',')) throw ConfigError("mask file line " + std::to_string(lineno) + " malformed");
    }
    double x, y;
    int flag;
    try {
      x = std::stod(f[0]);
      y = std::stod(f[1]);
      flag = std::stoi(f[2]);
    } catch (const std::exception&) {
      throw ConfigError("mask file line " + std::to_string(lineno) + " malformed");
    }
    if (flag == 0) continue;
    cells.insert({std::lround(x / h), std::lround(y / h)});
    b.lo = b.lo.cwiseMin(Point(x, y));
    b.hi = b.hi.cwiseMax(Point(x, y));
  }
  if (cells.empty()) throw ConfigError("mask file has no inside nodes");
  // the open set spans half a cell around each inside node
  b.lo.array() -= 0.5 * h;
  b.hi.array() += 0.5 * h;
  return build_mask2d(b, h, [&](const Point& q) {
    return cells.count({std::lround(q.x() / h), std::lround(q.y() / h)}) != 0;
  }, cfg.margin);
}

}  // namespace

RunConfig parse_config(const ojson& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc,
                 {"domain", "h", "margin", "alpha", "p", "p_list", "solver", "gamma1", "h_list",
                  "band_factor", "output_dir"},
                 "config");
  RunConfig c;
  try {
    if (doc.contains("domain")) c.domain = parse_domain(doc["domain"], base_dir);
    if (doc.contains("h")) c.h = number(doc, "h", "config");
    if (doc.contains("margin")) c.margin = number(doc, "margin", "config");
    if (!doc.contains("alpha")) throw ConfigError("config.alpha missing");
    c.alpha = number(doc, "alpha", "config");
    if (doc.contains("p") && !doc["p"].is_null()) c.p = number(doc, "p", "config");
    if (doc.contains("p_list")) c.p_list = number_list(doc["p_list"], "p_list");
    if (doc.contains("solver")) c.solver = parse_solver(doc["solver"]);
    if (doc.contains("gamma1")) {
      if (!doc["gamma1"].is_array()) throw ConfigError("gamma1 must be an array of points");
      for (std::size_t i = 0; i < doc["gamma1"].size(); ++i)
        c.gamma1.push_back(point(doc["gamma1"][i], "gamma1[" + std::to_string(i) + "]"));
    }
    if (doc.contains("h_list")) c.h_list = number_list(doc["h_list"], "h_list");
    if (doc.contains("band_factor")) c.band_factor = number(doc, "band_factor", "config");
    if (doc.contains("output_dir")) {
      c.output_dir = doc["output_dir"].get<std::string>();
      if (c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(c.h > 0.0)) throw ConfigError("h must be positive");
  if (!(c.margin >= 1.0)) throw ConfigError("margin must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  for (double h : c.h_list) {
    if (!(h > 0.0)) throw ConfigError("h_list entries must be positive");
  }
  if (!(c.band_factor >= 0.0)) throw ConfigError("band_factor must be non-negative");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  ojson doc;
  try {
    doc = ojson::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

ojson config_to_json(const RunConfig& c) {
  ojson d;
  d["shape"] = c.domain.shape;
  auto pt = [](const Point& p) { return ojson::array({p.x(), p.y()}); };
  if (c.domain.shape == "interval") {
    d["a"] = c.domain.interval.a;
    d["b"] = c.domain.interval.b;
  } else if (c.domain.shape == "disk") {
    d["center"] = pt(c.domain.disk.center);
    d["radius"] = c.domain.disk.radius;
  } else if (c.domain.shape == "rectangle") {
    d["lo"] = pt(c.domain.rectangle.lo);
    d["hi"] = pt(c.domain.rectangle.hi);
  } else if (c.domain.shape == "union") {
    d["rectangles"] = ojson::array();
    for (const auto& r : c.domain.rectangles) d["rectangles"].push_back({{"lo", pt(r.lo)}, {"hi", pt(r.hi)}});
  } else {
    d["path"] = c.domain.mask_path.string();
  }
  ojson j;
  j["domain"] = d;
  j["h"] = c.h;
  j["margin"] = c.margin;
  j["alpha"] = c.alpha;
  j["p"] = c.p ? ojson(*c.p) : ojson(nullptr);
  j["p_list"] = c.p_list;
  const char* init = c.solver.init_mode == InitMode::kRandom ? "random" : "distance";
  j["solver"] = {{"max_iters", c.solver.max_iters},   {"tol_rel_q", c.solver.tol_rel_q},
                 {"tol_grad", c.solver.tol_grad},     {"step0", c.solver.step0},
                 {"backtrack_factor", c.solver.backtrack_factor},
                 {"init", init},                      {"seed", c.solver.seed}};
  j["gamma1"] = ojson::array();
  for (const auto& g : c.gamma1) j["gamma1"].push_back(pt(g));
  j["h_list"] = c.h_list;
  j["band_factor"] = c.band_factor;
  return j;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config_to_json(cfg).dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

GridDomain build_domain(const RunConfig& cfg) { return build_domain(cfg, cfg.h); }

GridDomain build_domain(const RunConfig& cfg, double h) {
  const DomainSpec& d = cfg.domain;
  try {
    if (d.shape == "interval") return build_interval(d.interval.a, d.interval.b, h, cfg.margin);
    if (d.shape == "disk") return build_disk(d.disk.center, d.disk.radius, h, cfg.margin);
    if (d.shape == "rectangle") return build_rectangle(d.rectangle.lo, d.rectangle.hi, h, cfg.margin);
    if (d.shape == "union") {
      Box b{d.rectangles[0].lo, d.rectangles[0].hi};
      for (const auto& r : d.rectangles) {
        b.lo = b.lo.cwiseMin(r.lo);
        b.hi = b.hi.cwiseMax(r.hi);
      }
      return build_mask2d(b, h, [&](const Point& q) {
        for (const auto& r : d.rectangles) {
          if (on_lattice_box(q, r)) return true;
        }
        return false;
      }, cfg.margin);
    }
    return build_from_mask(cfg, h);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
}

void write_mask_csv(const GridDomain& dom, const std::filesystem::path& path) {
  CsvWriter w(path, {"x", "y", "inside"});
  for (Index i = 0; i < dom.num_nodes(); ++i) {
    const Point q = dom.coord(i);
    w.row({q.x(), q.y(), std::int64_t{dom.inside(i) ? 1 : 0}});
  }
}

}  // namespace fraclab
