#include "fraclab/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "fraclab/analytic1d.hpp"
#include "fraclab/csv.hpp"
#include "fraclab/infinity.hpp"
#include "fraclab/nonlocal.hpp"
#include "fraclab/psolver.hpp"
#include "fraclab/version.hpp"

namespace fraclab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

fs::path prepare_out(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string());
  return cfg.output_dir;
}

void write_json(const fs::path& path, const ojson& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

ojson point_json(const GridDomain& dom, Index node) {
  if (node < 0) return nullptr;
  const Point q = dom.coord(node);
  return dom.dim() == 1 ? ojson::array({q.x()}) : ojson::array({q.x(), q.y()});
}

FracParams checked_params(const RunConfig& cfg, double p, int n) {
  FracParams prm{cfg.alpha, p};
  try {
    prm.validate(n);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return prm;
}

Index node_near(const GridDomain& dom, const Point& q) {
  const double h = dom.h();
  Eigen::Vector2i local(static_cast<int>(std::lround(q.x() / h)) - dom.first_index().x(),
                        dom.dim() == 1 ? 0
                                       : static_cast<int>(std::lround(q.y() / h)) - dom.first_index().y());
  if ((local.array() < 0).any() || (local.array() >= dom.extent().array()).any())
    throw ConfigError("gamma1 point outside the lattice");
  return dom.node_at(local);
}

void write_function_csv(const fs::path& path, const GridFunction& u) {
  CsvWriter w(path, {"node", "x", "y", "u"});
  for (Index x : u.domain.inside_nodes()) {
    const Point q = u.domain.coord(x);
    w.row({x, q.x(), q.y(), u.values[x]});
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

RunReport cmd_eig(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  if (!cfg.p) throw ConfigError("eig needs a single p");
  const GridDomain dom = build_domain(cfg);
  const FracParams prm = checked_params(cfg, *cfg.p, dom.dim());
  const fs::path out = prepare_out(cfg);

  RunReport rep;
  rep.command = "eig";
  const EigenResult r = minimize_first(dom, prm, cfg.solver);
  const NonlocalOperator op(dom, prm);
  const EnergyBreakdown e = op.energy(op.restrict(r.u));

  ojson s;
  s["alpha"] = prm.alpha;
  s["p"] = prm.p;
  s["dim"] = dom.dim();
  s["h"] = dom.h();
  s["inside_nodes"] = dom.inside_nodes().size();
  s["lambda"] = r.lambda;
  s["lambda_root"] = std::pow(r.lambda, 1.0 / prm.p);
  s["converged"] = r.converged;
  s["iters"] = r.iters;
  s["final_grad_norm"] = r.final_grad_norm;
  s["narrow_range"] = prm.narrow_range(dom.dim());
  s["regular_range"] = prm.regular_range(dom.dim());
  s["energy"] = {{"interior", e.interior},     {"cross", e.cross},
                 {"tail_lower", e.tail_lower}, {"tail_upper", e.tail_upper},
                 {"rel_tail_width", op.relative_tail_width(op.restrict(r.u))}};
  if (prm.p == 2.0) {
    const EigenResult o = p2_oracle(dom, prm.alpha);
    s["oracle_lambda"] = o.lambda;
    s["oracle_diff"] = std::abs(r.lambda - o.lambda);
  }
  write_json(out / "eig.json", s);
  write_function_csv(out / "eigenfunction.csv", r.u);
  write_mask_csv(dom, out / "mask.csv");
  rep.files = {"eig.json", "eigenfunction.csv", "mask.csv"};
  rep.summary = s;
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

RunReport cmd_sweep(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  if (cfg.p_list.empty()) throw ConfigError("sweep needs a non-empty p_list");
  if (!strictly_decreasing({cfg.p_list.rbegin(), cfg.p_list.rend()}))
    throw ConfigError("p_list must be strictly ascending");
  const GridDomain dom = build_domain(cfg);
  for (double p : cfg.p_list) checked_params(cfg, p, dom.dim());
  const fs::path out = prepare_out(cfg);

  RunReport rep;
  rep.command = "sweep";
  const SweepTable t = p_sweep(dom, cfg.alpha, cfg.p_list, cfg.solver);
  {
    CsvWriter w(out / "sweep.csv",
                {"p", "lambda_p", "root", "target", "gap", "converged", "iters", "rel_tail_width"});
    for (const auto& row : t.rows) {
      w.row({row.p, row.lambda, row.root, t.target, std::abs(row.root - t.target),
             std::int64_t{row.converged}, std::int64_t{row.iters}, row.rel_tail_width});
    }
  }
  ojson s;
  s["alpha"] = t.alpha;
  s["h"] = dom.h();
  s["inradius"] = t.inradius;
  s["target"] = t.target;
  s["rows"] = ojson::array();
  std::vector<double> gaps;
  for (const auto& row : t.rows) {
    gaps.push_back(std::abs(row.root - t.target));
    s["rows"].push_back({{"p", row.p},
                         {"lambda_p", row.lambda},
                         {"root", row.root},
                         {"gap", gaps.back()},
                         {"converged", row.converged},
                         {"iters", row.iters},
                         {"rel_tail_width", row.rel_tail_width}});
  }
  s["final_gap"] = gaps.back();
  s["gap_strictly_decreasing"] = strictly_decreasing(gaps);
  write_json(out / "sweep.json", s);
  rep.files = {"sweep.csv", "sweep.json"};
  if (t.last_u) {
    write_function_csv(out / "last_eigenfunction.csv", *t.last_u);
    rep.files.push_back("last_eigenfunction.csv");
  }
  rep.summary = s;
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

RunReport cmd_infinity(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const GridDomain dom = build_domain(cfg);
  const double alpha = cfg.alpha;
  const GridFunction delta = distance_to_complement(dom);
  const NodeSet ridge = high_ridge(delta);
  NodeSet gamma1{dom, {}};
  if (cfg.gamma1.empty()) {
    gamma1 = ridge;
  } else {
    for (const Point& q : cfg.gamma1) gamma1.nodes.push_back(node_near(dom, q));
  }
  GridFunction u = [&] {
    try {
      return representation(dom, gamma1, alpha);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const fs::path out = prepare_out(cfg);
  const double lambda = lambda_infinity(dom, alpha);
  const InfinityReport ir = first_residual(u, alpha, lambda, delta);
  const GridFunction rho = distance_to_set(dom, gamma1);

  RunReport rep;
  rep.command = "infinity";
  {
    CsvWriter w(out / "representation.csv", {"node", "x", "y", "u", "delta", "rho"});
    for (Index x : dom.inside_nodes()) {
      const Point q = dom.coord(x);
      w.row({x, q.x(), q.y(), u.values[x], delta.values[x], rho.values[x]});
    }
  }
  {
    CsvWriter w(out / "infinity_report.csv",
                {"node", "u", "l_plus", "l_minus", "branch", "residual", "l_plus_witness",
                 "l_minus_witness", "l_minus_analytic", "in_collar"});
    for (const auto& n : ir.nodes) {
      w.row({n.node, n.u, n.plus.value, n.minus.value, std::string(branch_name(n.branch)),
             n.residual, n.plus.witness, n.minus.witness, n.l_minus_analytic,
             std::int64_t{n.in_collar}});
    }
  }
  ojson s;
  s["alpha"] = alpha;
  s["h"] = dom.h();
  s["inradius"] = inscribed_radius(delta);
  s["lambda_infinity"] = lambda;
  s["r2"] = r2_radius(dom);
  s["ridge_nodes"] = ridge.nodes.size();
  s["gamma1_nodes"] = gamma1.nodes.size();
  s["sup_residual"] = ir.sup_residual;
  s["sup_residual_interior"] = ir.sup_residual_interior;
  auto worst = [&](Index node) -> ojson {
    if (node < 0) return nullptr;
    const auto it = std::find_if(ir.nodes.begin(), ir.nodes.end(),
                                 [&](const InfinityNode& n) { return n.node == node; });
    return {{"node", node},
            {"x", point_json(dom, node)},
            {"residual", it->residual},
            {"branch", branch_name(it->branch)},
            {"l_plus_witness", point_json(dom, it->plus.witness)},
            {"l_minus_witness", point_json(dom, it->minus.witness)}};
  };
  s["worst"] = worst(ir.worst_node);
  s["worst_interior"] = worst(ir.worst_node_interior);
  write_json(out / "infinity.json", s);
  rep.files = {"representation.csv", "infinity_report.csv", "infinity.json"};
  rep.summary = s;
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

RunReport cmd_verify1d(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const auto& d = cfg.domain;
  if (d.shape != "interval" || d.interval.a != 0.0 || d.interval.b != 2.0)
    throw ConfigError("verify1d works on the interval (0, 2)");
  const double alpha = cfg.alpha;
  const std::vector<double> hs =
      cfg.h_list.empty() ? std::vector<double>{1.0 / 50, 1.0 / 100, 1.0 / 200, 1.0 / 400} : cfg.h_list;
  const fs::path out = prepare_out(cfg);
  const std::vector<Example1D<double>> examples{first_1d(alpha), second_1d(alpha), third_1d(alpha)};

  RunReport rep;
  rep.command = "verify1d";

  ojson constants = ojson::array();
  for (const auto& ex : examples) {
    ojson iv = ojson::array();
    for (const auto& [l, r] : ex.nodal_intervals()) iv.push_back({l, r});
    constants.push_back({{"example", example_name(ex.kind)},
                         {"alpha", ex.alpha},
                         {"a", std::isnan(ex.a) ? ojson(nullptr) : ojson(ex.a)},
                         {"lambda", ex.lambda},
                         {"nodal_intervals", iv}});
  }
  write_json(out / "constants.json", constants);
  rep.files.push_back("constants.json");

  const GridDomain sample_dom = build_interval(0.0, 2.0, cfg.h, cfg.margin);
  for (const auto& ex : examples) {
    const std::string name = std::string("sample_") + example_name(ex.kind) + ".csv";
    const GridFunction u = sample(ex, sample_dom);
    CsvWriter w(out / name, {"x", "u"});
    for (Index x : sample_dom.inside_nodes()) w.row({sample_dom.coord(x).x(), u.values[x]});
    rep.files.push_back(name);
  }

  ojson conv = ojson::object();
  {
    CsvWriter w(out / "convergence.csv",
                {"example", "h", "sup_residual", "sup_residual_interior", "band", "worst_x"});
    std::vector<std::vector<double>> sups(examples.size());
    for (double h : hs) {
      const GridDomain dom = build_interval(0.0, 2.0, h, cfg.margin);
      const GridFunction delta = distance_to_complement(dom);
      for (std::size_t k = 0; k < examples.size(); ++k) {
        const auto& ex = examples[k];
        const GridFunction u = sample(ex, dom);
        const InfinityReport r = ex.kind == ExampleKind::kFirst
                                     ? first_residual(u, alpha, ex.lambda, delta)
                                     : higher_residual(u, alpha, ex.lambda, delta, cfg.band_factor);
        w.row({std::string(example_name(ex.kind)), h, r.sup_residual, r.sup_residual_interior,
               r.band, dom.coord(r.worst_node).x()});
        sups[k].push_back(r.sup_residual);
      }
    }
    for (std::size_t k = 0; k < examples.size(); ++k) {
      const auto& v = sups[k];
      ojson e;
      e["sup_residual"] = v;
      e["decreasing"] = strictly_decreasing(v);
      // log2 of the last refinement ratio, per halving of h
      if (v.size() >= 2 && v[v.size() - 1] > 0.0 && v[v.size() - 2] > 0.0) {
        e["empirical_rate"] = std::log(v[v.size() - 2] / v.back()) /
                              std::log(hs[hs.size() - 2] / hs.back());
      } else {
        e["empirical_rate"] = nullptr;
      }
      conv[example_name(examples[k].kind)] = e;
    }
  }
  rep.files.push_back("convergence.csv");

  // Qualitative claims
  const auto& second = examples[1];
  const auto& third = examples[2];
  auto lambda_inf_interval = [&](double l, double r) { return std::pow(0.5 * (r - l), -alpha); };
  auto exceeds_nodal = [&](const Example1D<double>& ex) {
    for (const auto& [l, r] : ex.nodal_intervals()) {
      if (!(ex.lambda > lambda_inf_interval(l, r))) return false;
    }
    return true;
  };
  const auto tiv = third.nodal_intervals();
  const double r2 = 0.5;  // (0, 2) holds two disjoint intervals of length 1
  ojson verdicts;
  verdicts["max_left_of_midpoint"] = second.a < 0.5;
  verdicts["unequal_nodal_lengths"] =
      (tiv[1].second - tiv[1].first) > (tiv[0].second - tiv[0].first);
  verdicts["lambda_exceeds_nodal_second"] = exceeds_nodal(second);
  verdicts["lambda_exceeds_nodal_third"] = exceeds_nodal(third);
  verdicts["lambda_second_at_least_r2_bound"] = second.lambda >= std::pow(r2, -alpha);
  write_json(out / "verdicts.json", verdicts);
  rep.files.push_back("verdicts.json");

  ojson s;
  s["alpha"] = alpha;
  s["h_list"] = hs;
  s["constants"] = constants;
  s["convergence"] = conv;
  s["verdicts"] = verdicts;
  rep.summary = s;
  rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

void write_report(RunReport& report, const RunConfig& cfg) {
  const fs::path out = prepare_out(cfg);
  report.files.push_back("report.json");
  report.files.push_back("timing.json");
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash(cfg);
  ojson j;
  j["command"] = report.command;
  j["version"] = kVersion;
  j["config"] = config_to_json(cfg);
  j["config_hash"] = hash.str();
  j["files"] = report.files;
  j["summary"] = report.summary;
  write_json(out / "report.json", j);
  write_json(out / "timing.json", {{"command", report.command}, {"wall_seconds", report.wall_seconds}});
}

}  // namespace fraclab
